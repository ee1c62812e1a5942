#include "atom/network.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace atom {

const char* to_string(ConnectStatus status) {
  switch (status) {
    case ConnectStatus::Ok: return "ok";
    case ConnectStatus::UnknownNode: return "unknown node";
    case ConnectStatus::SelfEdge: return "self edge";
    case ConnectStatus::DuplicateEdge: return "duplicate edge";
    case ConnectStatus::MutualEdge: return "mutual edge";
    case ConnectStatus::BannedPeer: return "banned peer";
    case ConnectStatus::MonitorTarget: return "monitor target";
  }
  return "?";
}

namespace {

std::string id_str(NodeId id) { return std::to_string(id.value); }

// Partial Fisher-Yates: the first k entries become a uniform k-subset.
std::vector<NodeId> sample_without_replacement(std::vector<NodeId> pool, std::size_t k, Rng& rng) {
  k = std::min(k, pool.size());
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

const Topology::NodeInfo& Topology::info(NodeId node) const {
  auto it = nodes_.find(node);
  if (it == nodes_.end()) throw TopologyError(TopologyError::Kind::UnknownNode, "unknown node " + id_str(node));
  return it->second;
}

Topology::NodeInfo& Topology::info(NodeId node) {
  auto it = nodes_.find(node);
  if (it == nodes_.end()) throw TopologyError(TopologyError::Kind::UnknownNode, "unknown node " + id_str(node));
  return it->second;
}

Role Topology::role(NodeId node) const { return info(node).role; }

bool Topology::is_monitor(NodeId node) const {
  auto it = nodes_.find(node);
  return it != nodes_.end() && it->second.role == Role::Monitor;
}

bool Topology::has_edge(NodeId from, NodeId to) const { return edges_.count(Edge{from, to}) != 0; }

std::size_t Topology::peer_out_degree(const NodeInfo& n) const {
  std::size_t deg = 0;
  for (NodeId p : n.out) {
    if (!is_monitor(p)) ++deg;
  }
  return deg;
}

void Topology::insert_edge(NodeId from, NodeId to) {
  edges_.insert(Edge{from, to});
  nodes_.at(from).out.insert(to);
  nodes_.at(to).in.insert(from);
  changes_.push_back(EdgeChange{Edge{from, to}, true});
}

void Topology::erase_edge(NodeId from, NodeId to) {
  edges_.erase(Edge{from, to});
  nodes_.at(from).out.erase(to);
  nodes_.at(to).in.erase(from);
  changes_.push_back(EdgeChange{Edge{from, to}, false});
}

NodeId Topology::add_monitor() {
  const NodeId id{next_id_++};
  nodes_.emplace(id, NodeInfo{Role::Monitor, {}, {}, {}});
  ++monitor_count_;
  for (auto& [peer, node] : nodes_) {
    if (node.role != Role::Monitor) insert_edge(id, peer);
  }
  return id;
}

NodeId Topology::add_node(Role role, Rng& rng, bool bootstrap) {
  if (role == Role::Monitor) throw TopologyError(TopologyError::Kind::NotAllowed, "use add_monitor for monitors");
  std::vector<NodeId> pool = peers();
  if (pool.size() < target_outbound_ && !bootstrap) {
    throw TopologyError(TopologyError::Kind::InsufficientPeers,
                        "need " + std::to_string(target_outbound_) + " eligible peers, have " +
                            std::to_string(pool.size()));
  }
  const NodeId id{next_id_++};
  nodes_.emplace(id, NodeInfo{role, {}, {}, {}});
  for (NodeId target : sample_without_replacement(std::move(pool), target_outbound_, rng)) insert_edge(id, target);
  for (NodeId m : monitors()) insert_edge(m, id);
  return id;
}

ChurnEvent Topology::remove_node(NodeId node, Rng& rng) {
  NodeInfo& n = info(node);
  if (n.role == Role::Monitor) throw TopologyError(TopologyError::Kind::NotAllowed, "monitors cannot be removed");

  ChurnEvent event{ChurnEvent::Kind::NodeRemoved, node, n.role, {}};
  std::vector<NodeId> orphans;
  for (NodeId p : n.in) {
    if (!is_monitor(p)) orphans.push_back(p);
  }
  for (NodeId p : NodeSet(n.in)) erase_edge(p, node);
  for (NodeId p : NodeSet(n.out)) erase_edge(node, p);
  nodes_.erase(node);

  for (NodeId orphan : orphans) {
    std::vector<NodeId> pool = eligible_targets(orphan);
    if (pool.empty()) continue;
    const NodeId target = pool[rng.uniform_index(pool.size())];
    insert_edge(orphan, target);
    event.rewired.push_back(Rewire{orphan, target});
  }
  return event;
}

ConnectStatus Topology::check_connection(NodeId from, NodeId to) const {
  auto f = nodes_.find(from);
  auto t = nodes_.find(to);
  if (f == nodes_.end() || t == nodes_.end()) return ConnectStatus::UnknownNode;
  if (from == to) return ConnectStatus::SelfEdge;
  if (t->second.role == Role::Monitor) return ConnectStatus::MonitorTarget;
  if (has_edge(from, to)) return ConnectStatus::DuplicateEdge;
  if (has_edge(to, from)) return ConnectStatus::MutualEdge;
  if (f->second.banned.count(to) != 0 || t->second.banned.count(from) != 0) return ConnectStatus::BannedPeer;
  return ConnectStatus::Ok;
}

ConnectStatus Topology::open_connection(NodeId from, NodeId to) {
  const ConnectStatus status = check_connection(from, to);
  if (status == ConnectStatus::Ok) insert_edge(from, to);
  return status;
}

bool Topology::close_connection(NodeId from, NodeId to) {
  if (!has_edge(from, to)) return false;
  erase_edge(from, to);
  return true;
}

void Topology::ban(NodeId a, NodeId b) {
  info(a).banned.insert(b);
  info(b).banned.insert(a);
}

bool Topology::is_banned(NodeId a, NodeId b) const {
  auto it = nodes_.find(a);
  if (it != nodes_.end() && it->second.banned.count(b) != 0) return true;
  it = nodes_.find(b);
  return it != nodes_.end() && it->second.banned.count(a) != 0;
}

std::vector<NodeId> Topology::replenish(NodeId node, Rng& rng) {
  std::vector<NodeId> added;
  const NodeInfo& n = info(node);
  if (n.role == Role::Monitor) return added;
  while (peer_out_degree(n) < target_outbound_) {
    std::vector<NodeId> pool = eligible_targets(node);
    if (pool.empty()) break;
    const NodeId target = pool[rng.uniform_index(pool.size())];
    insert_edge(node, target);
    added.push_back(target);
  }
  return added;
}

std::vector<NodeId> Topology::eligible_targets(NodeId from) const {
  std::vector<NodeId> out;
  for (const auto& [id, node] : nodes_) {
    if (node.role != Role::Monitor && check_connection(from, id) == ConnectStatus::Ok) out.push_back(id);
  }
  return out;
}

NodeSet Topology::peer_outbound(NodeId node) const {
  NodeSet out;
  for (NodeId p : info(node).out) {
    if (!is_monitor(p)) out.insert(p);
  }
  return out;
}

NodeSet Topology::peer_inbound(NodeId node) const {
  NodeSet in;
  for (NodeId p : info(node).in) {
    if (!is_monitor(p)) in.insert(p);
  }
  return in;
}

std::vector<NodeId> Topology::monitors() const {
  std::vector<NodeId> out;
  for (const auto& [id, node] : nodes_) {
    if (node.role == Role::Monitor) out.push_back(id);
  }
  return out;
}

std::vector<NodeId> Topology::peers() const {
  std::vector<NodeId> out;
  for (const auto& [id, node] : nodes_) {
    if (node.role != Role::Monitor) out.push_back(id);
  }
  return out;
}

std::vector<NodeId> Topology::peers(Role role) const {
  std::vector<NodeId> out;
  for (const auto& [id, node] : nodes_) {
    if (node.role == role) out.push_back(id);
  }
  return out;
}

std::size_t Topology::count(Role role) const {
  std::size_t n = 0;
  for (const auto& [id, node] : nodes_) {
    if (node.role == role) ++n;
  }
  return n;
}

EdgeSet Topology::peer_edges() const {
  EdgeSet out;
  for (const Edge& e : edges_) {
    if (!is_monitor(e.from)) out.insert(e);
  }
  return out;
}

std::vector<EdgeChange> Topology::take_changes() {
  std::vector<EdgeChange> out;
  out.swap(changes_);
  return out;
}

void Topology::audit() const {
  auto fail = [](const std::string& what) {
    throw TopologyError(TopologyError::Kind::InvariantViolated, what);
  };
  std::size_t adjacency_edges = 0;
  for (const auto& [id, node] : nodes_) {
    adjacency_edges += node.out.size();
    for (NodeId p : node.out) {
      if (!nodes_.count(p)) fail("dangling edge " + id_str(id) + "->" + id_str(p));
      if (p == id) fail("self edge at " + id_str(id));
      if (!edges_.count(Edge{id, p})) fail("adjacency/edge-set mismatch at " + id_str(id));
      if (!nodes_.at(p).in.count(id)) fail("missing inbound record " + id_str(id) + "->" + id_str(p));
    }
  }
  if (adjacency_edges != edges_.size()) fail("edge count mismatch");
  for (const Edge& e : edges_) {
    if (e.from == e.to) fail("self edge");
    if (has_edge(e.to, e.from)) fail("mutual edge " + id_str(e.from) + "<->" + id_str(e.to));
    if (is_monitor(e.to)) fail("edge targets monitor " + id_str(e.to));
    if (is_banned(e.from, e.to)) fail("edge between banned pair " + id_str(e.from) + "->" + id_str(e.to));
  }
  for (NodeId m : monitors()) {
    for (NodeId p : peers()) {
      if (!has_edge(m, p)) fail("monitor " + id_str(m) + " missing edge to " + id_str(p));
    }
  }
}

void Topology::write_edge_list(std::ostream& out) const {
  for (const Edge& e : peer_edges()) out << e.from << ' ' << e.to << '\n';
}

void Topology::write_dot(std::ostream& out) const {
  out << "digraph overlay {\n";
  for (const auto& [id, node] : nodes_) {
    if (node.role == Role::Monitor) continue;
    out << "  n" << id << " [label=\"" << id << "\"";
    if (node.role == Role::Malicious) out << ", color=red";
    out << "];\n";
  }
  for (const Edge& e : peer_edges()) out << "  n" << e.from << " -> n" << e.to << ";\n";
  out << "}\n";
}

ChurnEvent churn_tick(Topology& topo, Rng& rng, const ChurnConfig& cfg) {
  const std::size_t population = topo.population();
  bool add = false;
  if (population < cfg.target_population) {
    add = true;
  } else if (population > cfg.target_population) {
    add = false;
  } else {
    add = rng.uniform_index(2) == 0;
  }
  if (population <= topo.target_outbound()) add = true;

  const auto malicious = static_cast<double>(topo.count(Role::Malicious));
  if (add) {
    const double desired = std::floor(cfg.malicious_fraction * static_cast<double>(population + 1) + 0.5);
    const Role role = malicious < desired ? Role::Malicious : Role::Honest;
    const NodeId id = topo.add_node(role, rng);
    return ChurnEvent{ChurnEvent::Kind::NodeAdded, id, role, {}};
  }

  std::vector<NodeId> candidates = topo.peers();
  NodeId victim = candidates[rng.uniform_index(candidates.size())];
  const double desired_after = cfg.malicious_fraction * static_cast<double>(population - 1);
  const double malicious_after = malicious - (topo.role(victim) == Role::Malicious ? 1.0 : 0.0);
  if (std::abs(malicious_after - desired_after) > 1.0) {
    const Role other = topo.role(victim) == Role::Malicious ? Role::Honest : Role::Malicious;
    std::vector<NodeId> pool = topo.peers(other);
    if (!pool.empty()) victim = pool[rng.uniform_index(pool.size())];
  }
  return topo.remove_node(victim, rng);
}

}  // namespace atom
