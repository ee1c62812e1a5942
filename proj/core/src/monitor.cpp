#include "atom/monitor.hpp"

#include <algorithm>
#include <iterator>

namespace atom {

namespace {

std::string id_str(NodeId id) { return std::to_string(id.value); }

}  // namespace

void LocalSnapshot::add_node(NodeId node) {
  if (nodes_.insert(node).second) freq_[node] = bounds_.initial;
}

std::size_t LocalSnapshot::remove_node(NodeId node) {
  nodes_.erase(node);
  freq_.erase(node);
  return std::erase_if(edges_, [node](const Edge& e) { return e.from == node || e.to == node; });
}

NodeSet LocalSnapshot::outbound_of(NodeId node) const {
  NodeSet out;
  for (auto it = edges_.lower_bound(Edge{node, NodeId{0}}); it != edges_.end() && it->from == node; ++it) {
    out.insert(it->to);
  }
  return out;
}

NodeSet LocalSnapshot::inbound_of(NodeId node) const {
  NodeSet in;
  for (const Edge& e : edges_) {
    if (e.to == node) in.insert(e.from);
  }
  return in;
}

int LocalSnapshot::frequency(NodeId node) const {
  auto it = freq_.find(node);
  if (it == freq_.end()) throw MonitorError(MonitorError::Kind::UnknownTarget, "unknown target " + id_str(node));
  return it->second;
}

void LocalSnapshot::set_frequency(NodeId node, int seconds) {
  auto it = freq_.find(node);
  if (it == freq_.end()) throw MonitorError(MonitorError::Kind::UnknownTarget, "unknown target " + id_str(node));
  it->second = std::clamp(seconds, bounds_.min, bounds_.max);
}

int update_topology(LocalSnapshot& snap, NodeId target, const NodeSet& verified) {
  if (!snap.contains(target)) throw MonitorError(MonitorError::Kind::UnknownTarget, "unknown target " + id_str(target));
  return update_topology(snap, target, verified, snap.outbound_of(target));
}

int update_topology(LocalSnapshot& snap, NodeId target, const NodeSet& verified, const NodeSet& prior) {
  if (!snap.contains(target)) throw MonitorError(MonitorError::Kind::UnknownTarget, "unknown target " + id_str(target));
  NodeSet next;
  for (NodeId p : verified) {
    if (p != target && snap.contains(p)) next.insert(p);
  }
  for (NodeId p : snap.outbound_of(target)) {
    if (next.count(p) == 0) snap.erase_edge(Edge{target, p});
  }
  int changes = 0;
  for (NodeId p : next) {
    snap.insert_edge(Edge{target, p});
    if (prior.count(p) == 0) ++changes;
  }
  // A prior peer that left during the round is gone from the snapshot
  // already but still counts as a change of target's connections.
  for (NodeId p : prior) {
    if (next.count(p) == 0) ++changes;
  }
  return changes;
}

void adjust_frequency(LocalSnapshot& snap, NodeId target, int changes) {
  const int f = snap.frequency(target);
  const FrequencyBounds& b = snap.bounds();
  if (changes == 0 && f < b.max) {
    snap.set_frequency(target, f + 1);
  } else if (changes > 1) {
    snap.set_frequency(target, std::max(b.min, f - changes));
  }
}

Duration schedule_next_round(const LocalSnapshot& snap, NodeId target, Rng& rng, SchedulingMode mode) {
  const int f = snap.frequency(target);
  const FrequencyBounds& b = snap.bounds();
  std::int64_t seconds = f;
  if (mode == SchedulingMode::Poisson) {
    seconds = std::clamp<std::int64_t>(sample_poisson(rng, static_cast<double>(f)), b.min, b.max);
  }
  return Duration{1000 * seconds};
}

MonitorState::MonitorState(NodeId id, FrequencyBounds bounds, Duration timeout, bool accept_on_receipt)
    : id_(id), timeout_(timeout), accept_on_receipt_(accept_on_receipt), snapshot_(bounds) {}

std::pair<Marker, const PeevRound&> MonitorState::start_peev_round(NodeId target, Rng& rng, SimTime now) {
  if (!snapshot_.contains(target)) throw MonitorError(MonitorError::Kind::UnknownTarget, "unknown target " + id_str(target));
  if (open_.count(target) != 0) {
    throw MonitorError(MonitorError::Kind::RoundAlreadyOpen, "round already open for " + id_str(target));
  }
  const Marker marker{target, id_, rng()};
  auto [it, inserted] =
      open_.emplace(target, PeevRound{marker, now, timeout_, {}, snapshot_.outbound_of(target), PeevRound::State::Open});
  return {marker, it->second};
}

bool MonitorState::receive_marker(NodeId from, const Marker& marker) {
  auto it = open_.find(marker.target);
  if (it == open_.end()) return false;
  PeevRound& round = it->second;
  // The target cannot be its own outbound peer, whatever it sends back.
  if (round.state != PeevRound::State::Open || !(round.marker == marker) || from == marker.target) return false;
  round.collected.insert(from);
  if (accept_on_receipt_ && snapshot_.contains(from)) {
    snapshot_.insert_edge(Edge{marker.target, from});
  }
  return true;
}

NodeSet MonitorState::close_peev_round(NodeId target) {
  auto it = open_.find(target);
  if (it == open_.end()) throw MonitorError(MonitorError::Kind::NoOpenRound, "no open round for " + id_str(target));
  it->second.state = PeevRound::State::Closed;
  NodeSet collected = std::move(it->second.collected);
  open_.erase(it);
  ++completed_[target];
  return collected;
}

const PeevRound* MonitorState::open_round(NodeId target) const {
  auto it = open_.find(target);
  return it == open_.end() ? nullptr : &it->second;
}

VerifiedMsg MonitorState::build_verified_message(NodeId target) const {
  VerifiedMsg msg;
  msg.verified_peers = snapshot_.outbound_of(target);
  const NodeSet in = snapshot_.inbound_of(target);
  msg.verified_peers.insert(in.begin(), in.end());
  return msg;
}

void MonitorState::handle_node_arrival(NodeId node) { snapshot_.add_node(node); }

void MonitorState::handle_node_departure(NodeId node) {
  snapshot_.remove_node(node);
  open_.erase(node);
  completed_.erase(node);
}

int MonitorState::rounds_completed(NodeId target) const {
  auto it = completed_.find(target);
  return it == completed_.end() ? 0 : it->second;
}

std::vector<std::size_t> verification_set(std::span<const LocalSnapshot> locals, Edge edge) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < locals.size(); ++i) {
    if (locals[i].edges().count(edge) != 0) out.push_back(i);
  }
  return out;
}

GlobalSnapshot compute_global_snapshot(std::span<const LocalSnapshot> locals) {
  GlobalSnapshot global;
  global.monitor_count = locals.size();
  std::map<Edge, std::size_t> confirmations;
  for (const LocalSnapshot& local : locals) {
    global.nodes.insert(local.nodes().begin(), local.nodes().end());
    for (const Edge& e : local.edges()) ++confirmations[e];
  }
  for (const auto& [edge, count] : confirmations) {
    if (2 * count > locals.size()) global.edges.insert(global.edges.end(), edge);
  }
  return global;
}

int max_error_window(std::span<const int> frequencies) {
  if (frequencies.empty()) throw MonitorError(MonitorError::Kind::EmptyInput, "max_error_window: no frequencies");
  std::vector<int> sorted(frequencies.begin(), frequencies.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted[sorted.size() / 2];
}

}  // namespace atom
