#include "atom/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace atom {

namespace {

std::string id_str(NodeId id) { return std::to_string(id.value); }

}  // namespace

Simulation::Simulation(ExperimentConfig cfg)
    : cfg_(std::move(cfg)),
      churn_rng_(Rng(cfg_.seed).derive("churn")),
      schedule_rng_(Rng(cfg_.seed).derive("scheduling")),
      topology_rng_(Rng(cfg_.seed).derive("topology")),
      marker_rng_(Rng(cfg_.seed).derive("markers")),
      adversary_rng_(Rng(cfg_.seed).derive("adversary")),
      latency_seed_(Rng(cfg_.seed).derive("latency")()),
      topo_(cfg_.outbound_per_node) {
  require_valid(cfg_);

  policy_.mode = cfg_.adversary_mode;
  policy_.behavior = *behavior_from_int(cfg_.adversary_behavior);
  policy_.forward_to_honest_outbound = !cfg_.full_hiding;

  for (std::size_t i = 0; i < cfg_.monitors; ++i) {
    const NodeId id = topo_.add_monitor();
    monitor_index_[id] = monitors_.size();
    monitor_ids_.insert(id);
    monitors_.emplace_back(id, cfg_.bounds_for(i), Duration{cfg_.peev_timeout_ms}, cfg_.accept_on_receipt);
  }

  // Which bootstrap slots are malicious: a uniform subset of the right size.
  const auto malicious =
      static_cast<std::size_t>(std::floor(cfg_.malicious_pct * static_cast<double>(cfg_.nodes) + 0.5));
  std::vector<bool> is_malicious(cfg_.nodes, false);
  std::vector<std::size_t> slots(cfg_.nodes);
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
  for (std::size_t i = 0; i < malicious; ++i) {
    const std::size_t j = i + topology_rng_.uniform_index(slots.size() - i);
    std::swap(slots[i], slots[j]);
    is_malicious[slots[i]] = true;
  }

  std::vector<NodeId> order;
  for (std::size_t i = 0; i < cfg_.nodes; ++i) {
    order.push_back(topo_.add_node(is_malicious[i] ? Role::Malicious : Role::Honest, topology_rng_, true));
  }
  for (NodeId n : order) topo_.replenish(n, topology_rng_);
  for (NodeId n : order) admit(n);
  sync();

  if (cfg_.churn) engine_.schedule(sample_exponential(churn_rng_, cfg_.variability()), ChurnTick{});
  engine_.schedule(Duration{cfg_.probe_every_ms}, ProbeTick{});
  engine_.schedule(Duration{cfg_.duration_ms}, SimEnd{});
}

void Simulation::admit(NodeId node) {
  if (topo_.role(node) == Role::Malicious) policy_.colluders->insert(node);
  for (MonitorState& m : monitors_) {
    m.handle_node_arrival(node);
    engine_.schedule(Duration{0}, PeevRoundStart{m.id(), node});
  }
}

MonitorState* Simulation::monitor(NodeId id) {
  auto it = monitor_index_.find(id);
  return it == monitor_index_.end() ? nullptr : &monitors_[it->second];
}

void Simulation::sync() {
  for (NodeId n : topo_.peers()) {
    if (states_.count(n) == 0) states_.emplace(n, NodeState(n, monitor_ids_, cfg_.safe_rounds));
  }
  for (const EdgeChange& change : topo_.take_changes()) {
    const Edge& e = change.edge;
    if (monitor_ids_.count(e.from) != 0) continue;
    auto from = states_.find(e.from);
    auto to = states_.find(e.to);
    if (change.added) {
      if (from != states_.end()) from->second.connect(e.to, Direction::Outbound);
      if (to != states_.end()) to->second.connect(e.from, Direction::Inbound);
    } else {
      if (from != states_.end()) from->second.disconnect(e.to);
      if (to != states_.end()) to->second.disconnect(e.from);
    }
  }
  for (auto it = states_.begin(); it != states_.end();) {
    if (!topo_.contains(it->first)) {
      memories_.erase(it->first);
      it = states_.erase(it);
    } else {
      ++it;
    }
  }
}

Duration Simulation::link_latency(NodeId a, NodeId b) const {
  const std::uint64_t lo = std::min(a.value, b.value);
  const std::uint64_t hi = std::max(a.value, b.value);
  const std::uint64_t h = splitmix64(latency_seed_ ^ splitmix64((lo << 32) ^ hi));
  const auto span = static_cast<std::uint64_t>(cfg_.latency_hi_ms - cfg_.latency_lo_ms + 1);
  return Duration{cfg_.latency_lo_ms + static_cast<std::int64_t>(h % span)};
}

void Simulation::send(NodeId from, NodeId to, Message message) {
  if (!topo_.connected(from, to)) {
    ++dropped_;
    return;
  }
  engine_.schedule(link_latency(from, to), MessageDelivery{from, to, std::move(message)});
}

void Simulation::run_until(SimTime end) {
  engine_.run_until(end, [this](const Event& e) { handle(e); });
}

void Simulation::handle(const Event& event) {
  std::visit(
      [this](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MessageDelivery>) {
          deliver(p);
        } else if constexpr (std::is_same_v<T, PeevRoundStart>) {
          start_round(p.monitor, p.target);
        } else if constexpr (std::is_same_v<T, PeevTimeout>) {
          finish_round(p);
        } else if constexpr (std::is_same_v<T, ChurnTick>) {
          churn();
        } else if constexpr (std::is_same_v<T, ProbeTick>) {
          probe();
        }
      },
      event.payload);
}

void Simulation::deliver(const MessageDelivery& d) {
  // A connection closed while the message was in flight loses it.
  if (!topo_.connected(d.from, d.to)) {
    ++dropped_;
    return;
  }
  if (const auto* marker = std::get_if<Marker>(&d.message)) {
    deliver_marker(d.from, d.to, *marker);
  } else {
    deliver_verified(d.from, d.to, std::get<VerifiedMsg>(d.message));
  }
}

void Simulation::deliver_marker(NodeId from, NodeId to, const Marker& marker) {
  if (MonitorState* m = monitor(to)) {
    m->receive_marker(from, marker);
    return;
  }
  auto& counters = ledger_.at(to);
  if (monitor_ids_.count(from) != 0) {
    ++counters.marker_from_monitor;
  } else {
    ++counters.marker_from_peer;
  }

  const NodeState& state = states_.at(to);
  std::vector<SendAction> actions;
  if (topo_.role(to) == Role::Malicious) {
    actions = malicious_handle_marker(state, policy_, memories_[to], from, marker, adversary_rng_);
  } else {
    actions = handle_marker(state, from, marker);
  }
  for (const SendAction& a : actions) {
    if (monitor_ids_.count(a.to) != 0) {
      ++counters.marker_to_monitor;
    } else {
      ++counters.marker_forwarded;
    }
    send(to, a.to, a.marker);
  }
}

void Simulation::deliver_verified(NodeId from, NodeId to, const VerifiedMsg& verified) {
  if (monitor(to) != nullptr) return;
  ++ledger_.at(to).verified;

  NodeState& state = states_.at(to);
  if (topo_.role(to) == Role::Malicious) {
    malicious_handle_verified(state, policy_, from, verified);
    return;
  }
  for (const DisconnectAction& a : handle_verified(state, from, verified)) enforce_disconnect(to, a.peer);
}

void Simulation::enforce_disconnect(NodeId by, NodeId peer) {
  if (!topo_.connected(by, peer)) return;
  const Edge edge = topo_.has_edge(by, peer) ? Edge{by, peer} : Edge{peer, by};
  std::ostringstream detail;
  detail << "reputation=" << states_.at(by).reputation.reputation(peer);
  topo_.close_connection(edge.from, edge.to);
  topo_.ban(by, peer);
  sync();
  disconnects_.push_back(DisconnectRecord{engine_.now(), by, peer, edge});
  engine_.trace_note("disconnect", id_str(by), id_str(peer), detail.str());
  // Whoever lost an outbound connection opens a replacement.
  topo_.replenish(edge.from, topology_rng_);
  sync();
}

void Simulation::start_round(NodeId monitor_id, NodeId target) {
  MonitorState* m = monitor(monitor_id);
  if (m == nullptr || !m->snapshot().contains(target) || m->has_open_round(target)) return;
  auto [marker, round] = m->start_peev_round(target, marker_rng_, engine_.now());
  send(monitor_id, target, marker);
  engine_.schedule(round.timeout, PeevTimeout{monitor_id, target, marker.value});
}

void Simulation::finish_round(const PeevTimeout& timeout) {
  MonitorState* m = monitor(timeout.monitor);
  if (m == nullptr) return;
  const PeevRound* round = m->open_round(timeout.target);
  if (round == nullptr || round->marker.value != timeout.round_id) return;

  const NodeSet prior = round->prior_outbound;
  NodeSet collected = m->close_peev_round(timeout.target);
  LocalSnapshot& snap = m->snapshot();
  const int changes = update_topology(snap, timeout.target, collected, prior);
  send(m->id(), timeout.target, m->build_verified_message(timeout.target));
  adjust_frequency(snap, timeout.target, changes);
  if (round_cb_) round_cb_(RoundRecord{engine_.now(), m->id(), timeout.target, collected, changes});
  if (!cfg_.single_sweep) {
    engine_.schedule(schedule_next_round(snap, timeout.target, schedule_rng_, cfg_.scheduling),
                     PeevRoundStart{m->id(), timeout.target});
  }
}

void Simulation::churn() {
  const ChurnConfig churn_cfg{cfg_.nodes, cfg_.malicious_pct, cfg_.variability()};
  const ChurnEvent event = churn_tick(topo_, churn_rng_, churn_cfg);
  ++churn_events_;
  sync();

  std::ostringstream detail;
  if (event.kind == ChurnEvent::Kind::NodeAdded) {
    admit(event.node);
    detail << "add " << to_string(event.role);
  } else {
    policy_.colluders->erase(event.node);
    for (MonitorState& m : monitors_) m.handle_node_departure(event.node);
    detail << "remove " << to_string(event.role) << " rewired=";
    bool first = true;
    for (const Rewire& r : event.rewired) {
      detail << (first ? "" : ",") << r.orphan << "->" << r.new_target;
      first = false;
    }
  }
  engine_.trace_note("churn", id_str(event.node), "-", detail.str());
  engine_.schedule(sample_exponential(churn_rng_, cfg_.variability()), ChurnTick{});
}

std::vector<LocalSnapshot> Simulation::local_snapshots() const {
  std::vector<LocalSnapshot> out;
  out.reserve(monitors_.size());
  for (const MonitorState& m : monitors_) out.push_back(m.snapshot());
  return out;
}

GlobalSnapshot Simulation::global_snapshot() const {
  const std::vector<LocalSnapshot> locals = local_snapshots();
  return compute_global_snapshot(locals);
}

void Simulation::probe() {
  const GlobalSnapshot global = global_snapshot();
  const ProbeRecord record{engine_.now(), classify_edges(global, topo_)};
  probes_.push_back(record);

  std::ostringstream detail;
  detail << "tp=" << record.counts.tp << " fp=" << record.counts.fp << " fn=" << record.counts.fn;
  engine_.trace_note("probe", "-", "-", detail.str());

  if (snapshot_sink_ != nullptr) {
    const auto t = engine_.now().count();
    for (const MonitorState& m : monitors_) {
      for (const Edge& e : m.snapshot().edges()) *snapshot_sink_ << t << '\t' << m.id() << '\t' << e.from << '\t' << e.to << '\n';
    }
    for (const Edge& e : global.edges) *snapshot_sink_ << t << "\tglobal\t" << e.from << '\t' << e.to << '\n';
  }
  if (probe_cb_) probe_cb_(record);

  if (engine_.now().count() + cfg_.probe_every_ms <= cfg_.duration_ms) {
    engine_.schedule(Duration{cfg_.probe_every_ms}, ProbeTick{});
  }
}

ConnectStatus Simulation::open_connection(NodeId from, NodeId to) {
  const ConnectStatus status = topo_.open_connection(from, to);
  sync();
  return status;
}

bool Simulation::close_connection(NodeId from, NodeId to) {
  const bool closed = topo_.close_connection(from, to);
  sync();
  return closed;
}

}  // namespace atom
