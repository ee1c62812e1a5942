#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <vector>

#include "atom/adversary.hpp"
#include "atom/config.hpp"
#include "atom/metrics.hpp"
#include "atom/monitor.hpp"
#include "atom/network.hpp"
#include "atom/protocol.hpp"
#include "atom/sim.hpp"

namespace atom {

struct RoundRecord {
  SimTime closed_at{0};
  NodeId monitor;
  NodeId target;
  NodeSet collected;
  int changes = 0;
};

struct ProbeRecord {
  SimTime time{0};
  ConfusionCounts counts;
};

struct DisconnectRecord {
  SimTime time{0};
  NodeId by;    // honest node enforcing reputation
  NodeId peer;  // disconnected and banned
  Edge edge;    // the ground-truth edge that was closed
};

// Wires topology, node-side protocol, monitors and adversaries onto one
// engine. Construction builds the initial network and schedules the first
// PeeV round of every (monitor, node) pair at t = 0.
class Simulation {
 public:
  explicit Simulation(ExperimentConfig cfg);

  void run_until(SimTime end);
  void run_to_end() { run_until(SimTime{cfg_.duration_ms}); }

  [[nodiscard]] SimTime now() const { return engine_.now(); }
  [[nodiscard]] const ExperimentConfig& config() const { return cfg_; }
  [[nodiscard]] const Topology& topology() const { return topo_; }
  [[nodiscard]] const std::vector<MonitorState>& monitors() const { return monitors_; }
  [[nodiscard]] const NodeState& node_state(NodeId node) const { return states_.at(node); }
  [[nodiscard]] const OverheadLedger& ledger() const { return ledger_; }
  [[nodiscard]] const std::vector<ProbeRecord>& probes() const { return probes_; }
  [[nodiscard]] const std::vector<DisconnectRecord>& disconnects() const { return disconnects_; }
  [[nodiscard]] const TraceSummary& summary() const { return engine_.summary(); }
  [[nodiscard]] std::uint64_t churn_events() const { return churn_events_; }
  [[nodiscard]] std::uint64_t messages_dropped() const { return dropped_; }
  AdversaryPolicy& adversary() { return policy_; }

  [[nodiscard]] std::vector<LocalSnapshot> local_snapshots() const;
  [[nodiscard]] GlobalSnapshot global_snapshot() const;

  // Direct ground-truth edits for experiments; node and monitor views are
  // updated in the same step. No replenishment happens.
  ConnectStatus open_connection(NodeId from, NodeId to);
  bool close_connection(NodeId from, NodeId to);

  // Fixed per-link one-way latency.
  [[nodiscard]] Duration link_latency(NodeId a, NodeId b) const;

  void set_trace(std::ostream* out) { engine_.set_trace(out); }
  void set_snapshot_sink(std::ostream* out) { snapshot_sink_ = out; }
  void on_round_closed(std::function<void(const RoundRecord&)> cb) { round_cb_ = std::move(cb); }
  void on_probe(std::function<void(const ProbeRecord&)> cb) { probe_cb_ = std::move(cb); }

 private:
  void handle(const Event& event);
  void deliver(const MessageDelivery& d);
  void deliver_marker(NodeId from, NodeId to, const Marker& marker);
  void deliver_verified(NodeId from, NodeId to, const VerifiedMsg& verified);
  void start_round(NodeId monitor, NodeId target);
  void finish_round(const PeevTimeout& timeout);
  void churn();
  void probe();
  void enforce_disconnect(NodeId by, NodeId peer);

  void send(NodeId from, NodeId to, Message message);
  void sync();
  void admit(NodeId node);
  MonitorState* monitor(NodeId id);

  ExperimentConfig cfg_;
  Engine engine_;
  Rng churn_rng_;
  Rng schedule_rng_;
  Rng topology_rng_;
  Rng marker_rng_;
  Rng adversary_rng_;
  std::uint64_t latency_seed_;

  Topology topo_;
  std::vector<MonitorState> monitors_;
  std::map<NodeId, std::size_t> monitor_index_;
  NodeSet monitor_ids_;
  std::map<NodeId, NodeState> states_;
  std::map<NodeId, AdversaryMemory> memories_;
  AdversaryPolicy policy_;
  OverheadLedger ledger_;

  std::vector<ProbeRecord> probes_;
  std::vector<DisconnectRecord> disconnects_;
  std::uint64_t churn_events_ = 0;
  std::uint64_t dropped_ = 0;

  std::ostream* snapshot_sink_ = nullptr;
  std::function<void(const RoundRecord&)> round_cb_;
  std::function<void(const ProbeRecord&)> probe_cb_;
};

}  // namespace atom
