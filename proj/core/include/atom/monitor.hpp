#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "atom/messages.hpp"
#include "atom/sim.hpp"
#include "atom/types.hpp"

namespace atom {

class MonitorError : public std::runtime_error {
 public:
  enum class Kind { RoundAlreadyOpen, NoOpenRound, UnknownTarget, EmptyInput };

  MonitorError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

enum class SchedulingMode { Poisson, Fixed };

struct FrequencyBounds {
  int initial = 5;
  int min = 1;
  int max = 10;
};

// One PeeV execution for one target. `collected` only grows while Open.
struct PeevRound {
  enum class State { Open, Closed };

  Marker marker;
  SimTime started_at{0};
  Duration timeout{1000};
  NodeSet collected;
  // Target's outbound edges in the snapshot when the round opened; the
  // change count at close is taken against this set.
  NodeSet prior_outbound;
  State state = State::Open;
};

// A monitor's believed topology and per-node scan frequency (seconds).
class LocalSnapshot {
 public:
  explicit LocalSnapshot(FrequencyBounds bounds = {}) : bounds_(bounds) {}

  void add_node(NodeId node);
  // Drops the node and every incident edge; returns how many edges went.
  std::size_t remove_node(NodeId node);

  [[nodiscard]] bool contains(NodeId node) const { return nodes_.count(node) != 0; }
  [[nodiscard]] const NodeSet& nodes() const { return nodes_; }
  [[nodiscard]] const EdgeSet& edges() const { return edges_; }
  [[nodiscard]] NodeSet outbound_of(NodeId node) const;
  [[nodiscard]] NodeSet inbound_of(NodeId node) const;

  [[nodiscard]] int frequency(NodeId node) const;
  void set_frequency(NodeId node, int seconds);
  [[nodiscard]] const FrequencyBounds& bounds() const { return bounds_; }

  // Raw edge mutation, used by update_topology and tests.
  void insert_edge(Edge e) { edges_.insert(e); }
  void erase_edge(Edge e) { edges_.erase(e); }

 private:
  FrequencyBounds bounds_;
  NodeSet nodes_;
  EdgeSet edges_;
  std::map<NodeId, int> freq_;
};

// Sets target's outbound edges to exactly `verified` (restricted to known
// nodes) and returns |previous outbound set symmetric-difference new set|.
int update_topology(LocalSnapshot& snap, NodeId target, const NodeSet& verified);
// Same, but counts changes against `prior` instead of the current outbound
// set (edges may already have been accepted while the round was open).
int update_topology(LocalSnapshot& snap, NodeId target, const NodeSet& verified, const NodeSet& prior);

// c == 0 slows the scan by one second (up to max), c > 1 speeds it up by c
// seconds (down to min), c == 1 leaves it alone.
void adjust_frequency(LocalSnapshot& snap, NodeId target, int changes);

// Delay before the next round for target: Poisson over f_N clamped to
// [min, max] seconds, or exactly f_N in Fixed mode.
Duration schedule_next_round(const LocalSnapshot& snap, NodeId target, Rng& rng, SchedulingMode mode);

// Monitor-side protocol state: the local snapshot plus open PeeV rounds.
class MonitorState {
 public:
  // With accept_on_receipt, a matching marker from P adds target->P to the
  // snapshot immediately; the close of the round then only removes edges.
  MonitorState(NodeId id, FrequencyBounds bounds, Duration timeout = Duration{1000}, bool accept_on_receipt = true);

  [[nodiscard]] NodeId id() const { return id_; }
  [[nodiscard]] Duration timeout() const { return timeout_; }
  [[nodiscard]] bool accepts_on_receipt() const { return accept_on_receipt_; }
  [[nodiscard]] const LocalSnapshot& snapshot() const { return snapshot_; }
  LocalSnapshot& snapshot() { return snapshot_; }

  // Draws a fresh value, opens the round and returns the marker to send to
  // the target. The caller schedules the timeout at now + timeout().
  std::pair<Marker, const PeevRound&> start_peev_round(NodeId target, Rng& rng, SimTime now);

  // Adds `from` to the open round's collected set iff the marker matches the
  // round exactly. Stale, foreign or tampered markers are ignored. Returns
  // whether the marker matched.
  bool receive_marker(NodeId from, const Marker& marker);

  NodeSet close_peev_round(NodeId target);

  [[nodiscard]] bool has_open_round(NodeId target) const { return open_.count(target) != 0; }
  [[nodiscard]] const PeevRound* open_round(NodeId target) const;

  [[nodiscard]] VerifiedMsg build_verified_message(NodeId target) const;

  void handle_node_arrival(NodeId node);
  void handle_node_departure(NodeId node);

  [[nodiscard]] int rounds_completed(NodeId target) const;

 private:
  NodeId id_;
  Duration timeout_;
  bool accept_on_receipt_;
  LocalSnapshot snapshot_;
  std::map<NodeId, PeevRound> open_;
  std::map<NodeId, int> completed_;
};

struct GlobalSnapshot {
  NodeSet nodes;
  EdgeSet edges;
  std::size_t monitor_count = 0;
};

// Indices (into `locals`) of the snapshots that contain `edge`.
std::vector<std::size_t> verification_set(std::span<const LocalSnapshot> locals, Edge edge);

// Edges held by a strict majority of local snapshots: 2*|confirming| > |locals|.
GlobalSnapshot compute_global_snapshot(std::span<const LocalSnapshot> locals);

// Worst-case lifetime of an error in the global snapshot for one node: the
// (floor(n/2)+1)-th smallest per-monitor scan frequency.
int max_error_window(std::span<const int> frequencies);

}  // namespace atom
