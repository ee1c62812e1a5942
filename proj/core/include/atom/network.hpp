#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "atom/sim.hpp"
#include "atom/types.hpp"

namespace atom {

enum class ConnectStatus { Ok, UnknownNode, SelfEdge, DuplicateEdge, MutualEdge, BannedPeer, MonitorTarget };

const char* to_string(ConnectStatus status);

class TopologyError : public std::runtime_error {
 public:
  enum class Kind { InsufficientPeers, UnknownNode, NotAllowed, InvariantViolated };

  TopologyError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct Rewire {
  NodeId orphan;
  NodeId new_target;

  friend bool operator==(const Rewire&, const Rewire&) = default;
};

struct ChurnEvent {
  enum class Kind { NodeAdded, NodeRemoved };
  Kind kind = Kind::NodeAdded;
  NodeId node;
  Role role = Role::Honest;
  std::vector<Rewire> rewired;
};

// One ground-truth edge appearing or disappearing. Consumers (node-side
// protocol state) replay these to stay in sync with the topology.
struct EdgeChange {
  Edge edge;
  bool added = true;
};

struct ChurnConfig {
  std::size_t target_population = 50;
  double malicious_fraction = 0.0;
  Duration variability{10'000};
};

// Ground-truth overlay. Edges from monitors are stored alongside peer edges
// but excluded from peer_edges(), which is what metrics compare against.
class Topology {
 public:
  explicit Topology(std::size_t target_outbound = 3) : target_outbound_(target_outbound) {}

  [[nodiscard]] std::size_t target_outbound() const { return target_outbound_; }

  NodeId add_monitor();

  // Adds a peer node with `target_outbound` random outbound connections and
  // links every monitor to it. With `bootstrap` set the node takes as many
  // targets as are available instead of failing.
  NodeId add_node(Role role, Rng& rng, bool bootstrap = false);

  // Removes a peer node; each former inbound peer opens one replacement
  // outbound connection when an eligible target exists.
  ChurnEvent remove_node(NodeId node, Rng& rng);

  ConnectStatus open_connection(NodeId from, NodeId to);
  bool close_connection(NodeId from, NodeId to);

  // Symmetric, permanent for the run.
  void ban(NodeId a, NodeId b);
  [[nodiscard]] bool is_banned(NodeId a, NodeId b) const;

  // Opens random outbound connections until `node` has target_outbound or
  // runs out of eligible targets. Returns the new targets.
  std::vector<NodeId> replenish(NodeId node, Rng& rng);

  [[nodiscard]] ConnectStatus check_connection(NodeId from, NodeId to) const;
  [[nodiscard]] std::vector<NodeId> eligible_targets(NodeId from) const;

  [[nodiscard]] bool contains(NodeId node) const { return nodes_.count(node) != 0; }
  [[nodiscard]] Role role(NodeId node) const;
  [[nodiscard]] bool is_monitor(NodeId node) const;
  [[nodiscard]] bool has_edge(NodeId from, NodeId to) const;
  [[nodiscard]] bool connected(NodeId a, NodeId b) const { return has_edge(a, b) || has_edge(b, a); }

  // Peer views exclude monitors.
  [[nodiscard]] NodeSet peer_outbound(NodeId node) const;
  [[nodiscard]] NodeSet peer_inbound(NodeId node) const;

  [[nodiscard]] std::vector<NodeId> monitors() const;
  [[nodiscard]] std::vector<NodeId> peers() const;
  [[nodiscard]] std::vector<NodeId> peers(Role role) const;
  [[nodiscard]] std::size_t population() const { return nodes_.size() - monitor_count_; }
  [[nodiscard]] std::size_t count(Role role) const;

  [[nodiscard]] EdgeSet peer_edges() const;
  [[nodiscard]] const EdgeSet& all_edges() const { return edges_; }

  // Changes since the last call, in the order they happened.
  std::vector<EdgeChange> take_changes();

  // Throws TopologyError(InvariantViolated) naming the first broken rule.
  void audit() const;

  void write_edge_list(std::ostream& out) const;
  void write_dot(std::ostream& out) const;

 private:
  struct NodeInfo {
    Role role = Role::Honest;
    NodeSet out;
    NodeSet in;
    NodeSet banned;
  };

  const NodeInfo& info(NodeId node) const;
  NodeInfo& info(NodeId node);
  void insert_edge(NodeId from, NodeId to);
  void erase_edge(NodeId from, NodeId to);
  [[nodiscard]] std::size_t peer_out_degree(const NodeInfo& n) const;

  std::size_t target_outbound_;
  std::uint64_t next_id_ = 1;
  std::size_t monitor_count_ = 0;
  std::map<NodeId, NodeInfo> nodes_;
  EdgeSet edges_;
  std::vector<EdgeChange> changes_;
};

// One churn step: adds a node when below target population, removes one
// when above, flips a fair coin at target. Roles are steered so the
// malicious count stays within one node of the configured fraction.
ChurnEvent churn_tick(Topology& topo, Rng& rng, const ChurnConfig& cfg);

}  // namespace atom
