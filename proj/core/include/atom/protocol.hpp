#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "atom/messages.hpp"
#include "atom/types.hpp"

namespace atom {

class ProtocolError : public std::runtime_error {
 public:
  enum class Kind { UnknownMonitor, UnknownPeer };

  ProtocolError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct SendAction {
  NodeId to;
  Marker marker;

  friend bool operator==(const SendAction&, const SendAction&) = default;
};

struct DisconnectAction {
  NodeId peer;

  friend bool operator==(const DisconnectAction&, const DisconnectAction&) = default;
};

enum class Verdict { Keep, Disconnect };

// True when a reputation of `phi` confirmations out of `monitors` fails the
// majority threshold phi <= |monitors|/2, compared as 2*phi <= |monitors|.
constexpr bool below_threshold(int phi, std::size_t monitors) {
  return 2 * static_cast<long long>(phi) <= static_cast<long long>(monitors);
}

// Per-peer verification statuses, one bit per monitor, plus how many
// verified messages each monitor has sent since the peer connected.
class ReputationTable {
 public:
  ReputationTable(NodeSet monitors, int safe_rounds);

  // A new connection starts fully confirmed with no rounds seen.
  void on_connect(NodeId peer);
  void on_disconnect(NodeId peer);

  void record(NodeId peer, NodeId monitor, bool verified);

  [[nodiscard]] bool tracks(NodeId peer) const { return entries_.count(peer) != 0; }
  [[nodiscard]] int reputation(NodeId peer) const;
  [[nodiscard]] int status(NodeId peer, NodeId monitor) const;
  [[nodiscard]] int rounds_seen(NodeId peer, NodeId monitor) const;
  [[nodiscard]] bool past_safe_period(NodeId peer) const;
  [[nodiscard]] std::size_t monitor_count() const { return monitors_.size(); }
  [[nodiscard]] int safe_rounds() const { return safe_rounds_; }
  [[nodiscard]] const NodeSet& monitors() const { return monitors_; }

 private:
  struct PerMonitor {
    int status = 1;
    int rounds_seen = 0;
  };
  const std::map<NodeId, PerMonitor>& entry(NodeId peer) const;

  NodeSet monitors_;
  int safe_rounds_;
  std::map<NodeId, std::map<NodeId, PerMonitor>> entries_;
};

enum class Direction { Outbound, Inbound };

// Everything an honest node knows locally: its connections, the agreed
// monitor set and the reputation of its peers.
struct NodeState {
  NodeState(NodeId id, NodeSet monitors, int safe_rounds);

  void connect(NodeId peer, Direction direction);
  void disconnect(NodeId peer);
  [[nodiscard]] bool is_peer(NodeId peer) const { return outbound.count(peer) != 0 || inbound.count(peer) != 0; }
  [[nodiscard]] NodeSet peers() const;

  NodeId id;
  NodeSet outbound;
  NodeSet inbound;
  NodeSet monitors;
  ReputationTable reputation;
  NodeSet banned;
};

// Marker from a monitor in the agreed set goes to every outbound peer; a
// marker relayed by its own target over an inbound connection goes back to
// the monitor; anything else is dropped.
std::vector<SendAction> handle_marker(const NodeState& state, NodeId from, const Marker& marker);

// Applies one monitor's verified list to every current peer and returns the
// peers that now fail the reputation check. Throws UnknownMonitor when the
// sender is not in the agreed monitor set.
std::vector<DisconnectAction> handle_verified(NodeState& state, NodeId from_monitor, const VerifiedMsg& verified);

// Disconnect iff reputation <= |monitors|/2 and every monitor has reported
// at least safe_rounds times for this peer. A disconnect bans the peer.
Verdict check_reputation(NodeState& state, NodeId peer);

}  // namespace atom
