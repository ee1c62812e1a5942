#include "atom/protocol.hpp"

namespace atom {

ReputationTable::ReputationTable(NodeSet monitors, int safe_rounds)
    : monitors_(std::move(monitors)), safe_rounds_(safe_rounds) {}

void ReputationTable::on_connect(NodeId peer) {
  auto& row = entries_[peer];
  row.clear();
  for (NodeId m : monitors_) row.emplace(m, PerMonitor{});
}

void ReputationTable::on_disconnect(NodeId peer) { entries_.erase(peer); }

const std::map<NodeId, ReputationTable::PerMonitor>& ReputationTable::entry(NodeId peer) const {
  auto it = entries_.find(peer);
  if (it == entries_.end()) {
    throw ProtocolError(ProtocolError::Kind::UnknownPeer, "no reputation entry for peer " + std::to_string(peer.value));
  }
  return it->second;
}

void ReputationTable::record(NodeId peer, NodeId monitor, bool verified) {
  if (monitors_.count(monitor) == 0) {
    throw ProtocolError(ProtocolError::Kind::UnknownMonitor, "unknown monitor " + std::to_string(monitor.value));
  }
  auto it = entries_.find(peer);
  if (it == entries_.end()) {
    throw ProtocolError(ProtocolError::Kind::UnknownPeer, "no reputation entry for peer " + std::to_string(peer.value));
  }
  PerMonitor& pm = it->second.at(monitor);
  pm.status = verified ? 1 : 0;
  ++pm.rounds_seen;
}

int ReputationTable::reputation(NodeId peer) const {
  int phi = 0;
  for (const auto& [m, pm] : entry(peer)) phi += pm.status;
  return phi;
}

int ReputationTable::status(NodeId peer, NodeId monitor) const { return entry(peer).at(monitor).status; }

int ReputationTable::rounds_seen(NodeId peer, NodeId monitor) const { return entry(peer).at(monitor).rounds_seen; }

bool ReputationTable::past_safe_period(NodeId peer) const {
  for (const auto& [m, pm] : entry(peer)) {
    if (pm.rounds_seen < safe_rounds_) return false;
  }
  return true;
}

NodeState::NodeState(NodeId id_, NodeSet monitors_, int safe_rounds)
    : id(id_), monitors(monitors_), reputation(std::move(monitors_), safe_rounds) {}

void NodeState::connect(NodeId peer, Direction direction) {
  (direction == Direction::Outbound ? outbound : inbound).insert(peer);
  reputation.on_connect(peer);
}

void NodeState::disconnect(NodeId peer) {
  outbound.erase(peer);
  inbound.erase(peer);
  reputation.on_disconnect(peer);
}

NodeSet NodeState::peers() const {
  NodeSet all = outbound;
  all.insert(inbound.begin(), inbound.end());
  return all;
}

std::vector<SendAction> handle_marker(const NodeState& state, NodeId from, const Marker& marker) {
  std::vector<SendAction> out;
  if (from == marker.monitor && state.monitors.count(marker.monitor) != 0) {
    out.reserve(state.outbound.size());
    for (NodeId p : state.outbound) out.push_back(SendAction{p, marker});
  } else if (from == marker.target && state.inbound.count(from) != 0 && state.monitors.count(marker.monitor) != 0) {
    out.push_back(SendAction{marker.monitor, marker});
  }
  return out;
}

std::vector<DisconnectAction> handle_verified(NodeState& state, NodeId from_monitor, const VerifiedMsg& verified) {
  if (state.monitors.count(from_monitor) == 0) {
    throw ProtocolError(ProtocolError::Kind::UnknownMonitor,
                        "verified message from non-monitor " + std::to_string(from_monitor.value));
  }
  const NodeSet peers = state.peers();
  for (NodeId p : peers) state.reputation.record(p, from_monitor, verified.verified_peers.count(p) != 0);

  std::vector<DisconnectAction> out;
  for (NodeId p : peers) {
    if (check_reputation(state, p) == Verdict::Disconnect) out.push_back(DisconnectAction{p});
  }
  return out;
}

Verdict check_reputation(NodeState& state, NodeId peer) {
  if (!state.is_peer(peer)) {
    throw ProtocolError(ProtocolError::Kind::UnknownPeer, "not a peer: " + std::to_string(peer.value));
  }
  if (state.monitors.empty()) return Verdict::Keep;
  const int phi = state.reputation.reputation(peer);
  if (!below_threshold(phi, state.monitors.size()) || !state.reputation.past_safe_period(peer)) return Verdict::Keep;
  state.banned.insert(peer);
  return Verdict::Disconnect;
}

}  // namespace atom
