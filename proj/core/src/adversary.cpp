#include "atom/adversary.hpp"

namespace atom {

std::optional<Behavior> behavior_from_int(int id) {
  if (id < 1 || id > 6) return std::nullopt;
  return static_cast<Behavior>(id);
}

Marker tamper(const Marker& marker, Rng& rng) {
  Marker out = marker;
  // Offsets are never zero, so the chosen field always changes.
  const std::uint64_t offset = 1 + rng() % 1'000'000;
  switch (rng.uniform_index(3)) {
    case 0: out.target = NodeId{marker.target.value + offset}; break;
    case 1: out.monitor = NodeId{marker.monitor.value + offset}; break;
    default: out.value = marker.value + offset; break;
  }
  return out;
}

namespace {

bool from_agreed_monitor(const NodeState& state, NodeId from, const Marker& marker) {
  return from == marker.monitor && state.monitors.count(marker.monitor) != 0;
}

void send_to(std::vector<SendAction>& out, const NodeSet& targets, const Marker& marker, NodeId skip = NodeId{0}) {
  for (NodeId p : targets) {
    if (p != skip) out.push_back(SendAction{p, marker});
  }
}

NodeSet colluding_peers(const NodeState& state, const AdversaryPolicy& policy) {
  NodeSet out;
  for (NodeId p : state.peers()) {
    if (policy.is_colluder(p)) out.insert(p);
  }
  return out;
}

std::vector<SendAction> worst_case(const NodeState& state, const AdversaryPolicy& policy, NodeId from,
                                   const Marker& marker) {
  std::vector<SendAction> out;
  if (from_agreed_monitor(state, from, marker)) {
    NodeSet targets = colluding_peers(state, policy);
    if (policy.forward_to_honest_outbound) targets.insert(state.outbound.begin(), state.outbound.end());
    send_to(out, targets, marker);
  } else if (policy.is_colluder(from) && state.is_peer(from)) {
    out.push_back(SendAction{marker.monitor, marker});
  }
  return out;
}

}  // namespace

std::vector<SendAction> malicious_handle_marker(const NodeState& state, const AdversaryPolicy& policy,
                                                AdversaryMemory& memory, NodeId from, const Marker& marker, Rng& rng) {
  if (policy.mode == AdversaryPolicy::Mode::WorstCase) return worst_case(state, policy, from, marker);

  const bool monitor_origin = from_agreed_monitor(state, from, marker);
  std::vector<SendAction> out;
  switch (policy.behavior) {
    case Behavior::ForwardToInbound:
      if (monitor_origin) {
        send_to(out, state.outbound, marker);
        send_to(out, state.inbound, marker);
        return out;
      }
      return handle_marker(state, from, marker);

    case Behavior::RelayViaColluder:
      if (monitor_origin) {
        NodeSet targets = state.outbound;
        const NodeSet colluding = colluding_peers(state, policy);
        targets.insert(colluding.begin(), colluding.end());
        send_to(out, targets, marker);
        return out;
      }
      if (policy.is_colluder(from) && state.is_peer(from)) {
        // Second hop of a relay: push it on to every other peer.
        send_to(out, state.peers(), marker, from);
        return out;
      }
      return handle_marker(state, from, marker);

    case Behavior::Replay:
      for (const auto& [sender, stored] : memory.stored_markers) {
        if (!(stored == marker)) out.push_back(SendAction{stored.monitor, stored});
      }
      memory.stored_markers[from] = marker;
      for (const SendAction& a : handle_marker(state, from, marker)) out.push_back(a);
      return out;

    case Behavior::Tamper:
      for (SendAction a : handle_marker(state, from, marker)) {
        a.marker = tamper(a.marker, rng);
        out.push_back(a);
      }
      return out;

    case Behavior::DropFromMonitor:
      if (monitor_origin) return out;
      return handle_marker(state, from, marker);

    case Behavior::DropFromPeer:
      if (!monitor_origin &&
          (policy.drop_for_monitors.empty() || policy.drop_for_monitors.count(marker.monitor) != 0)) {
        return out;
      }
      return handle_marker(state, from, marker);
  }
  return out;
}

std::vector<DisconnectAction> malicious_handle_verified(const NodeState&, const AdversaryPolicy&, NodeId,
                                                        const VerifiedMsg&) {
  return {};
}

}  // namespace atom
