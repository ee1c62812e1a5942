#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "atom/messages.hpp"
#include "atom/protocol.hpp"
#include "atom/sim.hpp"
#include "atom/types.hpp"

namespace atom {

// The six ways a node can deviate from HandleMarker.
enum class Behavior {
  ForwardToInbound = 1,  // forward a monitor's marker to inbound peers too
  RelayViaColluder = 2,  // push a marker to non-peers through a colluder
  Replay = 3,            // resend markers from earlier rounds
  Tamper = 4,            // modify one field of every marker it forwards
  DropFromMonitor = 5,   // never forward a monitor's marker to outbound peers
  DropFromPeer = 6,      // never return a peer's marker to the monitor
};

std::optional<Behavior> behavior_from_int(int id);

struct AdversaryPolicy {
  enum class Mode { WorstCase, Single };

  Mode mode = Mode::WorstCase;
  Behavior behavior = Behavior::DropFromPeer;
  // WorstCase only: forward monitor markers to honest outbound peers too,
  // keeping those connections verified instead of hiding them.
  bool forward_to_honest_outbound = true;
  // DropFromPeer only: monitors whose markers are dropped. Empty means all.
  NodeSet drop_for_monitors;
  // Every malicious node of the run; shared so joins are visible to all.
  std::shared_ptr<NodeSet> colluders = std::make_shared<NodeSet>();

  [[nodiscard]] bool is_colluder(NodeId node) const { return colluders && colluders->count(node) != 0; }
};

// Per-node memory: the last marker received from each sender.
struct AdversaryMemory {
  std::map<NodeId, Marker> stored_markers;
};

std::vector<SendAction> malicious_handle_marker(const NodeState& state, const AdversaryPolicy& policy,
                                                AdversaryMemory& memory, NodeId from, const Marker& marker, Rng& rng);

// Malicious nodes never enforce reputation; the message is discarded.
std::vector<DisconnectAction> malicious_handle_verified(const NodeState& state, const AdversaryPolicy& policy,
                                                        NodeId from, const VerifiedMsg& verified);

// Returns a copy of `marker` with exactly one of target, monitor or value
// replaced by a different value.
Marker tamper(const Marker& marker, Rng& rng);

}  // namespace atom
