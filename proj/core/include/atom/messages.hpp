#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "atom/types.hpp"

namespace atom {

// marker = [target, monitor, value]. The value identifies one PeeV round.
struct Marker {
  NodeId target;
  NodeId monitor;
  std::uint64_t value = 0;

  friend constexpr bool operator==(const Marker&, const Marker&) = default;
};

// verified = [L]: peers of the recipient that the sending monitor currently
// holds as connected, inbound and outbound combined.
struct VerifiedMsg {
  NodeSet verified_peers;

  friend bool operator==(const VerifiedMsg&, const VerifiedMsg&) = default;
};

using Message = std::variant<Marker, VerifiedMsg>;

std::string describe(const Message& message);

}  // namespace atom
