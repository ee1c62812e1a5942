#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <set>

namespace atom {

// Identity of a node or monitor. Ids are handed out monotonically and never
// reused within a run, so a re-joining node always gets a fresh id.
struct NodeId {
  std::uint64_t value = 0;

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
  friend std::ostream& operator<<(std::ostream& os, NodeId id) { return os << id.value; }
};

// Directed connection from -> to (from opened an outbound connection to to).
struct Edge {
  NodeId from;
  NodeId to;

  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
  friend std::ostream& operator<<(std::ostream& os, const Edge& e) {
    return os << e.from << "->" << e.to;
  }
};

using NodeSet = std::set<NodeId>;
using EdgeSet = std::set<Edge>;

enum class Role { Honest, Malicious, Monitor };

const char* to_string(Role role);

}  // namespace atom

template <>
struct std::hash<atom::NodeId> {
  std::size_t operator()(atom::NodeId id) const noexcept { return std::hash<std::uint64_t>{}(id.value); }
};
