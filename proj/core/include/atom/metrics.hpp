#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "atom/monitor.hpp"
#include "atom/network.hpp"
#include "atom/types.hpp"

namespace atom {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts classify_edges(const EdgeSet& inferred, const EdgeSet& truth);
ConfusionCounts classify_edges(const GlobalSnapshot& global, const Topology& truth);

// nullopt when the denominator is zero.
std::optional<double> precision(const ConfusionCounts& c);
std::optional<double> recall(const ConfusionCounts& c);

// Messages one node exchanges in a complete PeeV round:
// (|O| + 2|I| + 1) * |monitors|.
std::uint64_t expected_overhead(std::uint64_t out_deg, std::uint64_t in_deg, std::uint64_t monitors);

// Protocol messages seen by each node, split by kind.
class OverheadLedger {
 public:
  struct Counters {
    std::uint64_t marker_from_monitor = 0;  // received from a monitor as target
    std::uint64_t marker_forwarded = 0;     // sent to peers
    std::uint64_t marker_from_peer = 0;     // received from a peer
    std::uint64_t marker_to_monitor = 0;    // sent back to a monitor
    std::uint64_t verified = 0;             // received

    // The quantity the overhead formula predicts. The monitor's initial
    // marker to the target is tallied but not part of it.
    [[nodiscard]] std::uint64_t peev_messages() const {
      return marker_forwarded + marker_from_peer + marker_to_monitor + verified;
    }
  };

  Counters& at(NodeId node) { return counters_[node]; }
  [[nodiscard]] Counters get(NodeId node) const;
  [[nodiscard]] const std::map<NodeId, Counters>& all() const { return counters_; }

 private:
  std::map<NodeId, Counters> counters_;
};

struct OverheadDiscrepancy {
  NodeId node;
  std::uint64_t expected = 0;
  std::uint64_t measured = 0;
};

struct AuditReport {
  std::size_t nodes_checked = 0;
  std::vector<OverheadDiscrepancy> discrepancies;

  [[nodiscard]] bool clean() const { return discrepancies.empty(); }
};

// Compares every peer node's measured count against expected_overhead for
// its current degrees. Only meaningful after exactly one complete round per
// node per monitor on a static honest network.
AuditReport audit_overhead(const OverheadLedger& ledger, const Topology& topo, std::uint64_t monitors);

}  // namespace atom
