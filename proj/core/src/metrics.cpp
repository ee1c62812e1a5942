#include "atom/metrics.hpp"

namespace atom {

ConfusionCounts classify_edges(const EdgeSet& inferred, const EdgeSet& truth) {
  ConfusionCounts c;
  for (const Edge& e : inferred) {
    if (truth.count(e) != 0) {
      ++c.tp;
    } else {
      ++c.fp;
    }
  }
  c.fn = truth.size() - c.tp;
  return c;
}

ConfusionCounts classify_edges(const GlobalSnapshot& global, const Topology& truth) {
  EdgeSet inferred;
  for (const Edge& e : global.edges) {
    if (!truth.is_monitor(e.from) && !truth.is_monitor(e.to)) inferred.insert(e);
  }
  return classify_edges(inferred, truth.peer_edges());
}

std::optional<double> precision(const ConfusionCounts& c) {
  if (c.tp + c.fp == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

std::optional<double> recall(const ConfusionCounts& c) {
  if (c.tp + c.fn == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

std::uint64_t expected_overhead(std::uint64_t out_deg, std::uint64_t in_deg, std::uint64_t monitors) {
  return (out_deg + 2 * in_deg + 1) * monitors;
}

OverheadLedger::Counters OverheadLedger::get(NodeId node) const {
  auto it = counters_.find(node);
  return it == counters_.end() ? Counters{} : it->second;
}

AuditReport audit_overhead(const OverheadLedger& ledger, const Topology& topo, std::uint64_t monitors) {
  AuditReport report;
  for (NodeId n : topo.peers()) {
    ++report.nodes_checked;
    const std::uint64_t expected =
        expected_overhead(topo.peer_outbound(n).size(), topo.peer_inbound(n).size(), monitors);
    const std::uint64_t measured = ledger.get(n).peev_messages();
    if (expected != measured) report.discrepancies.push_back(OverheadDiscrepancy{n, expected, measured});
  }
  return report;
}

}  // namespace atom
