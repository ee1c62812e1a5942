#include <algorithm>
#include <iterator>

#include "atom/metrics.hpp"
#include "doctest.h"

using namespace atom;

namespace {

Edge E(std::uint64_t a, std::uint64_t b) { return Edge{NodeId{a}, NodeId{b}}; }

// Set-algebra oracle with std::set_* algorithms.
ConfusionCounts oracle(const EdgeSet& inferred, const EdgeSet& truth) {
  std::vector<Edge> both;
  std::vector<Edge> only_inferred;
  std::vector<Edge> only_truth;
  std::set_intersection(inferred.begin(), inferred.end(), truth.begin(), truth.end(), std::back_inserter(both));
  std::set_difference(inferred.begin(), inferred.end(), truth.begin(), truth.end(), std::back_inserter(only_inferred));
  std::set_difference(truth.begin(), truth.end(), inferred.begin(), inferred.end(), std::back_inserter(only_truth));
  return ConfusionCounts{both.size(), only_inferred.size(), only_truth.size()};
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("classify examples") {
    EdgeSet full;
    for (std::uint64_t i = 0; i < 150; ++i) full.insert(E(i, i + 1000));
    CHECK(classify_edges(full, full) == ConfusionCounts{150, 0, 0});
    CHECK(classify_edges(EdgeSet{}, full) == ConfusionCounts{0, 0, 150});
    CHECK(classify_edges(EdgeSet{E(1, 2), E(2, 3), E(9, 9)}, EdgeSet{E(1, 2), E(2, 3), E(3, 4)}) ==
          ConfusionCounts{2, 1, 1});
  }

  TEST_CASE("classify agrees with the set-algebra oracle") {
    Rng rng(1);
    for (int trial = 0; trial < 500; ++trial) {
      EdgeSet a;
      EdgeSet b;
      for (int i = 0; i < 40; ++i) {
        const Edge e = E(rng.uniform_index(8), rng.uniform_index(8));
        if (rng.uniform_index(3) != 0) a.insert(e);
        if (rng.uniform_index(3) != 0) b.insert(e);
      }
      CHECK(classify_edges(a, b) == oracle(a, b));
    }
  }

  TEST_CASE("classify against a topology ignores monitor edges") {
    Rng rng(2);
    Topology topo(3);
    topo.add_monitor();
    for (int i = 0; i < 8; ++i) topo.add_node(Role::Honest, rng, true);
    GlobalSnapshot g;
    g.edges = topo.all_edges();  // includes monitor edges
    const ConfusionCounts c = classify_edges(g, topo);
    CHECK(c.tp == topo.peer_edges().size());
    CHECK(c.fn == 0);
    CHECK(c.tp + c.fn == topo.peer_edges().size());
  }

  TEST_CASE("precision and recall") {
    CHECK(*precision(ConfusionCounts{9, 1, 0}) == doctest::Approx(0.9));
    CHECK(*precision(ConfusionCounts{150, 0, 7}) == doctest::Approx(1.0));
    CHECK(*recall(ConfusionCounts{9, 0, 1}) == doctest::Approx(0.9));
    CHECK(*recall(ConfusionCounts{0, 3, 5}) == doctest::Approx(0.0));
    CHECK_FALSE(precision(ConfusionCounts{0, 0, 4}).has_value());
    CHECK_FALSE(recall(ConfusionCounts{0, 4, 0}).has_value());
  }

  TEST_CASE("expected overhead") {
    CHECK(expected_overhead(8, 117, 1) == 243);
    CHECK(expected_overhead(0, 0, 4) == 4);
    CHECK(expected_overhead(3, 5, 4) == 56);
    // Direct formula evaluation over a grid.
    for (std::uint64_t o = 0; o < 6; ++o) {
      for (std::uint64_t i = 0; i < 6; ++i) {
        for (std::uint64_t g = 0; g < 6; ++g) CHECK(expected_overhead(o, i, g) == (o + 2 * i + 1) * g);
      }
    }
  }

  TEST_CASE("audit flags a node whose count is off") {
    Rng rng(3);
    Topology topo(3);
    topo.add_monitor();
    for (int i = 0; i < 5; ++i) topo.add_node(Role::Honest, rng, true);
    OverheadLedger ledger;
    for (NodeId n : topo.peers()) {
      auto& c = ledger.at(n);
      c.marker_forwarded = topo.peer_outbound(n).size();
      c.marker_from_peer = topo.peer_inbound(n).size();
      c.marker_to_monitor = topo.peer_inbound(n).size();
      c.verified = 1;
    }
    AuditReport ok = audit_overhead(ledger, topo, 1);
    CHECK(ok.clean());
    CHECK(ok.nodes_checked == 5);

    const NodeId victim = topo.peers()[2];
    ledger.at(victim).marker_forwarded -= 1;
    const AuditReport bad = audit_overhead(ledger, topo, 1);
    REQUIRE(bad.discrepancies.size() == 1);
    CHECK(bad.discrepancies[0].node == victim);
    CHECK(bad.discrepancies[0].measured + 1 == bad.discrepancies[0].expected);
  }

  TEST_CASE("with no monitors everything is expected to be zero") {
    Rng rng(4);
    Topology topo(3);
    for (int i = 0; i < 5; ++i) topo.add_node(Role::Honest, rng, true);
    const AuditReport r = audit_overhead(OverheadLedger{}, topo, 0);
    CHECK(r.clean());
    CHECK(r.nodes_checked == 5);
  }

  TEST_CASE("counts accumulate") {
    ConfusionCounts a{1, 2, 3};
    a += ConfusionCounts{10, 20, 30};
    CHECK(a == ConfusionCounts{11, 22, 33});
  }
}
