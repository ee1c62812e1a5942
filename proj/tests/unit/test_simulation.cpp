#include <sstream>

#include "atom/experiment.hpp"
#include "atom/simulation.hpp"
#include "doctest.h"

using namespace atom;

namespace {

ExperimentConfig static_honest(std::size_t nodes, std::size_t monitors, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.nodes = nodes;
  cfg.monitors = monitors;
  cfg.churn = false;
  cfg.single_sweep = true;
  cfg.seed = seed;
  cfg.duration_ms = 30'000;
  cfg.probe_every_ms = 30'000;
  return cfg;
}

void check_views_match(const Simulation& sim) {
  for (NodeId n : sim.topology().peers()) {
    const NodeState& s = sim.node_state(n);
    CHECK(s.outbound == sim.topology().peer_outbound(n));
    CHECK(s.inbound == sim.topology().peer_inbound(n));
  }
}

}  // namespace

TEST_SUITE("simulation") {
  TEST_CASE("one sweep on a static honest network reproduces the topology") {
    Simulation sim(static_honest(20, 4, 3));
    std::size_t rounds = 0;
    bool exact = true;
    sim.on_round_closed([&](const RoundRecord& r) {
      ++rounds;
      if (r.collected != sim.topology().peer_outbound(r.target)) exact = false;
    });
    sim.run_until(SimTime{5'000});
    CHECK(rounds == 20 * 4);
    CHECK(exact);
    const EdgeSet truth = sim.topology().peer_edges();
    for (const MonitorState& m : sim.monitors()) CHECK(m.snapshot().edges() == truth);
    CHECK(sim.global_snapshot().edges == truth);
  }

  TEST_CASE("a default run probes 20 times and stays consistent") {
    ExperimentConfig cfg;
    cfg.variability_s = 1;
    cfg.malicious_pct = 0.2;
    Simulation sim(cfg);
    sim.run_to_end();
    CHECK(sim.probes().size() == 20);
    CHECK(sim.probes().front().time == SimTime{30'000});
    CHECK(sim.probes().back().time == SimTime{600'000});
    CHECK(sim.churn_events() > 400);
    sim.topology().audit();
    check_views_match(sim);
    for (const ProbeRecord& p : sim.probes()) CHECK(p.counts.tp + p.counts.fn > 0);
    for (const MonitorState& m : sim.monitors()) {
      for (NodeId n : m.snapshot().nodes()) {
        CHECK(m.snapshot().frequency(n) >= 1);
        CHECK(m.snapshot().frequency(n) <= 10);
        CHECK(sim.topology().contains(n));
        CHECK_FALSE(sim.topology().is_monitor(n));
      }
    }
  }

  TEST_CASE("probe counts cover exactly the ground-truth edges") {
    ExperimentConfig cfg;
    cfg.variability_s = 5;
    cfg.malicious_pct = 0.3;
    cfg.duration_ms = 120'000;
    Simulation sim(cfg);
    std::size_t probes = 0;
    sim.on_probe([&](const ProbeRecord& p) {
      CHECK(p.counts.tp + p.counts.fn == sim.topology().peer_edges().size());
      ++probes;
    });
    sim.run_to_end();
    CHECK(probes == 4);
  }

  TEST_CASE("static honest single sweep matches the overhead formula") {
    Simulation sim(static_honest(10, 4, 9));
    sim.run_to_end();
    const AuditReport report = audit_overhead(sim.ledger(), sim.topology(), 4);
    CHECK(report.nodes_checked == 10);
    CHECK(report.clean());
    for (NodeId n : sim.topology().peers()) CHECK(sim.ledger().get(n).marker_from_monitor == 4);
  }

  TEST_CASE("a peer that drops markers is cut off and banned") {
    ExperimentConfig cfg = static_honest(12, 4, 5);
    cfg.single_sweep = false;
    cfg.malicious_pct = 1.0 / 12.0;
    cfg.adversary_mode = AdversaryPolicy::Mode::Single;
    cfg.adversary_behavior = 6;
    cfg.duration_ms = 90'000;
    cfg.probe_every_ms = 90'000;
    Simulation sim(cfg);
    const std::vector<NodeId> bad = sim.topology().peers(Role::Malicious);
    REQUIRE(bad.size() == 1);
    const NodeSet victims = sim.topology().peer_inbound(bad[0]);
    sim.run_to_end();
    for (NodeId v : victims) {
      CHECK_FALSE(sim.topology().has_edge(v, bad[0]));
      CHECK(sim.topology().is_banned(v, bad[0]));
    }
    CHECK(sim.disconnects().size() >= victims.size());
    sim.topology().audit();
    check_views_match(sim);
    // The victims replaced the lost connection.
    for (NodeId v : victims) CHECK(sim.topology().peer_outbound(v).size() == 3);
  }

  TEST_CASE("direct edits update node views without replenishing") {
    Simulation sim(static_honest(8, 2, 1));
    const NodeId a = sim.topology().peers()[0];
    const NodeId b = *sim.topology().peer_inbound(a).begin();
    CHECK(sim.close_connection(b, a));
    CHECK(sim.node_state(b).outbound.count(a) == 0);
    CHECK(sim.topology().peer_outbound(b).size() == 2);
    CHECK(sim.open_connection(b, a) == ConnectStatus::Ok);
    CHECK(sim.node_state(a).inbound.count(b) == 1);
  }

  TEST_CASE("link latency is fixed per link and inside the configured range") {
    Simulation sim(static_honest(10, 2, 4));
    for (NodeId a : sim.topology().peers()) {
      for (NodeId b : sim.topology().peers()) {
        const auto d = sim.link_latency(a, b).count();
        CHECK(d >= 5);
        CHECK(d <= 50);
        CHECK(sim.link_latency(b, a).count() == d);
      }
    }
  }

  TEST_CASE("same seed, same trace and snapshots") {
    auto run = [](std::string& trace, std::string& snaps) {
      ExperimentConfig cfg;
      cfg.variability_s = 1;
      cfg.malicious_pct = 0.3;
      cfg.duration_ms = 90'000;
      std::ostringstream t;
      std::ostringstream s;
      const ExperimentReport r = run_experiment(cfg, RunSinks{&t, &s});
      trace = t.str();
      snaps = s.str();
      return r.trace;
    };
    std::string t1;
    std::string t2;
    std::string s1;
    std::string s2;
    CHECK(run(t1, s1) == run(t2, s2));
    CHECK(t1 == t2);
    CHECK(s1 == s2);
    CHECK(t1.find("\tchurn\t") != std::string::npos);
    CHECK(s1.find("\tglobal\t") != std::string::npos);
  }

  TEST_CASE("different seeds give different runs") {
    ExperimentConfig a;
    a.duration_ms = 60'000;
    ExperimentConfig b = a;
    b.seed = 2;
    CHECK_FALSE(run_experiment(a).trace == run_experiment(b).trace);
  }
}
