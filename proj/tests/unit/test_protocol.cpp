#include <map>

#include "atom/protocol.hpp"
#include "atom/sim.hpp"
#include "doctest.h"

using namespace atom;

namespace {

const NodeId M1{1};
const NodeId M2{2};
const NodeId M3{3};
const NodeId M4{4};
const NodeSet kMonitors{M1, M2, M3, M4};

NodeState node(std::uint64_t id, NodeSet out, NodeSet in, NodeSet monitors = kMonitors) {
  NodeState s(NodeId{id}, std::move(monitors), 3);
  for (NodeId p : out) s.connect(p, Direction::Outbound);
  for (NodeId p : in) s.connect(p, Direction::Inbound);
  return s;
}

VerifiedMsg verified(NodeSet peers) { return VerifiedMsg{std::move(peers)}; }

}  // namespace

TEST_SUITE("protocol") {
  TEST_CASE("target forwards a monitor's marker to every outbound peer") {
    const NodeState n = node(10, {NodeId{11}, NodeId{12}, NodeId{13}}, {NodeId{14}});
    const Marker m{NodeId{10}, M1, 77};
    const auto actions = handle_marker(n, M1, m);
    REQUIRE(actions.size() == 3);
    CHECK(actions[0] == SendAction{NodeId{11}, m});
    CHECK(actions[1] == SendAction{NodeId{12}, m});
    CHECK(actions[2] == SendAction{NodeId{13}, m});
  }

  TEST_CASE("peer returns a marker from its inbound target to the monitor") {
    const NodeState p = node(20, {}, {NodeId{10}});
    const Marker m{NodeId{10}, M2, 5};
    const auto actions = handle_marker(p, NodeId{10}, m);
    REQUIRE(actions.size() == 1);
    CHECK(actions[0] == SendAction{M2, m});
  }

  TEST_CASE("markers from outbound peers are dropped") {
    const NodeState p = node(20, {NodeId{10}}, {});
    CHECK(handle_marker(p, NodeId{10}, Marker{NodeId{10}, M1, 5}).empty());
  }

  TEST_CASE("markers relayed by someone other than the target are dropped") {
    const NodeState p = node(20, {}, {NodeId{30}});
    CHECK(handle_marker(p, NodeId{30}, Marker{NodeId{10}, M1, 5}).empty());
  }

  TEST_CASE("markers naming a monitor outside the agreed set are dropped") {
    const NodeState n = node(10, {NodeId{11}}, {});
    const NodeId rogue{99};
    CHECK(handle_marker(n, rogue, Marker{NodeId{10}, rogue, 1}).empty());
    // A real monitor sending on behalf of another is also not "from the monitor".
    CHECK(handle_marker(n, M2, Marker{NodeId{10}, M1, 1}).empty());
  }

  TEST_CASE("threshold rule matches the rational comparison for every phi") {
    // Oracle: phi <= |G| / 2 evaluated exactly as fractions.
    for (std::size_t g = 1; g <= 9; ++g) {
      for (int phi = 0; phi <= static_cast<int>(g); ++phi) {
        const bool oracle = static_cast<double>(phi) <= static_cast<double>(g) / 2.0;
        CHECK(below_threshold(phi, g) == oracle);
      }
    }
    CHECK(below_threshold(2, 4));
    CHECK_FALSE(below_threshold(3, 4));
    CHECK_FALSE(below_threshold(2, 3));
    CHECK(below_threshold(1, 3));
  }

  TEST_CASE("new connections start fully confirmed") {
    NodeState n = node(10, {NodeId{11}}, {NodeId{12}});
    CHECK(n.reputation.reputation(NodeId{11}) == 4);
    CHECK(n.reputation.reputation(NodeId{12}) == 4);
    CHECK(n.reputation.rounds_seen(NodeId{11}, M1) == 0);
  }

  TEST_CASE("absent from three lists past the safe period: disconnect and ban") {
    NodeState n = node(10, {NodeId{11}}, {});
    const NodeId p{11};
    std::vector<DisconnectAction> actions;
    for (int round = 0; round < 3; ++round) {
      actions = handle_verified(n, M1, verified({p}));
      CHECK(actions.empty());
      for (NodeId m : {M2, M3}) {
        actions = handle_verified(n, m, verified({}));
        CHECK(actions.empty());
      }
      if (round < 2) CHECK(handle_verified(n, M4, verified({p})).empty());
    }
    CHECK(n.reputation.reputation(p) == 2);
    // M4 reports a third time (still confirming): phi = 2 -> below threshold.
    actions = handle_verified(n, M4, verified({p}));
    REQUIRE(actions.size() == 1);
    CHECK(actions[0].peer == p);
    CHECK(n.banned.count(p) == 1);
  }

  TEST_CASE("phi of 1 out of 4 disconnects, full confirmation keeps") {
    NodeState n = node(10, {NodeId{11}, NodeId{12}}, {});
    const NodeId bad{11};
    const NodeId good{12};
    std::vector<DisconnectAction> last;
    for (int round = 0; round < 3; ++round) {
      for (NodeId m : {M1, M2, M3}) last = handle_verified(n, m, verified({good}));
      last = handle_verified(n, M4, verified({good, bad}));
    }
    REQUIRE(last.size() == 1);
    CHECK(last[0].peer == bad);
    CHECK(n.reputation.reputation(good) == 4);
  }

  TEST_CASE("safe period protects a peer connected one round ago") {
    NodeState n = node(10, {NodeId{11}}, {});
    for (NodeId m : kMonitors) CHECK(handle_verified(n, m, verified({})).empty());
    CHECK(n.reputation.reputation(NodeId{11}) == 0);
    CHECK_FALSE(n.reputation.past_safe_period(NodeId{11}));
    CHECK(check_reputation(n, NodeId{11}) == Verdict::Keep);
  }

  TEST_CASE("verified from an unknown monitor is rejected") {
    NodeState n = node(10, {NodeId{11}}, {});
    try {
      handle_verified(n, NodeId{99}, verified({}));
      FAIL("expected UnknownMonitor");
    } catch (const ProtocolError& e) {
      CHECK(e.kind() == ProtocolError::Kind::UnknownMonitor);
    }
  }

  TEST_CASE("check_reputation on a non-peer fails") {
    NodeState n = node(10, {NodeId{11}}, {});
    CHECK_THROWS_AS(check_reputation(n, NodeId{55}), ProtocolError);
  }

  TEST_CASE("disconnect purges reputation; reconnect starts fresh") {
    NodeState n = node(10, {NodeId{11}}, {});
    handle_verified(n, M1, verified({}));
    CHECK(n.reputation.reputation(NodeId{11}) == 3);
    n.disconnect(NodeId{11});
    CHECK_FALSE(n.reputation.tracks(NodeId{11}));
    n.connect(NodeId{11}, Direction::Inbound);
    CHECK(n.reputation.reputation(NodeId{11}) == 4);
    CHECK(n.reputation.rounds_seen(NodeId{11}, M1) == 0);
  }

  TEST_CASE("reputation stays within [0, |G|] under random verified streams") {
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t g = 1 + rng.uniform_index(6);
      NodeSet monitors;
      for (std::size_t i = 0; i < g; ++i) monitors.insert(NodeId{i + 1});
      NodeSet peers;
      for (int i = 0; i < 5; ++i) peers.insert(NodeId{100 + static_cast<std::uint64_t>(i)});
      NodeState n(NodeId{50}, monitors, 3);
      for (NodeId p : peers) n.connect(p, Direction::Outbound);
      std::map<NodeId, int> reports;
      for (int step = 0; step < 40; ++step) {
        const NodeId m{1 + rng.uniform_index(g)};
        NodeSet list;
        for (NodeId p : n.peers()) {
          if (rng.uniform_index(2) == 0) list.insert(p);
        }
        const auto actions = handle_verified(n, m, verified(list));
        ++reports[m];
        for (const DisconnectAction& a : actions) {
          // Never before every monitor reported safe_rounds times.
          CHECK(reports.size() == g);
          for (const auto& [mon, count] : reports) CHECK(count >= 3);
          n.disconnect(a.peer);
        }
        for (NodeId p : n.peers()) {
          const int phi = n.reputation.reputation(p);
          CHECK(phi >= 0);
          CHECK(phi <= static_cast<int>(g));
        }
      }
    }
  }

  TEST_CASE("honest node never forwards markers for monitors outside its set") {
    Rng rng(22);
    const NodeState n = node(10, {NodeId{11}, NodeId{12}}, {NodeId{13}});
    for (int i = 0; i < 500; ++i) {
      const NodeId from{1 + rng.uniform_index(20)};
      const Marker m{NodeId{1 + rng.uniform_index(20)}, NodeId{1 + rng.uniform_index(20)}, rng()};
      for (const SendAction& a : handle_marker(n, from, m)) CHECK(kMonitors.count(a.marker.monitor) == 1);
    }
  }
}
