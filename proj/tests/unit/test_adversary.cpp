#include <algorithm>

#include "atom/adversary.hpp"
#include "atom/monitor.hpp"
#include "doctest.h"

using namespace atom;

namespace {

const NodeId M{1};
const NodeSet kMonitors{M, NodeId{2}};

NodeState node(std::uint64_t id, NodeSet out, NodeSet in) {
  NodeState s(NodeId{id}, kMonitors, 3);
  for (NodeId p : out) s.connect(p, Direction::Outbound);
  for (NodeId p : in) s.connect(p, Direction::Inbound);
  return s;
}

NodeSet recipients(const std::vector<SendAction>& actions) {
  NodeSet out;
  for (const SendAction& a : actions) out.insert(a.to);
  return out;
}

AdversaryPolicy policy_with(std::initializer_list<std::uint64_t> colluders) {
  AdversaryPolicy p;
  for (auto c : colluders) p.colluders->insert(NodeId{c});
  return p;
}

}  // namespace

TEST_SUITE("adversary") {
  TEST_CASE("behavior ids map to the six behaviors") {
    CHECK_FALSE(behavior_from_int(0).has_value());
    CHECK_FALSE(behavior_from_int(7).has_value());
    for (int i = 1; i <= 6; ++i) CHECK(static_cast<int>(*behavior_from_int(i)) == i);
  }

  TEST_CASE("worst case: monitor marker goes to outbound peers and connected colluders") {
    // N=10 malicious; outbound {11 honest, 12 colluder}; inbound {13 colluder, 14 honest}.
    const NodeState n = node(10, {NodeId{11}, NodeId{12}}, {NodeId{13}, NodeId{14}});
    AdversaryPolicy policy = policy_with({10, 12, 13, 20});
    AdversaryMemory mem;
    Rng rng(1);
    const Marker mk{NodeId{10}, M, 9};
    CHECK(recipients(malicious_handle_marker(n, policy, mem, M, mk, rng)) ==
          NodeSet{NodeId{11}, NodeId{12}, NodeId{13}});

    policy.forward_to_honest_outbound = false;
    CHECK(recipients(malicious_handle_marker(n, policy, mem, M, mk, rng)) == NodeSet{NodeId{12}, NodeId{13}});
  }

  TEST_CASE("worst case: colluder relay to the monitor, honest markers dropped") {
    // C=13 has N=10 as an outbound peer (10 is C's outbound, C is 10's inbound).
    const NodeState c = node(13, {NodeId{10}}, {NodeId{30}});
    const AdversaryPolicy policy = policy_with({10, 13});
    AdversaryMemory mem;
    Rng rng(2);
    const Marker from_colluder{NodeId{10}, M, 4};
    const auto relay = malicious_handle_marker(c, policy, mem, NodeId{10}, from_colluder, rng);
    REQUIRE(relay.size() == 1);
    CHECK(relay[0] == SendAction{M, from_colluder});

    // Honest inbound 30 is hidden.
    CHECK(malicious_handle_marker(c, policy, mem, NodeId{30}, Marker{NodeId{30}, M, 5}, rng).empty());
  }

  TEST_CASE("worst case relay gives the monitor a fake edge between colluders only") {
    // Monitor scans malicious N=10; colluder 13 is N's inbound peer, so the
    // monitor ends up believing 10->13.
    MonitorState mon(M, {});
    for (auto id : {10, 11, 13}) mon.handle_node_arrival(NodeId{static_cast<std::uint64_t>(id)});
    Rng rng(3);
    const Marker mk = mon.start_peev_round(NodeId{10}, rng, SimTime{0}).first;
    const NodeState n = node(10, {NodeId{11}}, {NodeId{13}});
    const NodeState c = node(13, {NodeId{10}}, {});
    const NodeState h = node(11, {}, {NodeId{10}});
    const AdversaryPolicy policy = policy_with({10, 13});
    AdversaryMemory mem;
    for (const SendAction& a : malicious_handle_marker(n, policy, mem, M, mk, rng)) {
      std::vector<SendAction> next;
      if (a.to == NodeId{13}) next = malicious_handle_marker(c, policy, mem, NodeId{10}, a.marker, rng);
      if (a.to == NodeId{11}) next = handle_marker(h, NodeId{10}, a.marker);
      for (const SendAction& b : next) {
        if (b.to == M) {
          const NodeId sender = a.to;
          mon.receive_marker(sender, b.marker);
        }
      }
    }
    const NodeSet got = mon.close_peev_round(NodeId{10});
    CHECK(got == NodeSet{NodeId{11}, NodeId{13}});
    for (NodeId p : got) {
      if (p != NodeId{11}) CHECK(policy.is_colluder(p));
    }
  }

  TEST_CASE("forward-to-inbound reaches inbound peers, who drop it") {
    const NodeState n = node(10, {NodeId{11}}, {NodeId{12}});
    AdversaryPolicy policy = policy_with({10});
    policy.mode = AdversaryPolicy::Mode::Single;
    policy.behavior = Behavior::ForwardToInbound;
    AdversaryMemory mem;
    Rng rng(4);
    const Marker mk{NodeId{10}, M, 1};
    const auto out = malicious_handle_marker(n, policy, mem, M, mk, rng);
    CHECK(recipients(out) == NodeSet{NodeId{11}, NodeId{12}});
    // 12 has 10 as an outbound peer: drop.
    const NodeState inbound_peer = node(12, {NodeId{10}}, {});
    CHECK(handle_marker(inbound_peer, NodeId{10}, mk).empty());
  }

  TEST_CASE("replay resends stale markers, the monitor ignores them") {
    MonitorState mon(M, {});
    for (auto id : {10, 11}) mon.handle_node_arrival(NodeId{static_cast<std::uint64_t>(id)});
    Rng rng(5);
    const NodeState p = node(11, {}, {NodeId{10}});
    AdversaryPolicy policy = policy_with({11});
    policy.mode = AdversaryPolicy::Mode::Single;
    policy.behavior = Behavior::Replay;
    AdversaryMemory mem;

    const Marker first = mon.start_peev_round(NodeId{10}, rng, SimTime{0}).first;
    for (const SendAction& a : malicious_handle_marker(p, policy, mem, NodeId{10}, first, rng)) {
      if (a.to == M) mon.receive_marker(NodeId{11}, a.marker);
    }
    CHECK(mon.close_peev_round(NodeId{10}) == NodeSet{NodeId{11}});

    // Next round: 11 is no longer connected to 10 but replays the old marker.
    (void)mon.start_peev_round(NodeId{10}, rng, SimTime{2000});
    const auto replayed = malicious_handle_marker(p, policy, mem, NodeId{30}, Marker{NodeId{30}, M, 8}, rng);
    REQUIRE_FALSE(replayed.empty());
    bool saw_stale = false;
    for (const SendAction& a : replayed) {
      if (a.marker == first) saw_stale = true;
      if (a.to == M) mon.receive_marker(NodeId{11}, a.marker);
    }
    CHECK(saw_stale);
    CHECK(mon.close_peev_round(NodeId{10}).empty());
  }

  TEST_CASE("tamper changes exactly one field") {
    Rng rng(6);
    const Marker mk{NodeId{10}, M, 12345};
    int target = 0;
    int monitor = 0;
    int value = 0;
    for (int i = 0; i < 3000; ++i) {
      const Marker t = tamper(mk, rng);
      const int changed = (t.target != mk.target) + (t.monitor != mk.monitor) + (t.value != mk.value);
      CHECK(changed == 1);
      target += t.target != mk.target;
      monitor += t.monitor != mk.monitor;
      value += t.value != mk.value;
    }
    CHECK(target > 800);
    CHECK(monitor > 800);
    CHECK(value > 800);
  }

  TEST_CASE("tampered markers never insert an edge") {
    Rng rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
      MonitorState mon(M, {});
      for (auto id : {10, 11, 12}) mon.handle_node_arrival(NodeId{static_cast<std::uint64_t>(id)});
      const Marker mk = mon.start_peev_round(NodeId{10}, rng, SimTime{0}).first;
      const NodeState p = node(11, {}, {NodeId{10}});
      AdversaryPolicy policy = policy_with({11});
      policy.mode = AdversaryPolicy::Mode::Single;
      policy.behavior = Behavior::Tamper;
      AdversaryMemory mem;
      for (const SendAction& a : malicious_handle_marker(p, policy, mem, NodeId{10}, mk, rng)) {
        CHECK_FALSE(a.marker == mk);
        mon.receive_marker(NodeId{11}, a.marker);
      }
      CHECK(mon.snapshot().edges().empty());
      CHECK(mon.close_peev_round(NodeId{10}).empty());
    }
  }

  TEST_CASE("drop behaviors") {
    const NodeState n = node(10, {NodeId{11}}, {NodeId{12}});
    AdversaryPolicy policy = policy_with({10});
    policy.mode = AdversaryPolicy::Mode::Single;
    AdversaryMemory mem;
    Rng rng(8);

    policy.behavior = Behavior::DropFromMonitor;
    CHECK(malicious_handle_marker(n, policy, mem, M, Marker{NodeId{10}, M, 1}, rng).empty());
    CHECK(malicious_handle_marker(n, policy, mem, NodeId{12}, Marker{NodeId{12}, M, 1}, rng).size() == 1);

    policy.behavior = Behavior::DropFromPeer;
    CHECK(malicious_handle_marker(n, policy, mem, M, Marker{NodeId{10}, M, 1}, rng).size() == 1);
    CHECK(malicious_handle_marker(n, policy, mem, NodeId{12}, Marker{NodeId{12}, M, 1}, rng).empty());
    policy.drop_for_monitors = {NodeId{2}};
    CHECK(malicious_handle_marker(n, policy, mem, NodeId{12}, Marker{NodeId{12}, M, 1}, rng).size() == 1);
    CHECK(malicious_handle_marker(n, policy, mem, NodeId{12}, Marker{NodeId{12}, NodeId{2}, 1}, rng).empty());
  }

  TEST_CASE("relay via colluder reaches non-peers, who drop it") {
    // 10 -> 13 (colluder) -> 40 (honest, not a peer of 10).
    const NodeState n = node(10, {NodeId{11}}, {NodeId{13}});
    const NodeState c = node(13, {NodeId{10}, NodeId{40}}, {});
    AdversaryPolicy policy = policy_with({10, 13});
    policy.mode = AdversaryPolicy::Mode::Single;
    policy.behavior = Behavior::RelayViaColluder;
    AdversaryMemory mem;
    Rng rng(9);
    const Marker mk{NodeId{10}, M, 3};
    const auto first = malicious_handle_marker(n, policy, mem, M, mk, rng);
    CHECK(recipients(first).count(NodeId{13}) == 1);
    const auto second = malicious_handle_marker(c, policy, mem, NodeId{10}, mk, rng);
    CHECK(recipients(second) == NodeSet{NodeId{40}});
    const NodeState honest = node(40, {}, {NodeId{13}});
    CHECK(handle_marker(honest, NodeId{13}, mk).empty());
  }

  TEST_CASE("malicious nodes ignore verified messages") {
    const NodeState n = node(10, {NodeId{11}}, {});
    CHECK(malicious_handle_verified(n, policy_with({10}), M, VerifiedMsg{}).empty());
  }
}
