// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "swarmnet/registry.hpp"
#include "swarmnet/rng.hpp"

using namespace swarmnet;

namespace {

Bytes test_blockhash(std::uint64_t salt = 0) {
    Bytes h(32, 0);
    h[31] = static_cast<std::uint8_t>(salt + 1);
    return h;
}

MigrationPlan join(SwarmRegistry& reg, NodeId n, std::uint64_t salt = 0) {
    return reg.apply({RegistryEvent::Kind::node_join, n}, test_blockhash(salt));
}

MigrationPlan leave(SwarmRegistry& reg, NodeId n, std::uint64_t salt = 0) {
    return reg.apply({RegistryEvent::Kind::node_leave, n},
                     test_blockhash(salt));
}

// Every node appears in exactly one place; sizes respect the limits except
// for a sole undersized swarm.
void check_invariants(const SwarmRegistry& reg) {
    const auto& limits = reg.limits();
    std::set<NodeId> seen;
    for (const auto& [id, members] : reg.swarms()) {
        CHECK(id < reg.ring().modulus());
        CHECK(members.size() <= limits.n_max);
        if (reg.swarms().size() > 1) CHECK(members.size() >= limits.n_min);
        CHECK(std::is_sorted(members.begin(), members.end()));
        for (NodeId n : members) CHECK(seen.insert(n).second);
    }
    for (NodeId n : reg.pending()) CHECK(seen.insert(n).second);
}

}  // namespace

TEST_CASE("the first swarm forms once seven nodes are waiting") {
    SwarmRegistry reg;
    for (NodeId n = 1; n <= 6; ++n) {
        join(reg, n);
        CHECK(reg.swarms().empty());
        CHECK(reg.pending().size() == n);
    }
    join(reg, 7);
    REQUIRE(reg.swarms().size() == 1);
    CHECK(reg.pending().empty());
    CHECK(reg.swarms().begin()->first == 0);  // first id on an empty ring
    CHECK(reg.swarms().begin()->second.size() == 7);
    check_invariants(reg);
}

TEST_CASE("duplicate joins and unknown leaves are ignored") {
    SwarmRegistry reg;
    join(reg, 1);
    auto log_before = reg.log().size();
    CHECK(join(reg, 1).empty());
    CHECK(leave(reg, 99).empty());
    CHECK(reg.log().size() == log_before);
    CHECK(reg.node_count() == 1);
}

TEST_CASE("extra nodes fill the open swarm and then queue") {
    SwarmRegistry reg;
    for (NodeId n = 1; n <= 7; ++n) join(reg, n);

    for (NodeId n = 8; n <= 10; ++n) {
        auto plan = join(reg, n);
        // The newcomer gets the swarm's existing records pushed.
        REQUIRE(plan.pushes.size() == 1);
        CHECK(plan.pushes[0].new_member == n);
        CHECK(plan.routes.empty());
    }
    CHECK(reg.swarms().begin()->second.size() == 10);

    join(reg, 11);
    CHECK(reg.pending() == std::vector<NodeId>{11});
    check_invariants(reg);
}

TEST_CASE("a second swarm forms at the ring antipode with routed handover") {
    SwarmRegistry reg;
    for (NodeId n = 1; n <= 16; ++n) join(reg, n);
    CHECK(reg.swarms().size() == 1);
    CHECK(reg.pending().size() == 6);

    auto plan = join(reg, 17);
    REQUIRE(reg.swarms().size() == 2);
    CHECK(reg.pending().empty());

    SwarmId created = reg.swarm_ids()[1];
    CHECK(created == 9223372036854775807ull);  // midpoint opposite id 0
    CHECK(reg.swarms().at(created).size() == 7);

    // The old swarm hands over the records the new one now owns.
    REQUIRE(plan.routes.size() == 1);
    CHECK(plan.routes[0].from == 0);
    CHECK(plan.routes[0].to == created);
    CHECK(plan.routes[0].source == reg.swarms().at(0).front());
    check_invariants(reg);
}

TEST_CASE("a starving swarm steals from the largest donor") {
    SwarmRegistry reg;
    for (NodeId n = 1; n <= 17; ++n) join(reg, n);
    SwarmId second = reg.swarm_ids()[1];

    // Drop the second swarm to n_min; no rebalance yet.
    std::vector<NodeId> second_members = reg.swarms().at(second);
    leave(reg, second_members[0]);
    leave(reg, second_members[1]);
    CHECK(reg.swarms().at(second).size() == 5);
    auto steal_log = [&] {
        std::size_t c = 0;
        for (const auto& line : reg.log())
            if (line.starts_with("steal")) ++c;
        return c;
    };
    CHECK(steal_log() == 0);

    // One more leave starves it; the ten-member swarm donates.
    auto plan = leave(reg, second_members[2]);
    CHECK(reg.swarms().at(second).size() == 5);
    CHECK(reg.swarms().at(0).size() == 9);
    CHECK(steal_log() == 1);
    REQUIRE(plan.pushes.size() == 1);
    CHECK(plan.pushes[0].swarm == second);
    check_invariants(reg);
}

TEST_CASE("with no donor the starving swarm dissolves and scatters records") {
    SwarmRegistry reg;
    for (NodeId n = 1; n <= 17; ++n) join(reg, n);
    SwarmId second = reg.swarm_ids()[1];

    // Shrink the first swarm to n_min so it cannot donate.
    while (reg.swarms().at(0).size() > 5) leave(reg, reg.swarms().at(0).front());
    CHECK(reg.swarms().at(0).size() == 5);

    std::vector<NodeId> doomed = reg.swarms().at(second);
    leave(reg, doomed[0]);
    leave(reg, doomed[1]);
    auto plan = leave(reg, doomed[2]);

    REQUIRE(reg.swarms().size() == 1);
    bool dissolved_logged = false;
    for (const auto& line : reg.log())
        if (line.starts_with("dissolve swarm=" + std::to_string(second)))
            dissolved_logged = true;
    CHECK(dissolved_logged);

    // The lowest surviving former member routes the data to every swarm
    // left standing, and the reabsorbed nodes get push orders.
    REQUIRE(plan.routes.size() == 1);
    CHECK(plan.routes[0].from == second);
    CHECK(plan.routes[0].to == 0);
    std::vector<NodeId> survivors(doomed.begin() + 3, doomed.end());
    CHECK(plan.routes[0].source ==
          *std::min_element(survivors.begin(), survivors.end()));
    CHECK(plan.pushes.size() == survivors.size());
    check_invariants(reg);
}

TEST_CASE("the sole swarm never dissolves, it just runs short") {
    SwarmRegistry reg;
    for (NodeId n = 1; n <= 7; ++n) join(reg, n);
    leave(reg, 1);
    leave(reg, 2);
    leave(reg, 3);
    REQUIRE(reg.swarms().size() == 1);
    CHECK(reg.swarms().begin()->second.size() == 4);
    for (const auto& line : reg.log()) CHECK_FALSE(line.starts_with("dissolve"));

    auto plan = join(reg, 20);
    CHECK(reg.swarms().begin()->second.size() == 5);
    REQUIRE(plan.pushes.size() == 1);
    CHECK(plan.pushes[0].new_member == 20);
}

TEST_CASE("rebalance is a pure function of registry, event and blockhash") {
    SwarmRegistry reg;
    for (NodeId n = 1; n <= 12; ++n) join(reg, n);

    RegistryEvent ev{RegistryEvent::Kind::node_join, 55};
    auto [next1, plan1] = rebalance(reg, ev, test_blockhash(9));
    auto [next2, plan2] = rebalance(reg, ev, test_blockhash(9));
    CHECK(next1.export_snapshot() == next2.export_snapshot());
    CHECK(plan1.pushes == plan2.pushes);
    CHECK(plan1.routes == plan2.routes);
    // Input untouched.
    CHECK(reg.node_count() == 12);
    CHECK_FALSE(reg.swarm_of(55).has_value());
}

TEST_CASE("snapshot round-trips through export and import") {
    SwarmRegistry reg;
    for (NodeId n = 1; n <= 13; ++n) join(reg, n);
    std::string snap = reg.export_snapshot();
    auto back = SwarmRegistry::import_snapshot(snap);
    REQUIRE(back.has_value());
    CHECK(back->export_snapshot() == snap);
    CHECK(back->node_count() == reg.node_count());
    CHECK(back->swarm_ids() == reg.swarm_ids());

    CHECK_FALSE(SwarmRegistry::import_snapshot("swarm x: 1,2").has_value());
    CHECK_FALSE(SwarmRegistry::import_snapshot("swarm 1 1,2").has_value());
}

TEST_CASE("keys map to the swarm nearest their ring point") {
    SwarmRegistry reg;
    for (NodeId n = 1; n <= 17; ++n) join(reg, n);
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
        PublicKey key{rng.bytes32()};
        SwarmId direct = reg.ring().assign_point(
            reg.ring().reduce_pubkey(key), reg.swarm_ids());
        CHECK(reg.swarm_for_key(key) == direct);
    }
    CHECK(SwarmRegistry().swarm_for_key(PublicKey{}) == kNoSwarm);
}

TEST_CASE("registry survives a random event storm with invariants intact") {
    SwarmRegistry reg;
    Rng rng(4242);
    std::set<NodeId> alive;
    NodeId next = 1;
    for (int step = 0; step < 400; ++step) {
        bool do_join = alive.size() < 8 || rng.chance(0.55);
        if (do_join) {
            NodeId n = next++;
            join(reg, n, rng.next());
            alive.insert(n);
        } else {
            // Pick an arbitrary live node to drop.
            auto it = alive.begin();
            std::advance(it, static_cast<long>(rng.below(alive.size())));
            leave(reg, *it, rng.next());
            alive.erase(it);
        }
        check_invariants(reg);
        CHECK(reg.node_count() == alive.size());
    }
}
