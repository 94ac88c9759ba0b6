// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swarmnet/ring.hpp"

namespace swarmnet {

using NodeId = std::uint64_t;
using SwarmId = std::uint64_t;

// Data movement orders produced by a rebalance. Record selectors are
// symbolic; the storage layer evaluates them against the post-rebalance
// swarm set when the plan executes.

// Existing members of `swarm` push their full record set to `new_member`.
struct PushAll {
    SwarmId swarm;
    NodeId new_member;
    bool operator==(const PushAll&) const = default;
};

// `source` (a member of the former or shrinking owner) transfers the records
// whose recipient key now maps to `to`; every member of `from` then drops
// those records locally.
struct RouteRecords {
    NodeId source;
    SwarmId from;
    SwarmId to;
    bool operator==(const RouteRecords&) const = default;
};

struct MigrationPlan {
    std::vector<PushAll> pushes;
    std::vector<RouteRecords> routes;
    bool empty() const { return pushes.empty() && routes.empty(); }
};

struct RegistryEvent {
    enum class Kind { node_join, node_leave };
    Kind kind;
    NodeId node;
};

// The swarm map: which nodes form which swarms, plus the pool of nodes
// waiting for a slot. All mutation funnels through apply(), which restores
// the size invariants and emits the matching migration plan.
class SwarmRegistry {
public:
    explicit SwarmRegistry(Ring ring = Ring(), SwarmLimits limits = {});

    MigrationPlan apply(const RegistryEvent& event, ByteView blockhash);

    const std::map<SwarmId, std::vector<NodeId>>& swarms() const {
        return swarms_;
    }
    const std::vector<NodeId>& pending() const { return pending_; }
    std::optional<SwarmId> swarm_of(NodeId node) const;
    std::vector<SwarmId> swarm_ids() const;
    std::size_t node_count() const;

    SwarmId swarm_for_point(std::uint64_t point) const;
    SwarmId swarm_for_key(const PublicKey& key) const;

    const Ring& ring() const { return ring_; }
    const SwarmLimits& limits() const { return limits_; }

    // Append-only narration of every structural action, for auditing and
    // tests: join, place, steal, dissolve, create.
    const std::vector<std::string>& log() const { return log_; }

    std::string export_snapshot() const;
    static std::optional<SwarmRegistry> import_snapshot(std::string_view text,
                                                        Ring ring = Ring(),
                                                        SwarmLimits limits = {});

private:
    struct Actions;

    void place_pending(ByteView blockhash, Actions& acts);
    bool fix_starving(ByteView blockhash, Actions& acts);
    bool create_swarms(ByteView blockhash, Actions& acts);
    void stabilize(ByteView blockhash, Actions& acts);
    MigrationPlan finalize_plan(const Actions& acts) const;

    Ring ring_;
    SwarmLimits limits_;
    std::map<SwarmId, std::vector<NodeId>> swarms_;
    std::vector<NodeId> pending_;
    std::vector<std::string> log_;
};

// The rebalance contract as a pure function: same inputs, same outputs, the
// input registry untouched.
std::pair<SwarmRegistry, MigrationPlan> rebalance(const SwarmRegistry& registry,
                                                  const RegistryEvent& event,
                                                  ByteView blockhash);

}  // namespace swarmnet
