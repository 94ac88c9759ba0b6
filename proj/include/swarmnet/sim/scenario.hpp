// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swarmnet/ring.hpp"
#include "swarmnet/sntest.hpp"

namespace swarmnet::sim {

// Everything a run needs. Identical config (seed included) means a
// bitwise-identical event log and metrics.
struct SimConfig {
    std::uint64_t seed = 1;
    std::uint64_t duration_ms = 60'000;

    // network
    std::size_t node_count = 30;
    std::uint64_t latency_ms = 40;
    std::uint64_t jitter_ms = 20;
    double drop_rate = 0.0;
    std::uint64_t block_interval_ms = 10'000;
    std::uint64_t difficulty = 10;
    bool strict_propagation = false;
    std::uint64_t anti_entropy_ms = 10'000;
    SwarmLimits limits{};

    // clients
    std::size_t client_pairs = 0;
    std::uint64_t poll_interval_ms = 4'000;
    std::uint64_t send_interval_ms = 8'000;
    std::size_t sends_per_pair = 0;
    std::uint64_t first_send_ms = 5'000;
    std::uint64_t message_ttl_seconds = 3600;
    bool replies = false;            // receiver answers each message
    bool sync_enabled = false;       // clients nominate listening nodes
    bool preestablished = false;     // sessions wired at t=0, no friend reqs
    std::uint64_t receiver_offline_from_ms = 0;  // 0 = never offline
    std::uint64_t receiver_offline_until_ms = 0;

    // churn script
    std::size_t churn_leaves = 0;
    std::size_t churn_joins = 0;
    std::uint64_t churn_start_ms = 0;
    std::uint64_t churn_end_ms = 0;

    // adversaries
    std::size_t cheater_count = 0;   // store-nothing profile
    bool observer = false;           // relays record everything they see

    // audit policy overrides
    sntest::DecommissionPolicy policy{};
};

struct Assertion {
    enum class Kind {
        metric,            // metric <name> <op> <value>
        log_contains,
        log_absent,
        delivered_all,     // every sent chat message decrypted exactly once
        replication_full,  // every live record on every live owner member
        no_lost_records,   // every unexpired accepted record still owned
        swarm_sizes_legal, // all final sizes within limits (or sole swarm)
        onion_privacy,     // relay observations never link client and dest
        decommissioned,    // node <id> decommissioned
        not_decommissioned,
    };
    Kind kind;
    std::string name;    // metric name / log pattern
    std::string op;      // ==, !=, <, <=, >, >=
    double value = 0;
    NodeId node = 0;
};

struct Scenario {
    SimConfig config;
    std::vector<Assertion> assertions;
};

struct ParseError {
    std::size_t line = 0;
    std::string message;
};

// Line-oriented "[section]" / "key = value" format with a versioned
// "simver 1" header.
std::optional<Scenario> parse_scenario(std::string_view text,
                                       ParseError& error);
std::optional<Scenario> load_scenario(const std::string& path,
                                      ParseError& error);

}  // namespace swarmnet::sim
