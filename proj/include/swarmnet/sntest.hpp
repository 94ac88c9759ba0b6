// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "swarmnet/rng.hpp"
#include "swarmnet/store.hpp"

namespace swarmnet::sntest {

// Block-driven storage audits. Each block deterministically appoints, per
// swarm, one verifier and one tested node; the verifier challenges the
// tested node to produce a record it must hold. Repeated failures inside a
// sliding block window get a node decommissioned.

inline constexpr std::uint64_t kHeightWindow = 2;
inline constexpr std::uint64_t kGraceMs = 10 * 1000;

struct TestPair {
    NodeId verifier = 0;
    NodeId tested = 0;
};

// Index derivation: head of SHA-512(blockhash || swarm_id_be) picks the
// verifier among the members sorted by id; the next position is tested.
// Needs at least two members.
std::optional<TestPair> derive_pair(ByteView blockhash, SwarmId swarm,
                                    const std::vector<NodeId>& members);

struct Challenge {
    std::uint64_t height = 0;
    SwarmId swarm = kNoSwarm;
    NodeId verifier = 0;
    NodeId tested = 0;
    Bytes32 record_hash{};
};

// Verifier side: pick a random live record owned by the swarm. Nothing to
// ask about means no challenge this block.
std::optional<Challenge> issue_challenge(const NodeStore& store,
                                         const SwarmRegistry& registry,
                                         SwarmId swarm, std::uint64_t height,
                                         const TestPair& pair,
                                         std::uint64_t now_ms, Rng& rng);

// Tested side: a challenge is answerable only if the pair really is this
// block's pair and the height is within the tolerance window.
bool challenge_admissible(const Challenge& challenge, ByteView blockhash,
                          const std::vector<NodeId>& members,
                          std::uint64_t current_height,
                          std::uint64_t window = kHeightWindow);

enum class TestOutcome { pass, fail };

// What counts as persistent failure. min_reporters distinct verifiers can
// be demanded before a node is condemned; with derived single-verifier
// pairs a swarm usually produces one reporter per window, so the default
// accepts a lone reporter.
struct DecommissionPolicy {
    std::size_t min_failures = 3;
    std::uint64_t window_blocks = 10;
    std::size_t min_reporters = 1;
};

class ReputationLedger {
public:
    explicit ReputationLedger(DecommissionPolicy policy = {})
        : policy_(policy) {}

    void record(std::uint64_t height, SwarmId swarm, NodeId tested,
                NodeId verifier, TestOutcome outcome);

    // Applies the policy at the given height; returns nodes newly
    // decommissioned. Decommissioning is sticky.
    std::vector<NodeId> adjudicate(std::uint64_t height);

    bool is_decommissioned(NodeId node) const {
        return decommissioned_.contains(node);
    }
    const std::set<NodeId>& decommissioned() const { return decommissioned_; }

    // "height, swarm, tested, verifier, result" per line, insertion order.
    std::string export_csv() const;

    const DecommissionPolicy& policy() const { return policy_; }

private:
    struct Entry {
        std::uint64_t height;
        SwarmId swarm;
        NodeId tested;
        NodeId verifier;
        TestOutcome outcome;
    };

    DecommissionPolicy policy_;
    std::vector<Entry> entries_;
    std::map<NodeId, std::deque<Entry>> failures_;
    std::set<NodeId> decommissioned_;
};

}  // namespace swarmnet::sntest
