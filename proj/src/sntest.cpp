// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#include "swarmnet/sntest.hpp"

#include <algorithm>
#include <sstream>

#include "swarmnet/crypto.hpp"

namespace swarmnet::sntest {

std::optional<TestPair> derive_pair(ByteView blockhash, SwarmId swarm,
                                    const std::vector<NodeId>& members) {
    if (members.size() < 2) return std::nullopt;
    std::vector<NodeId> sorted = members;
    std::sort(sorted.begin(), sorted.end());

    Bytes material(blockhash.begin(), blockhash.end());
    put_u64_be(material, swarm);
    std::uint64_t head = read_u64_be(sha512(material).data());
    std::size_t i = static_cast<std::size_t>(head % sorted.size());

    TestPair pair;
    pair.verifier = sorted[i];
    pair.tested = sorted[(i + 1) % sorted.size()];
    return pair;
}

std::optional<Challenge> issue_challenge(const NodeStore& store,
                                         const SwarmRegistry& registry,
                                         SwarmId swarm, std::uint64_t height,
                                         const TestPair& pair,
                                         std::uint64_t now_ms, Rng& rng) {
    std::vector<StoredRecord> owned =
        store.records_for_swarm(swarm, registry, now_ms);
    if (owned.empty()) return std::nullopt;
    const StoredRecord& pick = owned[rng.below(owned.size())];

    Challenge ch;
    ch.height = height;
    ch.swarm = swarm;
    ch.verifier = pair.verifier;
    ch.tested = pair.tested;
    ch.record_hash = pick.hash;
    return ch;
}

bool challenge_admissible(const Challenge& challenge, ByteView blockhash,
                          const std::vector<NodeId>& members,
                          std::uint64_t current_height,
                          std::uint64_t window) {
    std::uint64_t lo = current_height > window ? current_height - window : 0;
    if (challenge.height < lo || challenge.height > current_height + window)
        return false;
    auto pair = derive_pair(blockhash, challenge.swarm, members);
    if (!pair) return false;
    return pair->verifier == challenge.verifier &&
           pair->tested == challenge.tested;
}

void ReputationLedger::record(std::uint64_t height, SwarmId swarm,
                              NodeId tested, NodeId verifier,
                              TestOutcome outcome) {
    Entry e{height, swarm, tested, verifier, outcome};
    entries_.push_back(e);
    if (outcome == TestOutcome::fail) failures_[tested].push_back(e);
}

std::vector<NodeId> ReputationLedger::adjudicate(std::uint64_t height) {
    std::vector<NodeId> condemned;
    std::uint64_t lo = height >= policy_.window_blocks
                           ? height - policy_.window_blocks + 1
                           : 0;
    for (auto& [node, fails] : failures_) {
        while (!fails.empty() && fails.front().height < lo) fails.pop_front();
        if (decommissioned_.contains(node)) continue;
        if (fails.size() < policy_.min_failures) continue;
        std::set<NodeId> reporters;
        for (const Entry& e : fails) reporters.insert(e.verifier);
        if (reporters.size() < policy_.min_reporters) continue;
        decommissioned_.insert(node);
        condemned.push_back(node);
    }
    return condemned;
}

std::string ReputationLedger::export_csv() const {
    std::ostringstream out;
    for (const Entry& e : entries_) {
        out << e.height << ", " << e.swarm << ", " << e.tested << ", "
            << e.verifier << ", "
            << (e.outcome == TestOutcome::pass ? "pass" : "fail") << "\n";
    }
    return out.str();
}

}  // namespace swarmnet::sntest
