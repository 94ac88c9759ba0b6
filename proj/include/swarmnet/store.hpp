// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "swarmnet/envelope.hpp"
#include "swarmnet/registry.hpp"

namespace swarmnet {

// Identity of a stored message: leading 32 bytes of the SHA-512 of its
// canonical byte form. Dedup, pagination and audit challenges all key on it.
Bytes32 record_hash(const Envelope& env);

struct StoredRecord {
    Bytes32 hash{};
    Envelope envelope;
    bool operator==(const StoredRecord&) const = default;
};

enum class StoreStatus {
    stored,
    duplicate,
    wrong_swarm,
    expired,
    pow_empty_ciphertext,
    pow_ttl_exceeded,
    pow_timestamp_skew,
    pow_insufficient,
};

struct StoreResult {
    StoreStatus status;
    // On wrong_swarm, where the record actually belongs; lets the caller
    // redirect instead of guessing.
    SwarmId correct_swarm = kNoSwarm;
    bool accepted() const { return status == StoreStatus::stored; }
};

struct RetrievePage {
    std::vector<StoredRecord> records;
    std::optional<Bytes32> next_cursor;  // set when more pages remain
};

// One node's record set. Hash-ordered, recipient-indexed, TTL-expired.
// Propagated records (swarm replication, migration) bypass the work check
// unless strict mode asks for it; expiry is always enforced.
class NodeStore {
public:
    struct Config {
        bool strict_propagation = false;  // re-verify work on replicated data
        std::uint64_t skew_ms = 10 * 60 * 1000;
    };

    NodeStore() : config_(Config{}) {}
    explicit NodeStore(Config config) : config_(config) {}

    // Client-facing store: full admission check, then swarm ownership.
    StoreResult store(const Envelope& env, std::uint64_t difficulty,
                      std::uint64_t now_ms, SwarmId own_swarm,
                      const SwarmRegistry& registry);

    // Peer-facing store: replication inside the swarm and migrations.
    StoreResult accept_propagated(const Envelope& env, std::uint64_t difficulty,
                                  std::uint64_t now_ms);

    // Hash-ordered page of live records for one recipient. Pass the last
    // hash of the previous page as cursor to continue.
    RetrievePage retrieve(const PublicKey& recipient,
                          const std::optional<Bytes32>& cursor,
                          std::size_t page_size, std::uint64_t now_ms) const;

    std::size_t expire(std::uint64_t now_ms);

    bool contains(const Bytes32& hash) const { return records_.contains(hash); }
    std::optional<StoredRecord> find(const Bytes32& hash) const;
    std::vector<Bytes32> hashes(std::uint64_t now_ms) const;
    std::vector<StoredRecord> all_records(std::uint64_t now_ms) const;

    // Live records whose recipient maps to `target` under `registry`.
    std::vector<StoredRecord> records_for_swarm(
        SwarmId target, const SwarmRegistry& registry,
        std::uint64_t now_ms) const;
    // Drop the records that now belong to `target`; the migration source
    // has sent them on. Returns how many were dropped.
    std::size_t drop_records_for_swarm(SwarmId target,
                                       const SwarmRegistry& registry);

    void clear() { records_.clear(); by_recipient_.clear(); }
    std::size_t size() const { return records_.size(); }

private:
    StoreResult insert(const Envelope& env, std::uint64_t now_ms);

    Config config_;
    std::map<Bytes32, StoredRecord> records_;
    std::map<PublicKey, std::set<Bytes32>> by_recipient_;
};

}  // namespace swarmnet
