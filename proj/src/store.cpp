// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#include "swarmnet/store.hpp"

#include "swarmnet/crypto.hpp"
#include "swarmnet/pow.hpp"

namespace swarmnet {

Bytes32 record_hash(const Envelope& env) {
    Bytes64 digest = sha512(envelope_payload(env));
    Bytes32 out{};
    std::copy(digest.begin(), digest.begin() + 32, out.begin());
    return out;
}

StoreResult NodeStore::store(const Envelope& env, std::uint64_t difficulty,
                             std::uint64_t now_ms, SwarmId own_swarm,
                             const SwarmRegistry& registry) {
    pow::VerifyResult admission =
        pow::verify(env, difficulty, now_ms, config_.skew_ms);
    switch (admission.status) {
        case pow::VerifyStatus::empty_ciphertext:
            return {StoreStatus::pow_empty_ciphertext};
        case pow::VerifyStatus::ttl_exceeded:
            return {StoreStatus::pow_ttl_exceeded};
        case pow::VerifyStatus::timestamp_skew:
            return {StoreStatus::pow_timestamp_skew};
        case pow::VerifyStatus::insufficient_work:
            return {StoreStatus::pow_insufficient};
        case pow::VerifyStatus::ok:
            break;
    }
    SwarmId owner = registry.swarm_for_key(env.recipient);
    if (owner != own_swarm) return {StoreStatus::wrong_swarm, owner};
    return insert(env, now_ms);
}

StoreResult NodeStore::accept_propagated(const Envelope& env,
                                         std::uint64_t difficulty,
                                         std::uint64_t now_ms) {
    if (config_.strict_propagation) {
        // Replays of stale-but-valid records would fail the skew check, so
        // strict mode re-checks work and ttl only.
        if (envelope_validate(env) != EnvelopeError::none)
            return {StoreStatus::pow_ttl_exceeded};
        Bytes payload = envelope_payload(env);
        std::uint64_t threshold = pow::compute_threshold(
            difficulty, env.ttl_seconds, payload.size());
        if (pow::hash_head(payload, env.nonce) >= threshold)
            return {StoreStatus::pow_insufficient};
    } else if (env.ttl_seconds > kMaxTtlSeconds) {
        return {StoreStatus::pow_ttl_exceeded};
    }
    return insert(env, now_ms);
}

StoreResult NodeStore::insert(const Envelope& env, std::uint64_t now_ms) {
    if (env.expiry_ms() <= now_ms) return {StoreStatus::expired};
    Bytes32 hash = record_hash(env);
    if (records_.contains(hash)) return {StoreStatus::duplicate};
    records_.emplace(hash, StoredRecord{hash, env});
    by_recipient_[env.recipient].insert(hash);
    return {StoreStatus::stored};
}

RetrievePage NodeStore::retrieve(const PublicKey& recipient,
                                 const std::optional<Bytes32>& cursor,
                                 std::size_t page_size,
                                 std::uint64_t now_ms) const {
    RetrievePage page;
    auto it = by_recipient_.find(recipient);
    if (it == by_recipient_.end() || page_size == 0) return page;

    const std::set<Bytes32>& hashes = it->second;
    auto pos = cursor ? hashes.upper_bound(*cursor) : hashes.begin();
    for (; pos != hashes.end(); ++pos) {
        const StoredRecord& rec = records_.at(*pos);
        if (rec.envelope.expiry_ms() <= now_ms) continue;
        if (page.records.size() == page_size) {
            page.next_cursor = page.records.back().hash;
            return page;
        }
        page.records.push_back(rec);
    }
    return page;
}

std::size_t NodeStore::expire(std::uint64_t now_ms) {
    std::size_t removed = 0;
    for (auto it = records_.begin(); it != records_.end();) {
        if (it->second.envelope.expiry_ms() <= now_ms) {
            auto rcpt = by_recipient_.find(it->second.envelope.recipient);
            if (rcpt != by_recipient_.end()) {
                rcpt->second.erase(it->first);
                if (rcpt->second.empty()) by_recipient_.erase(rcpt);
            }
            it = records_.erase(it);
            ++removed;
        } else {
            ++it;
        }
    }
    return removed;
}

std::optional<StoredRecord> NodeStore::find(const Bytes32& hash) const {
    auto it = records_.find(hash);
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

std::vector<Bytes32> NodeStore::hashes(std::uint64_t now_ms) const {
    std::vector<Bytes32> out;
    out.reserve(records_.size());
    for (const auto& [hash, rec] : records_)
        if (rec.envelope.expiry_ms() > now_ms) out.push_back(hash);
    return out;
}

std::vector<StoredRecord> NodeStore::all_records(std::uint64_t now_ms) const {
    std::vector<StoredRecord> out;
    out.reserve(records_.size());
    for (const auto& [hash, rec] : records_)
        if (rec.envelope.expiry_ms() > now_ms) out.push_back(rec);
    return out;
}

std::vector<StoredRecord> NodeStore::records_for_swarm(
    SwarmId target, const SwarmRegistry& registry,
    std::uint64_t now_ms) const {
    std::vector<StoredRecord> out;
    for (const auto& [hash, rec] : records_) {
        if (rec.envelope.expiry_ms() <= now_ms) continue;
        if (registry.swarm_for_key(rec.envelope.recipient) == target)
            out.push_back(rec);
    }
    return out;
}

std::size_t NodeStore::drop_records_for_swarm(SwarmId target,
                                              const SwarmRegistry& registry) {
    std::size_t removed = 0;
    for (auto it = records_.begin(); it != records_.end();) {
        if (registry.swarm_for_key(it->second.envelope.recipient) == target) {
            auto rcpt = by_recipient_.find(it->second.envelope.recipient);
            if (rcpt != by_recipient_.end()) {
                rcpt->second.erase(it->first);
                if (rcpt->second.empty()) by_recipient_.erase(rcpt);
            }
            it = records_.erase(it);
            ++removed;
        } else {
            ++it;
        }
    }
    return removed;
}

}  // namespace swarmnet
