// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#include "swarmnet/pow.hpp"

#include <stdexcept>

#include "swarmnet/crypto.hpp"

namespace swarmnet::pow {

std::uint64_t compute_threshold(std::uint64_t difficulty,
                                std::uint64_t ttl_seconds,
                                std::uint64_t length) {
    if (difficulty == 0) throw std::invalid_argument("difficulty is zero");
    if (length == 0) throw std::invalid_argument("length is zero");

    using u128 = unsigned __int128;
    constexpr std::uint64_t kMax = ~0ull;
    u128 numerator = static_cast<u128>(kMax) * 65535u;
    u128 dl = static_cast<u128>(difficulty) * length;
    u128 factor = static_cast<u128>(65535) + ttl_seconds;
    // dl * factor can exceed 128 bits, but only when the quotient is zero.
    if (dl > numerator / factor) return 0;
    return static_cast<std::uint64_t>(numerator / (dl * factor));
}

std::uint64_t hash_head(ByteView payload, std::uint64_t nonce) {
    Bytes64 inner = sha512(payload);
    Bytes64 outer = sha512_pair(inner, be64(nonce));
    return read_u64_be(outer.data());
}

MineResult mine(ByteView payload, std::uint64_t threshold,
                std::uint64_t start_nonce, std::uint64_t max_attempts) {
    MineResult res;
    res.threshold = threshold;
    Bytes64 inner = sha512(payload);
    std::uint64_t nonce = start_nonce;
    for (std::uint64_t i = 0; i < max_attempts; ++i, ++nonce) {
        Bytes64 outer = sha512_pair(inner, be64(nonce));
        std::uint64_t head = read_u64_be(outer.data());
        ++res.attempts;
        if (head < threshold) {
            res.found = true;
            res.nonce = nonce;
            res.head = head;
            return res;
        }
    }
    return res;
}

MineResult mine_envelope(Envelope& env, std::uint64_t difficulty,
                         std::uint64_t max_attempts) {
    if (envelope_validate(env) != EnvelopeError::none)
        throw std::invalid_argument("envelope not minable");
    Bytes payload = envelope_payload(env);
    std::uint64_t threshold =
        compute_threshold(difficulty, env.ttl_seconds, payload.size());
    MineResult res = mine(payload, threshold, 0, max_attempts);
    if (res.found) env.nonce = res.nonce;
    return res;
}

VerifyResult verify(const Envelope& env, std::uint64_t difficulty,
                    std::uint64_t now_ms, std::uint64_t skew_ms) {
    VerifyResult res;
    switch (envelope_validate(env)) {
        case EnvelopeError::empty_ciphertext:
            res.status = VerifyStatus::empty_ciphertext;
            return res;
        case EnvelopeError::ttl_exceeded:
            res.status = VerifyStatus::ttl_exceeded;
            return res;
        default:
            break;
    }
    std::uint64_t lo = now_ms > skew_ms ? now_ms - skew_ms : 0;
    std::uint64_t hi = now_ms + skew_ms;
    if (env.timestamp_ms < lo || env.timestamp_ms > hi) {
        res.status = VerifyStatus::timestamp_skew;
        return res;
    }
    Bytes payload = envelope_payload(env);
    res.threshold =
        compute_threshold(difficulty, env.ttl_seconds, payload.size());
    res.head = hash_head(payload, env.nonce);
    if (res.head >= res.threshold) {
        res.status = VerifyStatus::insufficient_work;
        return res;
    }
    res.status = VerifyStatus::ok;
    return res;
}

}  // namespace swarmnet::pow
