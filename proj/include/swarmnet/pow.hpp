// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "swarmnet/bytes.hpp"
#include "swarmnet/envelope.hpp"

namespace swarmnet::pow {

// Admission control: a message is accepted when the head of
// SHA512(SHA512(payload) || nonce_be64), read as a big-endian u64, falls
// below a threshold that shrinks with difficulty, ttl and payload length.

inline constexpr std::uint64_t kDefaultSkewMs = 10 * 60 * 1000;
inline constexpr std::uint64_t kDefaultMaxAttempts = 1ull << 24;

// floor(max_u64 * 65535 / (difficulty * length * (65535 + ttl_seconds))),
// exact over 128-bit intermediates. Throws std::invalid_argument when
// difficulty or length is zero.
std::uint64_t compute_threshold(std::uint64_t difficulty,
                                std::uint64_t ttl_seconds,
                                std::uint64_t length);

// First eight bytes of the outer digest, big-endian.
std::uint64_t hash_head(ByteView payload, std::uint64_t nonce);

struct MineResult {
    bool found = false;
    std::uint64_t nonce = 0;
    std::uint64_t head = 0;
    std::uint64_t threshold = 0;
    std::uint64_t attempts = 0;
};

// Scans nonces from start_nonce upward, at most max_attempts of them.
MineResult mine(ByteView payload, std::uint64_t threshold,
                std::uint64_t start_nonce = 0,
                std::uint64_t max_attempts = kDefaultMaxAttempts);

// Convenience: validates the envelope, computes its threshold and mines,
// storing the winning nonce into env.nonce.
MineResult mine_envelope(Envelope& env, std::uint64_t difficulty,
                         std::uint64_t max_attempts = kDefaultMaxAttempts);

enum class VerifyStatus {
    ok,
    empty_ciphertext,
    ttl_exceeded,
    timestamp_skew,
    insufficient_work,
};

struct VerifyResult {
    VerifyStatus status = VerifyStatus::ok;
    std::uint64_t threshold = 0;
    std::uint64_t head = 0;
    bool accepted() const { return status == VerifyStatus::ok; }
};

// Full admission check against the verifier's current difficulty and clock.
// Work is judged against the verifier's difficulty, never the sender's.
VerifyResult verify(const Envelope& env, std::uint64_t difficulty,
                    std::uint64_t now_ms,
                    std::uint64_t skew_ms = kDefaultSkewMs);

}  // namespace swarmnet::pow
