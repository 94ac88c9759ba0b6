// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>

#include "swarmnet/bytes.hpp"
#include "swarmnet/keys.hpp"

namespace swarmnet {

// Hard cap on requested storage time: 96 hours, in seconds.
inline constexpr std::uint64_t kMaxTtlSeconds = 345600;

// A message as nodes store it: recipient key, requested lifetime, the
// sender's clock at creation, and an opaque ciphertext. The admission nonce
// travels next to the envelope in store requests; it is not part of the
// hashed byte form below.
struct Envelope {
    PublicKey recipient;
    std::uint64_t ttl_seconds = 0;
    std::uint64_t timestamp_ms = 0;
    std::uint64_t nonce = 0;
    Bytes ciphertext;

    bool operator==(const Envelope&) const = default;

    std::uint64_t expiry_ms() const {
        return timestamp_ms + ttl_seconds * 1000;
    }
};

enum class EnvelopeError {
    none,
    empty_ciphertext,
    ttl_exceeded,
    truncated,
    bad_version,
};

// Canonical byte form, the input to admission hashing and record hashing:
// ttl(8, BE) || timestamp_ms(8, BE) || version+recipient(33) || ciphertext.
Bytes envelope_payload(const Envelope& env);

EnvelopeError envelope_validate(const Envelope& env);

// Inverse of envelope_payload plus validation; the nonce is set to zero.
std::optional<Envelope> envelope_parse(ByteView payload, EnvelopeError& error);

}  // namespace swarmnet
