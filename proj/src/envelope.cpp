// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#include "swarmnet/envelope.hpp"

namespace swarmnet {

Bytes envelope_payload(const Envelope& env) {
    Bytes out;
    out.reserve(8 + 8 + 33 + env.ciphertext.size());
    put_u64_be(out, env.ttl_seconds);
    put_u64_be(out, env.timestamp_ms);
    append(out, encode_pubkey(env.recipient));
    append(out, env.ciphertext);
    return out;
}

EnvelopeError envelope_validate(const Envelope& env) {
    if (env.ciphertext.empty()) return EnvelopeError::empty_ciphertext;
    if (env.ttl_seconds > kMaxTtlSeconds) return EnvelopeError::ttl_exceeded;
    return EnvelopeError::none;
}

std::optional<Envelope> envelope_parse(ByteView payload, EnvelopeError& error) {
    if (payload.size() < 8 + 8 + 33) {
        error = EnvelopeError::truncated;
        return std::nullopt;
    }
    ByteReader rd(payload);
    Envelope env;
    env.ttl_seconds = rd.u64be();
    env.timestamp_ms = rd.u64be();
    Bytes keybytes = rd.take(33);
    auto key = decode_pubkey(keybytes);
    if (!key) {
        error = EnvelopeError::bad_version;
        return std::nullopt;
    }
    env.recipient = *key;
    env.ciphertext = rd.rest();
    error = envelope_validate(env);
    if (error != EnvelopeError::none) return std::nullopt;
    return env;
}

}  // namespace swarmnet
