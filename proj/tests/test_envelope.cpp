// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "swarmnet/envelope.hpp"

using namespace swarmnet;

namespace {
Envelope sample() {
    Envelope env;
    env.ttl_seconds = 3600;
    env.timestamp_ms = 0x018bcfe56800ull;
    for (int i = 0; i < 32; ++i)
        env.recipient.bytes[i] = static_cast<std::uint8_t>(i + 1);
    auto text = as_bytes("hello swarm");
    env.ciphertext.assign(text.begin(), text.end());
    return env;
}
}  // namespace

TEST_CASE("payload layout is ttl, timestamp, versioned key, ciphertext") {
    auto payload = envelope_payload(sample());
    CHECK(to_hex(payload) ==
          "0000000000000e100000018bcfe56800"
          "050102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f20"
          "68656c6c6f20737761726d");
    CHECK(payload.size() == 8 + 8 + 33 + 11);
}

TEST_CASE("parse inverts payload, zeroing the nonce") {
    Envelope env = sample();
    env.nonce = 777;  // travels beside the payload, not inside it
    auto payload = envelope_payload(env);
    EnvelopeError err = EnvelopeError::none;
    auto back = envelope_parse(payload, err);
    REQUIRE(back.has_value());
    CHECK(err == EnvelopeError::none);
    CHECK(back->recipient == env.recipient);
    CHECK(back->ttl_seconds == env.ttl_seconds);
    CHECK(back->timestamp_ms == env.timestamp_ms);
    CHECK(back->ciphertext == env.ciphertext);
    CHECK(back->nonce == 0);
}

TEST_CASE("validate rejects bad envelopes") {
    SUBCASE("empty ciphertext") {
        Envelope env = sample();
        env.ciphertext.clear();
        CHECK(envelope_validate(env) == EnvelopeError::empty_ciphertext);
    }
    SUBCASE("ttl above the 96 hour cap") {
        Envelope env = sample();
        env.ttl_seconds = kMaxTtlSeconds;
        CHECK(envelope_validate(env) == EnvelopeError::none);
        env.ttl_seconds = kMaxTtlSeconds + 1;
        CHECK(envelope_validate(env) == EnvelopeError::ttl_exceeded);
    }
    SUBCASE("good envelope passes") {
        CHECK(envelope_validate(sample()) == EnvelopeError::none);
    }
}

TEST_CASE("parse rejects malformed payloads") {
    auto payload = envelope_payload(sample());
    EnvelopeError err = EnvelopeError::none;

    SUBCASE("truncated header") {
        Bytes cut(payload.begin(), payload.begin() + 12);
        CHECK_FALSE(envelope_parse(cut, err).has_value());
        CHECK(err == EnvelopeError::truncated);
    }
    SUBCASE("truncated to exactly the header leaves no ciphertext") {
        Bytes cut(payload.begin(), payload.begin() + 49);
        CHECK_FALSE(envelope_parse(cut, err).has_value());
        CHECK(err == EnvelopeError::empty_ciphertext);
    }
    SUBCASE("wrong key version byte") {
        auto bad = payload;
        bad[16] = 0x06;
        CHECK_FALSE(envelope_parse(bad, err).has_value());
        CHECK(err == EnvelopeError::bad_version);
    }
    SUBCASE("oversized ttl") {
        Envelope env = sample();
        env.ttl_seconds = kMaxTtlSeconds + 1;
        auto bad = envelope_payload(env);
        CHECK_FALSE(envelope_parse(bad, err).has_value());
        CHECK(err == EnvelopeError::ttl_exceeded);
    }
}

TEST_CASE("expiry is timestamp plus ttl in milliseconds") {
    Envelope env = sample();
    CHECK(env.expiry_ms() == env.timestamp_ms + 3600 * 1000);
}
