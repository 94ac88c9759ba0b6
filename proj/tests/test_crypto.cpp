// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#include <memory>
#include <vector>

#include "doctest.h"
#include "swarmnet/crypto.hpp"

using namespace swarmnet;

namespace {
std::vector<const CryptoProvider*> providers() {
    static SodiumProvider sodium;
    static FakeProvider fake;
    return {&sodium, &fake};
}
}  // namespace

TEST_CASE("sha512 matches the reference digest for 'abc'") {
    auto d = sha512(as_bytes("abc"));
    CHECK(to_hex(ByteView(d.data(), d.size())) ==
          "ddaf35a193617abacc417349ae20413112e6fa4e89a97ea20a9eeee64b55d39a"
          "2192992a274fc1a836ba3c23a3feebbd454d4423643ce80e2a9ac94fa54ca49f");
}

TEST_CASE("sha512_pair equals sha512 of the concatenation") {
    auto joined = sha512(as_bytes("helloworld"));
    auto paired = sha512_pair(as_bytes("hello"), as_bytes("world"));
    CHECK(joined == paired);
}

TEST_CASE("keypair generation is reproducible from the rng") {
    for (auto* crypto : providers()) {
        Rng a(4242), b(4242);
        KeyPair ka = crypto->generate_keypair(a);
        KeyPair kb = crypto->generate_keypair(b);
        CHECK(ka.pub == kb.pub);
        CHECK(ka.priv == kb.priv);
        KeyPair kc = crypto->generate_keypair(a);
        CHECK_FALSE(kc.pub == ka.pub);
    }
}

TEST_CASE("dh agreement is symmetric") {
    for (auto* crypto : providers()) {
        Rng rng(7);
        KeyPair alice = crypto->generate_keypair(rng);
        KeyPair bob = crypto->generate_keypair(rng);
        auto s1 = crypto->dh(alice.priv, bob.pub);
        auto s2 = crypto->dh(bob.priv, alice.pub);
        REQUIRE(s1.has_value());
        REQUIRE(s2.has_value());
        CHECK(*s1 == *s2);

        KeyPair carol = crypto->generate_keypair(rng);
        auto s3 = crypto->dh(alice.priv, carol.pub);
        REQUIRE(s3.has_value());
        CHECK_FALSE(*s1 == *s3);
    }
}

TEST_CASE("kdf separates by label and by input") {
    for (auto* crypto : providers()) {
        auto a = crypto->kdf(as_bytes("material"), as_bytes("label-one"));
        auto b = crypto->kdf(as_bytes("material"), as_bytes("label-two"));
        auto c = crypto->kdf(as_bytes("other"), as_bytes("label-one"));
        CHECK(a != b);
        CHECK(a != c);
        CHECK(a == crypto->kdf(as_bytes("material"), as_bytes("label-one")));
    }
}

TEST_CASE("aead round-trips and authenticates") {
    for (auto* crypto : providers()) {
        Bytes32 key = crypto->kdf(as_bytes("k"), as_bytes("test"));
        Bytes sealed = crypto->aead_seal(key, as_bytes("attack at dawn"),
                                         as_bytes("header"));
        auto opened = crypto->aead_open(key, sealed, as_bytes("header"));
        REQUIRE(opened.has_value());
        CHECK(std::string(opened->begin(), opened->end()) == "attack at dawn");

        SUBCASE("tampered ciphertext fails") {
            auto bad = sealed;
            bad[bad.size() / 2] ^= 0x01;
            CHECK_FALSE(crypto->aead_open(key, bad, as_bytes("header")));
        }
        SUBCASE("wrong aad fails") {
            CHECK_FALSE(crypto->aead_open(key, sealed, as_bytes("other")));
        }
        SUBCASE("wrong key fails") {
            Bytes32 other = crypto->kdf(as_bytes("k2"), as_bytes("test"));
            CHECK_FALSE(crypto->aead_open(other, sealed, as_bytes("header")));
        }
        SUBCASE("sealing is deterministic for fixed inputs") {
            Bytes again = crypto->aead_seal(key, as_bytes("attack at dawn"),
                                            as_bytes("header"));
            CHECK(again == sealed);
        }
        SUBCASE("empty plaintext round-trips") {
            Bytes e = crypto->aead_seal(key, {}, as_bytes("header"));
            auto back = crypto->aead_open(key, e, as_bytes("header"));
            REQUIRE(back.has_value());
            CHECK(back->empty());
        }
    }
}

TEST_CASE("signatures verify and reject tampering") {
    for (auto* crypto : providers()) {
        Rng rng(99);
        KeyPair id = crypto->generate_keypair(rng);
        Bytes sig = crypto->sign(id.priv, as_bytes("message"));
        CHECK(crypto->verify(id.pub, as_bytes("message"), sig));
        CHECK_FALSE(crypto->verify(id.pub, as_bytes("messagE"), sig));
        auto bad = sig;
        bad[0] ^= 0xff;
        CHECK_FALSE(crypto->verify(id.pub, as_bytes("message"), bad));
        KeyPair other = crypto->generate_keypair(rng);
        CHECK_FALSE(crypto->verify(other.pub, as_bytes("message"), sig));
    }
}

TEST_CASE("sealed boxes open only for the recipient") {
    for (auto* crypto : providers()) {
        Rng rng(1);
        KeyPair recipient = crypto->generate_keypair(rng);
        KeyPair outsider = crypto->generate_keypair(rng);

        Bytes blob = seal_to(*crypto, rng, recipient.pub, as_bytes("secret"),
                             as_bytes("ctx"));
        auto opened = open_sealed(*crypto, recipient, blob, as_bytes("ctx"));
        REQUIRE(opened.has_value());
        CHECK(std::string(opened->begin(), opened->end()) == "secret");

        CHECK_FALSE(open_sealed(*crypto, outsider, blob, as_bytes("ctx")));
        CHECK_FALSE(open_sealed(*crypto, recipient, blob, as_bytes("other")));

        auto truncated = blob;
        truncated.resize(16);
        CHECK_FALSE(open_sealed(*crypto, recipient, truncated, as_bytes("ctx")));
    }
}

TEST_CASE("sealed box key variant exposes a shared reply key") {
    for (auto* crypto : providers()) {
        Rng rng(2);
        KeyPair recipient = crypto->generate_keypair(rng);
        SealResult sealed = seal_to_with_key(*crypto, rng, recipient.pub,
                                             as_bytes("ping"), as_bytes("a"));
        auto opened = open_sealed_with_key(*crypto, recipient, sealed.blob,
                                           as_bytes("a"));
        REQUIRE(opened.has_value());
        CHECK(opened->key == sealed.key);
        CHECK(std::string(opened->plaintext.begin(), opened->plaintext.end()) ==
              "ping");

        // The shared key carries a reply without a fresh agreement.
        Bytes reply = crypto->aead_seal(opened->key, as_bytes("pong"),
                                        as_bytes("r"));
        auto back = crypto->aead_open(sealed.key, reply, as_bytes("r"));
        REQUIRE(back.has_value());
        CHECK(std::string(back->begin(), back->end()) == "pong");
    }
}

TEST_CASE("two sealings of the same message use fresh ephemerals") {
    for (auto* crypto : providers()) {
        Rng rng(3);
        KeyPair recipient = crypto->generate_keypair(rng);
        Bytes b1 = seal_to(*crypto, rng, recipient.pub, as_bytes("x"), {});
        Bytes b2 = seal_to(*crypto, rng, recipient.pub, as_bytes("x"), {});
        CHECK(b1 != b2);
    }
}
