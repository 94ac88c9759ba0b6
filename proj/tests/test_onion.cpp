// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "swarmnet/onion.hpp"

using namespace swarmnet;

namespace {

struct Relay {
    NodeId id;
    KeyPair keys;
};

struct OnionWorld {
    FakeProvider crypto;
    Rng rng{909};
    std::vector<Relay> relays;
    std::vector<onion::PathNode> candidates;

    OnionWorld() {
        for (NodeId id = 1; id <= 6; ++id) {
            Relay r{id, crypto.generate_keypair(rng)};
            candidates.push_back({id, r.keys.pub});
            relays.push_back(std::move(r));
        }
    }

    const Relay& relay(NodeId id) const {
        for (const auto& r : relays)
            if (r.id == id) return r;
        throw std::out_of_range("no such relay");
    }
};

}  // namespace

TEST_CASE("padding rounds up to power-of-two buckets, floor 1 KiB") {
    CHECK(onion::padded_size(0) == 1024);
    CHECK(onion::padded_size(1) == 1024);
    CHECK(onion::padded_size(1024) == 1024);
    CHECK(onion::padded_size(1025) == 2048);
    CHECK(onion::padded_size(4096) == 4096);
    CHECK(onion::padded_size(40'000) == 65536);
}

TEST_CASE("select_path picks three distinct relays") {
    OnionWorld w;
    for (int i = 0; i < 20; ++i) {
        auto path = onion::select_path(w.candidates, w.rng);
        std::set<NodeId> ids{path[0].id, path[1].id, path[2].id};
        CHECK(ids.size() == 3);
    }
    std::vector<onion::PathNode> two(w.candidates.begin(),
                                     w.candidates.begin() + 2);
    CHECK_THROWS_AS(onion::select_path(two, w.rng), std::invalid_argument);
}

TEST_CASE("each hop learns only its successor; the exit sees the request") {
    OnionWorld w;
    auto path = onion::select_path(w.candidates, w.rng);
    auto request = as_bytes("retrieve page for somebody");
    NodeId destination = 42;

    auto wrapped = onion::wrap(w.crypto, w.rng, path, destination, request);

    auto hop0 = onion::peel(w.crypto, w.relay(path[0].id).keys, wrapped.onion);
    REQUIRE(hop0.has_value());
    CHECK_FALSE(hop0->is_final);
    CHECK(hop0->next == path[1].id);

    auto hop1 = onion::peel(w.crypto, w.relay(path[1].id).keys, hop0->inner);
    REQUIRE(hop1.has_value());
    CHECK_FALSE(hop1->is_final);
    CHECK(hop1->next == path[2].id);

    auto exit = onion::peel(w.crypto, w.relay(path[2].id).keys, hop1->inner);
    REQUIRE(exit.has_value());
    CHECK(exit->is_final);
    CHECK(exit->next == destination);
    CHECK(exit->inner == Bytes(request.begin(), request.end()));
    CHECK(exit->reply_key == wrapped.reply.pub);
}

TEST_CASE("layers are bucket-padded so length leaks only the bucket") {
    OnionWorld w;
    auto path = onion::select_path(w.candidates, w.rng);
    auto a = onion::wrap(w.crypto, w.rng, path, 1, as_bytes("x"));
    auto b = onion::wrap(w.crypto, w.rng, path, 1,
                         as_bytes("a considerably longer request body"));
    CHECK(a.onion.size() == b.onion.size());
}

TEST_CASE("peeling with the wrong key or damaged bytes fails") {
    OnionWorld w;
    auto path = onion::select_path(w.candidates, w.rng);
    auto wrapped = onion::wrap(w.crypto, w.rng, path, 7, as_bytes("req"));

    // Find a relay that is not the first hop.
    NodeId wrong = 0;
    for (const auto& c : w.candidates)
        if (c.id != path[0].id) { wrong = c.id; break; }
    CHECK_FALSE(onion::peel(w.crypto, w.relay(wrong).keys, wrapped.onion));

    auto damaged = wrapped.onion;
    damaged[damaged.size() / 2] ^= 1;
    CHECK_FALSE(onion::peel(w.crypto, w.relay(path[0].id).keys, damaged));

    Bytes stub(10, 0);
    CHECK_FALSE(onion::peel(w.crypto, w.relay(path[0].id).keys, stub));
}

TEST_CASE("the reply leg unwinds through the hop keys") {
    OnionWorld w;
    auto path = onion::select_path(w.candidates, w.rng);
    auto wrapped = onion::wrap(w.crypto, w.rng, path, 9, as_bytes("question"));

    // Walk the request to the exit.
    auto hop0 = onion::peel(w.crypto, w.relay(path[0].id).keys, wrapped.onion);
    auto hop1 = onion::peel(w.crypto, w.relay(path[1].id).keys, hop0->inner);
    auto exit = onion::peel(w.crypto, w.relay(path[2].id).keys, hop1->inner);
    REQUIRE(exit.has_value());

    // Exit seals the answer to the client's reply key, then each hop wraps
    // it on the way back, exit first.
    Bytes back = onion::seal_reply(w.crypto, w.rng, exit->reply_key,
                                   as_bytes("answer"));
    back = onion::wrap_reply_hop(w.crypto, exit->hop_key, back);
    back = onion::wrap_reply_hop(w.crypto, hop1->hop_key, back);
    back = onion::wrap_reply_hop(w.crypto, hop0->hop_key, back);

    auto opened = onion::open_reply(w.crypto, wrapped, back);
    REQUIRE(opened.has_value());
    CHECK(std::string(opened->begin(), opened->end()) == "answer");

    // A reply that skipped a hop wrap does not open.
    Bytes shallow = onion::seal_reply(w.crypto, w.rng, exit->reply_key,
                                      as_bytes("answer"));
    shallow = onion::wrap_reply_hop(w.crypto, exit->hop_key, shallow);
    CHECK_FALSE(onion::open_reply(w.crypto, wrapped, shallow));
}

TEST_CASE("payloads from one byte to the 64 KiB cap round-trip") {
    OnionWorld w;
    auto path = onion::select_path(w.candidates, w.rng);
    for (std::size_t size : {std::size_t{1}, std::size_t{1023},
                             std::size_t{1024}, std::size_t{1025},
                             std::size_t{16 * 1024},
                             onion::kMaxPayload}) {
        Bytes request(size, 0);
        w.rng.fill(request.data(), request.size());
        auto wrapped = onion::wrap(w.crypto, w.rng, path, 3, request);
        auto hop0 =
            onion::peel(w.crypto, w.relay(path[0].id).keys, wrapped.onion);
        REQUIRE(hop0.has_value());
        auto hop1 = onion::peel(w.crypto, w.relay(path[1].id).keys, hop0->inner);
        REQUIRE(hop1.has_value());
        auto exit = onion::peel(w.crypto, w.relay(path[2].id).keys, hop1->inner);
        REQUIRE(exit.has_value());
        CHECK(exit->inner == request);
    }

    Bytes over(onion::kMaxPayload + 1, 0);
    CHECK_THROWS_AS(onion::wrap(w.crypto, w.rng, path, 3, over),
                    std::length_error);
}

TEST_CASE("wrap refuses a path with repeated relays") {
    OnionWorld w;
    onion::Path path{{{1, w.candidates[0].key},
                      {1, w.candidates[0].key},
                      {2, w.candidates[1].key}}};
    CHECK_THROWS_AS(onion::wrap(w.crypto, w.rng, path, 3, as_bytes("x")),
                    std::invalid_argument);
}
