// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "swarmnet/crypto.hpp"
#include "swarmnet/registry.hpp"

namespace swarmnet::onion {

// Requests travel through three relays. Each layer is a one-shot sealed box
// to that relay's key; a relay learns only its predecessor and successor.
// Layer plaintexts are padded to power-of-two buckets so length alone does
// not reveal position in the path.

inline constexpr std::size_t kHops = 3;
inline constexpr std::size_t kMaxPayload = 64 * 1024;
inline constexpr std::size_t kMinBucket = 1024;

std::size_t padded_size(std::size_t raw);

struct PathNode {
    NodeId id = 0;
    PublicKey key;
};

using Path = std::array<PathNode, kHops>;

// Three distinct relays, uniformly from the candidate set. Throws
// std::invalid_argument with fewer than three candidates.
Path select_path(const std::vector<PathNode>& candidates, Rng& rng);

// Client-side state needed to read the response: one symmetric key per hop
// (shared via the sealed boxes) plus the reply keypair for the innermost
// layer.
struct WrapResult {
    Bytes onion;                       // handed to the first hop
    std::array<Bytes32, kHops> hop_keys;  // guard, middle, exit
    KeyPair reply;                     // ephemeral, receives the reply
};

WrapResult wrap(const CryptoProvider& crypto, Rng& rng, const Path& path,
                NodeId destination, ByteView request);

struct Peeled {
    bool is_final = false;
    NodeId next = 0;     // relay: successor hop; final: destination node
    Bytes inner;         // relay: blob to forward; final: the request
    PublicKey reply_key; // final layer only
    Bytes32 hop_key{};   // kept to encrypt the response leg
};

std::optional<Peeled> peel(const CryptoProvider& crypto,
                           const KeyPair& node_keys, ByteView layer);

// Response leg: the exit seals the reply to the client's reply key, then
// every hop (exit included) wraps it under its hop key on the way back.
Bytes seal_reply(const CryptoProvider& crypto, Rng& rng,
                 const PublicKey& reply_key, ByteView reply);
Bytes wrap_reply_hop(const CryptoProvider& crypto, const Bytes32& hop_key,
                     ByteView blob);
std::optional<Bytes> open_reply(const CryptoProvider& crypto,
                                const WrapResult& state, ByteView blob);

}  // namespace swarmnet::onion
