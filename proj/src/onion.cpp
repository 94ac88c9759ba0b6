// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#include "swarmnet/onion.hpp"

#include <bit>
#include <stdexcept>

namespace swarmnet::onion {

namespace {

constexpr std::string_view kLayerAad = "onion-layer";
constexpr std::string_view kReplyAad = "onion-reply";
constexpr std::string_view kReplyHopAad = "onion-reply-hop";

constexpr std::uint8_t kTagRelay = 0x01;
constexpr std::uint8_t kTagFinal = 0x02;

Bytes pad_to_bucket(Bytes body) {
    body.resize(padded_size(body.size()), 0);
    return body;
}

Bytes relay_plaintext(NodeId next, ByteView inner) {
    Bytes pt;
    pt.reserve(1 + 8 + 4 + inner.size());
    pt.push_back(kTagRelay);
    put_u64_be(pt, next);
    put_u32_be(pt, static_cast<std::uint32_t>(inner.size()));
    append(pt, inner);
    return pad_to_bucket(std::move(pt));
}

Bytes final_plaintext(NodeId destination, const PublicKey& reply_key,
                      ByteView request) {
    Bytes pt;
    pt.reserve(1 + 8 + 32 + 4 + request.size());
    pt.push_back(kTagFinal);
    put_u64_be(pt, destination);
    append(pt, reply_key.bytes);
    put_u32_be(pt, static_cast<std::uint32_t>(request.size()));
    append(pt, request);
    return pad_to_bucket(std::move(pt));
}

}  // namespace

std::size_t padded_size(std::size_t raw) {
    std::size_t bucket = std::bit_ceil(std::max(raw, kMinBucket));
    return bucket;
}

Path select_path(const std::vector<PathNode>& candidates, Rng& rng) {
    if (candidates.size() < kHops)
        throw std::invalid_argument("not enough relay candidates");
    auto picks = rng.sample_indices(candidates.size(), kHops);
    Path path;
    for (std::size_t i = 0; i < kHops; ++i) path[i] = candidates[picks[i]];
    return path;
}

WrapResult wrap(const CryptoProvider& crypto, Rng& rng, const Path& path,
                NodeId destination, ByteView request) {
    if (request.size() > kMaxPayload)
        throw std::length_error("onion payload over 64 KiB");
    for (std::size_t i = 0; i < kHops; ++i)
        for (std::size_t j = i + 1; j < kHops; ++j)
            if (path[i].id == path[j].id)
                throw std::invalid_argument("path hops not distinct");

    WrapResult res;
    res.reply = crypto.generate_keypair(rng);

    // Innermost first: the exit learns the destination and the reply key.
    Bytes pt = final_plaintext(destination, res.reply.pub, request);
    SealResult sealed = seal_to_with_key(crypto, rng, path[2].key, pt,
                                         as_bytes(kLayerAad));
    res.hop_keys[2] = sealed.key;

    for (int hop = 1; hop >= 0; --hop) {
        pt = relay_plaintext(path[hop + 1].id, sealed.blob);
        sealed = seal_to_with_key(crypto, rng, path[hop].key, pt,
                                  as_bytes(kLayerAad));
        res.hop_keys[hop] = sealed.key;
    }
    res.onion = std::move(sealed.blob);
    return res;
}

std::optional<Peeled> peel(const CryptoProvider& crypto,
                           const KeyPair& node_keys, ByteView layer) {
    auto opened =
        open_sealed_with_key(crypto, node_keys, layer, as_bytes(kLayerAad));
    if (!opened) return std::nullopt;

    ByteReader rd(opened->plaintext);
    Peeled out;
    out.hop_key = opened->key;
    std::uint8_t tag = rd.u8();
    if (tag == kTagRelay) {
        out.is_final = false;
        out.next = rd.u64be();
        std::uint32_t len = rd.u32be();
        out.inner = rd.take(len);
    } else if (tag == kTagFinal) {
        out.is_final = true;
        out.next = rd.u64be();
        out.reply_key.bytes = rd.take_array<32>();
        std::uint32_t len = rd.u32be();
        out.inner = rd.take(len);
    } else {
        return std::nullopt;
    }
    if (!rd.ok()) return std::nullopt;
    return out;
}

Bytes seal_reply(const CryptoProvider& crypto, Rng& rng,
                 const PublicKey& reply_key, ByteView reply) {
    return seal_to(crypto, rng, reply_key, reply, as_bytes(kReplyAad));
}

Bytes wrap_reply_hop(const CryptoProvider& crypto, const Bytes32& hop_key,
                     ByteView blob) {
    return crypto.aead_seal(hop_key, blob, as_bytes(kReplyHopAad));
}

std::optional<Bytes> open_reply(const CryptoProvider& crypto,
                                const WrapResult& state, ByteView blob) {
    // Hops wrapped outward on the way back: guard last, so guard first off.
    Bytes current(blob.begin(), blob.end());
    for (const Bytes32& key : state.hop_keys) {
        auto opened = crypto.aead_open(key, current, as_bytes(kReplyHopAad));
        if (!opened) return std::nullopt;
        current = std::move(*opened);
    }
    return open_sealed(crypto, state.reply, current, as_bytes(kReplyAad));
}

}  // namespace swarmnet::onion
