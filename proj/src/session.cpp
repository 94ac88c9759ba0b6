// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#include "swarmnet/session.hpp"

#include <stdexcept>

namespace swarmnet {

namespace {

constexpr std::string_view kRootLabel = "ratchet-root";
constexpr std::string_view kChainInitLabel = "ratchet-chain-init";
constexpr std::string_view kChainLabel = "ratchet-chain";
constexpr std::string_view kMessageLabel = "ratchet-msg";
constexpr std::string_view kHandshakeLabel = "handshake-root";
constexpr std::string_view kPrekeyLabel = "signed-prekey";
constexpr std::string_view kFriendAad = "friend-request";

constexpr std::size_t kSkippedCap = 4 * kSkippedWindow;

// Root and chain both advance from the same agreement output, under
// distinct labels.
std::pair<Bytes32, Bytes32> advance_root(const CryptoProvider& crypto,
                                         const Bytes32& root,
                                         const Bytes32& dh_out) {
    Bytes ikm;
    ikm.reserve(64);
    append(ikm, root);
    append(ikm, dh_out);
    return {crypto.kdf(ikm, as_bytes(kRootLabel)),
            crypto.kdf(ikm, as_bytes(kChainInitLabel))};
}

Bytes prekey_signing_input(const PublicKey& signed_prekey) {
    Bytes msg;
    msg.reserve(32 + kPrekeyLabel.size());
    append(msg, as_bytes(kPrekeyLabel));
    append(msg, signed_prekey.bytes);
    return msg;
}

}  // namespace

std::pair<Bytes32, Bytes32> chain_step(const CryptoProvider& crypto,
                                       const Bytes32& chain_key,
                                       const Bytes32& dh_out) {
    Bytes ikm;
    ikm.reserve(64);
    append(ikm, chain_key);
    append(ikm, dh_out);
    return {crypto.kdf(ikm, as_bytes(kChainLabel)),
            crypto.kdf(ikm, as_bytes(kMessageLabel))};
}

std::pair<PrekeyBundle, BundleSecrets> make_bundle(const CryptoProvider& crypto,
                                                   const KeyPair& identity,
                                                   std::uint32_t one_time_id,
                                                   Rng& rng) {
    BundleSecrets secrets;
    secrets.signed_prekey = crypto.generate_keypair(rng);
    secrets.one_time_prekey = crypto.generate_keypair(rng);
    secrets.one_time_id = one_time_id;

    PrekeyBundle bundle;
    bundle.identity = identity.pub;
    bundle.signed_prekey = secrets.signed_prekey.pub;
    bundle.prekey_signature = crypto.sign(
        identity.priv, prekey_signing_input(bundle.signed_prekey));
    bundle.one_time_prekey = secrets.one_time_prekey.pub;
    bundle.one_time_id = one_time_id;
    return {bundle, secrets};
}

bool verify_bundle(const CryptoProvider& crypto, const PrekeyBundle& bundle) {
    return crypto.verify(bundle.identity,
                         prekey_signing_input(bundle.signed_prekey),
                         bundle.prekey_signature);
}

namespace {

std::optional<Bytes32> handshake_root(const CryptoProvider& crypto,
                                      const std::optional<Bytes32>& dh1,
                                      const std::optional<Bytes32>& dh2,
                                      const std::optional<Bytes32>& dh3,
                                      const std::optional<Bytes32>& dh4) {
    if (!dh1 || !dh2 || !dh3 || !dh4) return std::nullopt;
    Bytes ikm;
    ikm.reserve(128);
    append(ikm, *dh1);
    append(ikm, *dh2);
    append(ikm, *dh3);
    append(ikm, *dh4);
    return crypto.kdf(ikm, as_bytes(kHandshakeLabel));
}

}  // namespace

std::optional<HandshakeInit> handshake_initiate(const CryptoProvider& crypto,
                                                const KeyPair& identity,
                                                const PrekeyBundle& peer,
                                                Rng& rng) {
    if (!verify_bundle(crypto, peer)) return std::nullopt;
    KeyPair ephemeral = crypto.generate_keypair(rng);
    auto root = handshake_root(
        crypto, crypto.dh(identity.priv, peer.signed_prekey),
        crypto.dh(ephemeral.priv, peer.identity),
        crypto.dh(ephemeral.priv, peer.signed_prekey),
        crypto.dh(ephemeral.priv, peer.one_time_prekey));
    if (!root) return std::nullopt;
    return HandshakeInit{*root, ephemeral.pub, peer.one_time_id};
}

std::optional<Bytes32> handshake_respond(const CryptoProvider& crypto,
                                         const KeyPair& identity,
                                         const BundleSecrets& secrets,
                                         const PublicKey& peer_identity,
                                         const PublicKey& peer_ephemeral) {
    return handshake_root(
        crypto, crypto.dh(secrets.signed_prekey.priv, peer_identity),
        crypto.dh(identity.priv, peer_ephemeral),
        crypto.dh(secrets.signed_prekey.priv, peer_ephemeral),
        crypto.dh(secrets.one_time_prekey.priv, peer_ephemeral));
}

// ---------------------------------------------------------------------------
// SessionState

SessionState SessionState::initiator(const CryptoProvider& crypto,
                                     const Bytes32& root,
                                     const PublicKey& peer_ratchet, Rng& rng) {
    SessionState s(crypto, root);
    s.remote_ratchet_ = peer_ratchet;
    s.self_ratchet_ = crypto.generate_keypair(rng);
    return s;
}

SessionState SessionState::responder(const CryptoProvider& crypto,
                                     const Bytes32& root,
                                     const KeyPair& own_ratchet) {
    SessionState s(crypto, root);
    s.self_ratchet_ = own_ratchet;
    return s;
}

void SessionState::ratchet_send(Rng& rng) {
    if (!remote_ratchet_)
        throw std::logic_error("cannot send before the peer's first message");
    // Rotate our ratchet key on every direction change. The initiator's
    // very first send keeps the keypair generated at construction.
    if (recv_chain_) self_ratchet_ = crypto_->generate_keypair(rng);
    auto dh = crypto_->dh(self_ratchet_.priv, *remote_ratchet_);
    if (!dh) throw std::runtime_error("ratchet agreement failed");
    auto [root, chain] = advance_root(*crypto_, root_, *dh);
    root_ = root;
    send_chain_ = chain;
    send_dh_ = *dh;
    send_counter_ = 0;
}

void SessionState::ratchet_receive(const PublicKey& new_remote) {
    auto dh = crypto_->dh(self_ratchet_.priv, new_remote);
    if (!dh) throw std::runtime_error("ratchet agreement failed");
    auto [root, chain] = advance_root(*crypto_, root_, *dh);
    root_ = root;
    recv_chain_ = chain;
    recv_dh_ = *dh;
    recv_counter_ = 0;
    remote_ratchet_ = new_remote;
    // Direction changed: the next send starts a new epoch.
    send_chain_.reset();
}

Bytes SessionState::encrypt(ByteView plaintext, Rng& rng) {
    if (!send_chain_) ratchet_send(rng);
    auto [next_chain, message_key] =
        chain_step(*crypto_, *send_chain_, send_dh_);

    Bytes aad;
    aad.reserve(4 + 32);
    put_u32_be(aad, send_counter_);
    append(aad, self_ratchet_.pub.bytes);

    Bytes wire;
    wire.reserve(4 + 32 + plaintext.size() + 64);
    put_u32_be(wire, send_counter_);
    append(wire, self_ratchet_.pub.bytes);
    append(wire, crypto_->aead_seal(message_key, plaintext, aad));

    send_chain_ = next_chain;
    ++send_counter_;
    return wire;
}

std::optional<Bytes> SessionState::decrypt(ByteView wire) {
    if (wire.size() < 4 + 32) return std::nullopt;
    ByteReader rd(wire);
    std::uint32_t counter = rd.u32be();
    PublicKey ratchet;
    ratchet.bytes = rd.take_array<32>();
    Bytes blob = rd.rest();

    Bytes aad;
    aad.reserve(36);
    put_u32_be(aad, counter);
    append(aad, ratchet.bytes);

    // Out-of-order arrival from a chain we already moved past.
    auto cached = skipped_.find({ratchet, counter});
    if (cached != skipped_.end()) {
        auto plain = crypto_->aead_open(cached->second, blob, aad);
        if (!plain) return std::nullopt;
        skipped_.erase(cached);
        return plain;
    }

    // Work on a copy so a forged message cannot advance real state.
    SessionState scratch = *this;
    if (!scratch.remote_ratchet_ || ratchet != *scratch.remote_ratchet_) {
        if (scratch.remote_ratchet_ && scratch.recv_chain_) {
            // Park a window of keys from the chain being left behind.
            Bytes32 chain = *scratch.recv_chain_;
            for (std::size_t i = 0; i < kSkippedWindow; ++i) {
                auto [next, mk] = chain_step(*crypto_, chain, scratch.recv_dh_);
                scratch.skipped_[{*scratch.remote_ratchet_,
                                  scratch.recv_counter_ + i}] = mk;
                chain = next;
            }
        }
        scratch.ratchet_receive(ratchet);
    }

    if (counter < scratch.recv_counter_) return std::nullopt;  // replay
    if (counter - scratch.recv_counter_ > kSkippedWindow) return std::nullopt;

    Bytes32 chain = *scratch.recv_chain_;
    while (scratch.recv_counter_ < counter) {
        auto [next, mk] = chain_step(*crypto_, chain, scratch.recv_dh_);
        scratch.skipped_[{ratchet, scratch.recv_counter_}] = mk;
        chain = next;
        ++scratch.recv_counter_;
    }
    auto [next, message_key] = chain_step(*crypto_, chain, scratch.recv_dh_);
    auto plain = crypto_->aead_open(message_key, blob, aad);
    if (!plain) return std::nullopt;

    scratch.recv_chain_ = next;
    ++scratch.recv_counter_;
    while (scratch.skipped_.size() > kSkippedCap)
        scratch.skipped_.erase(scratch.skipped_.begin());
    *this = std::move(scratch);
    return plain;
}

// ---------------------------------------------------------------------------
// Friend requests

Bytes friend_request_encode(const FriendRequest& req) {
    if (req.intro.size() > kMaxIntroBytes)
        throw std::length_error("introduction over 1 KiB");
    Bytes out;
    append(out, req.sender.bytes);
    put_u32_be(out, static_cast<std::uint32_t>(req.display_name.size()));
    append(out, as_bytes(req.display_name));
    put_u32_be(out, static_cast<std::uint32_t>(req.intro.size()));
    append(out, as_bytes(req.intro));
    append(out, req.bundle.identity.bytes);
    append(out, req.bundle.signed_prekey.bytes);
    put_u32_be(out, static_cast<std::uint32_t>(req.bundle.prekey_signature.size()));
    append(out, req.bundle.prekey_signature);
    append(out, req.bundle.one_time_prekey.bytes);
    put_u32_be(out, req.bundle.one_time_id);
    return out;
}

std::optional<FriendRequest> friend_request_decode(ByteView data) {
    ByteReader rd(data);
    FriendRequest req;
    req.sender.bytes = rd.take_array<32>();
    std::uint32_t name_len = rd.u32be();
    if (!rd.ok() || name_len > rd.remaining()) return std::nullopt;
    Bytes name = rd.take(name_len);
    req.display_name.assign(name.begin(), name.end());
    std::uint32_t intro_len = rd.u32be();
    if (!rd.ok() || intro_len > kMaxIntroBytes || intro_len > rd.remaining())
        return std::nullopt;
    Bytes intro = rd.take(intro_len);
    req.intro.assign(intro.begin(), intro.end());
    req.bundle.identity.bytes = rd.take_array<32>();
    req.bundle.signed_prekey.bytes = rd.take_array<32>();
    std::uint32_t sig_len = rd.u32be();
    if (!rd.ok() || sig_len > rd.remaining()) return std::nullopt;
    req.bundle.prekey_signature = rd.take(sig_len);
    req.bundle.one_time_prekey.bytes = rd.take_array<32>();
    req.bundle.one_time_id = rd.u32be();
    if (!rd.ok() || rd.remaining() != 0) return std::nullopt;
    return req;
}

Bytes friend_request_seal(const CryptoProvider& crypto, Rng& rng,
                          const PublicKey& recipient,
                          const FriendRequest& req) {
    return seal_to(crypto, rng, recipient, friend_request_encode(req),
                   as_bytes(kFriendAad));
}

std::optional<FriendRequest> friend_request_open(const CryptoProvider& crypto,
                                                 const KeyPair& recipient,
                                                 ByteView blob) {
    auto plain = open_sealed(crypto, recipient, blob, as_bytes(kFriendAad));
    if (!plain) return std::nullopt;
    return friend_request_decode(*plain);
}

}  // namespace swarmnet
