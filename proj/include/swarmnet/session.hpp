// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "swarmnet/crypto.hpp"

namespace swarmnet {

// End-to-end sessions. The handshake combines four agreements between
// long-term, signed-medium-term and one-shot keys; afterwards a chain of
// derived keys ratchets forward with a fresh agreement whenever the sending
// direction flips, so a leaked state never unlocks older traffic.

struct PrekeyBundle {
    PublicKey identity;
    PublicKey signed_prekey;
    Bytes prekey_signature;  // over signed_prekey, by the identity key
    PublicKey one_time_prekey;
    std::uint32_t one_time_id = 0;
};

struct BundleSecrets {
    KeyPair signed_prekey;
    KeyPair one_time_prekey;
    std::uint32_t one_time_id = 0;
};

std::pair<PrekeyBundle, BundleSecrets> make_bundle(const CryptoProvider& crypto,
                                                   const KeyPair& identity,
                                                   std::uint32_t one_time_id,
                                                   Rng& rng);
bool verify_bundle(const CryptoProvider& crypto, const PrekeyBundle& bundle);

// Initiator output: the shared root plus the ephemeral key the responder
// needs to recompute it.
struct HandshakeInit {
    Bytes32 root{};
    PublicKey ephemeral;
    std::uint32_t one_time_id = 0;
};

std::optional<HandshakeInit> handshake_initiate(const CryptoProvider& crypto,
                                                const KeyPair& identity,
                                                const PrekeyBundle& peer,
                                                Rng& rng);

std::optional<Bytes32> handshake_respond(const CryptoProvider& crypto,
                                         const KeyPair& identity,
                                         const BundleSecrets& secrets,
                                         const PublicKey& peer_identity,
                                         const PublicKey& peer_ephemeral);

// One symmetric ratchet step: (chain, agreement output) -> (next chain,
// message key). Exposed for tests; SessionState drives it internally.
std::pair<Bytes32, Bytes32> chain_step(const CryptoProvider& crypto,
                                       const Bytes32& chain_key,
                                       const Bytes32& dh_out);

// Wire form of a session message:
//   counter(4, BE) || ratchet_pub(32) || sealed payload
// The counter indexes the sender's current chain; the ratchet key announces
// agreement epochs. Both are authenticated as associated data.
inline constexpr std::size_t kSkippedWindow = 32;

class SessionState {
public:
    // Initiator: knows the peer's ratchet key (the signed prekey) from the
    // bundle and ratchets immediately on first send.
    static SessionState initiator(const CryptoProvider& crypto,
                                  const Bytes32& root,
                                  const PublicKey& peer_ratchet, Rng& rng);
    // Responder: starts with the signed prekey pair as its ratchet key and
    // learns the peer's from the first incoming message.
    static SessionState responder(const CryptoProvider& crypto,
                                  const Bytes32& root,
                                  const KeyPair& own_ratchet);

    Bytes encrypt(ByteView plaintext, Rng& rng);
    std::optional<Bytes> decrypt(ByteView wire);

    // Secure deletion of cached out-of-order message keys.
    void clear_skipped_keys() { skipped_.clear(); }
    std::size_t skipped_key_count() const { return skipped_.size(); }
    const PublicKey& ratchet_pub() const { return self_ratchet_.pub; }

private:
    SessionState(const CryptoProvider& crypto, const Bytes32& root)
        : crypto_(&crypto), root_(root) {}

    void ratchet_send(Rng& rng);
    void ratchet_receive(const PublicKey& new_remote);

    const CryptoProvider* crypto_;
    Bytes32 root_{};
    KeyPair self_ratchet_;
    std::optional<PublicKey> remote_ratchet_;

    std::optional<Bytes32> send_chain_;
    Bytes32 send_dh_{};
    std::uint32_t send_counter_ = 0;

    std::optional<Bytes32> recv_chain_;
    Bytes32 recv_dh_{};
    std::uint32_t recv_counter_ = 0;

    // (epoch ratchet key, counter) -> message key, for out-of-order arrivals.
    std::map<std::pair<PublicKey, std::uint32_t>, Bytes32> skipped_;
};

// First-contact payload, sealed anonymously to the recipient's identity:
// who is asking, a short introduction, and the sender's own bundle so the
// recipient can answer with a full handshake.
inline constexpr std::size_t kMaxIntroBytes = 1024;

struct FriendRequest {
    PublicKey sender;
    std::string display_name;
    std::string intro;
    PrekeyBundle bundle;
};

Bytes friend_request_encode(const FriendRequest& req);
std::optional<FriendRequest> friend_request_decode(ByteView data);

Bytes friend_request_seal(const CryptoProvider& crypto, Rng& rng,
                          const PublicKey& recipient, const FriendRequest& req);
std::optional<FriendRequest> friend_request_open(const CryptoProvider& crypto,
                                                 const KeyPair& recipient,
                                                 ByteView blob);

// Private halves of published prekeys, indexed by one-time id. Each one-time
// key answers exactly one handshake; a second take is a reuse error.
class PrekeyVault {
public:
    void put(const BundleSecrets& secrets) {
        vault_[secrets.one_time_id] = secrets;
    }
    std::optional<BundleSecrets> consume(std::uint32_t one_time_id) {
        auto it = vault_.find(one_time_id);
        if (it == vault_.end()) return std::nullopt;
        BundleSecrets out = it->second;
        vault_.erase(it);
        return out;
    }
    std::size_t size() const { return vault_.size(); }

private:
    std::map<std::uint32_t, BundleSecrets> vault_;
};

// Requests awaiting a decision, one slot per sender. A newer request from
// the same sender supersedes the pending one; acceptance or decline clears
// the slot, and only acceptance hands the bundle out for a handshake.
class PendingContacts {
public:
    enum class Outcome { added, superseded };

    Outcome offer(const FriendRequest& request) {
        auto [it, inserted] = pending_.insert_or_assign(request.sender, request);
        (void)it;
        return inserted ? Outcome::added : Outcome::superseded;
    }
    std::optional<FriendRequest> accept(const PublicKey& sender) {
        auto it = pending_.find(sender);
        if (it == pending_.end()) return std::nullopt;
        FriendRequest out = it->second;
        pending_.erase(it);
        return out;
    }
    bool decline(const PublicKey& sender) { return pending_.erase(sender) > 0; }
    bool has(const PublicKey& sender) const { return pending_.contains(sender); }
    std::size_t size() const { return pending_.size(); }

private:
    std::map<PublicKey, FriendRequest> pending_;
};

}  // namespace swarmnet
