// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>

#include "swarmnet/bytes.hpp"
#include "swarmnet/keys.hpp"
#include "swarmnet/rng.hpp"

namespace swarmnet {

// SHA-512. Fixed algorithm, shared by admission hashing, record hashing and
// block hashes; not part of the pluggable provider surface.
Bytes64 sha512(ByteView data);
Bytes64 sha512_pair(ByteView a, ByteView b);

// Everything the protocol needs from a cryptography backend. All operations
// are deterministic given their inputs; key generation draws from the caller
// supplied Rng so simulations replay exactly.
class CryptoProvider {
public:
    virtual ~CryptoProvider() = default;

    virtual KeyPair generate_keypair(Rng& rng) const = 0;

    // Shared secret between our private key and their public key. Symmetric:
    // dh(a, B) == dh(b, A). Empty on invalid/degenerate public keys.
    virtual std::optional<Bytes32> dh(const PrivateKey& self,
                                      const PublicKey& peer) const = 0;

    // Keyed derivation: 32 bytes out of (ikm, label). Distinct labels give
    // independent outputs for the same input material.
    virtual Bytes32 kdf(ByteView ikm, ByteView label) const = 0;

    virtual Bytes64 hash512(ByteView data) const = 0;

    // Authenticated encryption. Deterministic for fixed (key, plaintext, aad);
    // the nonce is derived from all three and carried in the output.
    virtual Bytes aead_seal(const Bytes32& key, ByteView plaintext,
                            ByteView aad) const = 0;
    virtual std::optional<Bytes> aead_open(const Bytes32& key, ByteView sealed,
                                           ByteView aad) const = 0;

    virtual Bytes sign(const PrivateKey& key, ByteView message) const = 0;
    virtual bool verify(const PublicKey& key, ByteView message,
                        ByteView signature) const = 0;
};

// Ed25519 identities (private key = 32-byte seed), X25519 agreement via the
// birational map, HMAC-SHA-512 derivation, XChaCha20-Poly1305 sealing.
class SodiumProvider final : public CryptoProvider {
public:
    SodiumProvider();

    KeyPair generate_keypair(Rng& rng) const override;
    std::optional<Bytes32> dh(const PrivateKey& self,
                              const PublicKey& peer) const override;
    Bytes32 kdf(ByteView ikm, ByteView label) const override;
    Bytes64 hash512(ByteView data) const override;
    Bytes aead_seal(const Bytes32& key, ByteView plaintext,
                    ByteView aad) const override;
    std::optional<Bytes> aead_open(const Bytes32& key, ByteView sealed,
                                   ByteView aad) const override;
    Bytes sign(const PrivateKey& key, ByteView message) const override;
    bool verify(const PublicKey& key, ByteView message,
                ByteView signature) const override;
};

// Structure-preserving stand-in for property tests: public key mirrors the
// private key, agreement hashes the sorted key pair, sealing is an XOR
// stream with a hash tag. Orders of magnitude faster than the real thing and
// still catches protocol-level mistakes. Never use outside tests.
class FakeProvider final : public CryptoProvider {
public:
    KeyPair generate_keypair(Rng& rng) const override;
    std::optional<Bytes32> dh(const PrivateKey& self,
                              const PublicKey& peer) const override;
    Bytes32 kdf(ByteView ikm, ByteView label) const override;
    Bytes64 hash512(ByteView data) const override;
    Bytes aead_seal(const Bytes32& key, ByteView plaintext,
                    ByteView aad) const override;
    std::optional<Bytes> aead_open(const Bytes32& key, ByteView sealed,
                                   ByteView aad) const override;
    Bytes sign(const PrivateKey& key, ByteView message) const override;
    bool verify(const PublicKey& key, ByteView message,
                ByteView signature) const override;
};

// Anonymous one-shot box: fresh ephemeral key, DH against the recipient,
// AEAD under the derived key. Output is ephemeral_pub(32) || sealed blob.
// The *_with_key variants also expose the derived symmetric key so a reply
// can be sent back over the same key without another agreement.
struct SealResult {
    Bytes blob;
    Bytes32 key;
    PublicKey ephemeral_pub;
};
struct OpenResult {
    Bytes plaintext;
    Bytes32 key;
};

SealResult seal_to_with_key(const CryptoProvider& crypto, Rng& rng,
                            const PublicKey& recipient, ByteView plaintext,
                            ByteView aad);
std::optional<OpenResult> open_sealed_with_key(const CryptoProvider& crypto,
                                               const KeyPair& recipient,
                                               ByteView blob, ByteView aad);

Bytes seal_to(const CryptoProvider& crypto, Rng& rng,
              const PublicKey& recipient, ByteView plaintext, ByteView aad);
std::optional<Bytes> open_sealed(const CryptoProvider& crypto,
                                 const KeyPair& recipient, ByteView blob,
                                 ByteView aad);

}  // namespace swarmnet
