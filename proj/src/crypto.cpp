// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#include "swarmnet/crypto.hpp"

#include <sodium.h>

#include <stdexcept>

namespace swarmnet {

Bytes64 sha512(ByteView data) {
    Bytes64 out{};
    crypto_hash_sha512(out.data(), data.data(), data.size());
    return out;
}

Bytes64 sha512_pair(ByteView a, ByteView b) {
    crypto_hash_sha512_state st;
    crypto_hash_sha512_init(&st);
    crypto_hash_sha512_update(&st, a.data(), a.size());
    crypto_hash_sha512_update(&st, b.data(), b.size());
    Bytes64 out{};
    crypto_hash_sha512_final(&st, out.data());
    return out;
}

SodiumProvider::SodiumProvider() {
    if (sodium_init() < 0)
        throw std::runtime_error("libsodium initialisation failed");
}

KeyPair SodiumProvider::generate_keypair(Rng& rng) const {
    Bytes32 seed = rng.bytes32();
    unsigned char pk[crypto_sign_PUBLICKEYBYTES];
    unsigned char sk[crypto_sign_SECRETKEYBYTES];
    crypto_sign_seed_keypair(pk, sk, seed.data());
    KeyPair kp;
    std::copy(pk, pk + 32, kp.pub.bytes.begin());
    kp.priv.bytes = seed;
    return kp;
}

std::optional<Bytes32> SodiumProvider::dh(const PrivateKey& self,
                                          const PublicKey& peer) const {
    unsigned char pk[crypto_sign_PUBLICKEYBYTES];
    unsigned char sk[crypto_sign_SECRETKEYBYTES];
    crypto_sign_seed_keypair(pk, sk, self.bytes.data());

    unsigned char x_sk[crypto_scalarmult_curve25519_BYTES];
    if (crypto_sign_ed25519_sk_to_curve25519(x_sk, sk) != 0)
        return std::nullopt;
    unsigned char x_pk[crypto_scalarmult_curve25519_BYTES];
    if (crypto_sign_ed25519_pk_to_curve25519(x_pk, peer.bytes.data()) != 0)
        return std::nullopt;

    Bytes32 shared{};
    if (crypto_scalarmult(shared.data(), x_sk, x_pk) != 0)
        return std::nullopt;
    return shared;
}

Bytes32 SodiumProvider::kdf(ByteView ikm, ByteView label) const {
    crypto_auth_hmacsha512_state st;
    crypto_auth_hmacsha512_init(&st, label.data(), label.size());
    crypto_auth_hmacsha512_update(&st, ikm.data(), ikm.size());
    unsigned char mac[crypto_auth_hmacsha512_BYTES];
    crypto_auth_hmacsha512_final(&st, mac);
    Bytes32 out{};
    std::copy(mac, mac + 32, out.begin());
    return out;
}

Bytes64 SodiumProvider::hash512(ByteView data) const {
    return sha512(data);
}

namespace {

// Nonce is a function of key, aad and plaintext, so sealing is repeatable
// for identical inputs and never reuses a nonce across distinct plaintexts.
Bytes24 derive_nonce(const Bytes32& key, ByteView plaintext, ByteView aad) {
    Bytes material;
    material.reserve(key.size() + 8 + aad.size() + plaintext.size());
    append(material, key);
    put_u64_be(material, aad.size());
    append(material, aad);
    append(material, plaintext);
    Bytes64 digest = sha512(material);
    Bytes24 nonce{};
    std::copy(digest.begin(), digest.begin() + 24, nonce.begin());
    return nonce;
}

}  // namespace

Bytes SodiumProvider::aead_seal(const Bytes32& key, ByteView plaintext,
                                ByteView aad) const {
    Bytes24 nonce = derive_nonce(key, plaintext, aad);
    Bytes out(nonce.begin(), nonce.end());
    out.resize(nonce.size() + plaintext.size() +
               crypto_aead_xchacha20poly1305_ietf_ABYTES);
    unsigned long long clen = 0;
    crypto_aead_xchacha20poly1305_ietf_encrypt(
        out.data() + nonce.size(), &clen, plaintext.data(), plaintext.size(),
        aad.data(), aad.size(), nullptr, nonce.data(), key.data());
    out.resize(nonce.size() + clen);
    return out;
}

std::optional<Bytes> SodiumProvider::aead_open(const Bytes32& key,
                                               ByteView sealed,
                                               ByteView aad) const {
    constexpr std::size_t kNonce = 24;
    constexpr std::size_t kTag = crypto_aead_xchacha20poly1305_ietf_ABYTES;
    if (sealed.size() < kNonce + kTag) return std::nullopt;
    Bytes out(sealed.size() - kNonce - kTag);
    unsigned long long mlen = 0;
    if (crypto_aead_xchacha20poly1305_ietf_decrypt(
            out.data(), &mlen, nullptr, sealed.data() + kNonce,
            sealed.size() - kNonce, aad.data(), aad.size(), sealed.data(),
            key.data()) != 0)
        return std::nullopt;
    out.resize(mlen);
    return out;
}

Bytes SodiumProvider::sign(const PrivateKey& key, ByteView message) const {
    unsigned char pk[crypto_sign_PUBLICKEYBYTES];
    unsigned char sk[crypto_sign_SECRETKEYBYTES];
    crypto_sign_seed_keypair(pk, sk, key.bytes.data());
    Bytes sig(crypto_sign_BYTES);
    unsigned long long siglen = 0;
    crypto_sign_detached(sig.data(), &siglen, message.data(), message.size(),
                         sk);
    sig.resize(siglen);
    return sig;
}

bool SodiumProvider::verify(const PublicKey& key, ByteView message,
                            ByteView signature) const {
    if (signature.size() != crypto_sign_BYTES) return false;
    return crypto_sign_verify_detached(signature.data(), message.data(),
                                       message.size(), key.bytes.data()) == 0;
}

// ---------------------------------------------------------------------------
// FakeProvider

KeyPair FakeProvider::generate_keypair(Rng& rng) const {
    KeyPair kp;
    kp.priv.bytes = rng.bytes32();
    kp.pub.bytes = kp.priv.bytes;
    return kp;
}

std::optional<Bytes32> FakeProvider::dh(const PrivateKey& self,
                                        const PublicKey& peer) const {
    // pub == priv here, so hashing the sorted pair is symmetric.
    const Bytes32& a = self.bytes;
    const Bytes32& b = peer.bytes;
    Bytes material;
    material.reserve(65);
    material.push_back(0xd4);
    if (a <= b) {
        append(material, a);
        append(material, b);
    } else {
        append(material, b);
        append(material, a);
    }
    Bytes64 digest = sha512(material);
    Bytes32 out{};
    std::copy(digest.begin(), digest.begin() + 32, out.begin());
    return out;
}

Bytes32 FakeProvider::kdf(ByteView ikm, ByteView label) const {
    Bytes material;
    material.reserve(8 + label.size() + ikm.size());
    put_u64_be(material, label.size());
    append(material, label);
    append(material, ikm);
    Bytes64 digest = sha512(material);
    Bytes32 out{};
    std::copy(digest.begin(), digest.begin() + 32, out.begin());
    return out;
}

Bytes64 FakeProvider::hash512(ByteView data) const {
    return sha512(data);
}

namespace {

Bytes fake_keystream(const Bytes32& key, ByteView aad, std::size_t n) {
    Bytes64 aad_hash = sha512(aad);
    Bytes out;
    out.reserve(n + 64);
    std::uint64_t block = 0;
    while (out.size() < n) {
        Bytes material;
        append(material, key);
        put_u64_be(material, block++);
        append(material, aad_hash);
        append(out, sha512(material));
    }
    out.resize(n);
    return out;
}

Bytes16 fake_tag(const Bytes32& key, ByteView aad, ByteView ciphertext) {
    Bytes material;
    material.reserve(key.size() + 16 + aad.size() + ciphertext.size());
    append(material, key);
    put_u64_be(material, aad.size());
    append(material, aad);
    put_u64_be(material, ciphertext.size());
    append(material, ciphertext);
    Bytes64 digest = sha512(material);
    Bytes16 tag{};
    std::copy(digest.begin(), digest.begin() + 16, tag.begin());
    return tag;
}

}  // namespace

Bytes FakeProvider::aead_seal(const Bytes32& key, ByteView plaintext,
                              ByteView aad) const {
    Bytes ks = fake_keystream(key, aad, plaintext.size());
    Bytes out;
    out.reserve(plaintext.size() + 16);
    for (std::size_t i = 0; i < plaintext.size(); ++i)
        out.push_back(plaintext[i] ^ ks[i]);
    Bytes16 tag = fake_tag(key, aad, out);
    append(out, tag);
    return out;
}

std::optional<Bytes> FakeProvider::aead_open(const Bytes32& key,
                                             ByteView sealed,
                                             ByteView aad) const {
    if (sealed.size() < 16) return std::nullopt;
    ByteView ct = sealed.first(sealed.size() - 16);
    Bytes16 expect = fake_tag(key, aad, ct);
    if (!std::equal(expect.begin(), expect.end(),
                    sealed.begin() + static_cast<std::ptrdiff_t>(ct.size())))
        return std::nullopt;
    Bytes ks = fake_keystream(key, aad, ct.size());
    Bytes out;
    out.reserve(ct.size());
    for (std::size_t i = 0; i < ct.size(); ++i) out.push_back(ct[i] ^ ks[i]);
    return out;
}

Bytes FakeProvider::sign(const PrivateKey& key, ByteView message) const {
    Bytes material;
    material.reserve(33 + message.size());
    material.push_back(0x51);
    append(material, key.bytes);
    append(material, message);
    Bytes64 digest = sha512(material);
    return Bytes(digest.begin(), digest.end());
}

bool FakeProvider::verify(const PublicKey& key, ByteView message,
                          ByteView signature) const {
    // pub == priv for fake keys, so re-signing reproduces the signature.
    PrivateKey mirror{key.bytes};
    Bytes expect = sign(mirror, message);
    return signature.size() == expect.size() &&
           std::equal(expect.begin(), expect.end(), signature.begin());
}

// ---------------------------------------------------------------------------
// Sealed boxes

namespace {

constexpr std::string_view kSealLabel = "sealed-box";

Bytes32 sealed_key(const CryptoProvider& crypto, const Bytes32& shared,
                   const PublicKey& ephemeral, const PublicKey& recipient) {
    Bytes ikm;
    ikm.reserve(96);
    append(ikm, shared);
    append(ikm, ephemeral.bytes);
    append(ikm, recipient.bytes);
    return crypto.kdf(ikm, as_bytes(kSealLabel));
}

}  // namespace

SealResult seal_to_with_key(const CryptoProvider& crypto, Rng& rng,
                            const PublicKey& recipient, ByteView plaintext,
                            ByteView aad) {
    for (;;) {
        KeyPair eph = crypto.generate_keypair(rng);
        auto shared = crypto.dh(eph.priv, recipient);
        if (!shared) continue;  // recipient key degenerate for this ephemeral
        SealResult res;
        res.key = sealed_key(crypto, *shared, eph.pub, recipient);
        res.ephemeral_pub = eph.pub;
        res.blob.reserve(32 + plaintext.size() + 64);
        append(res.blob, eph.pub.bytes);
        Bytes sealed = crypto.aead_seal(res.key, plaintext, aad);
        append(res.blob, sealed);
        return res;
    }
}

std::optional<OpenResult> open_sealed_with_key(const CryptoProvider& crypto,
                                               const KeyPair& recipient,
                                               ByteView blob, ByteView aad) {
    if (blob.size() < 32) return std::nullopt;
    PublicKey eph;
    std::copy(blob.begin(), blob.begin() + 32, eph.bytes.begin());
    auto shared = crypto.dh(recipient.priv, eph);
    if (!shared) return std::nullopt;
    Bytes32 key = sealed_key(crypto, *shared, eph, recipient.pub);
    auto plain = crypto.aead_open(key, blob.subspan(32), aad);
    if (!plain) return std::nullopt;
    return OpenResult{std::move(*plain), key};
}

Bytes seal_to(const CryptoProvider& crypto, Rng& rng,
              const PublicKey& recipient, ByteView plaintext, ByteView aad) {
    return seal_to_with_key(crypto, rng, recipient, plaintext, aad).blob;
}

std::optional<Bytes> open_sealed(const CryptoProvider& crypto,
                                 const KeyPair& recipient, ByteView blob,
                                 ByteView aad) {
    auto res = open_sealed_with_key(crypto, recipient, blob, aad);
    if (!res) return std::nullopt;
    return std::move(res->plaintext);
}

}  // namespace swarmnet
