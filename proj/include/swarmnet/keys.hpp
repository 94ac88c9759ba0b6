// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <optional>
#include <string>

#include "swarmnet/bytes.hpp"

namespace swarmnet {

struct PublicKey {
    Bytes32 bytes{};
    auto operator<=>(const PublicKey&) const = default;
};

struct PrivateKey {
    Bytes32 bytes{};
    auto operator<=>(const PrivateKey&) const = default;
};

struct KeyPair {
    PublicKey pub;
    PrivateKey priv;
};

// Public addresses are the version byte followed by the raw key, hex encoded:
// 66 lowercase characters, always starting with "05".
inline constexpr std::uint8_t kAddressVersion = 0x05;
inline constexpr std::size_t kAddressLength = 66;

std::string encode_address(const PublicKey& key);
std::optional<PublicKey> decode_address(std::string_view address);

// Version byte plus raw key, the 33-byte form used on the wire.
Bytes encode_pubkey(const PublicKey& key);
std::optional<PublicKey> decode_pubkey(ByteView wire);

}  // namespace swarmnet
