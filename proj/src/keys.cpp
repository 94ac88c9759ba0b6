// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#include "swarmnet/keys.hpp"

#include <algorithm>
#include <cctype>

namespace swarmnet {

std::string encode_address(const PublicKey& key) {
    Bytes wire = encode_pubkey(key);
    return to_hex(wire);
}

std::optional<PublicKey> decode_address(std::string_view address) {
    if (address.size() != kAddressLength) return std::nullopt;
    if (std::any_of(address.begin(), address.end(),
                    [](unsigned char c) { return std::isupper(c); }))
        return std::nullopt;
    auto raw = from_hex(address);
    if (!raw) return std::nullopt;
    return decode_pubkey(*raw);
}

Bytes encode_pubkey(const PublicKey& key) {
    Bytes wire;
    wire.reserve(1 + key.bytes.size());
    wire.push_back(kAddressVersion);
    append(wire, key.bytes);
    return wire;
}

std::optional<PublicKey> decode_pubkey(ByteView wire) {
    if (wire.size() != 33 || wire[0] != kAddressVersion) return std::nullopt;
    PublicKey key;
    std::copy(wire.begin() + 1, wire.end(), key.bytes.begin());
    return key;
}

}  // namespace swarmnet
