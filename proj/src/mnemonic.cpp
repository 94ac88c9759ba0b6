// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#include "swarmnet/mnemonic.hpp"

#include <algorithm>

#include "swarmnet/crypto.hpp"

namespace swarmnet {

namespace {

const std::array<const char*, 2048> kWordlist = {
#include "wordlist.inc"
};

std::size_t checksum_index(const PrivateKey& key) {
    Bytes64 digest = sha512(key.bytes);
    std::size_t v = (static_cast<std::size_t>(digest[0]) << 8) | digest[1];
    return v % kWordlist.size();
}

}  // namespace

const std::array<const char*, 2048>& mnemonic_wordlist() {
    return kWordlist;
}

std::vector<std::string> mnemonic_encode(const PrivateKey& key) {
    // 33 bytes: the key plus one zero padding byte, read as 24 * 11 bits.
    std::array<std::uint8_t, 33> buffer{};
    std::copy(key.bytes.begin(), key.bytes.end(), buffer.begin());

    std::vector<std::string> words;
    words.reserve(kMnemonicWords);
    for (std::size_t group = 0; group < 24; ++group) {
        std::size_t index = 0;
        for (std::size_t k = 0; k < 11; ++k) {
            std::size_t bit = group * 11 + k;
            std::uint8_t byte = buffer[bit / 8];
            index = (index << 1) | ((byte >> (7 - bit % 8)) & 1);
        }
        words.emplace_back(kWordlist[index]);
    }
    words.emplace_back(kWordlist[checksum_index(key)]);
    return words;
}

std::optional<PrivateKey> mnemonic_decode(const std::vector<std::string>& words,
                                          MnemonicError& error) {
    if (words.size() != kMnemonicWords) {
        error = MnemonicError::bad_word_count;
        return std::nullopt;
    }

    std::array<std::size_t, 24> indices{};
    for (std::size_t i = 0; i < 24; ++i) {
        auto it = std::lower_bound(kWordlist.begin(), kWordlist.end(),
                                   words[i],
                                   [](const char* a, const std::string& b) {
                                       return b.compare(a) > 0;
                                   });
        if (it == kWordlist.end() || words[i] != *it) {
            error = MnemonicError::unknown_word;
            return std::nullopt;
        }
        indices[i] = static_cast<std::size_t>(it - kWordlist.begin());
    }

    std::array<std::uint8_t, 33> buffer{};
    for (std::size_t group = 0; group < 24; ++group) {
        for (std::size_t k = 0; k < 11; ++k) {
            std::size_t bit = group * 11 + k;
            if ((indices[group] >> (10 - k)) & 1)
                buffer[bit / 8] |= static_cast<std::uint8_t>(1 << (7 - bit % 8));
        }
    }
    if (buffer[32] != 0) {
        error = MnemonicError::bad_checksum;
        return std::nullopt;
    }

    PrivateKey key;
    std::copy(buffer.begin(), buffer.begin() + 32, key.bytes.begin());
    if (words[24] != kWordlist[checksum_index(key)]) {
        error = MnemonicError::bad_checksum;
        return std::nullopt;
    }
    error = MnemonicError::none;
    return key;
}

}  // namespace swarmnet
