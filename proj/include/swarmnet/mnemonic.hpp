// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <vector>

#include "swarmnet/keys.hpp"

namespace swarmnet {

// Private key backup as 25 English words. The 256 key bits plus 8 zero
// padding bits are split into 24 groups of 11, each indexing the word list;
// the 25th word is a checksum derived from a hash of the raw key.
inline constexpr std::size_t kMnemonicWords = 25;

const std::array<const char*, 2048>& mnemonic_wordlist();

std::vector<std::string> mnemonic_encode(const PrivateKey& key);

enum class MnemonicError {
    none,
    bad_word_count,
    unknown_word,
    bad_checksum,
};

std::optional<PrivateKey> mnemonic_decode(const std::vector<std::string>& words,
                                          MnemonicError& error);

}  // namespace swarmnet
