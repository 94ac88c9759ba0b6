// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "swarmnet/bytes.hpp"

namespace swarmnet {

// Deterministic PRNG (splitmix64). Every random choice in the simulator and
// in key generation flows through one of these so that runs are reproducible
// from a single seed. Not suitable for real-world key material.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n); n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        // Reject the low sliver so the remainder is unbiased.
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t v = next();
            if (v >= threshold) return v % n;
        }
    }

    double unit() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    bool chance(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return unit() < p;
    }

    void fill(std::uint8_t* out, std::size_t n) {
        std::size_t i = 0;
        while (i < n) {
            std::uint64_t v = next();
            for (int k = 0; k < 8 && i < n; ++k, ++i)
                out[i] = static_cast<std::uint8_t>(v >> (8 * k));
        }
    }

    Bytes32 bytes32() {
        Bytes32 out{};
        fill(out.data(), out.size());
        return out;
    }

    // Derives an independent stream; forking with distinct labels gives
    // subsystems their own sequences regardless of call ordering elsewhere.
    Rng fork(std::uint64_t label) {
        Rng child(state_ ^ (label * 0x9e3779b97f4a7c15ull + 0x632be59bd9b4e019ull));
        child.next();
        return child;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

    // k distinct indices out of [0, n), order of selection preserved.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        std::vector<std::size_t> out;
        out.reserve(k);
        for (std::size_t i = 0; i < k && !pool.empty(); ++i) {
            std::size_t j = below(pool.size());
            out.push_back(pool[j]);
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
        }
        return out;
    }

private:
    std::uint64_t state_;
};

}  // namespace swarmnet
