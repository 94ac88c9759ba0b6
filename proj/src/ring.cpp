// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#include "swarmnet/ring.hpp"

#include <algorithm>
#include <stdexcept>

#include "swarmnet/bytes.hpp"

namespace swarmnet {

Ring::Ring(std::uint64_t modulus) : modulus_(modulus) {
    if (modulus < 2) throw std::invalid_argument("ring too small");
}

void Ring::check(std::uint64_t v) const {
    if (v >= modulus_) throw std::invalid_argument("point outside ring");
}

std::uint64_t Ring::forward(std::uint64_t a, std::uint64_t b) const {
    check(a);
    check(b);
    if (a == b) return modulus_;
    return b > a ? b - a : modulus_ - (a - b);
}

std::uint64_t Ring::distance(std::uint64_t a, std::uint64_t b) const {
    check(a);
    check(b);
    if (a == b) return modulus_;
    std::uint64_t fwd = b > a ? b - a : modulus_ - (a - b);
    std::uint64_t bwd = modulus_ - fwd;
    return std::min(fwd, bwd);
}

std::uint64_t Ring::next_id(const std::vector<std::uint64_t>& existing) const {
    if (existing.empty()) return 0;
    if (existing.size() >= modulus_)
        throw std::invalid_argument("ring full");

    std::vector<std::uint64_t> ids = existing;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (std::uint64_t id : ids) check(id);

    // Largest forward gap from each id to its successor; ties favour the
    // gap that starts at the smallest id, which sorted order gives us.
    std::uint64_t best_start = ids[0];
    std::uint64_t best_gap = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        std::uint64_t from = ids[i];
        std::uint64_t to = ids[(i + 1) % ids.size()];
        std::uint64_t gap = forward(from, to);  // == modulus_ for one id
        if (gap > best_gap) {
            best_gap = gap;
            best_start = from;
        }
    }
    std::uint64_t half = best_gap / 2;
    std::uint64_t candidate = best_start;
    // Add half modulo the ring size without overflowing 64 bits.
    std::uint64_t room = modulus_ - candidate;
    candidate = half >= room ? half - room : candidate + half;
    return candidate;
}

std::uint64_t Ring::assign_point(
    std::uint64_t point, const std::vector<std::uint64_t>& swarms) const {
    check(point);
    if (swarms.empty()) return kNoSwarm;
    std::uint64_t best = kNoSwarm;
    std::uint64_t best_dist = 0;
    for (std::uint64_t id : swarms) {
        if (id == point) return id;  // exact hit wins outright
        std::uint64_t d = distance(point, id);
        if (best == kNoSwarm || d < best_dist ||
            (d == best_dist && id < best)) {
            best = id;
            best_dist = d;
        }
    }
    return best;
}

std::uint64_t Ring::reduce_pubkey(const PublicKey& key) const {
    std::uint64_t acc = 0;
    for (int i = 0; i < 4; ++i)
        acc ^= read_u64_be(key.bytes.data() + i * 8);
    return acc % modulus_;
}

}  // namespace swarmnet
