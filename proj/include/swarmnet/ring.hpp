// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "swarmnet/keys.hpp"

namespace swarmnet {

// The identifier circle. Swarm ids and mapped keys live on a ring of
// kRingModulus points (0 .. kRingModulus-1); the all-ones value is reserved
// as the "no swarm" sentinel and is never a valid position.
inline constexpr std::uint64_t kRingModulus = 0xffffffffffffffffull;
inline constexpr std::uint64_t kNoSwarm = 0xffffffffffffffffull;

// Swarm size bounds. A swarm below min steals or dissolves; nodes beyond max
// wait unassigned; new swarms start at target.
struct SwarmLimits {
    std::size_t n_min = 5;
    std::size_t n_target = 7;
    std::size_t n_max = 10;
};

// Ring arithmetic over an arbitrary modulus. Production code uses the
// default; tiny moduli make exhaustive checks feasible in tests.
class Ring {
public:
    explicit Ring(std::uint64_t modulus = kRingModulus);

    std::uint64_t modulus() const { return modulus_; }

    // Steps needed to walk from a forward (clockwise) to b. a == b gives a
    // full revolution, never zero.
    std::uint64_t forward(std::uint64_t a, std::uint64_t b) const;

    // min(forward, backward); distance(a, a) is the modulus itself, so an
    // id can never be "closest" to itself when comparing against others.
    std::uint64_t distance(std::uint64_t a, std::uint64_t b) const;

    // Midpoint of the largest forward gap between existing ids; ties go to
    // the gap starting at the smallest id. Empty input gives 0. Throws
    // std::invalid_argument if the ring is full.
    std::uint64_t next_id(const std::vector<std::uint64_t>& existing) const;

    // The swarm whose id is nearest the point. An exact hit wins outright;
    // equidistant neighbours resolve to the lower id. Returns kNoSwarm for
    // an empty swarm list.
    std::uint64_t assign_point(std::uint64_t point,
                               const std::vector<std::uint64_t>& swarms) const;

    // Folds the four big-endian words of the key with XOR, reduced into the
    // ring. Uniform inputs stay uniform.
    std::uint64_t reduce_pubkey(const PublicKey& key) const;

private:
    void check(std::uint64_t v) const;

    std::uint64_t modulus_;
};

}  // namespace swarmnet
