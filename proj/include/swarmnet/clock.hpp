// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>

namespace swarmnet {

// Simulated wall clock, milliseconds since epoch zero. Only the event loop
// moves it, and only forward.
class SimClock {
public:
    std::uint64_t now_ms() const { return now_ms_; }

    void advance_to(std::uint64_t t_ms) {
        if (t_ms < now_ms_)
            throw std::logic_error("clock moved backwards");
        now_ms_ = t_ms;
    }

private:
    std::uint64_t now_ms_ = 0;
};

}  // namespace swarmnet
