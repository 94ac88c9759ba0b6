// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#include "swarmnet/sim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace swarmnet::sim {

std::int64_t Metrics::counter(const std::string& name) const {
    auto it = counters_.find(name);
    return it == counters_.end() ? 0 : it->second;
}

std::map<std::string, double> Metrics::derived() const {
    std::map<std::string, double> out;
    for (const auto& [name, value] : counters_)
        out[name] = static_cast<double>(value);
    for (const auto& [name, value] : gauges_) out[name] = value;
    for (const auto& [name, samples] : samples_) {
        if (samples.empty()) continue;
        std::vector<double> sorted = samples;
        std::sort(sorted.begin(), sorted.end());
        double sum = 0;
        for (double v : sorted) sum += v;
        out[name + "_count"] = static_cast<double>(sorted.size());
        out[name + "_mean"] = sum / static_cast<double>(sorted.size());
        out[name + "_median"] = sorted[sorted.size() / 2];
        out[name + "_max"] = sorted.back();
    }
    return out;
}

double Metrics::value(const std::string& name) const {
    auto all = derived();
    auto it = all.find(name);
    return it == all.end() ? 0.0 : it->second;
}

bool Metrics::has(const std::string& name) const {
    return derived().contains(name);
}

std::string Metrics::render() const {
    std::ostringstream out;
    for (const auto& [name, value] : derived()) {
        if (value == std::floor(value) && std::abs(value) < 1e15)
            out << name << "=" << static_cast<std::int64_t>(value) << "\n";
        else
            out << name << "=" << value << "\n";
    }
    return out.str();
}

}  // namespace swarmnet::sim
