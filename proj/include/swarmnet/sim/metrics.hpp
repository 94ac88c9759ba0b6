// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace swarmnet::sim {

// Counters, gauges and latency samples, rendered as sorted `key=value`
// lines. Samples additionally emit _count, _mean, _median and _max.
class Metrics {
public:
    void count(const std::string& name, std::int64_t delta = 1) {
        counters_[name] += delta;
    }
    void gauge(const std::string& name, double value) {
        gauges_[name] = value;
    }
    void observe(const std::string& name, double value) {
        samples_[name].push_back(value);
    }

    std::int64_t counter(const std::string& name) const;
    double value(const std::string& name) const;  // any key, derived included
    bool has(const std::string& name) const;

    std::string render() const;

private:
    std::map<std::string, double> derived() const;

    std::map<std::string, std::int64_t> counters_;
    std::map<std::string, double> gauges_;
    std::map<std::string, std::vector<double>> samples_;
};

}  // namespace swarmnet::sim
