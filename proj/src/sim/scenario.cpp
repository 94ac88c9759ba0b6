// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#include "swarmnet/sim/scenario.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace swarmnet::sim {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                          s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

bool parse_u64(std::string_view s, std::uint64_t& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

bool parse_size(std::string_view s, std::size_t& out) {
    std::uint64_t v = 0;
    if (!parse_u64(s, v)) return false;
    out = static_cast<std::size_t>(v);
    return true;
}

bool parse_double(std::string_view s, double& out) {
    std::string buf(s);
    std::istringstream in(buf);
    in >> out;
    return !in.fail() && in.eof();
}

bool parse_bool(std::string_view s, bool& out) {
    if (s == "true" || s == "1") {
        out = true;
        return true;
    }
    if (s == "false" || s == "0") {
        out = false;
        return true;
    }
    return false;
}

bool valid_op(std::string_view op) {
    return op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" ||
           op == ">=";
}

}  // namespace

std::optional<Scenario> parse_scenario(std::string_view text,
                                       ParseError& error) {
    Scenario sc;
    std::string section;
    bool saw_version = false;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view raw = text.substr(
            pos, eol == std::string_view::npos ? eol : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;

        if (!saw_version) {
            if (line != "simver 1") {
                error = {line_no, "expected 'simver 1' header"};
                return std::nullopt;
            }
            saw_version = true;
            continue;
        }

        if (line.front() == '[') {
            if (line.back() != ']') {
                error = {line_no, "unterminated section header"};
                return std::nullopt;
            }
            section = std::string(line.substr(1, line.size() - 2));
            if (section != "sim" && section != "network" &&
                section != "clients" && section != "churn" &&
                section != "adversary" && section != "audit" &&
                section != "assert") {
                error = {line_no, "unknown section [" + section + "]"};
                return std::nullopt;
            }
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            error = {line_no, "expected key = value"};
            return std::nullopt;
        }
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (section.empty()) {
            error = {line_no, "key outside any section"};
            return std::nullopt;
        }

        SimConfig& c = sc.config;
        bool ok = true;
        if (section == "sim") {
            if (key == "seed") ok = parse_u64(value, c.seed);
            else if (key == "duration_ms") ok = parse_u64(value, c.duration_ms);
            else if (key == "block_interval_ms")
                ok = parse_u64(value, c.block_interval_ms);
            else ok = false;
        } else if (section == "network") {
            if (key == "nodes") ok = parse_size(value, c.node_count);
            else if (key == "latency_ms") ok = parse_u64(value, c.latency_ms);
            else if (key == "jitter_ms") ok = parse_u64(value, c.jitter_ms);
            else if (key == "drop") ok = parse_double(value, c.drop_rate);
            else if (key == "difficulty") ok = parse_u64(value, c.difficulty);
            else if (key == "strict_propagation")
                ok = parse_bool(value, c.strict_propagation);
            else if (key == "anti_entropy_ms")
                ok = parse_u64(value, c.anti_entropy_ms);
            else ok = false;
        } else if (section == "clients") {
            if (key == "pairs") ok = parse_size(value, c.client_pairs);
            else if (key == "poll_interval_ms")
                ok = parse_u64(value, c.poll_interval_ms);
            else if (key == "send_interval_ms")
                ok = parse_u64(value, c.send_interval_ms);
            else if (key == "sends_per_pair")
                ok = parse_size(value, c.sends_per_pair);
            else if (key == "first_send_ms")
                ok = parse_u64(value, c.first_send_ms);
            else if (key == "ttl_seconds")
                ok = parse_u64(value, c.message_ttl_seconds);
            else if (key == "replies") ok = parse_bool(value, c.replies);
            else if (key == "sync") ok = parse_bool(value, c.sync_enabled);
            else if (key == "preestablished")
                ok = parse_bool(value, c.preestablished);
            else if (key == "receiver_offline_from_ms")
                ok = parse_u64(value, c.receiver_offline_from_ms);
            else if (key == "receiver_offline_until_ms")
                ok = parse_u64(value, c.receiver_offline_until_ms);
            else ok = false;
        } else if (section == "churn") {
            if (key == "leaves") ok = parse_size(value, c.churn_leaves);
            else if (key == "joins") ok = parse_size(value, c.churn_joins);
            else if (key == "start_ms") ok = parse_u64(value, c.churn_start_ms);
            else if (key == "end_ms") ok = parse_u64(value, c.churn_end_ms);
            else ok = false;
        } else if (section == "adversary") {
            if (key == "cheaters") ok = parse_size(value, c.cheater_count);
            else if (key == "observer") ok = parse_bool(value, c.observer);
            else ok = false;
        } else if (section == "audit") {
            if (key == "min_failures")
                ok = parse_size(value, c.policy.min_failures);
            else if (key == "window_blocks")
                ok = parse_u64(value, c.policy.window_blocks);
            else if (key == "min_reporters")
                ok = parse_size(value, c.policy.min_reporters);
            else ok = false;
        } else if (section == "assert") {
            Assertion a{};
            if (key == "metric") {
                std::istringstream in(value);
                std::string name, op;
                double num = 0;
                in >> name >> op >> num;
                if (in.fail() || !valid_op(op)) {
                    error = {line_no, "bad metric assertion '" + value + "'"};
                    return std::nullopt;
                }
                a.kind = Assertion::Kind::metric;
                a.name = name;
                a.op = op;
                a.value = num;
            } else if (key == "log_contains" || key == "log_absent") {
                a.kind = key == "log_contains" ? Assertion::Kind::log_contains
                                               : Assertion::Kind::log_absent;
                a.name = value;
            } else if (key == "decommissioned" ||
                       key == "not_decommissioned") {
                std::uint64_t node = 0;
                if (!parse_u64(value, node)) {
                    error = {line_no, "bad node id '" + value + "'"};
                    return std::nullopt;
                }
                a.kind = key == "decommissioned"
                             ? Assertion::Kind::decommissioned
                             : Assertion::Kind::not_decommissioned;
                a.node = node;
            } else {
                bool flag = false;
                if (!parse_bool(value, flag) || !flag) {
                    error = {line_no, "assertion '" + key + "' takes 'true'"};
                    return std::nullopt;
                }
                if (key == "delivered_all")
                    a.kind = Assertion::Kind::delivered_all;
                else if (key == "replication_full")
                    a.kind = Assertion::Kind::replication_full;
                else if (key == "no_lost_records")
                    a.kind = Assertion::Kind::no_lost_records;
                else if (key == "swarm_sizes_legal")
                    a.kind = Assertion::Kind::swarm_sizes_legal;
                else if (key == "onion_privacy")
                    a.kind = Assertion::Kind::onion_privacy;
                else {
                    error = {line_no, "unknown assertion '" + key + "'"};
                    return std::nullopt;
                }
            }
            sc.assertions.push_back(a);
            continue;
        }

        if (!ok) {
            error = {line_no, "bad value for " + section + "." + key};
            return std::nullopt;
        }
    }

    if (!saw_version) {
        error = {1, "empty scenario, missing 'simver 1' header"};
        return std::nullopt;
    }
    if (sc.config.node_count == 0) {
        error = {0, "network.nodes must be positive"};
        return std::nullopt;
    }
    return sc;
}

std::optional<Scenario> load_scenario(const std::string& path,
                                      ParseError& error) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        error = {0, "cannot open scenario file: " + path};
        return std::nullopt;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), error);
}

}  // namespace swarmnet::sim
