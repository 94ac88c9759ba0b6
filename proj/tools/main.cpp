// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0
//
// swarmnet command line: scenario runner, admission work utilities, swarm
// mapping and node inspection.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "swarmnet/envelope.hpp"
#include "swarmnet/keys.hpp"
#include "swarmnet/pow.hpp"
#include "swarmnet/registry.hpp"
#include "swarmnet/sim/engine.hpp"

namespace {

using namespace swarmnet;

std::optional<PublicKey> parse_key(const std::string& text) {
    if (auto key = decode_address(text)) return key;
    auto raw = from_hex(text);
    if (raw && raw->size() == 32) {
        PublicKey key;
        std::copy(raw->begin(), raw->end(), key.bytes.begin());
        return key;
    }
    return std::nullopt;
}

std::optional<Envelope> build_envelope(const std::string& recipient,
                                       std::uint64_t ttl, std::uint64_t ts,
                                       const std::string& data_hex) {
    auto key = parse_key(recipient);
    if (!key) {
        std::cerr << "bad recipient key\n";
        return std::nullopt;
    }
    auto data = from_hex(data_hex);
    if (!data) {
        std::cerr << "bad data hex\n";
        return std::nullopt;
    }
    Envelope env;
    env.recipient = *key;
    env.ttl_seconds = ttl;
    env.timestamp_ms = ts;
    env.ciphertext = *data;
    return env;
}

int cmd_pow_mine(const std::string& recipient, std::uint64_t ttl,
                 std::uint64_t ts, const std::string& data_hex,
                 std::uint64_t difficulty, std::uint64_t max_attempts) {
    auto env = build_envelope(recipient, ttl, ts, data_hex);
    if (!env) return 1;
    auto res = pow::mine_envelope(*env, difficulty, max_attempts);
    std::cout << "threshold=" << res.threshold << "\n"
              << "attempts=" << res.attempts << "\n";
    if (!res.found) {
        std::cout << "found=0\n";
        return 2;
    }
    std::cout << "found=1\nnonce=" << res.nonce << "\nhead=" << res.head
              << "\n";
    return 0;
}

int cmd_pow_verify(const std::string& recipient, std::uint64_t ttl,
                   std::uint64_t ts, const std::string& data_hex,
                   std::uint64_t nonce, std::uint64_t difficulty,
                   std::uint64_t now_ms) {
    auto env = build_envelope(recipient, ttl, ts, data_hex);
    if (!env) return 1;
    env->nonce = nonce;
    auto res = pow::verify(*env, difficulty, now_ms);
    const char* status = "ok";
    switch (res.status) {
        case pow::VerifyStatus::ok: status = "ok"; break;
        case pow::VerifyStatus::empty_ciphertext:
            status = "empty_ciphertext";
            break;
        case pow::VerifyStatus::ttl_exceeded: status = "ttl_exceeded"; break;
        case pow::VerifyStatus::timestamp_skew:
            status = "timestamp_skew";
            break;
        case pow::VerifyStatus::insufficient_work:
            status = "insufficient_work";
            break;
    }
    std::cout << "status=" << status << "\nthreshold=" << res.threshold
              << "\nhead=" << res.head << "\n";
    return res.accepted() ? 0 : 2;
}

int cmd_swarm_map(const std::string& snapshot_path,
                  const std::string& keys_path) {
    std::ifstream snap(snapshot_path);
    if (!snap) {
        std::cerr << "cannot read " << snapshot_path << "\n";
        return 1;
    }
    std::stringstream buffer;
    buffer << snap.rdbuf();
    auto registry = SwarmRegistry::import_snapshot(buffer.str());
    if (!registry) {
        std::cerr << "bad snapshot\n";
        return 1;
    }
    std::ifstream keys(keys_path);
    if (!keys) {
        std::cerr << "cannot read " << keys_path << "\n";
        return 1;
    }
    std::string line;
    while (std::getline(keys, line)) {
        if (line.empty()) continue;
        auto key = parse_key(line);
        if (!key) {
            std::cerr << "bad key: " << line << "\n";
            return 1;
        }
        SwarmId swarm = registry->swarm_for_key(*key);
        std::cout << line << " ";
        if (swarm == kNoSwarm)
            std::cout << "none";
        else
            std::cout << swarm;
        std::cout << " point=" << registry->ring().reduce_pubkey(*key)
                  << "\n";
    }
    return 0;
}

int cmd_inspect(const std::string& scenario,
                std::optional<std::uint64_t> seed, NodeId node_id) {
    sim::ParseError err;
    auto parsed = sim::load_scenario(scenario, err);
    if (!parsed) {
        std::cerr << scenario << ":" << err.line << ": " << err.message
                  << "\n";
        return 1;
    }
    if (seed) parsed->config.seed = *seed;
    sim::Engine engine(parsed->config);
    engine.run();
    auto summary = engine.node_summary(node_id);
    if (!summary) {
        std::cerr << "unknown node " << node_id << "\n";
        return 1;
    }
    std::cout << "node=" << summary->id << "\nalive=" << summary->alive
              << "\ncheater=" << summary->cheater << "\nswarm=";
    if (summary->swarm == kNoSwarm)
        std::cout << "none";
    else
        std::cout << summary->swarm;
    std::cout << "\nrecords=" << summary->records
              << "\nbytes=" << summary->bytes << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"swarm message storage and routing toolkit"};
    app.require_subcommand(1);

    // simulate
    std::string scenario_path, metrics_out, log_out;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    auto* simulate = app.add_subcommand("simulate", "run a scenario file");
    simulate->add_option("--scenario", scenario_path, "scenario file")
        ->required();
    simulate->add_option("--seed", seed, "override the scenario seed");
    simulate->add_option("--metrics-out", metrics_out, "write metrics here");
    simulate->add_option("--log-out", log_out, "write the event log here");
    simulate->add_flag("--quiet", quiet, "suppress the metrics dump");

    // pow
    std::string recipient, data_hex;
    std::uint64_t ttl = 3600, ts = 0, difficulty = 1, nonce = 0, now_ms = 0;
    std::uint64_t max_attempts = pow::kDefaultMaxAttempts;
    auto* pow_cmd = app.add_subcommand("pow", "admission work utilities");
    pow_cmd->require_subcommand(1);
    auto add_envelope_opts = [&](CLI::App* cmd) {
        cmd->add_option("--recipient", recipient,
                        "recipient key (hex or 05-address)")
            ->required();
        cmd->add_option("--ttl", ttl, "requested lifetime, seconds");
        cmd->add_option("--timestamp", ts, "sender clock, ms")->required();
        cmd->add_option("--data", data_hex, "ciphertext hex")->required();
        cmd->add_option("--difficulty", difficulty, "network difficulty");
    };
    auto* mine = pow_cmd->add_subcommand("mine", "search for a nonce");
    add_envelope_opts(mine);
    mine->add_option("--max-attempts", max_attempts, "nonce budget");
    auto* verify = pow_cmd->add_subcommand("verify", "check an admission");
    add_envelope_opts(verify);
    verify->add_option("--nonce", nonce, "claimed nonce")->required();
    verify->add_option("--now", now_ms, "verifier clock, ms")->required();

    // swarm map
    std::string snapshot_path, keys_path;
    auto* swarm = app.add_subcommand("swarm", "swarm mapping utilities");
    swarm->require_subcommand(1);
    auto* map = swarm->add_subcommand("map", "map keys to swarms");
    map->add_option("--snapshot", snapshot_path, "registry snapshot file")
        ->required();
    map->add_option("--keys", keys_path, "file with one key per line")
        ->required();

    // inspect
    std::string inspect_scenario;
    std::optional<std::uint64_t> inspect_seed;
    NodeId node_id = 0;
    auto* inspect = app.add_subcommand("inspect",
                                       "run a scenario, report one node");
    inspect->add_option("--scenario", inspect_scenario, "scenario file")
        ->required();
    inspect->add_option("--seed", inspect_seed, "override the scenario seed");
    inspect->add_option("--node", node_id, "node id")->required();

    CLI11_PARSE(app, argc, argv);

    if (simulate->parsed())
        return sim::run_scenario_cli(scenario_path, seed, metrics_out,
                                     log_out, quiet);
    if (mine->parsed())
        return cmd_pow_mine(recipient, ttl, ts, data_hex, difficulty,
                            max_attempts);
    if (verify->parsed())
        return cmd_pow_verify(recipient, ttl, ts, data_hex, nonce, difficulty,
                              now_ms);
    if (map->parsed()) return cmd_swarm_map(snapshot_path, keys_path);
    if (inspect->parsed())
        return cmd_inspect(inspect_scenario, inspect_seed, node_id);
    return 1;
}
