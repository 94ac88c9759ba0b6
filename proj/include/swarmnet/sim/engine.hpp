// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "swarmnet/client.hpp"
#include "swarmnet/clock.hpp"
#include "swarmnet/crypto.hpp"
#include "swarmnet/onion.hpp"
#include "swarmnet/registry.hpp"
#include "swarmnet/session.hpp"
#include "swarmnet/sim/metrics.hpp"
#include "swarmnet/sim/scenario.hpp"
#include "swarmnet/sntest.hpp"
#include "swarmnet/store.hpp"

namespace swarmnet::sim {

// Network addresses: node ids start at 1, client addresses at kClientBase.
using Address = std::uint64_t;
inline constexpr Address kClientBase = 1'000'000;

inline constexpr std::uint64_t kOnionTimeoutMs = 5'000;
inline constexpr std::uint64_t kRefreshIntervalMs = 15'000;
inline constexpr std::uint64_t kAuditSlackMs = 2'000;

// One deterministic run: event loop, simulated network, service nodes,
// clients, block production, audits and adversaries, all driven by a single
// seed. Runs are replayable byte for byte.
class Engine {
public:
    explicit Engine(const SimConfig& config);
    ~Engine();

    void run();

    const Metrics& metrics() const { return metrics_; }
    const std::vector<std::string>& event_log() const { return log_; }
    std::string event_log_text() const;
    std::string event_log_digest() const;

    struct AssertResult {
        std::string text;
        bool pass = false;
        std::string detail;
    };
    std::vector<AssertResult> evaluate(const std::vector<Assertion>& asserts);

    struct NodeSummary {
        NodeId id = 0;
        bool alive = false;
        bool cheater = false;
        SwarmId swarm = kNoSwarm;
        std::size_t records = 0;
        std::size_t bytes = 0;
    };
    std::optional<NodeSummary> node_summary(NodeId id) const;

    const SwarmRegistry& registry() const { return registry_; }
    std::string ledger_csv() const { return ledger_.export_csv(); }

private:
    struct Node;
    struct Client;
    struct Observation;

    using Handler = std::function<void()>;

    // --- event loop ---
    void schedule(std::uint64_t delay_ms, Handler fn);
    void log_line(std::string line);

    // --- network ---
    std::uint64_t link_delay();
    bool link_drops(Address from, Address to, const char* kind);
    void net(Address from, Address to, const char* kind, Handler deliver);

    // --- topology / registry ---
    void apply_registry_event(const RegistryEvent& ev, ByteView blockhash);
    void execute_plan(const MigrationPlan& plan,
                      const std::map<NodeId, SwarmId>& before);
    std::vector<NodeId> live_members(SwarmId swarm) const;
    NodeList current_directory() const;

    // --- blocks, audits, churn ---
    void churn_leave();
    void churn_join();
    Bytes32 blockhash(std::uint64_t height) const;
    void on_block(std::uint64_t height);
    void run_audit(std::uint64_t height, SwarmId swarm,
                   const Bytes32& blockhash);
    void report_audit(std::uint64_t height, SwarmId swarm, NodeId tested,
                      NodeId verifier, sntest::TestOutcome outcome);
    void decommission(NodeId node, std::uint64_t height);

    // --- node behavior ---
    StoreResult node_store_request(Node& node, const Envelope& env);
    void propagate_record(Node& node, const Envelope& env);
    void anti_entropy_tick(NodeId id);
    Bytes node_handle_request(Node& node, ByteView body);

    // --- onion transport ---
    void onion_submit(Client& c, NodeId dest, Bytes body,
                      std::function<void(std::optional<Bytes>)> done);
    void onion_transit(Address prev, NodeId hop, Bytes layer,
                       std::uint64_t onion_id, std::size_t depth,
                       std::function<void(std::optional<Bytes>)> reply);
    void ensure_path(Client& c, Handler then);
    void rebuild_path(Client& c);

    // --- client behavior ---
    void client_start(Client& c);
    void client_refresh_directory(Client& c);
    void client_poll(Client& c);
    void client_send_chat(Client& c);
    void client_send_envelope(Client& c, Envelope env, std::uint64_t msg_uid,
                              int resolve_retries, bool remined);
    void client_handle_record(Client& c, const StoredRecord& rec);
    void client_handle_wire(Client& c, ByteView wire, bool via_sync);
    void client_handle_frame(Client& c, ByteView frame);
    void client_send_ack(Client& c, std::uint64_t msg_uid);
    std::uint64_t client_new_chat(Client& c, const std::string& text);
    void client_transmit_wire(Client& c, std::uint64_t msg_uid,
                              const Bytes& wire);
    void client_sync_send(Client& c, std::uint64_t msg_uid, Bytes wire);
    void client_fallback(Client& c, std::uint64_t msg_uid);
    void client_store_cipher(Client& c, Bytes cipher, std::uint64_t msg_uid);
    void client_register_listener(Client& c);
    void client_set_online(Client& c, bool online);
    void resolve_swarm(Client& c, const PublicKey& key, int retries,
                       std::function<void(std::optional<SwarmId>,
                                          std::vector<NodeId>)> done);

    Client* client_for_pub(const PublicKey& pub);
    Client& peer_of(Client& c);

    // --- evaluation helpers ---
    bool check_delivered_all(std::string& detail) const;
    bool check_replication_full(std::string& detail) const;
    bool check_no_lost_records(std::string& detail) const;
    bool check_swarm_sizes(std::string& detail) const;
    bool check_onion_privacy(std::string& detail) const;
    void final_metrics();

    SimConfig config_;
    SodiumProvider crypto_;
    SimClock clock_;
    Metrics metrics_;
    std::vector<std::string> log_;

    struct QueuedEvent {
        std::uint64_t tick;
        std::uint64_t seq;
        Handler fn;
    };
    struct EventOrder {
        bool operator()(const QueuedEvent& a, const QueuedEvent& b) const {
            return a.tick != b.tick ? a.tick > b.tick : a.seq > b.seq;
        }
    };
    std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, EventOrder>
        queue_;
    std::uint64_t next_seq_ = 0;

    Rng rng_root_;
    Rng rng_net_;
    Rng rng_keys_;
    Rng rng_churn_;
    Rng rng_client_;
    Rng rng_audit_;

    SwarmRegistry registry_;
    std::map<NodeId, std::unique_ptr<Node>> nodes_;
    std::map<Address, std::unique_ptr<Client>> clients_;
    sntest::ReputationLedger ledger_;

    std::uint64_t difficulty_;
    std::size_t registry_log_seen_ = 0;

    // Ground truth for delivery and durability accounting.
    std::set<std::uint64_t> chat_sent_;
    std::set<std::uint64_t> chat_delivered_;
    struct BornRecord {
        Envelope envelope;
        std::uint64_t accepted_ms;
    };
    std::map<Bytes32, BornRecord> born_;

    // Adversarial observer: everything relays could write down.
    std::vector<Observation> observations_;
    struct OnionTruth {
        Address client = 0;
        NodeId guard = 0, middle = 0, exit = 0, destination = 0;
    };
    std::map<std::uint64_t, OnionTruth> onion_truth_;
    std::uint64_t next_onion_id_ = 0;
    std::vector<std::string> chat_plaintexts_;
};

int run_scenario_cli(const std::string& scenario_path,
                     std::optional<std::uint64_t> seed_override,
                     const std::string& metrics_out,
                     const std::string& log_out, bool quiet);

}  // namespace swarmnet::sim
