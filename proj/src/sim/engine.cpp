// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#include "swarmnet/sim/engine.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "swarmnet/pow.hpp"

namespace swarmnet::sim {

namespace {

// Request/response kinds carried inside onion payloads and direct messages.
constexpr std::uint8_t kReqPing = 1;
constexpr std::uint8_t kReqStore = 2;
constexpr std::uint8_t kReqRetrieve = 3;
constexpr std::uint8_t kReqSwarmQuery = 4;
constexpr std::uint8_t kReqSyncDeliver = 5;

// Envelope ciphertext framing (what clients put inside stored messages).
constexpr std::uint8_t kFrameFriendRequest = 1;
constexpr std::uint8_t kFrameSessionInit = 2;
constexpr std::uint8_t kFrameSessionMsg = 3;

// Session plaintext framing.
constexpr std::uint8_t kChat = 1;
constexpr std::uint8_t kAck = 2;

constexpr std::uint64_t kGraceRecheckMs = 2'000;
constexpr std::size_t kMaxPathBuilds = 10;
constexpr std::size_t kRetrievePageSize = 32;
constexpr std::size_t kMaxRetrievePages = 8;

std::string hex8(std::uint64_t v) {
    std::ostringstream out;
    out << std::hex << v;
    return out.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Inner state

struct Engine::Observation {
    std::uint64_t onion_id = 0;
    NodeId hop = 0;
    Address prev = 0;
    Address next = 0;
    bool is_final = false;
    Bytes blob;
};

struct Engine::Node {
    NodeId id = 0;
    KeyPair keys;
    Rng rng{0};
    bool alive = true;
    bool cheater = false;
    NodeStore store;
    std::uint64_t membership_changed_ms = 0;
    // listening clients for synchronous delivery, by recipient key
    std::map<PublicKey, Address> listeners;

    explicit Node(NodeStore::Config cfg) : store(cfg) {}
};

struct Engine::Client {
    Address address = 0;
    std::string name;
    Rng rng{0};
    bool online = true;
    bool sender = false;   // the scripted writer of the pair
    KeyPair identity;

    PrekeyVault vault;
    PendingContacts pending;
    std::uint32_t next_otk = 1;
    bool friend_request_sent = false;

    PublicKey peer_pub;
    std::optional<SessionState> session;
    std::vector<Bytes> early_wires;  // arrived before the session existed

    ConversationState transport;
    InboxCursor inbox;
    SwarmCache cache;
    std::map<SwarmId, std::vector<NodeId>> member_cache;
    NodeList directory;
    std::optional<NodeId> own_listener;

    std::uint64_t difficulty_view = 1;
    std::uint64_t next_msg = 0;
    std::size_t chats_sent = 0;
    std::set<std::uint64_t> delivered_uids;
    std::map<std::uint64_t, Bytes> outbox_wire;   // uid -> session wire
    std::map<std::uint64_t, std::string> outbox_text;

    // onion path
    onion::Path path{};
    bool path_ready = false;
    bool path_building = false;
    std::size_t path_builds = 0;
    std::vector<Handler> path_waiters;
};

// ---------------------------------------------------------------------------
// Construction and the event loop

Engine::Engine(const SimConfig& config)
    : config_(config),
      rng_root_(config.seed),
      rng_net_(rng_root_.fork(1)),
      rng_keys_(rng_root_.fork(2)),
      rng_churn_(rng_root_.fork(3)),
      rng_client_(rng_root_.fork(4)),
      rng_audit_(rng_root_.fork(5)),
      registry_(Ring(), config.limits),
      ledger_(config.policy),
      difficulty_(config.difficulty) {}

Engine::~Engine() = default;

void Engine::schedule(std::uint64_t delay_ms, Handler fn) {
    queue_.push({clock_.now_ms() + delay_ms, next_seq_++, std::move(fn)});
}

void Engine::log_line(std::string line) {
    log_.push_back("t=" + std::to_string(clock_.now_ms()) + " " +
                   std::move(line));
}

std::string Engine::event_log_text() const {
    std::string out;
    for (const std::string& l : log_) {
        out += l;
        out += '\n';
    }
    return out;
}

std::string Engine::event_log_digest() const {
    Bytes64 digest = sha512(as_bytes(event_log_text()));
    return to_hex(ByteView(digest).first(16));
}

// ---------------------------------------------------------------------------
// Network

std::uint64_t Engine::link_delay() {
    std::uint64_t jitter =
        config_.jitter_ms ? rng_net_.below(config_.jitter_ms + 1) : 0;
    return std::max<std::uint64_t>(1, config_.latency_ms + jitter);
}

bool Engine::link_drops(Address from, Address to, const char* kind) {
    if (config_.drop_rate > 0.0 && rng_net_.chance(config_.drop_rate)) {
        metrics_.count("dropped_messages_total");
        log_line("drop kind=" + std::string(kind) + " from=" +
                 std::to_string(from) + " to=" + std::to_string(to));
        return true;
    }
    return false;
}

void Engine::net(Address from, Address to, const char* kind, Handler deliver) {
    if (link_drops(from, to, kind)) return;
    schedule(link_delay(), std::move(deliver));
}

// ---------------------------------------------------------------------------
// Registry plumbing

std::vector<NodeId> Engine::live_members(SwarmId swarm) const {
    std::vector<NodeId> out;
    auto it = registry_.swarms().find(swarm);
    if (it == registry_.swarms().end()) return out;
    for (NodeId n : it->second) {
        auto node = nodes_.find(n);
        if (node != nodes_.end() && node->second->alive) out.push_back(n);
    }
    return out;
}

NodeList Engine::current_directory() const {
    NodeList list;
    list.source = NodeList::Source::network;
    for (const auto& [id, node] : nodes_)
        if (node->alive) list.entries.push_back({id, node->keys.pub});
    return list;
}

void Engine::apply_registry_event(const RegistryEvent& ev,
                                  ByteView blockhash) {
    std::map<NodeId, SwarmId> before;
    for (const auto& [id, node] : nodes_) {
        auto s = registry_.swarm_of(id);
        before[id] = s ? *s : kNoSwarm;
    }
    MigrationPlan plan = registry_.apply(ev, blockhash);
    while (registry_log_seen_ < registry_.log().size())
        log_line("registry " + registry_.log()[registry_log_seen_++]);
    metrics_.count("rebalance_events_total");
    execute_plan(plan, before);
}

void Engine::execute_plan(const MigrationPlan& plan,
                          const std::map<NodeId, SwarmId>& before) {
    std::uint64_t now = clock_.now_ms();

    // Route payloads are read before any store is cleared: the sources may
    // themselves be nodes that just moved.
    struct Shipment {
        NodeId source;
        SwarmId to;
        std::vector<StoredRecord> records;
    };
    std::vector<Shipment> shipments;
    for (const RouteRecords& route : plan.routes) {
        auto src = nodes_.find(route.source);
        if (src == nodes_.end() || !src->second->alive) continue;
        Shipment s{route.source, route.to,
                   src->second->store.records_for_swarm(route.to, registry_,
                                                        now)};
        if (!s.records.empty()) shipments.push_back(std::move(s));
        // A swarm that merely shrank its territory drops what it handed off.
        if (registry_.swarms().contains(route.from)) {
            for (NodeId member : live_members(route.from))
                nodes_.at(member)->store.drop_records_for_swarm(route.to,
                                                                registry_);
        }
    }

    // Nodes that changed swarm erase their old data set.
    for (const auto& [id, node] : nodes_) {
        if (!node->alive) continue;
        auto old_it = before.find(id);
        SwarmId old_swarm = old_it == before.end() ? kNoSwarm : old_it->second;
        auto now_swarm = registry_.swarm_of(id);
        SwarmId new_swarm = now_swarm ? *now_swarm : kNoSwarm;
        if (old_swarm != new_swarm) {
            node->store.clear();
            node->membership_changed_ms = now;
        }
    }

    for (const Shipment& s : shipments) {
        for (NodeId member : live_members(s.to)) {
            auto records = s.records;
            NodeId source = s.source;
            net(source, member, "migrate", [this, member, records] {
                auto it = nodes_.find(member);
                if (it == nodes_.end() || !it->second->alive) return;
                for (const StoredRecord& rec : records) {
                    if (it->second->cheater) continue;
                    if (it->second->store
                            .accept_propagated(rec.envelope, difficulty_,
                                               clock_.now_ms())
                            .accepted())
                        metrics_.count("migrated_records_total");
                }
            });
        }
    }

    for (const PushAll& push : plan.pushes) {
        for (NodeId member : live_members(push.swarm)) {
            if (member == push.new_member) continue;
            NodeId target = push.new_member;
            auto src = nodes_.find(member);
            if (src == nodes_.end() || !src->second->alive) continue;
            auto records = src->second->store.all_records(now);
            if (records.empty()) continue;
            net(member, target, "push_all", [this, target, records] {
                auto it = nodes_.find(target);
                if (it == nodes_.end() || !it->second->alive ||
                    it->second->cheater)
                    return;
                for (const StoredRecord& rec : records)
                    it->second->store.accept_propagated(rec.envelope,
                                                        difficulty_,
                                                        clock_.now_ms());
            });
        }
    }
}

// ---------------------------------------------------------------------------
// Blocks and audits

Bytes32 Engine::blockhash(std::uint64_t height) const {
    Bytes material = be64(config_.seed);
    put_u64_be(material, height);
    Bytes64 digest = sha512(material);
    Bytes32 out{};
    std::copy(digest.begin(), digest.begin() + 32, out.begin());
    return out;
}

void Engine::on_block(std::uint64_t height) {
    Bytes32 bh = blockhash(height);
    log_line("block height=" + std::to_string(height) + " hash=" +
             to_hex(ByteView(bh).first(8)));

    for (const auto& [id, node] : nodes_)
        if (node->alive) node->store.expire(clock_.now_ms());

    for (SwarmId swarm : registry_.swarm_ids()) run_audit(height, swarm, bh);

    for (NodeId node : ledger_.adjudicate(height)) decommission(node, height);

    if (clock_.now_ms() + config_.block_interval_ms <= config_.duration_ms)
        schedule(config_.block_interval_ms,
                 [this, height] { on_block(height + 1); });
}

void Engine::run_audit(std::uint64_t height, SwarmId swarm,
                       const Bytes32& bh) {
    auto it = registry_.swarms().find(swarm);
    if (it == registry_.swarms().end()) return;
    auto pair = sntest::derive_pair(bh, swarm, it->second);
    if (!pair) return;

    auto verifier = nodes_.find(pair->verifier);
    auto tested = nodes_.find(pair->tested);
    if (verifier == nodes_.end() || !verifier->second->alive) return;
    if (tested == nodes_.end()) return;

    auto challenge = sntest::issue_challenge(
        verifier->second->store, registry_, swarm, height, *pair,
        clock_.now_ms(), verifier->second->rng);
    if (!challenge) {
        // Nothing to ask about: vacuous pass.
        report_audit(height, swarm, pair->tested, pair->verifier,
                     sntest::TestOutcome::pass);
        return;
    }

    metrics_.count("challenges_total");
    auto answered = std::make_shared<bool>(false);
    sntest::Challenge ch = *challenge;
    NodeId tested_id = pair->tested;
    NodeId verifier_id = pair->verifier;

    auto judge = [this, ch, answered, tested_id, verifier_id](
                     std::optional<Envelope> proof) {
        if (*answered) return;
        *answered = true;
        bool pass = proof && record_hash(*proof) == ch.record_hash;
        if (!pass) {
            // Mid-migration nodes are not penalized.
            auto t = nodes_.find(tested_id);
            if (t != nodes_.end() &&
                clock_.now_ms() - t->second->membership_changed_ms <
                    sntest::kGraceMs + kAuditSlackMs) {
                log_line("audit_skip reason=recent_migration tested=" +
                         std::to_string(tested_id));
                return;
            }
        }
        report_audit(ch.height, ch.swarm, tested_id, verifier_id,
                     pass ? sntest::TestOutcome::pass
                          : sntest::TestOutcome::fail);
    };

    // Verifier gives up after the grace window plus slack.
    schedule(sntest::kGraceMs + 2 * kAuditSlackMs,
             [judge] { judge(std::nullopt); });

    net(verifier_id, tested_id, "challenge", [this, ch, judge, tested_id,
                                              verifier_id] {
        auto t = nodes_.find(tested_id);
        if (t == nodes_.end() || !t->second->alive) return;

        auto members_it = registry_.swarms().find(ch.swarm);
        std::vector<NodeId> members;
        if (members_it != registry_.swarms().end())
            members = members_it->second;
        std::uint64_t current_height =
            config_.block_interval_ms
                ? clock_.now_ms() / config_.block_interval_ms
                : ch.height;
        if (!sntest::challenge_admissible(ch, blockhash(ch.height), members,
                                          current_height)) {
            log_line("challenge_refused tested=" + std::to_string(tested_id) +
                     " h=" + std::to_string(ch.height));
            return;  // verifier's timeout decides, tempered by grace
        }

        // Look for the record now, then keep retrying through the grace
        // window in case it is still in flight.
        auto attempt = std::make_shared<std::function<void(std::uint64_t)>>();
        *attempt = [this, ch, judge, tested_id,
                    attempt](std::uint64_t waited_ms) {
            auto node = nodes_.find(tested_id);
            if (node == nodes_.end() || !node->second->alive) return;
            auto rec = node->second->store.find(ch.record_hash);
            if (rec) {
                Envelope env = rec->envelope;
                net(tested_id, ch.verifier, "challenge_answer",
                    [judge, env] { judge(env); });
                return;
            }
            if (waited_ms >= sntest::kGraceMs) {
                net(tested_id, ch.verifier, "challenge_answer",
                    [judge] { judge(std::nullopt); });
                return;
            }
            schedule(kGraceRecheckMs, [attempt, waited_ms] {
                (*attempt)(waited_ms + kGraceRecheckMs);
            });
        };
        (*attempt)(0);
    });
}

void Engine::report_audit(std::uint64_t height, SwarmId swarm, NodeId tested,
                          NodeId verifier, sntest::TestOutcome outcome) {
    ledger_.record(height, swarm, tested, verifier, outcome);
    metrics_.count("audits_total");
    if (outcome == sntest::TestOutcome::fail)
        metrics_.count("audit_fails_total");
    log_line("audit h=" + std::to_string(height) + " swarm=" +
             std::to_string(swarm) + " tested=" + std::to_string(tested) +
             " verifier=" + std::to_string(verifier) + " result=" +
             (outcome == sntest::TestOutcome::pass ? "pass" : "fail"));
}

void Engine::decommission(NodeId node, std::uint64_t height) {
    auto it = nodes_.find(node);
    if (it == nodes_.end() || !it->second->alive) return;
    it->second->alive = false;
    metrics_.count("decommissioned_total");
    log_line("decommission node=" + std::to_string(node) + " height=" +
             std::to_string(height));
    apply_registry_event({RegistryEvent::Kind::node_leave, node},
                         blockhash(height));
}

// ---------------------------------------------------------------------------
// Node behavior

StoreResult Engine::node_store_request(Node& node, const Envelope& env) {
    auto own = registry_.swarm_of(node.id);
    SwarmId own_swarm = own ? *own : kNoSwarm;
    if (node.cheater) {
        // Answers exactly like an honest node but keeps nothing.
        NodeStore scratch(NodeStore::Config{});
        return scratch.store(env, difficulty_, clock_.now_ms(), own_swarm,
                             registry_);
    }
    StoreResult res = node.store.store(env, difficulty_, clock_.now_ms(),
                                       own_swarm, registry_);
    if (res.accepted()) {
        born_.try_emplace(record_hash(env),
                          BornRecord{env, clock_.now_ms()});
        metrics_.count("records_accepted_total");
        propagate_record(node, env);
    }
    return res;
}

void Engine::propagate_record(Node& node, const Envelope& env) {
    auto own = registry_.swarm_of(node.id);
    if (!own) return;
    for (NodeId member : live_members(*own)) {
        if (member == node.id) continue;
        net(node.id, member, "replicate", [this, member, env] {
            auto it = nodes_.find(member);
            if (it == nodes_.end() || !it->second->alive ||
                it->second->cheater)
                return;
            if (it->second->store
                    .accept_propagated(env, difficulty_, clock_.now_ms())
                    .accepted())
                metrics_.count("replicated_total");
        });
    }
}

void Engine::anti_entropy_tick(NodeId id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) return;
    Node& node = *it->second;
    if (node.alive &&
        clock_.now_ms() + config_.anti_entropy_ms <= config_.duration_ms)
        schedule(config_.anti_entropy_ms, [this, id] { anti_entropy_tick(id); });
    if (!node.alive) return;
    auto own = registry_.swarm_of(id);
    if (!own) return;
    SwarmId swarm = *own;
    auto members = live_members(swarm);
    std::erase(members, id);
    if (members.empty()) return;
    NodeId peer = members[node.rng.below(members.size())];
    auto my_hashes = node.store.hashes(clock_.now_ms());

    net(id, peer, "anti_entropy", [this, id, peer, swarm, my_hashes] {
        auto pit = nodes_.find(peer);
        if (pit == nodes_.end() || !pit->second->alive) return;
        auto ps = registry_.swarm_of(peer);
        if (!ps || *ps != swarm || registry_.swarm_of(id) != ps) return;
        Node& pn = *pit->second;

        std::set<Bytes32> mine(my_hashes.begin(), my_hashes.end());
        std::vector<StoredRecord> give;  // peer has, initiator lacks
        for (const StoredRecord& rec : pn.store.all_records(clock_.now_ms()))
            if (!mine.contains(rec.hash)) give.push_back(rec);
        std::vector<Bytes32> want;  // initiator has, peer lacks
        for (const Bytes32& h : my_hashes)
            if (!pn.store.contains(h)) want.push_back(h);
        if (give.empty() && want.empty()) return;

        net(peer, id, "anti_entropy_reply", [this, id, peer, give, want] {
            auto iit = nodes_.find(id);
            if (iit == nodes_.end() || !iit->second->alive) return;
            Node& in = *iit->second;
            if (!in.cheater)
                for (const StoredRecord& rec : give)
                    if (in.store
                            .accept_propagated(rec.envelope, difficulty_,
                                               clock_.now_ms())
                            .accepted())
                        metrics_.count("anti_entropy_repairs_total");
            std::vector<StoredRecord> back;
            for (const Bytes32& h : want)
                if (auto rec = in.store.find(h)) back.push_back(*rec);
            if (back.empty()) return;
            net(id, peer, "anti_entropy_push", [this, peer, back] {
                auto pit2 = nodes_.find(peer);
                if (pit2 == nodes_.end() || !pit2->second->alive ||
                    pit2->second->cheater)
                    return;
                for (const StoredRecord& rec : back)
                    if (pit2->second->store
                            .accept_propagated(rec.envelope, difficulty_,
                                               clock_.now_ms())
                            .accepted())
                        metrics_.count("anti_entropy_repairs_total");
            });
        });
    });
}

Bytes Engine::node_handle_request(Node& node, ByteView body) {
    ByteReader r(body);
    std::uint8_t kind = r.u8();
    Bytes out;
    if (!r.ok()) {
        out.push_back(0xff);
        return out;
    }
    switch (kind) {
        case kReqPing: {
            out.push_back(kReqPing);
            break;
        }
        case kReqStore: {
            std::uint64_t nonce = r.u64be();
            std::uint32_t len = r.u32be();
            Bytes payload = r.take(len);
            EnvelopeError perr{};
            std::optional<Envelope> env;
            if (r.ok()) env = envelope_parse(payload, perr);
            if (!env) {
                out.push_back(0xff);
                return out;
            }
            env->nonce = nonce;
            StoreResult res = node_store_request(node, *env);
            out.push_back(kReqStore);
            out.push_back(static_cast<std::uint8_t>(res.status));
            put_u64_be(out, res.correct_swarm);
            put_u64_be(out, difficulty_);
            std::vector<NodeId> members;
            if (res.status == StoreStatus::wrong_swarm &&
                res.correct_swarm != kNoSwarm)
                members = live_members(res.correct_swarm);
            put_u32_be(out, static_cast<std::uint32_t>(members.size()));
            for (NodeId m : members) put_u64_be(out, m);
            break;
        }
        case kReqRetrieve: {
            auto pub = r.take_array<32>();
            std::uint8_t has_cursor = r.u8();
            auto cur = r.take_array<32>();
            std::uint32_t page = r.u32be();
            if (!r.ok()) {
                out.push_back(0xff);
                return out;
            }
            std::optional<Bytes32> cursor;
            if (has_cursor) cursor = cur;
            RetrievePage pg = node.store.retrieve(
                PublicKey{pub}, cursor,
                std::min<std::size_t>(page, kRetrievePageSize),
                clock_.now_ms());
            out.push_back(kReqRetrieve);
            put_u32_be(out, static_cast<std::uint32_t>(pg.records.size()));
            for (const StoredRecord& rec : pg.records) {
                put_u64_be(out, rec.envelope.nonce);
                Bytes payload = envelope_payload(rec.envelope);
                put_u32_be(out, static_cast<std::uint32_t>(payload.size()));
                append(out, payload);
            }
            out.push_back(pg.next_cursor ? 1 : 0);
            if (pg.next_cursor)
                out.insert(out.end(), pg.next_cursor->begin(),
                           pg.next_cursor->end());
            break;
        }
        case kReqSwarmQuery: {
            auto pub = r.take_array<32>();
            if (!r.ok()) {
                out.push_back(0xff);
                return out;
            }
            SwarmId swarm = registry_.swarm_for_key(PublicKey{pub});
            out.push_back(kReqSwarmQuery);
            put_u64_be(out, swarm);
            std::vector<NodeId> members;
            if (swarm != kNoSwarm) members = live_members(swarm);
            put_u32_be(out, static_cast<std::uint32_t>(members.size()));
            for (NodeId m : members) put_u64_be(out, m);
            break;
        }
        case kReqSyncDeliver: {
            auto pub = r.take_array<32>();
            std::uint64_t uid = r.u64be();
            (void)uid;
            std::uint32_t len = r.u32be();
            Bytes wire = r.take(len);
            if (!r.ok()) {
                out.push_back(0xff);
                return out;
            }
            out.push_back(kReqSyncDeliver);
            auto lit = node.listeners.find(PublicKey{pub});
            Client* target = nullptr;
            if (lit != node.listeners.end()) {
                auto cit = clients_.find(lit->second);
                if (cit != clients_.end()) target = cit->second.get();
            }
            if (target && target->online) {
                Bytes w(wire.begin(), wire.end());
                Address addr = target->address;
                net(node.id, addr, "sync_deliver", [this, addr, w] {
                    auto cit = clients_.find(addr);
                    if (cit == clients_.end() || !cit->second->online) return;
                    metrics_.count("sync_delivered_total");
                    client_handle_wire(*cit->second, w, true);
                });
                out.push_back(1);
            } else {
                out.push_back(0);
            }
            break;
        }
        default:
            out.push_back(0xff);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Onion transport

void Engine::onion_transit(Address prev, NodeId hop, Bytes layer,
                           std::uint64_t onion_id, std::size_t depth,
                           std::function<void(std::optional<Bytes>)> reply) {
    auto it = nodes_.find(hop);
    if (it == nodes_.end() || !it->second->alive || depth >= onion::kHops)
        return;  // lost in transit; the client's timeout handles it
    Node& node = *it->second;
    auto peeled = onion::peel(crypto_, node.keys, layer);
    if (!peeled) {
        metrics_.count("onion_peel_failures_total");
        return;
    }
    if (config_.observer)
        observations_.push_back(Observation{onion_id, hop, prev, peeled->next,
                                            peeled->is_final,
                                            Bytes(layer.begin(), layer.end())});
    Bytes32 hop_key = peeled->hop_key;
    auto wrap_back = [this, hop_key](ByteView blob) {
        return onion::wrap_reply_hop(crypto_, hop_key, blob);
    };

    if (!peeled->is_final) {
        NodeId next = peeled->next;
        Bytes inner = peeled->inner;
        net(hop, next, "onion", [this, hop, next, inner, onion_id, depth,
                                 reply, wrap_back] {
            onion_transit(
                hop, next, inner, onion_id, depth + 1,
                [this, hop, next, reply,
                 wrap_back](std::optional<Bytes> blob) {
                    if (!blob) return;
                    Bytes wrapped = wrap_back(*blob);
                    net(next, hop, "onion_reply",
                        [reply, wrapped] { reply(wrapped); });
                });
        });
        return;
    }

    // Exit hop: forward the request, then seal and wrap the answer.
    NodeId dest = peeled->next;
    Bytes request = peeled->inner;
    PublicKey reply_key = peeled->reply_key;
    NodeId exit_hop = hop;
    auto respond = [this, exit_hop, reply, wrap_back,
                    reply_key](Bytes response) {
        auto hit = nodes_.find(exit_hop);
        if (hit == nodes_.end() || !hit->second->alive) return;
        Bytes sealed = onion::seal_reply(crypto_, hit->second->rng, reply_key,
                                         response);
        reply(wrap_back(sealed));
    };
    if (dest == hop) {
        respond(node_handle_request(node, request));
        return;
    }
    auto dit = nodes_.find(dest);
    if (dit == nodes_.end() || !dit->second->alive) {
        metrics_.count("onion_dest_unreachable_total");
        return;
    }
    net(hop, dest, "request", [this, hop, dest, request, respond] {
        auto dit2 = nodes_.find(dest);
        if (dit2 == nodes_.end() || !dit2->second->alive) return;
        Bytes response = node_handle_request(*dit2->second, request);
        net(dest, hop, "response", [respond, response] { respond(response); });
    });
}

void Engine::onion_submit(Client& c, NodeId dest, Bytes body,
                          std::function<void(std::optional<Bytes>)> done) {
    Address addr = c.address;
    auto body_ptr = std::make_shared<Bytes>(std::move(body));
    auto done_ptr =
        std::make_shared<std::function<void(std::optional<Bytes>)>>(
            std::move(done));
    ensure_path(c, [this, addr, dest, body_ptr, done_ptr] {
        auto cit = clients_.find(addr);
        if (cit == clients_.end() || !cit->second->online ||
            !cit->second->path_ready) {
            (*done_ptr)(std::nullopt);
            return;
        }
        Client& c = *cit->second;
        auto state = std::make_shared<onion::WrapResult>(
            onion::wrap(crypto_, c.rng, c.path, dest, *body_ptr));
        std::uint64_t onion_id = next_onion_id_++;
        if (config_.observer)
            onion_truth_[onion_id] = OnionTruth{addr, c.path[0].id,
                                                c.path[1].id, c.path[2].id,
                                                dest};
        auto settled = std::make_shared<bool>(false);
        auto finish = [this, addr, done_ptr, settled,
                       state](std::optional<Bytes> blob) {
            if (*settled) return;
            *settled = true;
            if (!blob) {
                (*done_ptr)(std::nullopt);
                return;
            }
            (*done_ptr)(onion::open_reply(crypto_, *state, *blob));
        };
        schedule(kOnionTimeoutMs, [this, addr, finish, settled] {
            if (*settled) return;
            metrics_.count("onion_timeouts_total");
            auto cit2 = clients_.find(addr);
            if (cit2 != clients_.end()) rebuild_path(*cit2->second);
            finish(std::nullopt);
        });
        NodeId guard = c.path[0].id;
        Bytes layer = state->onion;
        net(addr, guard, "onion", [this, addr, guard, layer, onion_id,
                                   finish] {
            onion_transit(addr, guard, layer, onion_id, 0,
                          [this, addr, guard,
                           finish](std::optional<Bytes> blob) {
                              if (!blob) return;
                              net(guard, addr, "onion_reply",
                                  [finish, blob] { finish(blob); });
                          });
        });
    });
}

void Engine::rebuild_path(Client& c) {
    c.path_ready = false;
    c.path_builds = 0;
}

void Engine::ensure_path(Client& c, Handler then) {
    if (c.path_ready) {
        then();
        return;
    }
    c.path_waiters.push_back(std::move(then));
    if (c.path_building) return;
    c.path_building = true;
    Address addr = c.address;

    auto fail_waiters = [this, addr] {
        auto cit = clients_.find(addr);
        if (cit == clients_.end()) return;
        Client& c = *cit->second;
        c.path_building = false;
        auto waiters = std::move(c.path_waiters);
        c.path_waiters.clear();
        log_line("path_failed client=" + c.name);
        for (Handler& w : waiters) w();  // callees observe path_ready == false
    };

    auto attempt = std::make_shared<std::function<void()>>();
    *attempt = [this, addr, attempt, fail_waiters] {
        auto cit = clients_.find(addr);
        if (cit == clients_.end()) return;
        Client& c = *cit->second;
        if (!c.online || c.path_builds >= kMaxPathBuilds) {
            fail_waiters();
            return;
        }
        ++c.path_builds;
        std::vector<onion::PathNode> candidates;
        candidates.reserve(c.directory.entries.size());
        for (const NodeEndpoint& e : c.directory.entries)
            candidates.push_back(onion::PathNode{e.id, e.key});
        if (candidates.size() < onion::kHops) {
            fail_waiters();
            return;
        }
        onion::Path p = onion::select_path(candidates, c.rng);

        // Probe: one ping addressed to the exit itself proves every hop
        // forwards and answers.
        Bytes body;
        body.push_back(kReqPing);
        auto state = std::make_shared<onion::WrapResult>(
            onion::wrap(crypto_, c.rng, p, p[2].id, body));
        std::uint64_t onion_id = next_onion_id_++;
        if (config_.observer)
            onion_truth_[onion_id] =
                OnionTruth{addr, p[0].id, p[1].id, p[2].id, p[2].id};
        auto settled = std::make_shared<bool>(false);
        auto outcome = [this, addr, settled, state, p, attempt](
                           std::optional<Bytes> blob) {
            if (*settled) return;
            *settled = true;
            auto cit2 = clients_.find(addr);
            if (cit2 == clients_.end()) return;
            Client& c2 = *cit2->second;
            bool ok = blob && onion::open_reply(crypto_, *state, *blob);
            if (!ok) {
                (*attempt)();
                return;
            }
            c2.path = p;
            c2.path_ready = true;
            c2.path_building = false;
            c2.path_builds = 0;
            metrics_.count("paths_built_total");
            log_line("path client=" + c2.name + " guard=" +
                     std::to_string(p[0].id) + " middle=" +
                     std::to_string(p[1].id) + " exit=" +
                     std::to_string(p[2].id));
            auto waiters = std::move(c2.path_waiters);
            c2.path_waiters.clear();
            for (Handler& w : waiters) w();
        };
        schedule(kOnionTimeoutMs,
                 [outcome] { outcome(std::nullopt); });
        NodeId guard = p[0].id;
        Bytes layer = state->onion;
        net(addr, guard, "onion", [this, addr, guard, layer, onion_id,
                                   outcome] {
            onion_transit(addr, guard, layer, onion_id, 0,
                          [this, addr, guard,
                           outcome](std::optional<Bytes> blob) {
                              if (!blob) return;
                              net(guard, addr, "onion_reply",
                                  [outcome, blob] { outcome(blob); });
                          });
        });
    };
    (*attempt)();
}

// ---------------------------------------------------------------------------
// Client behavior

namespace {

Bytes session_frame(std::uint8_t type, std::uint64_t uid, std::uint64_t tick,
                    std::optional<NodeId> listener, std::string_view text) {
    Bytes out;
    out.push_back(type);
    put_u64_be(out, uid);
    put_u64_be(out, tick);
    out.push_back(listener ? 1 : 0);
    put_u64_be(out, listener.value_or(0));
    put_u32_be(out, static_cast<std::uint32_t>(text.size()));
    append(out, as_bytes(text));
    return out;
}

}  // namespace

Engine::Client* Engine::client_for_pub(const PublicKey& pub) {
    for (auto& [addr, c] : clients_)
        if (c->identity.pub == pub) return c.get();
    return nullptr;
}

Engine::Client& Engine::peer_of(Client& c) {
    Address peer = (c.address - kClientBase) % 2 == 0 ? c.address + 1
                                                      : c.address - 1;
    return *clients_.at(peer);
}

void Engine::client_start(Client& c) {
    Address addr = c.address;
    log_line("client_start name=" + c.name);

    schedule(kRefreshIntervalMs + (addr % 997), [this, addr] {
        auto it = clients_.find(addr);
        if (it != clients_.end()) client_refresh_directory(*it->second);
    });
    schedule(config_.poll_interval_ms + (addr % 397), [this, addr] {
        auto it = clients_.find(addr);
        if (it != clients_.end()) client_poll(*it->second);
    });
    if (config_.sync_enabled) client_register_listener(c);
    if (c.sender && config_.sends_per_pair > 0) {
        std::uint64_t first =
            config_.first_send_ms + (addr - kClientBase) * 97;
        schedule(first, [this, addr] {
            auto it = clients_.find(addr);
            if (it != clients_.end()) client_send_chat(*it->second);
        });
    }
    if (!c.sender && config_.receiver_offline_from_ms > 0) {
        schedule(config_.receiver_offline_from_ms, [this, addr] {
            auto it = clients_.find(addr);
            if (it != clients_.end()) client_set_online(*it->second, false);
        });
        if (config_.receiver_offline_until_ms >
            config_.receiver_offline_from_ms)
            schedule(config_.receiver_offline_until_ms, [this, addr] {
                auto it = clients_.find(addr);
                if (it != clients_.end()) client_set_online(*it->second, true);
            });
    }
}

void Engine::client_register_listener(Client& c) {
    Address addr = c.address;
    resolve_swarm(c, c.identity.pub, 2,
                  [this, addr](std::optional<SwarmId> swarm,
                               std::vector<NodeId> members) {
                      auto cit = clients_.find(addr);
                      if (cit == clients_.end() || !cit->second->online)
                          return;
                      Client& c = *cit->second;
                      if (!swarm || members.empty()) return;
                      NodeId node = members[c.rng.below(members.size())];
                      c.own_listener = node;
                      PublicKey pub = c.identity.pub;
                      net(addr, node, "listen_register",
                          [this, node, pub, addr] {
                              auto nit = nodes_.find(node);
                              if (nit == nodes_.end() || !nit->second->alive)
                                  return;
                              nit->second->listeners[pub] = addr;
                          });
                      log_line("listener client=" + c.name + " node=" +
                               std::to_string(node));
                      // Restored conversations already know where the peer
                      // listens; fresh ones learn it from the first frames.
                      if (config_.preestablished)
                          peer_of(c).transport.peer_announced_listener(node);
                  });
}

void Engine::client_refresh_directory(Client& c) {
    Address addr = c.address;
    if (clock_.now_ms() + kRefreshIntervalMs <= config_.duration_ms)
        schedule(kRefreshIntervalMs, [this, addr] {
            auto it = clients_.find(addr);
            if (it != clients_.end()) client_refresh_directory(*it->second);
        });
    if (!c.online || c.directory.entries.empty()) return;

    std::size_t k = std::min<std::size_t>(3, c.directory.entries.size());
    auto picks = c.rng.sample_indices(c.directory.entries.size(), k);
    auto state = std::make_shared<std::vector<NodeList>>();
    auto finish = [this, addr, k, state] {
        if (state->size() != k) return;
        auto cit = clients_.find(addr);
        if (cit == clients_.end()) return;
        Client& c = *cit->second;
        RefreshOutcome outcome = refresh_nodelist(c.directory, *state);
        if (outcome.adopted) {
            c.directory = outcome.list;
            metrics_.count("refresh_adopted_total");
        } else {
            metrics_.count("refresh_rejected_total");
            log_line("refresh_rejected client=" + c.name);
        }
    };
    for (std::size_t i : picks) {
        NodeId target = c.directory.entries[i].id;
        auto answered = std::make_shared<bool>(false);
        net(addr, target, "nodelist", [this, addr, target, answered, state,
                                       finish] {
            auto nit = nodes_.find(target);
            if (nit == nodes_.end() || !nit->second->alive) return;
            NodeList list = current_directory();
            net(target, addr, "nodelist_reply",
                [answered, state, finish, list] {
                    if (*answered) return;
                    *answered = true;
                    state->push_back(list);
                    finish();
                });
        });
        schedule(3'000, [answered, state, finish] {
            if (*answered) return;
            *answered = true;
            state->push_back(NodeList{NodeList::Source::network, {}});
            finish();
        });
    }
}

void Engine::resolve_swarm(
    Client& c, const PublicKey& key, int retries,
    std::function<void(std::optional<SwarmId>, std::vector<NodeId>)> done) {
    if (auto cached = c.cache.lookup(key)) {
        auto mit = c.member_cache.find(*cached);
        if (mit != c.member_cache.end() && !mit->second.empty()) {
            done(*cached, mit->second);
            return;
        }
    }
    if (c.directory.entries.empty()) {
        done(std::nullopt, {});
        return;
    }
    Address addr = c.address;
    NodeId target =
        c.directory.entries[c.rng.below(c.directory.entries.size())].id;
    Bytes body;
    body.push_back(kReqSwarmQuery);
    append(body, key.bytes);
    onion_submit(c, target, std::move(body),
                 [this, addr, key, retries, done](std::optional<Bytes> resp) {
                     auto cit = clients_.find(addr);
                     if (cit == clients_.end()) {
                         done(std::nullopt, {});
                         return;
                     }
                     Client& c = *cit->second;
                     std::optional<SwarmId> swarm;
                     std::vector<NodeId> members;
                     if (resp) {
                         ByteReader r(*resp);
                         if (r.u8() == kReqSwarmQuery) {
                             SwarmId s = r.u64be();
                             std::uint32_t n = r.u32be();
                             for (std::uint32_t i = 0; r.ok() && i < n; ++i)
                                 members.push_back(r.u64be());
                             if (r.ok() && s != kNoSwarm && !members.empty())
                                 swarm = s;
                             else
                                 members.clear();
                         }
                     }
                     if (!swarm) {
                         if (retries > 0) {
                             resolve_swarm(c, key, retries - 1, done);
                         } else {
                             done(std::nullopt, {});
                         }
                         return;
                     }
                     c.cache.remember(key, *swarm);
                     c.member_cache[*swarm] = members;
                     done(swarm, std::move(members));
                 });
}

std::uint64_t Engine::client_new_chat(Client& c, const std::string& text) {
    std::uint64_t uid = (c.address << 20) | ++c.next_msg;
    std::optional<NodeId> listener;
    if (config_.sync_enabled && c.online && c.own_listener)
        listener = c.own_listener;
    Bytes frame = session_frame(kChat, uid, clock_.now_ms(), listener, text);
    Bytes wire = c.session->encrypt(frame, c.rng);
    chat_sent_.insert(uid);
    chat_plaintexts_.push_back(text);
    c.outbox_wire[uid] = std::move(wire);
    c.outbox_text[uid] = text;
    metrics_.count("sent_total");
    log_line("send client=" + c.name + " uid=" + hex8(uid));
    return uid;
}

void Engine::client_transmit_wire(Client& c, std::uint64_t msg_uid,
                                  const Bytes& wire) {
    if (config_.sync_enabled &&
        c.transport.mode() == DeliveryMode::sync_mode &&
        c.transport.listening_node()) {
        metrics_.count("sync_sent_total");
        c.transport.sent_sync(msg_uid, clock_.now_ms());
        Address addr = c.address;
        schedule(kAckTimeoutMs, [this, addr, msg_uid] {
            auto cit = clients_.find(addr);
            if (cit == clients_.end()) return;
            Client& c2 = *cit->second;
            if (c2.transport.on_ack_timeout(msg_uid)) {
                log_line("fell_back client=" + c2.name + " uid=" +
                         hex8(msg_uid) + " reason=ack_timeout");
                metrics_.count("fallback_total");
                client_fallback(c2, msg_uid);
            }
        });
        client_sync_send(c, msg_uid, wire);
    } else {
        metrics_.count("async_sent_total");
        client_fallback(c, msg_uid);
    }
}

void Engine::client_send_chat(Client& c) {
    Address addr = c.address;
    auto again = [this, addr] {
        schedule(config_.send_interval_ms, [this, addr] {
            auto it = clients_.find(addr);
            if (it != clients_.end()) client_send_chat(*it->second);
        });
    };
    if (c.chats_sent >= config_.sends_per_pair) return;
    if (!c.online) {
        again();
        return;
    }
    if (!c.session) {
        if (!config_.preestablished && !c.friend_request_sent) {
            c.friend_request_sent = true;
            auto [bundle, secrets] =
                make_bundle(crypto_, c.identity, c.next_otk++, c.rng);
            c.vault.put(secrets);
            FriendRequest req{c.identity.pub, c.name, "hello", bundle};
            Bytes blob =
                friend_request_seal(crypto_, c.rng, c.peer_pub, req);
            Bytes cipher;
            cipher.push_back(kFrameFriendRequest);
            put_u32_be(cipher, static_cast<std::uint32_t>(blob.size()));
            append(cipher, blob);
            metrics_.count("friend_requests_sent_total");
            log_line("friend_request_sent client=" + c.name);
            client_store_cipher(c, std::move(cipher), 0);
        }
        again();
        return;
    }
    ++c.chats_sent;
    std::string text =
        "m/" + c.name + "/" + std::to_string(c.next_msg + 1);
    std::uint64_t uid = client_new_chat(c, text);
    client_transmit_wire(c, uid, c.outbox_wire.at(uid));
    if (c.chats_sent < config_.sends_per_pair) again();
}

void Engine::client_sync_send(Client& c, std::uint64_t msg_uid, Bytes wire) {
    auto listener = c.transport.listening_node();
    if (!listener) {
        client_fallback(c, msg_uid);
        return;
    }
    Address addr = c.address;
    Bytes body;
    body.push_back(kReqSyncDeliver);
    append(body, c.peer_pub.bytes);
    put_u64_be(body, msg_uid);
    put_u32_be(body, static_cast<std::uint32_t>(wire.size()));
    append(body, wire);
    onion_submit(c, *listener, std::move(body),
                 [this, addr, msg_uid](std::optional<Bytes> resp) {
                     if (!resp) return;  // ack timer decides
                     ByteReader r(*resp);
                     std::uint8_t kind = r.u8();
                     std::uint8_t connected = r.u8();
                     if (!r.ok() || kind != kReqSyncDeliver || connected)
                         return;
                     auto cit = clients_.find(addr);
                     if (cit == clients_.end()) return;
                     Client& c2 = *cit->second;
                     if (c2.transport.on_ack_timeout(msg_uid)) {
                         log_line("fell_back client=" + c2.name + " uid=" +
                                  hex8(msg_uid) + " reason=not_connected");
                         metrics_.count("fallback_total");
                         client_fallback(c2, msg_uid);
                     }
                 });
}

void Engine::client_fallback(Client& c, std::uint64_t msg_uid) {
    auto wit = c.outbox_wire.find(msg_uid);
    if (wit == c.outbox_wire.end()) return;
    Bytes cipher;
    cipher.push_back(kFrameSessionMsg);
    append(cipher, c.identity.pub.bytes);
    put_u32_be(cipher, static_cast<std::uint32_t>(wit->second.size()));
    append(cipher, wit->second);
    client_store_cipher(c, std::move(cipher), msg_uid);
}

void Engine::client_store_cipher(Client& c, Bytes cipher,
                                 std::uint64_t msg_uid) {
    Envelope env;
    env.recipient = c.peer_pub;
    env.ttl_seconds = config_.message_ttl_seconds;
    env.timestamp_ms = clock_.now_ms();
    env.ciphertext = std::move(cipher);
    auto mined = pow::mine_envelope(env, c.difficulty_view);
    if (!mined.found) {
        metrics_.count("mine_failed_total");
        log_line("mine_failed client=" + c.name);
        return;
    }
    metrics_.count("stores_attempted_total");
    client_send_envelope(c, std::move(env), msg_uid, 3, false);
}

void Engine::client_send_envelope(Client& c, Envelope env,
                                  std::uint64_t msg_uid, int resolve_retries,
                                  bool remined) {
    Address addr = c.address;
    resolve_swarm(
        c, env.recipient, 2,
        [this, addr, env, msg_uid, resolve_retries,
         remined](std::optional<SwarmId> swarm, std::vector<NodeId> members) {
            auto cit = clients_.find(addr);
            if (cit == clients_.end()) return;
            Client& c = *cit->second;
            if (!swarm || members.empty()) {
                metrics_.count("send_failed_total");
                log_line("send_failed client=" + c.name + " uid=" +
                         hex8(msg_uid) + " reason=no_swarm");
                return;
            }
            std::size_t k = std::min<std::size_t>(3, members.size());
            auto picks = c.rng.sample_indices(members.size(), k);

            Bytes payload = envelope_payload(env);
            Bytes body;
            body.push_back(kReqStore);
            put_u64_be(body, env.nonce);
            put_u32_be(body, static_cast<std::uint32_t>(payload.size()));
            append(body, payload);

            struct Tally {
                std::size_t waiting = 0;
                bool accepted = false;
                bool wrong = false;
                SwarmId correct = kNoSwarm;
                std::vector<NodeId> correct_members;
                bool insufficient = false;
                std::uint64_t difficulty = 0;
            };
            auto tally = std::make_shared<Tally>();
            tally->waiting = k;

            auto settle = [this, addr, env, msg_uid, resolve_retries,
                           remined, tally] {
                if (tally->waiting > 0) return;
                auto cit2 = clients_.find(addr);
                if (cit2 == clients_.end()) return;
                Client& c2 = *cit2->second;
                if (tally->accepted) {
                    metrics_.count("stored_ok_total");
                    log_line("stored client=" + c2.name + " uid=" +
                             hex8(msg_uid));
                    return;
                }
                if (tally->wrong && tally->correct != kNoSwarm) {
                    c2.cache.remember(env.recipient, tally->correct);
                    if (!tally->correct_members.empty())
                        c2.member_cache[tally->correct] =
                            tally->correct_members;
                    if (resolve_retries > 0) {
                        log_line("redirect client=" + c2.name + " uid=" +
                                 hex8(msg_uid) + " swarm=" +
                                 std::to_string(tally->correct));
                        metrics_.count("redirects_total");
                        client_send_envelope(c2, env, msg_uid,
                                             resolve_retries - 1, remined);
                        return;
                    }
                }
                if (tally->insufficient && !remined &&
                    tally->difficulty > 0) {
                    c2.difficulty_view = tally->difficulty;
                    Envelope again = env;
                    again.timestamp_ms = clock_.now_ms();
                    auto mined = pow::mine_envelope(again, c2.difficulty_view);
                    if (mined.found) {
                        metrics_.count("remines_total");
                        log_line("remine client=" + c2.name + " uid=" +
                                 hex8(msg_uid) + " difficulty=" +
                                 std::to_string(c2.difficulty_view));
                        client_send_envelope(c2, std::move(again), msg_uid,
                                             resolve_retries, true);
                        return;
                    }
                }
                if (resolve_retries > 0) {
                    // Unresponsive or stale targets; refresh members and try
                    // again.
                    c2.cache.invalidate(env.recipient);
                    client_send_envelope(c2, env, msg_uid,
                                         resolve_retries - 1, remined);
                    return;
                }
                metrics_.count("send_failed_total");
                log_line("send_failed client=" + c2.name + " uid=" +
                         hex8(msg_uid) + " reason=no_acceptor");
            };

            for (std::size_t i : picks) {
                NodeId target = members[i];
                onion_submit(
                    c, target, body,
                    [tally, settle](std::optional<Bytes> resp) {
                        --tally->waiting;
                        if (resp) {
                            ByteReader r(*resp);
                            std::uint8_t kind = r.u8();
                            std::uint8_t status = r.u8();
                            SwarmId correct = r.u64be();
                            std::uint64_t diff = r.u64be();
                            std::uint32_t n = r.u32be();
                            std::vector<NodeId> mem;
                            for (std::uint32_t j = 0; r.ok() && j < n; ++j)
                                mem.push_back(r.u64be());
                            if (r.ok() && kind == kReqStore) {
                                auto st = static_cast<StoreStatus>(status);
                                if (st == StoreStatus::stored ||
                                    st == StoreStatus::duplicate)
                                    tally->accepted = true;
                                if (st == StoreStatus::wrong_swarm) {
                                    tally->wrong = true;
                                    tally->correct = correct;
                                    tally->correct_members = std::move(mem);
                                }
                                if (st == StoreStatus::pow_insufficient) {
                                    tally->insufficient = true;
                                    tally->difficulty = diff;
                                }
                            }
                        }
                        settle();
                    });
            }
        });
}

void Engine::client_poll(Client& c) {
    Address addr = c.address;
    if (clock_.now_ms() + config_.poll_interval_ms <= config_.duration_ms)
        schedule(config_.poll_interval_ms, [this, addr] {
            auto it = clients_.find(addr);
            if (it != clients_.end()) client_poll(*it->second);
        });
    if (!c.online) return;
    resolve_swarm(
        c, c.identity.pub, 1,
        [this, addr](std::optional<SwarmId> swarm,
                     std::vector<NodeId> members) {
            auto cit = clients_.find(addr);
            if (cit == clients_.end() || !cit->second->online) return;
            Client& c = *cit->second;
            if (!swarm || members.empty()) return;
            metrics_.count("poll_rounds_total");
            std::size_t k = std::min<std::size_t>(3, members.size());
            auto picks = c.rng.sample_indices(members.size(), k);
            for (std::size_t i : picks) {
                NodeId target = members[i];
                auto fetch = std::make_shared<
                    std::function<void(std::optional<Bytes32>, std::size_t)>>();
                *fetch = [this, addr, target, fetch](
                             std::optional<Bytes32> cursor,
                             std::size_t pages) {
                    auto cit2 = clients_.find(addr);
                    if (cit2 == clients_.end() || !cit2->second->online)
                        return;
                    Client& c2 = *cit2->second;
                    Bytes body;
                    body.push_back(kReqRetrieve);
                    append(body, c2.identity.pub.bytes);
                    body.push_back(cursor ? 1 : 0);
                    Bytes32 cur = cursor.value_or(Bytes32{});
                    append(body, cur);
                    put_u32_be(body,
                               static_cast<std::uint32_t>(kRetrievePageSize));
                    onion_submit(
                        c2, target, std::move(body),
                        [this, addr, fetch, pages](std::optional<Bytes> resp) {
                            if (!resp) return;
                            auto cit3 = clients_.find(addr);
                            if (cit3 == clients_.end() ||
                                !cit3->second->online)
                                return;
                            Client& c3 = *cit3->second;
                            ByteReader r(*resp);
                            if (r.u8() != kReqRetrieve) return;
                            std::uint32_t n = r.u32be();
                            RetrievePage page;
                            for (std::uint32_t j = 0; r.ok() && j < n; ++j) {
                                std::uint64_t nonce = r.u64be();
                                std::uint32_t len = r.u32be();
                                Bytes payload = r.take(len);
                                if (!r.ok()) break;
                                EnvelopeError perr{};
                                auto env = envelope_parse(payload, perr);
                                if (!env) continue;
                                env->nonce = nonce;
                                page.records.push_back(
                                    StoredRecord{record_hash(*env), *env});
                            }
                            std::uint8_t more = r.u8();
                            auto next = r.take_array<32>();
                            std::optional<Bytes32> next_cursor;
                            if (r.ok() && more) next_cursor = next;
                            auto fresh = c3.inbox.absorb(page);
                            for (const StoredRecord& rec : fresh)
                                client_handle_record(c3, rec);
                            if (next_cursor &&
                                pages + 1 < kMaxRetrievePages)
                                (*fetch)(next_cursor, pages + 1);
                        });
                };
                (*fetch)(std::nullopt, 0);
            }
        });
}

void Engine::client_handle_record(Client& c, const StoredRecord& rec) {
    if (rec.envelope.expiry_ms() <= clock_.now_ms()) {
        metrics_.count("expired_served_total");
        return;
    }
    metrics_.count("records_polled_total");
    ByteReader r(rec.envelope.ciphertext);
    std::uint8_t kind = r.u8();
    if (!r.ok()) return;
    switch (kind) {
        case kFrameFriendRequest: {
            std::uint32_t len = r.u32be();
            Bytes blob = r.take(len);
            if (!r.ok()) return;
            auto req = friend_request_open(crypto_, c.identity, blob);
            if (!req) {
                log_line("friend_request_bad client=" + c.name);
                return;
            }
            metrics_.count("friend_requests_received_total");
            log_line("friend_request client=" + c.name + " from=" +
                     to_hex(ByteView(req->sender.bytes).first(8)));
            c.pending.offer(*req);
            if (!(req->sender == c.peer_pub) || c.session) return;
            auto accepted = c.pending.accept(req->sender);
            if (!accepted) return;
            if (!verify_bundle(crypto_, accepted->bundle)) {
                log_line("friend_request_bad_bundle client=" + c.name);
                return;
            }
            auto init = handshake_initiate(crypto_, c.identity,
                                           accepted->bundle, c.rng);
            if (!init) return;
            c.session = SessionState::initiator(
                crypto_, init->root, accepted->bundle.signed_prekey, c.rng);
            metrics_.count("sessions_established_total");
            log_line("session_established client=" + c.name +
                     " role=initiator");
            // The first protected message rides with the handshake keys.
            std::string text =
                "m/" + c.name + "/" + std::to_string(c.next_msg + 1);
            std::uint64_t uid = client_new_chat(c, text);
            Bytes cipher;
            cipher.push_back(kFrameSessionInit);
            append(cipher, c.identity.pub.bytes);
            append(cipher, init->ephemeral.bytes);
            put_u32_be(cipher, init->one_time_id);
            const Bytes& wire = c.outbox_wire.at(uid);
            put_u32_be(cipher, static_cast<std::uint32_t>(wire.size()));
            append(cipher, wire);
            client_store_cipher(c, std::move(cipher), uid);
            auto early = std::move(c.early_wires);
            c.early_wires.clear();
            for (const Bytes& w : early) client_handle_wire(c, w, false);
            break;
        }
        case kFrameSessionInit: {
            auto sender = r.take_array<32>();
            auto eph = r.take_array<32>();
            std::uint32_t otk_id = r.u32be();
            std::uint32_t len = r.u32be();
            Bytes wire = r.take(len);
            if (!r.ok()) return;
            if (!(PublicKey{sender} == c.peer_pub)) {
                log_line("session_init_foreign client=" + c.name);
                return;
            }
            if (c.session) {
                client_handle_wire(c, wire, false);
                return;
            }
            auto secrets = c.vault.consume(otk_id);
            if (!secrets) {
                metrics_.count("one_time_reuse_total");
                log_line("one_time_key_missing client=" + c.name + " id=" +
                         std::to_string(otk_id));
                return;
            }
            auto root = handshake_respond(crypto_, c.identity, *secrets,
                                          PublicKey{sender}, PublicKey{eph});
            if (!root) return;
            c.session =
                SessionState::responder(crypto_, *root, secrets->signed_prekey);
            metrics_.count("sessions_established_total");
            log_line("session_established client=" + c.name +
                     " role=responder");
            client_handle_wire(c, wire, false);
            auto early = std::move(c.early_wires);
            c.early_wires.clear();
            for (const Bytes& w : early) client_handle_wire(c, w, false);
            break;
        }
        case kFrameSessionMsg: {
            auto sender = r.take_array<32>();
            std::uint32_t len = r.u32be();
            Bytes wire = r.take(len);
            if (!r.ok()) return;
            if (!(PublicKey{sender} == c.peer_pub)) {
                log_line("session_msg_foreign client=" + c.name);
                return;
            }
            client_handle_wire(c, wire, false);
            break;
        }
        default:
            break;
    }
}

void Engine::client_handle_wire(Client& c, ByteView wire, bool via_sync) {
    if (!c.session) {
        c.early_wires.emplace_back(wire.begin(), wire.end());
        return;
    }
    auto plaintext = c.session->decrypt(wire);
    if (!plaintext) {
        metrics_.count("wire_rejected_total");
        return;
    }
    (void)via_sync;
    client_handle_frame(c, *plaintext);
}

void Engine::client_handle_frame(Client& c, ByteView frame) {
    ByteReader r(frame);
    std::uint8_t type = r.u8();
    std::uint64_t uid = r.u64be();
    std::uint64_t sent_tick = r.u64be();
    std::uint8_t has_listener = r.u8();
    std::uint64_t listener = r.u64be();
    std::uint32_t len = r.u32be();
    Bytes text = r.take(len);
    if (!r.ok()) return;

    if (config_.sync_enabled && has_listener)
        c.transport.peer_announced_listener(listener);
    else if (!has_listener)
        c.transport.peer_went_silent();

    if (type == kChat) {
        if (c.delivered_uids.contains(uid)) {
            metrics_.count("duplicate_deliveries_total");
            return;
        }
        c.delivered_uids.insert(uid);
        chat_delivered_.insert(uid);
        metrics_.count("delivered_total");
        metrics_.observe("delivery_ms",
                         static_cast<double>(clock_.now_ms() - sent_tick));
        log_line("delivered client=" + c.name + " uid=" + hex8(uid));
        if (config_.sync_enabled &&
            c.transport.mode() == DeliveryMode::sync_mode &&
            c.transport.listening_node())
            client_send_ack(c, uid);
        if (config_.replies && !c.sender && c.session) {
            std::string reply_text =
                "r/" + c.name + "/" + std::to_string(c.next_msg + 1);
            std::uint64_t reply_uid = client_new_chat(c, reply_text);
            client_transmit_wire(c, reply_uid, c.outbox_wire.at(reply_uid));
        }
    } else if (type == kAck) {
        if (c.transport.on_ack(uid)) {
            metrics_.count("acked_total");
            log_line("acked client=" + c.name + " uid=" + hex8(uid));
        }
    }
    (void)text;
}

void Engine::client_send_ack(Client& c, std::uint64_t msg_uid) {
    if (!c.session) return;
    std::optional<NodeId> own;
    if (config_.sync_enabled && c.online && c.own_listener)
        own = c.own_listener;
    Bytes frame =
        session_frame(kAck, msg_uid, clock_.now_ms(), own, std::string_view{});
    Bytes wire = c.session->encrypt(frame, c.rng);
    metrics_.count("acks_sent_total");
    client_sync_send(c, msg_uid, std::move(wire));
}

void Engine::client_set_online(Client& c, bool online) {
    if (c.online == online) return;
    c.online = online;
    log_line(std::string(online ? "client_online" : "client_offline") +
             " name=" + c.name);
    if (!online) {
        if (c.own_listener) {
            NodeId node = *c.own_listener;
            PublicKey pub = c.identity.pub;
            net(c.address, node, "listen_unregister", [this, node, pub] {
                auto nit = nodes_.find(node);
                if (nit != nodes_.end()) nit->second->listeners.erase(pub);
            });
            c.own_listener.reset();
        }
        c.path_ready = false;
        c.path_building = false;
        c.path_waiters.clear();
    } else {
        c.path_builds = 0;
        if (config_.sync_enabled) client_register_listener(c);
    }
}

// ---------------------------------------------------------------------------
// Churn

void Engine::churn_leave() {
    std::vector<NodeId> candidates;
    for (const auto& [id, node] : nodes_) {
        if (!node->alive || node->cheater) continue;
        auto s = registry_.swarm_of(id);
        if (!s) {
            candidates.push_back(id);
            continue;
        }
        // Keep at least two members behind so the swarm's data survives the
        // departure while the registry refills it.
        auto it = registry_.swarms().find(*s);
        if (it != registry_.swarms().end() && it->second.size() >= 3)
            candidates.push_back(id);
    }
    if (candidates.empty()) return;
    NodeId victim = candidates[rng_churn_.below(candidates.size())];
    nodes_.at(victim)->alive = false;
    metrics_.count("churn_leaves_total");
    log_line("churn_leave node=" + std::to_string(victim));
    std::uint64_t h = config_.block_interval_ms
                          ? clock_.now_ms() / config_.block_interval_ms
                          : 0;
    apply_registry_event({RegistryEvent::Kind::node_leave, victim},
                         blockhash(h));
}

void Engine::churn_join() {
    NodeId id = nodes_.empty() ? 1 : nodes_.rbegin()->first + 1;
    auto node = std::make_unique<Node>(NodeStore::Config{
        config_.strict_propagation, pow::kDefaultSkewMs});
    node->id = id;
    node->keys = crypto_.generate_keypair(rng_keys_);
    node->rng = rng_root_.fork(0x10000 + id);
    node->membership_changed_ms = clock_.now_ms();
    nodes_.emplace(id, std::move(node));
    metrics_.count("churn_joins_total");
    log_line("churn_join node=" + std::to_string(id));
    std::uint64_t h = config_.block_interval_ms
                          ? clock_.now_ms() / config_.block_interval_ms
                          : 0;
    apply_registry_event({RegistryEvent::Kind::node_join, id}, blockhash(h));
    schedule(config_.anti_entropy_ms, [this, id] { anti_entropy_tick(id); });
}

// ---------------------------------------------------------------------------
// Run

void Engine::run() {
    log_line("run seed=" + std::to_string(config_.seed) + " nodes=" +
             std::to_string(config_.node_count) + " pairs=" +
             std::to_string(config_.client_pairs));

    Bytes32 genesis = blockhash(0);
    for (std::size_t i = 1; i <= config_.node_count; ++i) {
        NodeId id = static_cast<NodeId>(i);
        auto node = std::make_unique<Node>(NodeStore::Config{
            config_.strict_propagation, pow::kDefaultSkewMs});
        node->id = id;
        node->keys = crypto_.generate_keypair(rng_keys_);
        node->rng = rng_root_.fork(0x10000 + id);
        node->cheater = id <= static_cast<NodeId>(config_.cheater_count);
        if (node->cheater) log_line("cheater node=" + std::to_string(id));
        nodes_.emplace(id, std::move(node));
        apply_registry_event({RegistryEvent::Kind::node_join, id}, genesis);
    }
    log_line("boot swarms=" + std::to_string(registry_.swarms().size()) +
             " pending=" + std::to_string(registry_.pending().size()));

    std::uint64_t stagger = 0;
    for (const auto& [id, node] : nodes_) {
        stagger += 211;
        NodeId nid = id;
        schedule(config_.anti_entropy_ms + stagger % 1000,
                 [this, nid] { anti_entropy_tick(nid); });
    }

    if (config_.block_interval_ms > 0 &&
        config_.block_interval_ms <= config_.duration_ms)
        schedule(config_.block_interval_ms, [this] { on_block(1); });

    if (config_.churn_end_ms > config_.churn_start_ms) {
        std::uint64_t span = config_.churn_end_ms - config_.churn_start_ms;
        for (std::size_t i = 0; i < config_.churn_leaves; ++i) {
            std::uint64_t t = config_.churn_start_ms +
                              (i + 1) * span / (config_.churn_leaves + 1);
            schedule(t, [this] { churn_leave(); });
        }
        for (std::size_t i = 0; i < config_.churn_joins; ++i) {
            std::uint64_t t = config_.churn_start_ms +
                              (i + 1) * span / (config_.churn_joins + 1) + 479;
            schedule(t, [this] { churn_join(); });
        }
    }

    for (std::size_t i = 0; i < config_.client_pairs; ++i) {
        Address a_addr = kClientBase + 2 * i;
        Address b_addr = a_addr + 1;
        auto make_client = [this](Address addr, std::string name,
                                  bool sender) {
            auto c = std::make_unique<Client>();
            c->address = addr;
            c->name = std::move(name);
            c->sender = sender;
            c->rng = rng_client_.fork(addr);
            c->identity = crypto_.generate_keypair(rng_keys_);
            c->directory = current_directory();
            c->directory.source = NodeList::Source::seed;
            c->difficulty_view = difficulty_;
            Client* raw = c.get();
            clients_.emplace(addr, std::move(c));
            return raw;
        };
        Client* a = make_client(a_addr, "a" + std::to_string(i), true);
        Client* b = make_client(b_addr, "b" + std::to_string(i), false);
        a->peer_pub = b->identity.pub;
        b->peer_pub = a->identity.pub;

        if (config_.preestablished) {
            auto [bundle, secrets] =
                make_bundle(crypto_, b->identity, b->next_otk++, b->rng);
            auto init =
                handshake_initiate(crypto_, a->identity, bundle, a->rng);
            auto root = handshake_respond(crypto_, b->identity, secrets,
                                          a->identity.pub, init->ephemeral);
            a->session = SessionState::initiator(
                crypto_, init->root, bundle.signed_prekey, a->rng);
            b->session = SessionState::responder(crypto_, *root,
                                                 secrets.signed_prekey);
            a->friend_request_sent = true;
            b->friend_request_sent = true;
            metrics_.count("sessions_established_total", 2);
            log_line("session_preestablished pair=" + std::to_string(i));
        }
    }
    std::size_t k = 0;
    for (const auto& [addr, c] : clients_) {
        Address a = addr;
        schedule(100 + (k++) * 53, [this, a] {
            auto it = clients_.find(a);
            if (it != clients_.end()) client_start(*it->second);
        });
    }

    while (!queue_.empty()) {
        if (queue_.top().tick > config_.duration_ms) break;
        QueuedEvent ev = std::move(const_cast<QueuedEvent&>(queue_.top()));
        queue_.pop();
        clock_.advance_to(ev.tick);
        ev.fn();
    }
    while (!queue_.empty()) queue_.pop();

    final_metrics();
    log_line("run_complete");
}

// ---------------------------------------------------------------------------
// Evaluation

bool Engine::check_delivered_all(std::string& detail) const {
    std::size_t missing = 0;
    std::uint64_t first = 0;
    for (std::uint64_t uid : chat_sent_)
        if (!chat_delivered_.contains(uid)) {
            if (missing == 0) first = uid;
            ++missing;
        }
    detail = "sent=" + std::to_string(chat_sent_.size()) + " delivered=" +
             std::to_string(chat_delivered_.size());
    if (missing > 0) detail += " first_missing=" + hex8(first);
    return missing == 0;
}

bool Engine::check_replication_full(std::string& detail) const {
    std::uint64_t now = clock_.now_ms();
    std::size_t checked = 0, incomplete = 0;
    for (const auto& [hash, born] : born_) {
        if (born.envelope.expiry_ms() <= now) continue;
        SwarmId owner = registry_.swarm_for_key(born.envelope.recipient);
        auto members = owner == kNoSwarm ? std::vector<NodeId>{}
                                         : live_members(owner);
        if (members.empty()) {
            ++incomplete;
            continue;
        }
        ++checked;
        for (NodeId m : members)
            if (!nodes_.at(m)->store.contains(hash)) {
                ++incomplete;
                break;
            }
    }
    detail = "records=" + std::to_string(checked) + " incomplete=" +
             std::to_string(incomplete);
    return incomplete == 0;
}

bool Engine::check_no_lost_records(std::string& detail) const {
    std::uint64_t now = clock_.now_ms();
    std::size_t live = 0, lost = 0;
    for (const auto& [hash, born] : born_) {
        if (born.envelope.expiry_ms() <= now) continue;
        ++live;
        SwarmId owner = registry_.swarm_for_key(born.envelope.recipient);
        bool held = false;
        if (owner != kNoSwarm)
            for (NodeId m : live_members(owner))
                if (nodes_.at(m)->store.contains(hash)) {
                    held = true;
                    break;
                }
        if (!held) ++lost;
    }
    detail = "live=" + std::to_string(live) + " lost=" + std::to_string(lost);
    return lost == 0;
}

bool Engine::check_swarm_sizes(std::string& detail) const {
    const SwarmLimits& lim = registry_.limits();
    bool sole = registry_.swarms().size() == 1;
    std::size_t bad = 0;
    for (const auto& [id, members] : registry_.swarms()) {
        if (members.size() > lim.n_max) ++bad;
        if (members.size() < lim.n_min && !sole) ++bad;
    }
    detail = "swarms=" + std::to_string(registry_.swarms().size()) + " bad=" +
             std::to_string(bad);
    return bad == 0;
}

bool Engine::check_onion_privacy(std::string& detail) const {
    std::size_t linked = 0;
    for (const Observation& obs : observations_) {
        auto it = onion_truth_.find(obs.onion_id);
        if (it == onion_truth_.end()) {
            ++linked;
            continue;
        }
        // A relay "knows the client" when the previous address is the
        // client itself, and "knows the destination" when it peeled the
        // final layer. No single relay may know both.
        bool sees_client = obs.prev == it->second.client;
        bool sees_destination = obs.is_final;
        if (sees_client && sees_destination) ++linked;
    }
    std::size_t plaintext_hits = 0;
    for (const std::string& text : chat_plaintexts_) {
        ByteView pat = as_bytes(text);
        for (const Observation& obs : observations_)
            if (std::search(obs.blob.begin(), obs.blob.end(), pat.begin(),
                            pat.end()) != obs.blob.end()) {
                ++plaintext_hits;
                break;
            }
    }
    detail = "observations=" + std::to_string(observations_.size()) +
             " linked=" + std::to_string(linked) + " plaintext=" +
             std::to_string(plaintext_hits);
    return !observations_.empty() && linked == 0 && plaintext_hits == 0;
}

void Engine::final_metrics() {
    std::uint64_t now = clock_.now_ms();
    // Names the report always carries, even at zero.
    metrics_.count("decommissioned_total", 0);
    metrics_.count("refresh_rejected_total", 0);
    metrics_.count("refresh_adopted_total", 0);
    metrics_.count("fallback_total", 0);
    metrics_.count("records_accepted_total", 0);

    metrics_.gauge("sent_chats", static_cast<double>(chat_sent_.size()));
    metrics_.gauge("delivered_chats",
                   static_cast<double>(chat_delivered_.size()));
    metrics_.gauge("delivery_rate",
                   chat_sent_.empty()
                       ? 1.0
                       : static_cast<double>(chat_delivered_.size()) /
                             static_cast<double>(chat_sent_.size()));

    std::size_t lost = 0;
    for (const auto& [hash, born] : born_) {
        if (born.envelope.expiry_ms() <= now) continue;
        SwarmId owner = registry_.swarm_for_key(born.envelope.recipient);
        auto members = owner == kNoSwarm ? std::vector<NodeId>{}
                                         : live_members(owner);
        if (members.empty()) {
            ++lost;
            continue;
        }
        std::size_t holders = 0;
        for (NodeId m : members)
            if (nodes_.at(m)->store.contains(hash)) ++holders;
        metrics_.observe("replication_factor",
                         static_cast<double>(holders));
        if (holders == 0) ++lost;
    }
    metrics_.gauge("records_lost", static_cast<double>(lost));

    std::size_t alive = 0;
    for (const auto& [id, node] : nodes_) {
        if (!node->alive) continue;
        ++alive;
        std::size_t bytes = 0;
        for (const StoredRecord& rec : node->store.all_records(now))
            bytes += envelope_payload(rec.envelope).size();
        metrics_.observe("storage_bytes", static_cast<double>(bytes));
        metrics_.observe("records_per_node",
                         static_cast<double>(node->store.size()));
    }
    metrics_.gauge("nodes_alive_final", static_cast<double>(alive));
    metrics_.gauge("swarms_final",
                   static_cast<double>(registry_.swarms().size()));
    metrics_.gauge("pending_final",
                   static_cast<double>(registry_.pending().size()));
    metrics_.gauge("observations_total",
                   static_cast<double>(observations_.size()));

    if (!metrics_.has("delivery_ms_median"))
        metrics_.gauge("delivery_ms_median", 0.0);
    if (!metrics_.has("replication_factor_mean"))
        metrics_.gauge("replication_factor_mean", 0.0);
    if (!metrics_.has("storage_bytes_mean"))
        metrics_.gauge("storage_bytes_mean", 0.0);
}

namespace {

std::string format_value(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

}  // namespace

std::vector<Engine::AssertResult> Engine::evaluate(
    const std::vector<Assertion>& asserts) {
    std::vector<AssertResult> out;
    for (const Assertion& a : asserts) {
        AssertResult res;
        switch (a.kind) {
            case Assertion::Kind::metric: {
                double v = metrics_.value(a.name);
                bool ok = false;
                if (a.op == "==") ok = v == a.value;
                else if (a.op == "!=") ok = v != a.value;
                else if (a.op == "<") ok = v < a.value;
                else if (a.op == "<=") ok = v <= a.value;
                else if (a.op == ">") ok = v > a.value;
                else if (a.op == ">=") ok = v >= a.value;
                res.text = "metric " + a.name + " " + a.op + " " +
                           format_value(a.value);
                res.pass = ok;
                res.detail = a.name + "=" + format_value(v);
                break;
            }
            case Assertion::Kind::log_contains:
            case Assertion::Kind::log_absent: {
                bool found = false;
                for (const std::string& line : log_)
                    if (line.find(a.name) != std::string::npos) {
                        found = true;
                        break;
                    }
                bool want = a.kind == Assertion::Kind::log_contains;
                res.text = std::string(want ? "log_contains " : "log_absent ") +
                           a.name;
                res.pass = found == want;
                res.detail = found ? "found" : "not_found";
                break;
            }
            case Assertion::Kind::delivered_all:
                res.text = "delivered_all";
                res.pass = check_delivered_all(res.detail);
                break;
            case Assertion::Kind::replication_full:
                res.text = "replication_full";
                res.pass = check_replication_full(res.detail);
                break;
            case Assertion::Kind::no_lost_records:
                res.text = "no_lost_records";
                res.pass = check_no_lost_records(res.detail);
                break;
            case Assertion::Kind::swarm_sizes_legal:
                res.text = "swarm_sizes_legal";
                res.pass = check_swarm_sizes(res.detail);
                break;
            case Assertion::Kind::onion_privacy:
                res.text = "onion_privacy";
                res.pass = check_onion_privacy(res.detail);
                break;
            case Assertion::Kind::decommissioned:
                res.text = "decommissioned " + std::to_string(a.node);
                res.pass = ledger_.is_decommissioned(a.node);
                res.detail = res.pass ? "yes" : "no";
                break;
            case Assertion::Kind::not_decommissioned:
                res.text = "not_decommissioned " + std::to_string(a.node);
                res.pass = !ledger_.is_decommissioned(a.node);
                res.detail = res.pass ? "clean" : "decommissioned";
                break;
        }
        out.push_back(std::move(res));
    }
    return out;
}

std::optional<Engine::NodeSummary> Engine::node_summary(NodeId id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) return std::nullopt;
    const Node& node = *it->second;
    NodeSummary s;
    s.id = id;
    s.alive = node.alive;
    s.cheater = node.cheater;
    auto swarm = registry_.swarm_of(id);
    s.swarm = swarm ? *swarm : kNoSwarm;
    s.records = node.store.size();
    for (const StoredRecord& rec : node.store.all_records(clock_.now_ms()))
        s.bytes += envelope_payload(rec.envelope).size();
    return s;
}

// ---------------------------------------------------------------------------
// CLI entry

int run_scenario_cli(const std::string& scenario_path,
                     std::optional<std::uint64_t> seed_override,
                     const std::string& metrics_out, const std::string& log_out,
                     bool quiet) {
    ParseError err;
    auto scenario = load_scenario(scenario_path, err);
    if (!scenario) {
        std::cerr << scenario_path << ":" << err.line << ": " << err.message
                  << "\n";
        return 1;
    }
    if (seed_override) scenario->config.seed = *seed_override;

    Engine engine(scenario->config);
    engine.run();
    auto results = engine.evaluate(scenario->assertions);

    if (!metrics_out.empty()) {
        std::ofstream f(metrics_out);
        f << engine.metrics().render();
    }
    if (!log_out.empty()) {
        std::ofstream f(log_out);
        f << engine.event_log_text();
    }

    if (!quiet) std::cout << engine.metrics().render();
    bool all_pass = true;
    for (const auto& res : results) {
        all_pass = all_pass && res.pass;
        std::cout << (res.pass ? "PASS " : "FAIL ") << res.text;
        if (!res.detail.empty()) std::cout << " [" << res.detail << "]";
        std::cout << "\n";
    }
    std::cout << "log_digest=" << engine.event_log_digest() << "\n";
    return all_pass ? 0 : 2;
}

}  // namespace swarmnet::sim
