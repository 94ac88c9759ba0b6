// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#include "swarmnet/registry.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "swarmnet/crypto.hpp"

namespace swarmnet {

namespace {

std::uint64_t seeded_hash(NodeId node, ByteView blockhash) {
    Bytes material = be64(node);
    append(material, blockhash);
    return read_u64_be(sha512(material).data());
}

void insert_sorted(std::vector<NodeId>& v, NodeId n) {
    v.insert(std::upper_bound(v.begin(), v.end(), n), n);
}

bool erase_value(std::vector<NodeId>& v, NodeId n) {
    auto it = std::find(v.begin(), v.end(), n);
    if (it == v.end()) return false;
    v.erase(it);
    return true;
}

}  // namespace

// Intermediate bookkeeping for one apply() call. Joins and dissolutions are
// recorded as they happen; the migration plan is assembled afterwards
// against the settled swarm set.
struct SwarmRegistry::Actions {
    std::vector<std::pair<SwarmId, NodeId>> joins;
    struct Dissolved {
        SwarmId id;
        std::vector<NodeId> members;
    };
    std::vector<Dissolved> dissolved;
    std::vector<SwarmId> created;
};

SwarmRegistry::SwarmRegistry(Ring ring, SwarmLimits limits)
    : ring_(ring), limits_(limits) {}

std::optional<SwarmId> SwarmRegistry::swarm_of(NodeId node) const {
    for (const auto& [id, members] : swarms_)
        if (std::binary_search(members.begin(), members.end(), node))
            return id;
    return std::nullopt;
}

std::vector<SwarmId> SwarmRegistry::swarm_ids() const {
    std::vector<SwarmId> ids;
    ids.reserve(swarms_.size());
    for (const auto& [id, members] : swarms_) ids.push_back(id);
    return ids;
}

std::size_t SwarmRegistry::node_count() const {
    std::size_t n = pending_.size();
    for (const auto& [id, members] : swarms_) n += members.size();
    return n;
}

SwarmId SwarmRegistry::swarm_for_point(std::uint64_t point) const {
    return ring_.assign_point(point, swarm_ids());
}

SwarmId SwarmRegistry::swarm_for_key(const PublicKey& key) const {
    return swarm_for_point(ring_.reduce_pubkey(key));
}

MigrationPlan SwarmRegistry::apply(const RegistryEvent& event,
                                   ByteView blockhash) {
    Actions acts;
    switch (event.kind) {
        case RegistryEvent::Kind::node_join:
            if (swarm_of(event.node) ||
                std::binary_search(pending_.begin(), pending_.end(),
                                   event.node))
                return {};  // already known
            insert_sorted(pending_, event.node);
            log_.push_back("join node=" + std::to_string(event.node));
            break;
        case RegistryEvent::Kind::node_leave: {
            bool removed = erase_value(pending_, event.node);
            for (auto& [id, members] : swarms_)
                removed = erase_value(members, event.node) || removed;
            if (!removed) return {};
            log_.push_back("leave node=" + std::to_string(event.node));
            break;
        }
    }
    stabilize(blockhash, acts);
    return finalize_plan(acts);
}

void SwarmRegistry::place_pending(ByteView blockhash, Actions& acts) {
    for (;;) {
        if (pending_.empty()) return;
        // Smallest swarm with room; ties broken by the node's seeded hash.
        std::vector<SwarmId> open;
        std::size_t smallest = limits_.n_max;
        for (const auto& [id, members] : swarms_) {
            if (members.size() >= limits_.n_max) continue;
            if (members.size() < smallest) {
                smallest = members.size();
                open.clear();
            }
            if (members.size() == smallest) open.push_back(id);
        }
        if (open.empty()) return;

        NodeId node = pending_.front();
        pending_.erase(pending_.begin());
        SwarmId target = open[seeded_hash(node, blockhash) % open.size()];
        insert_sorted(swarms_[target], node);
        acts.joins.emplace_back(target, node);
        log_.push_back("place node=" + std::to_string(node) +
                       " swarm=" + std::to_string(target));
    }
}

bool SwarmRegistry::fix_starving(ByteView blockhash, Actions& acts) {
    // First swarm under min, in ascending id order.
    for (const auto& [id, members] : swarms_) {
        if (members.size() >= limits_.n_min) continue;

        // A donor is any other swarm that can spare a node.
        SwarmId donor = kNoSwarm;
        std::size_t donor_size = 0;
        for (const auto& [did, dmembers] : swarms_) {
            if (did == id || dmembers.size() <= limits_.n_min) continue;
            if (dmembers.size() > donor_size) {
                donor_size = dmembers.size();
                donor = did;
            }
        }
        if (donor != kNoSwarm) {
            std::vector<NodeId>& from = swarms_[donor];
            NodeId pick = from.front();
            std::uint64_t best = 0;
            for (NodeId n : from) {
                std::uint64_t h = seeded_hash(n, blockhash);
                if (h >= best) {
                    best = h;
                    pick = n;
                }
            }
            erase_value(from, pick);
            insert_sorted(swarms_[id], pick);
            acts.joins.emplace_back(id, pick);
            log_.push_back("steal node=" + std::to_string(pick) +
                           " from=" + std::to_string(donor) +
                           " to=" + std::to_string(id));
            return true;
        }

        if (swarms_.size() > 1) {
            Actions::Dissolved d{id, swarms_.at(id)};
            for (NodeId n : d.members) insert_sorted(pending_, n);
            swarms_.erase(id);
            acts.dissolved.push_back(std::move(d));
            log_.push_back("dissolve swarm=" + std::to_string(id));
            return true;
        }
        // The sole remaining swarm runs under strength until nodes arrive.
        return false;
    }
    return false;
}

bool SwarmRegistry::create_swarms(ByteView blockhash, Actions& acts) {
    bool all_full = true;
    for (const auto& [id, members] : swarms_)
        if (members.size() < limits_.n_max) all_full = false;
    if (!all_full || pending_.size() < limits_.n_target) return false;

    // Seeded pick of the founding members.
    std::vector<NodeId> order = pending_;
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        auto ha = seeded_hash(a, blockhash);
        auto hb = seeded_hash(b, blockhash);
        return ha != hb ? ha < hb : a < b;
    });
    order.resize(limits_.n_target);

    SwarmId id = ring_.next_id(swarm_ids());
    std::vector<NodeId>& members = swarms_[id];
    std::string names;
    for (NodeId n : order) {
        erase_value(pending_, n);
        insert_sorted(members, n);
        acts.joins.emplace_back(id, n);
        names += (names.empty() ? "" : ",") + std::to_string(n);
    }
    acts.created.push_back(id);
    log_.push_back("create swarm=" + std::to_string(id) + " members=" + names);
    return true;
}

void SwarmRegistry::stabilize(ByteView blockhash, Actions& acts) {
    for (;;) {
        place_pending(blockhash, acts);
        if (fix_starving(blockhash, acts)) continue;
        if (create_swarms(blockhash, acts)) continue;
        return;
    }
}

MigrationPlan SwarmRegistry::finalize_plan(const Actions& acts) const {
    MigrationPlan plan;

    // Joins that survived to the settled state get the swarm's data pushed.
    for (const auto& [swarm, node] : acts.joins) {
        auto it = swarms_.find(swarm);
        if (it == swarms_.end()) continue;
        if (!std::binary_search(it->second.begin(), it->second.end(), node))
            continue;
        if (std::find(plan.pushes.begin(), plan.pushes.end(),
                      PushAll{swarm, node}) == plan.pushes.end())
            plan.pushes.push_back({swarm, node});
    }

    // A dissolved swarm scatters its records across every surviving swarm;
    // the lowest former member does the sending.
    for (const auto& d : acts.dissolved) {
        if (d.members.empty()) continue;
        NodeId source = *std::min_element(d.members.begin(), d.members.end());
        for (const auto& [sid, members] : swarms_)
            plan.routes.push_back({source, d.id, sid});
    }

    // A new swarm takes over the middle of the gap between its ring
    // neighbours, so those two hand over the records it now owns.
    if (!acts.created.empty() && swarms_.size() > 1) {
        for (SwarmId created : acts.created) {
            if (!swarms_.contains(created)) continue;
            SwarmId pred = kNoSwarm, succ = kNoSwarm;
            std::uint64_t pred_gap = 0, succ_gap = 0;
            for (const auto& [sid, members] : swarms_) {
                if (sid == created) continue;
                std::uint64_t to_new = ring_.forward(sid, created);
                std::uint64_t from_new = ring_.forward(created, sid);
                if (pred == kNoSwarm || to_new < pred_gap) {
                    pred = sid;
                    pred_gap = to_new;
                }
                if (succ == kNoSwarm || from_new < succ_gap) {
                    succ = sid;
                    succ_gap = from_new;
                }
            }
            for (SwarmId neighbour : {pred, succ}) {
                if (neighbour == kNoSwarm || neighbour == created) continue;
                const auto& members = swarms_.at(neighbour);
                if (members.empty()) continue;
                RouteRecords r{members.front(), neighbour, created};
                if (std::find(plan.routes.begin(), plan.routes.end(), r) ==
                    plan.routes.end())
                    plan.routes.push_back(r);
            }
        }
    }
    return plan;
}

std::string SwarmRegistry::export_snapshot() const {
    std::ostringstream out;
    for (const auto& [id, members] : swarms_) {
        out << "swarm " << id << ":";
        for (std::size_t i = 0; i < members.size(); ++i)
            out << (i ? "," : " ") << members[i];
        out << "\n";
    }
    if (!pending_.empty()) {
        out << "pending:";
        for (std::size_t i = 0; i < pending_.size(); ++i)
            out << (i ? "," : " ") << pending_[i];
        out << "\n";
    }
    return out.str();
}

namespace {

std::optional<std::vector<NodeId>> parse_node_list(std::string_view text) {
    std::vector<NodeId> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string_view tok = text.substr(
            pos, comma == std::string_view::npos ? comma : comma - pos);
        NodeId value = 0;
        auto [p, ec] =
            std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc() || p != tok.data() + tok.size())
            return std::nullopt;
        out.push_back(value);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace

std::optional<SwarmRegistry> SwarmRegistry::import_snapshot(
    std::string_view text, Ring ring, SwarmLimits limits) {
    SwarmRegistry reg(ring, limits);
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(
            pos, eol == std::string_view::npos ? eol : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        if (line.empty()) continue;

        if (line.starts_with("swarm ")) {
            std::size_t colon = line.find(':');
            if (colon == std::string_view::npos) return std::nullopt;
            std::string_view id_tok = line.substr(6, colon - 6);
            SwarmId id = 0;
            auto [p, ec] = std::from_chars(id_tok.data(),
                                           id_tok.data() + id_tok.size(), id);
            if (ec != std::errc() || p != id_tok.data() + id_tok.size())
                return std::nullopt;
            if (id >= ring.modulus()) return std::nullopt;
            std::string_view rest = line.substr(colon + 1);
            while (rest.starts_with(' ')) rest.remove_prefix(1);
            auto members = parse_node_list(rest);
            if (!members) return std::nullopt;
            std::sort(members->begin(), members->end());
            reg.swarms_[id] = std::move(*members);
        } else if (line.starts_with("pending:")) {
            std::string_view rest = line.substr(8);
            while (rest.starts_with(' ')) rest.remove_prefix(1);
            auto nodes = parse_node_list(rest);
            if (!nodes) return std::nullopt;
            std::sort(nodes->begin(), nodes->end());
            reg.pending_ = std::move(*nodes);
        } else {
            return std::nullopt;
        }
    }
    return reg;
}

std::pair<SwarmRegistry, MigrationPlan> rebalance(const SwarmRegistry& registry,
                                                  const RegistryEvent& event,
                                                  ByteView blockhash) {
    SwarmRegistry next = registry;
    MigrationPlan plan = next.apply(event, blockhash);
    return {std::move(next), std::move(plan)};
}

}  // namespace swarmnet
