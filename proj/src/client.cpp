// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#include "swarmnet/client.hpp"

namespace swarmnet {

RefreshOutcome refresh_nodelist(const NodeList& current,
                                const std::vector<NodeList>& responses) {
    RefreshOutcome out;
    out.list = current;
    if (responses.empty() || responses.front().entries.empty()) return out;
    for (std::size_t i = 1; i < responses.size(); ++i)
        if (!responses[i].same_entries(responses.front())) return out;
    out.adopted = true;
    out.list = responses.front();
    out.list.source = NodeList::Source::network;
    return out;
}

std::optional<SwarmId> SwarmCache::lookup(const PublicKey& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void SwarmCache::remember(const PublicKey& key, SwarmId swarm) {
    entries_[key] = swarm;
}

void SwarmCache::invalidate(const PublicKey& key) {
    entries_.erase(key);
}

void SwarmCache::drop_swarm(SwarmId swarm) {
    for (auto it = entries_.begin(); it != entries_.end();) {
        if (it->second == swarm)
            it = entries_.erase(it);
        else
            ++it;
    }
}

void ConversationState::peer_announced_listener(NodeId node) {
    listening_ = node;
    mode_ = DeliveryMode::sync_mode;
}

void ConversationState::peer_went_silent() {
    listening_.reset();
    mode_ = DeliveryMode::async_mode;
}

void ConversationState::sent_sync(std::uint64_t msg_id, std::uint64_t now_ms) {
    pending_[msg_id] = now_ms + kAckTimeoutMs;
}

bool ConversationState::on_ack(std::uint64_t msg_id) {
    return pending_.erase(msg_id) > 0;
}

bool ConversationState::on_ack_timeout(std::uint64_t msg_id) {
    if (pending_.erase(msg_id) == 0) return false;  // ack won the race
    // The listener is gone as far as we know; stop trusting it.
    peer_went_silent();
    return true;
}

std::optional<std::uint64_t> ConversationState::ack_deadline(
    std::uint64_t msg_id) const {
    auto it = pending_.find(msg_id);
    if (it == pending_.end()) return std::nullopt;
    return it->second;
}

std::vector<StoredRecord> InboxCursor::absorb(const RetrievePage& page) {
    std::vector<StoredRecord> fresh;
    for (const StoredRecord& rec : page.records) {
        if (seen_.insert(rec.hash).second) fresh.push_back(rec);
        cursor_ = rec.hash;
    }
    if (page.next_cursor) cursor_ = page.next_cursor;
    return fresh;
}

}  // namespace swarmnet
