// Copyright 2026 the swarmnet contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "swarmnet/registry.hpp"
#include "swarmnet/store.hpp"

namespace swarmnet {

// Client-side machinery that does not touch the network directly: the node
// directory and its unanimity refresh rule, the swarm lookup cache, the
// async/sync delivery mode per conversation, and receive-side dedup.

struct NodeEndpoint {
    NodeId id = 0;
    PublicKey key;
    bool operator==(const NodeEndpoint&) const = default;
};

struct NodeList {
    enum class Source { seed, network };
    Source source = Source::seed;
    std::vector<NodeEndpoint> entries;

    bool same_entries(const NodeList& other) const {
        return entries == other.entries;
    }
};

// A refreshed list is adopted only when every queried node returned the
// same non-empty answer; any disagreement keeps the current list.
struct RefreshOutcome {
    bool adopted = false;
    NodeList list;
};
RefreshOutcome refresh_nodelist(const NodeList& current,
                                const std::vector<NodeList>& responses);

// Which swarm holds a key, memoised. Entries are dropped when a query
// learns the cached swarm no longer exists.
class SwarmCache {
public:
    std::optional<SwarmId> lookup(const PublicKey& key) const;
    void remember(const PublicKey& key, SwarmId swarm);
    void invalidate(const PublicKey& key);
    void drop_swarm(SwarmId swarm);  // swarm disappeared; forget all entries
    std::size_t size() const { return entries_.size(); }

private:
    std::map<PublicKey, SwarmId> entries_;
};

// Per-conversation delivery mode. Async is the default store-and-forward
// path. When the peer advertises a listening node, traffic switches to
// direct sync delivery with acknowledgements; a missed ack falls back to
// async for that message and drops the session back to async mode.
inline constexpr std::uint64_t kAckTimeoutMs = 10 * 1000;

enum class DeliveryMode { async_mode, sync_mode };

class ConversationState {
public:
    DeliveryMode mode() const { return mode_; }
    std::optional<NodeId> listening_node() const { return listening_; }

    // Peer status piggybacks on decrypted payloads.
    void peer_announced_listener(NodeId node);
    void peer_went_silent();

    // Sync send bookkeeping: register the send, then either the ack arrives
    // or the timeout fires. on_ack_timeout() reports whether the caller
    // must fall back to async for that message.
    void sent_sync(std::uint64_t msg_id, std::uint64_t now_ms);
    bool on_ack(std::uint64_t msg_id);
    bool on_ack_timeout(std::uint64_t msg_id);
    std::optional<std::uint64_t> ack_deadline(std::uint64_t msg_id) const;
    std::size_t awaiting_ack() const { return pending_.size(); }

private:
    DeliveryMode mode_ = DeliveryMode::async_mode;
    std::optional<NodeId> listening_;
    std::map<std::uint64_t, std::uint64_t> pending_;  // msg -> deadline
};

// Receive-side bookkeeping: retrieval pagination cursor plus the set of
// record hashes already surfaced, so redeliveries and replication overlap
// never reach the application twice.
class InboxCursor {
public:
    // Returns the records not yet seen and advances the cursor.
    std::vector<StoredRecord> absorb(const RetrievePage& page);
    const std::optional<Bytes32>& cursor() const { return cursor_; }
    void reset_cursor() { cursor_.reset(); }
    bool seen(const Bytes32& hash) const { return seen_.contains(hash); }
    std::size_t seen_count() const { return seen_.size(); }

private:
    std::optional<Bytes32> cursor_;
    std::set<Bytes32> seen_;
};

}  // namespace swarmnet
