#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "manet/types.hpp"
#include "manet/wire.hpp"

namespace manet::sec {

/// One witnessed route discovery: the neighbor an RREP may legitimately come
/// from, the discovery's destination and RREQ timestamp.
struct RreqAckCacheEntry {
    NodeId nb;
    NodeId d;
    Timestamp t;
    bool f = false;  // false: learned from a duplicate RREQ, true: from an RREQ-ACK
    SimTime ex;

    bool operator==(const RreqAckCacheEntry&) const = default;
};

/// Keyed by (nb, d, t). An entry is usable while now <= ex and is purged once
/// now > ex. When full, the entry with the earliest expiry is evicted.
class RreqAckCache {
public:
    explicit RreqAckCache(SimTime lifetime, std::size_t capacity = 4096);

    /// Inserts or refreshes; ex is always now + lifetime.
    const RreqAckCacheEntry& upsert(NodeId nb, NodeId d, Timestamp t, bool f, SimTime now);

    std::optional<RreqAckCacheEntry> lookup(NodeId nb, NodeId d, Timestamp t, SimTime now) const;

    /// Removes entries with ex < now; returns them in expiry order.
    std::vector<RreqAckCacheEntry> purge_expired(SimTime now);

    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    SimTime lifetime() const { return lifetime_; }
    std::vector<RreqAckCacheEntry> entries() const;

private:
    using Key = std::tuple<std::uint32_t, std::uint32_t, std::uint64_t>;
    static Key key_of(NodeId nb, NodeId d, Timestamp t) { return {nb.addr, d.addr, t.raw}; }

    SimTime lifetime_;
    std::size_t capacity_;
    std::map<Key, RreqAckCacheEntry> entries_;
    std::set<std::pair<SimTime, Key>> by_expiry_;
};

enum class Verdict { Accept, Discard };

/// Builds the acknowledgement a replying node sends ahead of its RREP.
wire::RreqAckMessage make_rreq_ack(NodeId self, const wire::RreqMessage& rreq);

/// Duplicate-RREQ hook: when the duplicate names this node as its previous
/// hop, the sender is recorded as a neighbor that re-flooded our request.
std::optional<RreqAckCacheEntry> on_duplicate_rreq(RreqAckCache& cache, NodeId self, NodeId net_sender,
                                                   const wire::RreqMessage& rreq, SimTime now);

/// Stores an incoming RREQ-ACK unconditionally.
RreqAckCacheEntry recv_rreq_ack(RreqAckCache& cache, const wire::RreqAckMessage& ack, SimTime now);

/// Accepts an RREP only if an unexpired entry matches the sender, the RREP
/// destination and the RREP's RREQ timestamp exactly.
Verdict validate_rrep(const RreqAckCache& cache, NodeId net_sender, const wire::RrepMessage& rrep, SimTime now);

}  // namespace manet::sec
