#include "manet/rreq_ack_cache.hpp"

namespace manet::sec {

RreqAckCache::RreqAckCache(SimTime lifetime, std::size_t capacity) : lifetime_(lifetime), capacity_(capacity) {}

const RreqAckCacheEntry& RreqAckCache::upsert(NodeId nb, NodeId d, Timestamp t, bool f, SimTime now) {
    const Key key = key_of(nb, d, t);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
        by_expiry_.erase({it->second.ex, key});
    } else if (capacity_ > 0 && entries_.size() >= capacity_) {
        auto oldest = by_expiry_.begin();
        entries_.erase(oldest->second);
        by_expiry_.erase(oldest);
    }
    RreqAckCacheEntry& e = entries_[key];
    e = RreqAckCacheEntry{nb, d, t, f, now + lifetime_};
    by_expiry_.insert({e.ex, key});
    return e;
}

std::optional<RreqAckCacheEntry> RreqAckCache::lookup(NodeId nb, NodeId d, Timestamp t, SimTime now) const {
    auto it = entries_.find(key_of(nb, d, t));
    if (it == entries_.end() || now > it->second.ex) return std::nullopt;
    return it->second;
}

std::vector<RreqAckCacheEntry> RreqAckCache::purge_expired(SimTime now) {
    std::vector<RreqAckCacheEntry> removed;
    while (!by_expiry_.empty() && by_expiry_.begin()->first < now) {
        auto it = entries_.find(by_expiry_.begin()->second);
        removed.push_back(it->second);
        entries_.erase(it);
        by_expiry_.erase(by_expiry_.begin());
    }
    return removed;
}

std::vector<RreqAckCacheEntry> RreqAckCache::entries() const {
    std::vector<RreqAckCacheEntry> out;
    out.reserve(entries_.size());
    for (const auto& [key, e] : entries_) out.push_back(e);
    return out;
}

wire::RreqAckMessage make_rreq_ack(NodeId self, const wire::RreqMessage& rreq) {
    return wire::RreqAckMessage{self, rreq.destination, rreq.timestamp};
}

std::optional<RreqAckCacheEntry> on_duplicate_rreq(RreqAckCache& cache, NodeId self, NodeId net_sender,
                                                   const wire::RreqMessage& rreq, SimTime now) {
    if (!rreq.ack_required || rreq.previous_node != self) return std::nullopt;
    return cache.upsert(net_sender, rreq.destination, rreq.timestamp, false, now);
}

RreqAckCacheEntry recv_rreq_ack(RreqAckCache& cache, const wire::RreqAckMessage& ack, SimTime now) {
    return cache.upsert(ack.own_address, ack.destination, ack.timestamp, true, now);
}

Verdict validate_rrep(const RreqAckCache& cache, NodeId net_sender, const wire::RrepMessage& rrep, SimTime now) {
    return cache.lookup(net_sender, rrep.destination, rrep.timestamp, now) ? Verdict::Accept : Verdict::Discard;
}

}  // namespace manet::sec
