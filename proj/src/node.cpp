#include "manet/node.hpp"

#include <algorithm>

namespace manet::aodv {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

SimTime to_sim(Timestamp t) {
    const unsigned __int128 ns = static_cast<unsigned __int128>(t.raw) * 1'000'000'000u + (1ull << 31);
    return SimTime::from_ns(static_cast<std::int64_t>(ns >> 32));
}

}  // namespace

Node::Node(NodeId self, Protocol protocol, ProtocolConstants constants)
    : self_(self), protocol_(protocol), constants_(constants) {
    if (protocol == Protocol::AodvSec) cache_.emplace(constants_.path_discovery_time(), constants_.cache_capacity);
}

std::size_t Node::queued(NodeId dest) const {
    auto it = queues_.find(dest);
    return it == queues_.end() ? 0 : it->second.size();
}

std::size_t Node::queued_total() const {
    std::size_t n = 0;
    for (const auto& [d, q] : queues_) n += q.size();
    return n;
}

void Node::send_unicast(NodeContext& ctx, NodeId to, wire::Message msg) {
    count();
    ctx.unicast(self_, to, self_, std::move(msg), false);
}

void Node::send_broadcast(NodeContext& ctx, wire::Message msg) {
    count();
    ctx.broadcast(self_, self_, std::move(msg), false);
}

void Node::trace_route_write(NodeContext& ctx, const RouteEntry& e, std::uint64_t frame) {
    TraceRecord r;
    r.time = ctx.now();
    r.node = self_;
    r.kind = TraceKind::RouteWrite;
    r.target = e.destination;
    r.next_hop = e.next_hop;
    r.hops = e.hop_count;
    r.dest_seq = e.dest_seq;
    r.expiry = e.expiry;
    r.frame = frame;
    ctx.trace(std::move(r));
}

void Node::trace_cache(NodeContext& ctx, TraceKind kind, const sec::RreqAckCacheEntry& e, std::uint64_t frame) {
    TraceRecord r;
    r.time = ctx.now();
    r.node = self_;
    r.kind = kind;
    r.peer = e.nb;
    r.target = e.d;
    r.stamp = e.t;
    r.flag = e.f;
    r.expiry = e.ex;
    r.frame = frame;
    ctx.trace(std::move(r));
}

void Node::purge(NodeContext& ctx) {
    const SimTime now = ctx.now();
    const SimTime horizon = constants_.path_discovery_time();
    std::erase_if(seen_, [&](const auto& kv) { return now - kv.second > horizon; });
    if (!cache_) return;
    count();
    for (const auto& e : cache_->purge_expired(now)) {
        count();
        trace_cache(ctx, TraceKind::CachePurge, e, 0);
    }
}

void Node::receive(NodeContext& ctx, const wire::Frame& frame) {
    purge(ctx);
    std::visit(overloaded{
                   [&](const wire::RreqMessage& m) { handle_rreq(ctx, frame, m); },
                   [&](const wire::RrepMessage& m) { handle_rrep(ctx, frame, m); },
                   [&](const wire::RerrMessage& m) { handle_rerr(ctx, frame, m); },
                   [&](const wire::RreqAckMessage& m) { handle_rreq_ack(ctx, frame, m); },
                   [&](const wire::DataPacket& m) { forward_data(ctx, frame, m); },
               },
               frame.body);
}

void Node::overhear(NodeContext&, const wire::Frame&, NodeId) {}

void Node::on_timer(NodeContext& ctx, const Timer& timer) {
    purge(ctx);
    if (timer.kind != Timer::Kind::Discovery) return;
    auto it = pending_.find(timer.dest);
    if (it == pending_.end() || it->second.generation != timer.generation) return;
    const SimTime now = ctx.now();
    if (table_.active(timer.dest, now) != nullptr) {
        pending_.erase(it);
        flush_queue(ctx, timer.dest);
        return;
    }
    if (it->second.retries < constants_.rreq_retries) {
        const std::uint32_t retries = it->second.retries + 1;
        pending_.erase(it);
        originate_discovery(ctx, timer.dest);
        pending_[timer.dest].retries = retries;
        // originate_discovery armed the timer for retry 0; re-arm with backoff
        Pending& p = pending_[timer.dest];
        p.generation = ++generation_;
        ctx.set_timer(self_, now + constants_.net_traversal_time() * (std::int64_t{1} << retries),
                      Timer{Timer::Kind::Discovery, timer.dest, p.generation, 0});
        return;
    }
    pending_.erase(it);
    TraceRecord r;
    r.time = now;
    r.node = self_;
    r.kind = TraceKind::DiscoveryFailed;
    r.target = timer.dest;
    ctx.trace(std::move(r));
    auto q = queues_.find(timer.dest);
    if (q != queues_.end()) {
        for (const auto& pkt : q->second) drop_data(ctx, pkt, DropReason::DiscoveryFailed);
        queues_.erase(q);
    }
}

void Node::shutdown(NodeContext& ctx) {
    pending_.clear();
    for (const auto& [dest, q] : queues_)
        for (const auto& pkt : q) drop_data(ctx, pkt, DropReason::LinkFailure);
    queues_.clear();
}

void Node::originate_discovery(NodeContext& ctx, NodeId dest) {
    if (pending_.contains(dest)) return;
    const SimTime now = ctx.now();
    wire::RreqMessage rreq;
    rreq.ack_required = is_sec();
    rreq.broadcast_id = ++rreq_id_;
    rreq.destination = dest;
    if (const RouteEntry* e = table_.find(dest); e != nullptr && e->seq_valid) {
        rreq.destination_seq = e->dest_seq;
    } else {
        rreq.unknown_seq = true;
    }
    rreq.originator = self_;
    rreq.originator_seq = ++own_seq_;
    rreq.timestamp = Timestamp::from_sim(now);
    rreq.previous_node = self_;
    seen_[{self_, rreq.broadcast_id}] = now;

    Pending& p = pending_[dest];
    p.generation = ++generation_;
    ctx.set_timer(self_, now + constants_.net_traversal_time(), Timer{Timer::Kind::Discovery, dest, p.generation, 0});

    TraceRecord r;
    r.time = now;
    r.node = self_;
    r.kind = TraceKind::DiscoveryStart;
    r.target = dest;
    r.stamp = rreq.timestamp;
    ctx.trace(std::move(r));
    send_broadcast(ctx, rreq);
}

void Node::reply(NodeContext& ctx, const wire::Frame& frame, const wire::RreqMessage& rreq, wire::RrepMessage rrep) {
    if (is_sec() && rreq.ack_required) send_unicast(ctx, frame.net_sender, sec::make_rreq_ack(self_, rreq));
    send_unicast(ctx, frame.net_sender, rrep);
}

void Node::handle_rreq(NodeContext& ctx, const wire::Frame& frame, const wire::RreqMessage& rreq) {
    const SimTime now = ctx.now();
    const auto key = std::make_pair(rreq.originator, rreq.broadcast_id);
    count();
    if (seen_.contains(key)) {
        if (is_sec()) {
            count();
            if (auto e = sec::on_duplicate_rreq(*cache_, self_, frame.net_sender, rreq, now)) {
                count();
                trace_cache(ctx, TraceKind::CacheInsert, *e, frame.id);
            }
        }
        TraceRecord r;
        r.time = now;
        r.node = self_;
        r.kind = TraceKind::Drop;
        r.msg = wire::MsgType::Rreq;
        r.reason = DropReason::Duplicate;
        r.frame = frame.id;
        ctx.trace(std::move(r));
        return;
    }
    seen_[key] = now;

    count();
    const RouteCandidate reverse{rreq.originator, frame.net_sender, rreq.hop_count + 1, rreq.originator_seq, true};
    if (table_.update(reverse, now, constants_.active_route_timeout))
        trace_route_write(ctx, *table_.find(rreq.originator), frame.id);
    else
        table_.refresh(rreq.originator, now, constants_.active_route_timeout);

    count();
    if (rreq.destination == self_) {
        if (!rreq.unknown_seq && seq_newer(rreq.destination_seq, own_seq_)) own_seq_ = rreq.destination_seq;
        ++own_seq_;
        wire::RrepMessage rrep;
        rrep.hop_count = 0;
        rrep.destination = self_;
        rrep.destination_seq = own_seq_;
        rrep.originator = rreq.originator;
        rrep.lifetime_ms = static_cast<std::uint32_t>(constants_.active_route_timeout.ns() / 1'000'000);
        rrep.timestamp = rreq.timestamp;
        reply(ctx, frame, rreq, rrep);
        return;
    }

    RouteEntry* fwd = table_.active(rreq.destination, now);
    if (fwd != nullptr && fwd->seq_valid && !rreq.dest_only &&
        (rreq.unknown_seq || !seq_newer(rreq.destination_seq, fwd->dest_seq))) {
        wire::RrepMessage rrep;
        rrep.hop_count = fwd->hop_count;
        rrep.destination = rreq.destination;
        rrep.destination_seq = fwd->dest_seq;
        rrep.originator = rreq.originator;
        rrep.lifetime_ms = static_cast<std::uint32_t>((fwd->expiry - now).ns() / 1'000'000);
        rrep.timestamp = rreq.timestamp;
        fwd->precursors.insert(frame.net_sender);
        if (RouteEntry* back = table_.find(rreq.originator)) back->precursors.insert(fwd->next_hop);
        reply(ctx, frame, rreq, rrep);
        return;
    }

    if (rreq.hop_count + 1 >= constants_.net_diameter) return;
    wire::RreqMessage out = rreq;
    out.hop_count = rreq.hop_count + 1;
    out.previous_node = frame.net_sender;
    if (const RouteEntry* known = table_.find(rreq.destination); known != nullptr && known->seq_valid) {
        if (out.unknown_seq || seq_newer(known->dest_seq, out.destination_seq)) {
            out.destination_seq = known->dest_seq;
            out.unknown_seq = false;
        }
    }
    send_broadcast(ctx, out);
}

void Node::handle_rrep(NodeContext& ctx, const wire::Frame& frame, const wire::RrepMessage& rrep) {
    const SimTime now = ctx.now();
    if (is_sec()) {
        count();
        if (sec::validate_rrep(*cache_, frame.net_sender, rrep, now) == sec::Verdict::Discard) {
            TraceRecord r;
            r.time = now;
            r.node = self_;
            r.kind = TraceKind::RrepDiscard;
            r.peer = frame.net_sender;
            r.target = rrep.destination;
            r.stamp = rrep.timestamp;
            r.frame = frame.id;
            r.note = "no-cache-entry";
            ctx.trace(std::move(r));
            return;
        }
        TraceRecord hit;
        hit.time = now;
        hit.node = self_;
        hit.kind = TraceKind::CacheHit;
        hit.peer = frame.net_sender;
        hit.target = rrep.destination;
        hit.stamp = rrep.timestamp;
        hit.frame = frame.id;
        ctx.trace(std::move(hit));
    }
    if (rrep.destination == self_) return;

    const bool for_me = rrep.originator == self_;
    count();
    RouteEntry* back = for_me ? nullptr : table_.active(rrep.originator, now);
    if (!for_me && back == nullptr) {
        TraceRecord r;
        r.time = now;
        r.node = self_;
        r.kind = TraceKind::Drop;
        r.msg = wire::MsgType::Rrep;
        r.reason = DropReason::NoRoute;
        r.target = rrep.originator;
        r.frame = frame.id;
        ctx.trace(std::move(r));
        return;
    }

    count();
    const RouteCandidate cand{rrep.destination, frame.net_sender, rrep.hop_count + 1, rrep.destination_seq, true};
    const bool accepted = table_.update(cand, now, constants_.active_route_timeout);
    if (accepted) trace_route_write(ctx, *table_.find(rrep.destination), frame.id);

    if (for_me) {
        count();
        if (pending_.erase(rrep.destination) > 0 || queued(rrep.destination) > 0) flush_queue(ctx, rrep.destination);
        return;
    }
    if (!accepted) return;
    RouteEntry& route = *table_.find(rrep.destination);
    route.precursors.insert(back->next_hop);
    back->precursors.insert(frame.net_sender);
    back->expiry = std::max(back->expiry, now + constants_.active_route_timeout);
    wire::RrepMessage out = rrep;
    out.hop_count = rrep.hop_count + 1;
    send_unicast(ctx, back->next_hop, out);
}

void Node::handle_rreq_ack(NodeContext& ctx, const wire::Frame& frame, const wire::RreqAckMessage& ack) {
    if (!is_sec()) return;
    count();
    const auto e = sec::recv_rreq_ack(*cache_, ack, ctx.now());
    trace_cache(ctx, TraceKind::CacheInsert, e, frame.id);
}

void Node::send_rerr(NodeContext& ctx, std::vector<wire::Unreachable> lost, const std::set<NodeId>& to) {
    if (lost.empty()) return;
    if (lost.size() > 0xFF) lost.resize(0xFF);
    for (NodeId n : to) {
        if (n == self_) continue;
        send_unicast(ctx, n, wire::RerrMessage{lost});
    }
}

void Node::handle_rerr(NodeContext& ctx, const wire::Frame& frame, const wire::RerrMessage& rerr) {
    std::vector<wire::Unreachable> lost;
    std::set<NodeId> upstream;
    for (const auto& u : rerr.unreachable) {
        count();
        if (!table_.invalidate_if_via(u.destination, frame.net_sender, u.destination_seq)) continue;
        const RouteEntry& e = *table_.find(u.destination);
        TraceRecord r;
        r.time = ctx.now();
        r.node = self_;
        r.kind = TraceKind::RouteInvalidate;
        r.target = u.destination;
        r.next_hop = frame.net_sender;
        r.dest_seq = e.dest_seq;
        r.frame = frame.id;
        ctx.trace(std::move(r));
        lost.push_back({u.destination, e.dest_seq});
        upstream.insert(e.precursors.begin(), e.precursors.end());
    }
    send_rerr(ctx, std::move(lost), upstream);
}

void Node::link_broken(NodeContext& ctx, NodeId neighbor) {
    std::set<NodeId> upstream;
    auto lost = table_.invalidate_via(neighbor, ctx.now());
    for (const auto& u : lost) {
        const RouteEntry& e = *table_.find(u.destination);
        upstream.insert(e.precursors.begin(), e.precursors.end());
        TraceRecord r;
        r.time = ctx.now();
        r.node = self_;
        r.kind = TraceKind::RouteInvalidate;
        r.target = u.destination;
        r.next_hop = neighbor;
        r.dest_seq = e.dest_seq;
        r.note = "link-failure";
        ctx.trace(std::move(r));
    }
    upstream.erase(neighbor);
    send_rerr(ctx, std::move(lost), upstream);
}

void Node::on_unicast_failure(NodeContext& ctx, NodeId to, const wire::Message& msg) {
    if (const auto* pkt = std::get_if<wire::DataPacket>(&msg)) drop_data(ctx, *pkt, DropReason::LinkFailure, to);
    link_broken(ctx, to);
}

void Node::drop_data(NodeContext& ctx, const wire::DataPacket& pkt, DropReason reason, NodeId at_hop) {
    TraceRecord r;
    r.time = ctx.now();
    r.node = self_;
    r.kind = TraceKind::Drop;
    r.reason = reason;
    r.flow = pkt.flow_id;
    r.seq = pkt.seq;
    r.peer = pkt.src;
    r.target = pkt.dst;
    r.next_hop = at_hop;
    ctx.trace(std::move(r));
}

void Node::transmit_data(NodeContext& ctx, wire::DataPacket pkt, RouteEntry& route, NodeId prev_hop) {
    const SimTime now = ctx.now();
    route.expiry = std::max(route.expiry, now + constants_.active_route_timeout);
    if (prev_hop.specified()) route.precursors.insert(prev_hop);
    const NodeId next = route.next_hop;
    table_.refresh(pkt.src, now, constants_.active_route_timeout);
    ctx.unicast(self_, next, self_, pkt, false);
}

void Node::flush_queue(NodeContext& ctx, NodeId dest) {
    auto it = queues_.find(dest);
    if (it == queues_.end()) return;
    std::deque<wire::DataPacket> q = std::move(it->second);
    queues_.erase(it);
    for (auto& pkt : q) {
        RouteEntry* route = table_.active(dest, ctx.now());
        if (route == nullptr) {
            queues_[dest].push_back(pkt);
            continue;
        }
        transmit_data(ctx, pkt, *route, {});
    }
    if (queued(dest) > 0) originate_discovery(ctx, dest);
}

void Node::send_data(NodeContext& ctx, wire::DataPacket pkt) {
    TraceRecord r;
    r.time = ctx.now();
    r.node = self_;
    r.kind = TraceKind::DataGenerated;
    r.flow = pkt.flow_id;
    r.seq = pkt.seq;
    r.peer = pkt.src;
    r.target = pkt.dst;
    r.bytes = pkt.payload_len;
    ctx.trace(std::move(r));

    if (table_.active(pkt.dst, ctx.now()) != nullptr) {
        flush_queue(ctx, pkt.dst);
        if (RouteEntry* route = table_.active(pkt.dst, ctx.now()); route != nullptr && queued(pkt.dst) == 0) {
            transmit_data(ctx, pkt, *route, {});
            return;
        }
    }
    auto& q = queues_[pkt.dst];
    if (q.size() >= constants_.data_queue_limit) {
        drop_data(ctx, pkt, DropReason::QueueOverflow);
    } else {
        q.push_back(pkt);
    }
    originate_discovery(ctx, pkt.dst);
}

void Node::forward_data(NodeContext& ctx, const wire::Frame& frame, wire::DataPacket pkt) {
    const SimTime now = ctx.now();
    if (pkt.dst == self_) {
        TraceRecord r;
        r.time = now;
        r.node = self_;
        r.kind = TraceKind::DataDelivered;
        r.flow = pkt.flow_id;
        r.seq = pkt.seq;
        r.peer = pkt.src;
        r.bytes = pkt.payload_len;
        r.sent_at = to_sim(pkt.sent_at);
        r.hops = constants_.ttl_data - std::min<std::uint32_t>(pkt.ttl, constants_.ttl_data) + 1;
        ctx.trace(std::move(r));
        return;
    }
    if (pkt.ttl <= 1) {
        drop_data(ctx, pkt, DropReason::Ttl);
        return;
    }
    --pkt.ttl;
    RouteEntry* route = table_.active(pkt.dst, now);
    if (route == nullptr) {
        drop_data(ctx, pkt, DropReason::NoRoute);
        std::set<NodeId> upstream{frame.net_sender};
        std::uint32_t seq = 0;
        if (const RouteEntry* stale = table_.find(pkt.dst)) {
            upstream.insert(stale->precursors.begin(), stale->precursors.end());
            seq = stale->dest_seq;
        }
        send_rerr(ctx, {{pkt.dst, seq}}, upstream);
        return;
    }
    on_relay(ctx, pkt);
    transmit_data(ctx, pkt, *route, frame.net_sender);
}

}  // namespace manet::aodv
