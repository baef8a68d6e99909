#include "manet/adversary.hpp"

#include <algorithm>
#include <array>

namespace manet::adv {

namespace {

constexpr std::array kKindNames{"RC", "RD", "RI", "BH"};
constexpr std::uint32_t kMaxLaunchAttempts = 30;
const SimTime kRetryGap = SimTime::from_ms(1000);

}  // namespace

const char* name_of(AttackKind k) { return kKindNames.at(static_cast<std::size_t>(k)); }

bool parse_attack_kind(const std::string& s, AttackKind& out) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i)
        if (s == kKindNames[i]) {
            out = static_cast<AttackKind>(i);
            return true;
        }
    return false;
}

Adversary::Adversary(NodeId self, Protocol protocol, ProtocolConstants constants, std::vector<AttackSpec> attacks,
                     NodeId phantom)
    : Node(self, protocol, constants), attacks_(std::move(attacks)), phantom_(phantom) {}

void Adversary::arm(aodv::NodeContext& ctx) {
    for (std::uint32_t i = 0; i < attacks_.size(); ++i)
        ctx.set_timer(self_, attacks_[i].start, aodv::Timer{aodv::Timer::Kind::Attack, {}, 0, i});
}

bool Adversary::blackhole_active(SimTime now) const {
    return std::any_of(attacks_.begin(), attacks_.end(),
                       [&](const AttackSpec& a) { return a.kind == AttackKind::Blackhole && now >= a.start; });
}

bool Adversary::in_range(NodeId n, SimTime now) const {
    auto it = heard_.find(n);
    return it != heard_.end() && now - it->second <= constants_.active_route_timeout;
}

std::uint32_t Adversary::known_seq(NodeId dst) const {
    std::uint32_t s = 0;
    if (auto it = seq_seen_.find(dst); it != seq_seen_.end()) s = it->second;
    if (const auto* e = table_.find(dst); e != nullptr && e->seq_valid && aodv::seq_newer(e->dest_seq, s))
        s = e->dest_seq;
    return s;
}

void Adversary::learn(aodv::NodeContext& ctx, const wire::Frame& frame, NodeId intended) {
    const SimTime now = ctx.now();
    heard_[frame.link_sender] = now;
    auto note_seq = [&](NodeId d, std::uint32_t s) {
        auto [it, fresh] = seq_seen_.try_emplace(d, s);
        if (!fresh && aodv::seq_newer(s, it->second)) it->second = s;
    };
    if (const auto* rreq = std::get_if<wire::RreqMessage>(&frame.body)) {
        note_seq(rreq->originator, rreq->originator_seq);
        if (!rreq->unknown_seq) note_seq(rreq->destination, rreq->destination_seq);
        last_stamp_ = rreq->timestamp;
    } else if (const auto* rrep = std::get_if<wire::RrepMessage>(&frame.body)) {
        note_seq(rrep->destination, rrep->destination_seq);
        last_stamp_ = rrep->timestamp;
    } else if (const auto* pkt = std::get_if<wire::DataPacket>(&frame.body)) {
        flow_hops_[{pkt->src, pkt->dst}][frame.link_sender] = {intended, now};
    }
}

PathKnowledge Adversary::path_for(NodeId src, NodeId dst, SimTime now) const {
    PathKnowledge p;
    auto it = flow_hops_.find({src, dst});
    if (it == flow_hops_.end()) return p;
    std::map<NodeId, NodeId> next;
    std::set<NodeId> has_pred;
    for (const auto& [from, hop] : it->second) {
        if (now - hop.heard > constants_.active_route_timeout) continue;
        next[from] = hop.next;
        has_pred.insert(hop.next);
    }
    auto walk = [&](NodeId start) {
        std::vector<NodeId> nodes;
        std::set<NodeId> visited;
        NodeId cur = start;
        while (visited.insert(cur).second) {
            nodes.push_back(cur);
            if (cur == dst) break;
            auto n = next.find(cur);
            if (n == next.end()) break;
            cur = n->second;
        }
        return nodes;
    };
    if (next.contains(src)) {
        p.nodes = walk(src);
        p.from_source = true;
        return p;
    }
    // Source out of earshot: take the longest chain starting at a node
    // nobody was heard forwarding to.
    for (const auto& [from, to] : next) {
        if (has_pred.contains(from)) continue;
        auto nodes = walk(from);
        if (nodes.size() > p.nodes.size()) p.nodes = std::move(nodes);
    }
    return p;
}

void Adversary::overhear(aodv::NodeContext& ctx, const wire::Frame& frame, NodeId intended) {
    learn(ctx, frame, intended);
}

void Adversary::receive(aodv::NodeContext& ctx, const wire::Frame& frame) {
    learn(ctx, frame, self_);
    const SimTime now = ctx.now();
    if (blackhole_active(now)) {
        if (const auto* rreq = std::get_if<wire::RreqMessage>(&frame.body);
            rreq != nullptr && rreq->originator != self_ && rreq->destination != self_) {
            if (!answered_.insert({rreq->originator, rreq->broadcast_id}).second) return;
            wire::RrepMessage rrep;
            rrep.hop_count = 1;
            rrep.destination = rreq->destination;
            rrep.destination_seq = rreq->destination_seq + kBlackholeSeqBoost;
            rrep.originator = rreq->originator;
            rrep.lifetime_ms = static_cast<std::uint32_t>(constants_.active_route_timeout.ns() / 1'000'000);
            rrep.timestamp = rreq->timestamp;
            ++counters_.forged;
            TraceRecord r;
            r.time = now;
            r.node = self_;
            r.kind = TraceKind::AttackLaunched;
            r.msg = wire::MsgType::Rrep;
            r.peer = frame.net_sender;
            r.target = rreq->destination;
            r.dest_seq = rrep.destination_seq;
            r.note = "BH";
            ctx.trace(std::move(r));
            ctx.unicast(self_, frame.net_sender, self_, rrep, true);
            return;
        }
        if (const auto* pkt = std::get_if<wire::DataPacket>(&frame.body); pkt != nullptr && pkt->dst != self_) {
            ++counters_.swallowed;
            TraceRecord r;
            r.time = now;
            r.node = self_;
            r.kind = TraceKind::Swallow;
            r.flow = pkt->flow_id;
            r.seq = pkt->seq;
            ctx.trace(std::move(r));
            drop_data(ctx, *pkt, DropReason::Blackhole);
            return;
        }
    }
    Node::receive(ctx, frame);
}

void Adversary::on_relay(aodv::NodeContext& ctx, const wire::DataPacket& pkt) {
    if (const auto* route = table_.find(pkt.dst)) flow_hops_[{pkt.src, pkt.dst}][self_] = {route->next_hop, ctx.now()};
    ++counters_.snooped;
    TraceRecord r;
    r.time = ctx.now();
    r.node = self_;
    r.kind = TraceKind::Snoop;
    r.flow = pkt.flow_id;
    r.seq = pkt.seq;
    ctx.trace(std::move(r));
}

void Adversary::on_timer(aodv::NodeContext& ctx, const aodv::Timer& timer) {
    if (timer.kind != aodv::Timer::Kind::Attack) {
        Node::on_timer(ctx, timer);
        return;
    }
    const AttackSpec& spec = attacks_.at(timer.index);
    const SimTime now = ctx.now();
    bool launched = true;
    switch (spec.kind) {
        case AttackKind::ResourceConsumption: launched = launch_rc(ctx, spec); break;
        case AttackKind::RouteDisturb: launched = launch_rd(ctx, spec); break;
        case AttackKind::RouteInvasion: launched = launch_ri(ctx, spec); break;
        case AttackKind::Blackhole: return;  // passive: reacts to RREQs from start on
    }
    if (!launched) {
        if (++attempts_[timer.index] < kMaxLaunchAttempts) ctx.set_timer(self_, now + kRetryGap, timer);
        return;
    }
    attempts_[timer.index] = 0;
    if (spec.kind == AttackKind::RouteDisturb) ctx.set_timer(self_, now + spec.repeat_interval, timer);
}

void Adversary::forge_rrep(aodv::NodeContext& ctx, NodeId to, NodeId impersonate, NodeId dst, NodeId originator,
                           std::uint32_t seq, const char* label) {
    wire::RrepMessage rrep;
    rrep.hop_count = 1;
    rrep.destination = dst;
    rrep.destination_seq = seq;
    rrep.originator = originator;
    rrep.lifetime_ms = static_cast<std::uint32_t>(constants_.active_route_timeout.ns() / 1'000'000);
    rrep.timestamp = last_stamp_;
    ++counters_.forged;
    TraceRecord r;
    r.time = ctx.now();
    r.node = self_;
    r.kind = TraceKind::AttackLaunched;
    r.msg = wire::MsgType::Rrep;
    r.peer = to;
    r.next_hop = impersonate;
    r.target = dst;
    r.dest_seq = seq;
    r.note = label;
    ctx.trace(std::move(r));
    ctx.unicast(self_, to, impersonate, rrep, true);
}

void Adversary::infeasible(aodv::NodeContext& ctx, const AttackSpec& spec, const char* why) {
    TraceRecord r;
    r.time = ctx.now();
    r.node = self_;
    r.kind = TraceKind::AttackInfeasible;
    r.peer = spec.flow_src;
    r.target = spec.flow_dst;
    r.note = std::string(name_of(spec.kind)) + ": " + why;
    ctx.trace(std::move(r));
}

bool Adversary::launch_rc(aodv::NodeContext& ctx, const AttackSpec& spec) {
    const SimTime now = ctx.now();
    const PathKnowledge path = path_for(spec.flow_src, spec.flow_dst, now);
    std::vector<NodeId> usable;
    for (std::size_t i = path.from_source ? 1 : 0; i < path.nodes.size(); ++i) {
        const NodeId v = path.nodes[i];
        if (v != spec.flow_src && v != spec.flow_dst && v != self_ && in_range(v, now)) usable.push_back(v);
    }
    if (usable.size() < 2) {
        infeasible(ctx, spec, "fewer than two interior path nodes in range");
        return false;
    }
    // Prefer path neighbors: they can actually bounce packets between them.
    std::size_t pick = 0;
    for (std::size_t i = 0; i + 1 < usable.size(); ++i) {
        const auto a = std::find(path.nodes.begin(), path.nodes.end(), usable[i]);
        if (a + 1 != path.nodes.end() && *(a + 1) == usable[i + 1]) {
            pick = i;
            break;
        }
    }
    const NodeId x = usable[pick];
    const NodeId y = usable[pick + 1];
    const std::uint32_t s = known_seq(spec.flow_dst);
    forge_rrep(ctx, x, y, spec.flow_dst, spec.flow_src, s + 1, "RC");
    forge_rrep(ctx, y, x, spec.flow_dst, spec.flow_src, s + 2, "RC");
    return true;
}

bool Adversary::launch_rd(aodv::NodeContext& ctx, const AttackSpec& spec) {
    const SimTime now = ctx.now();
    const PathKnowledge path = path_for(spec.flow_src, spec.flow_dst, now);
    for (std::size_t i = path.from_source ? 1 : 0; i < path.nodes.size(); ++i) {
        const NodeId victim = path.nodes[i];
        if (victim == spec.flow_src || victim == spec.flow_dst || victim == self_ || !in_range(victim, now)) continue;
        forge_rrep(ctx, victim, phantom_, spec.flow_dst, spec.flow_src, known_seq(spec.flow_dst) + 1, "RD");
        return true;
    }
    infeasible(ctx, spec, "no on-path victim in range");
    return false;
}

bool Adversary::launch_ri(aodv::NodeContext& ctx, const AttackSpec& spec) {
    const SimTime now = ctx.now();
    if (!in_range(spec.flow_src, now)) {
        infeasible(ctx, spec, "source not in range");
        return false;
    }
    const aodv::RouteEntry* route = table_.active(spec.flow_dst, now);
    if (route == nullptr || route->next_hop == spec.flow_src) {
        infeasible(ctx, spec, "no usable route to destination yet");
        if (route == nullptr) originate_discovery(ctx, spec.flow_dst);
        return false;
    }
    forge_rrep(ctx, spec.flow_src, self_, spec.flow_dst, spec.flow_src, known_seq(spec.flow_dst) + 1, "RI");
    return true;
}

}  // namespace manet::adv
