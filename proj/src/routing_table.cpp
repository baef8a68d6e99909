#include "manet/routing_table.hpp"

namespace manet::aodv {

bool candidate_wins(const RouteEntry* existing, const RouteCandidate& c) {
    if (existing == nullptr) return true;
    if (!existing->seq_valid) return c.seq_valid || c.hop_count < existing->hop_count;
    if (!c.seq_valid) return false;
    if (seq_newer(c.dest_seq, existing->dest_seq)) return true;
    if (c.dest_seq == existing->dest_seq) {
        if (existing->state == RouteState::Invalid) return true;
        return c.hop_count < existing->hop_count;
    }
    return false;
}

const RouteEntry* RoutingTable::find(NodeId dest) const {
    auto it = entries_.find(dest);
    return it == entries_.end() ? nullptr : &it->second;
}

RouteEntry* RoutingTable::find(NodeId dest) {
    auto it = entries_.find(dest);
    return it == entries_.end() ? nullptr : &it->second;
}

RouteEntry* RoutingTable::active(NodeId dest, SimTime now) {
    RouteEntry* e = find(dest);
    if (e == nullptr || e->state != RouteState::Valid) return nullptr;
    if (now > e->expiry) {
        e->state = RouteState::Invalid;
        return nullptr;
    }
    return e;
}

bool RoutingTable::update(const RouteCandidate& c, SimTime now, SimTime lifetime) {
    RouteEntry* existing = find(c.destination);
    if (existing != nullptr && existing->state == RouteState::Valid && now > existing->expiry)
        existing->state = RouteState::Invalid;
    if (!candidate_wins(existing, c)) return false;
    RouteEntry& e = entries_[c.destination];
    e.destination = c.destination;
    e.next_hop = c.next_hop;
    e.hop_count = c.hop_count;
    e.dest_seq = c.dest_seq;
    e.seq_valid = c.seq_valid;
    e.expiry = now + lifetime;
    e.state = RouteState::Valid;
    return true;
}

void RoutingTable::refresh(NodeId dest, SimTime now, SimTime lifetime) {
    if (RouteEntry* e = active(dest, now)) {
        if (now + lifetime > e->expiry) e->expiry = now + lifetime;
    }
}

std::vector<wire::Unreachable> RoutingTable::invalidate_via(NodeId next_hop, SimTime now) {
    std::vector<wire::Unreachable> out;
    for (auto& [dest, e] : entries_) {
        if (e.state != RouteState::Valid || e.next_hop != next_hop) continue;
        if (now > e.expiry) {
            e.state = RouteState::Invalid;
            continue;
        }
        e.state = RouteState::Invalid;
        ++e.dest_seq;
        out.push_back({dest, e.dest_seq});
    }
    return out;
}

bool RoutingTable::invalidate_if_via(NodeId dest, NodeId next_hop, std::uint32_t seq) {
    RouteEntry* e = find(dest);
    if (e == nullptr || e->state != RouteState::Valid || e->next_hop != next_hop) return false;
    e->state = RouteState::Invalid;
    if (seq_newer(seq, e->dest_seq)) e->dest_seq = seq;
    return true;
}

}  // namespace manet::aodv
