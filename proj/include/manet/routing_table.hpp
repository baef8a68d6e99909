#pragma once

#include <map>
#include <set>
#include <vector>

#include "manet/types.hpp"
#include "manet/wire.hpp"

namespace manet::aodv {

enum class RouteState : std::uint8_t { Valid, Invalid };

struct RouteEntry {
    NodeId destination;
    NodeId next_hop;
    std::uint32_t hop_count = 0;
    std::uint32_t dest_seq = 0;
    bool seq_valid = false;
    SimTime expiry;
    RouteState state = RouteState::Invalid;
    std::set<NodeId> precursors;
};

struct RouteCandidate {
    NodeId destination;
    NodeId next_hop;
    std::uint32_t hop_count = 0;
    std::uint32_t dest_seq = 0;
    bool seq_valid = true;
};

/// Sequence-number comparison with 32-bit wraparound: true when a is newer than b.
constexpr bool seq_newer(std::uint32_t a, std::uint32_t b) { return static_cast<std::int32_t>(a - b) > 0; }

/// Route freshness rule. A missing entry always loses; otherwise a higher
/// sequence number wins, and on equal sequence numbers fewer hops win. An
/// invalidated entry also yields to a candidate whose number is not older, and
/// an entry with an unknown number yields to anything with a known one.
bool candidate_wins(const RouteEntry* existing, const RouteCandidate& c);

class RoutingTable {
public:
    /// Entry regardless of state or age.
    const RouteEntry* find(NodeId dest) const;
    RouteEntry* find(NodeId dest);

    /// Valid, unexpired entry. Entries found past their expiry are marked
    /// Invalid as a side effect.
    RouteEntry* active(NodeId dest, SimTime now);

    /// Applies the freshness rule; on accept the entry is replaced and its
    /// expiry set to now + lifetime. Precursors survive replacement.
    bool update(const RouteCandidate& c, SimTime now, SimTime lifetime);

    /// Extends the lifetime of a valid route.
    void refresh(NodeId dest, SimTime now, SimTime lifetime);

    /// Marks every valid route through `next_hop` Invalid, bumping its
    /// sequence number. Returns the affected destinations.
    std::vector<wire::Unreachable> invalidate_via(NodeId next_hop, SimTime now);

    /// Invalidates `dest` if it is currently valid and routed via `next_hop`.
    /// `seq` is the sequence number carried in the error report.
    bool invalidate_if_via(NodeId dest, NodeId next_hop, std::uint32_t seq);

    const std::map<NodeId, RouteEntry>& entries() const { return entries_; }

private:
    std::map<NodeId, RouteEntry> entries_;
};

}  // namespace manet::aodv
