#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "manet/types.hpp"
#include "manet/wire.hpp"

namespace manet {

enum class TraceKind : std::uint8_t {
    Send,            // one transmission (broadcast or unicast hop)
    Recv,
    DataGenerated,
    DataDelivered,
    Drop,
    RouteWrite,      // routing-table entry installed or replaced
    RouteInvalidate,
    DiscoveryStart,
    DiscoveryFailed,
    CacheInsert,
    CacheHit,
    CacheMiss,
    CachePurge,
    RrepDiscard,
    Handler,         // per control message: op count and optional wall time
    Snoop,           // attacker saw a data packet it was asked to relay
    Swallow,         // blackhole dropped a data packet
    AttackLaunched,
    AttackInfeasible,
    Warning,
};

enum class DropReason : std::uint8_t {
    None,
    Loss,            // unused: a sender cannot tell loss from a broken link, so both are LinkFailure
    NoRoute,
    Ttl,
    Blackhole,
    LinkFailure,
    QueueOverflow,
    DiscoveryFailed,
    Decode,
    Duplicate,
};

const char* name_of(TraceKind k);
const char* name_of(DropReason r);
bool parse_trace_kind(const std::string& s, TraceKind& out);
bool parse_drop_reason(const std::string& s, DropReason& out);

/// One structured trace entry. Only the fields relevant to `kind` are set;
/// the rest keep their zero defaults and are omitted from the serialized form.
struct TraceRecord {
    SimTime time;
    NodeId node;
    TraceKind kind = TraceKind::Warning;

    wire::MsgType msg = wire::MsgType::Data;
    NodeId peer;           // destination of a send, sender of a receive, neighbor of a cache entry
    NodeId target;         // route / discovery / cache destination
    NodeId next_hop;
    std::uint64_t frame = 0;
    bool forged = false;
    bool flag = false;     // cache entry F flag
    DropReason reason = DropReason::None;

    std::uint32_t flow = 0;
    std::uint32_t seq = 0;
    std::uint32_t hops = 0;
    std::uint32_t dest_seq = 0;
    std::uint32_t bytes = 0;
    SimTime sent_at;
    SimTime expiry;
    Timestamp stamp;
    std::uint64_t ops = 0;
    std::int64_t wall_ns = 0;
    std::string note;

    bool operator==(const TraceRecord&) const = default;
};

class TraceLog {
public:
    void add(TraceRecord r) { records_.push_back(std::move(r)); }
    const std::vector<TraceRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    void write_jsonl(std::ostream& os) const;
    static TraceLog read_jsonl(std::istream& is);

    /// FNV-1a over the serialized form; stable across runs and platforms.
    std::uint64_t digest() const;

private:
    std::vector<TraceRecord> records_;
};

std::string to_json_line(const TraceRecord& r);

}  // namespace manet
