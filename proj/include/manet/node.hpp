#pragma once

#include <deque>
#include <map>
#include <optional>
#include <utility>

#include "manet/routing_table.hpp"
#include "manet/rreq_ack_cache.hpp"
#include "manet/trace.hpp"
#include "manet/wire.hpp"

namespace manet::aodv {

struct Timer {
    enum class Kind : std::uint8_t { Discovery, Attack } kind = Kind::Discovery;
    NodeId dest;
    std::uint32_t generation = 0;
    std::uint32_t index = 0;
};

/// What a node may ask of its environment. The simulator implements this;
/// unit tests substitute a recording fake.
class NodeContext {
public:
    virtual ~NodeContext() = default;
    virtual SimTime now() const = 0;
    virtual void broadcast(NodeId from, NodeId net_sender, wire::Message msg, bool forged) = 0;
    virtual void unicast(NodeId from, NodeId to, NodeId net_sender, wire::Message msg, bool forged) = 0;
    virtual void set_timer(NodeId node, SimTime at, Timer timer) = 0;
    virtual void trace(TraceRecord r) = 0;
};

/// Per-node AODV state machine, optionally with the RREQ-ACK extension.
/// Handlers are single-threaded and driven by the engine.
class Node {
public:
    Node(NodeId self, Protocol protocol, ProtocolConstants constants);
    virtual ~Node() = default;
    Node(const Node&) = delete;
    Node& operator=(const Node&) = delete;

    NodeId id() const { return self_; }
    Protocol protocol() const { return protocol_; }
    const ProtocolConstants& constants() const { return constants_; }

    /// Entry point for every decoded frame addressed to (or broadcast near) this node.
    virtual void receive(NodeContext& ctx, const wire::Frame& frame);
    /// Unicast frames between other nodes that this node can hear.
    virtual void overhear(NodeContext& ctx, const wire::Frame& frame, NodeId intended);
    virtual void on_timer(NodeContext& ctx, const Timer& timer);
    /// Link-layer feedback: a unicast to `to` exhausted its retries.
    virtual void on_unicast_failure(NodeContext& ctx, NodeId to, const wire::Message& msg);

    /// Local application hands a packet to the routing layer.
    void send_data(NodeContext& ctx, wire::DataPacket pkt);

    void originate_discovery(NodeContext& ctx, NodeId dest);

    /// Node leaves the network: queued data is dropped and discoveries abandoned.
    void shutdown(NodeContext& ctx);

    // Handlers, public for direct testing.
    void handle_rreq(NodeContext& ctx, const wire::Frame& frame, const wire::RreqMessage& rreq);
    void handle_rrep(NodeContext& ctx, const wire::Frame& frame, const wire::RrepMessage& rrep);
    void handle_rerr(NodeContext& ctx, const wire::Frame& frame, const wire::RerrMessage& rerr);
    void handle_rreq_ack(NodeContext& ctx, const wire::Frame& frame, const wire::RreqAckMessage& ack);
    void forward_data(NodeContext& ctx, const wire::Frame& frame, wire::DataPacket pkt);

    RoutingTable& table() { return table_; }
    const RoutingTable& table() const { return table_; }
    const sec::RreqAckCache* cache() const { return cache_ ? &*cache_ : nullptr; }
    std::uint32_t own_seq() const { return own_seq_; }
    bool discovery_pending(NodeId dest) const { return pending_.contains(dest); }
    std::size_t queued(NodeId dest) const;
    std::size_t queued_total() const;

    /// Deterministic work counter: one unit per table probe, table write,
    /// duplicate check, cache probe or insert, and transmission.
    std::uint64_t op_count() const { return ops_; }

protected:
    void count(std::uint64_t n = 1) { ops_ += n; }
    void send_unicast(NodeContext& ctx, NodeId to, wire::Message msg);
    void send_broadcast(NodeContext& ctx, wire::Message msg);
    void trace_route_write(NodeContext& ctx, const RouteEntry& e, std::uint64_t frame);
    void trace_cache(NodeContext& ctx, TraceKind kind, const sec::RreqAckCacheEntry& e, std::uint64_t frame);
    void send_rerr(NodeContext& ctx, std::vector<wire::Unreachable> lost, const std::set<NodeId>& to);
    void link_broken(NodeContext& ctx, NodeId neighbor);
    void purge(NodeContext& ctx);
    void drop_data(NodeContext& ctx, const wire::DataPacket& pkt, DropReason reason, NodeId at_hop = {});
    void transmit_data(NodeContext& ctx, wire::DataPacket pkt, RouteEntry& route, NodeId prev_hop);
    void flush_queue(NodeContext& ctx, NodeId dest);
    /// Hook for relaying a data packet; attackers override to observe traffic.
    virtual void on_relay(NodeContext&, const wire::DataPacket&) {}
    /// Reply to an RREQ as destination or as an intermediate node with a fresher route.
    void reply(NodeContext& ctx, const wire::Frame& frame, const wire::RreqMessage& rreq, wire::RrepMessage rrep);

    bool is_sec() const { return cache_.has_value(); }

    NodeId self_;
    Protocol protocol_;
    ProtocolConstants constants_;
    RoutingTable table_;
    std::optional<sec::RreqAckCache> cache_;
    std::uint32_t own_seq_ = 0;
    std::uint32_t rreq_id_ = 0;
    std::map<std::pair<NodeId, std::uint32_t>, SimTime> seen_;

    struct Pending {
        std::uint32_t retries = 0;
        std::uint32_t generation = 0;
    };
    std::map<NodeId, Pending> pending_;
    std::uint32_t generation_ = 0;
    std::map<NodeId, std::deque<wire::DataPacket>> queues_;
    std::uint64_t ops_ = 0;
};

}  // namespace manet::aodv
