#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "manet/node.hpp"

namespace manet::adv {

enum class AttackKind : std::uint8_t {
    ResourceConsumption,  // two forged RREPs that make two path nodes point at each other
    RouteDisturb,         // forged RREP naming a node that does not exist
    RouteInvasion,        // forged RREP that puts the attacker on the path
    Blackhole,            // answers every RREQ, drops every data packet
};

const char* name_of(AttackKind k);
bool parse_attack_kind(const std::string& s, AttackKind& out);

struct AttackSpec {
    NodeId attacker;
    AttackKind kind = AttackKind::Blackhole;
    SimTime start;
    NodeId flow_src;
    NodeId flow_dst;
    SimTime repeat_interval = SimTime::from_ms(20'000);  // route disturb only
};

/// Ordered hops of a victim flow as reconstructed from overheard data frames.
/// When the source's own transmissions are out of earshot only a tail of the
/// path is known, and `from_source` is false.
struct PathKnowledge {
    std::vector<NodeId> nodes;
    bool from_source = false;
};

/// Sequence-number inflation applied by the blackhole.
inline constexpr std::uint32_t kBlackholeSeqBoost = 100;

struct AttackerCounters {
    std::uint64_t forged = 0;
    std::uint64_t snooped = 0;
    std::uint64_t swallowed = 0;
};

/// An insider node: runs the network's protocol honestly, overhears frames in
/// range, and executes its attack schedule. It can spoof the network-layer
/// sender of what it transmits but never the link-layer sender.
class Adversary : public aodv::Node {
public:
    Adversary(NodeId self, Protocol protocol, ProtocolConstants constants, std::vector<AttackSpec> attacks,
              NodeId phantom);

    /// Schedules each attack's start timer.
    void arm(aodv::NodeContext& ctx);

    void receive(aodv::NodeContext& ctx, const wire::Frame& frame) override;
    void overhear(aodv::NodeContext& ctx, const wire::Frame& frame, NodeId intended) override;
    void on_timer(aodv::NodeContext& ctx, const aodv::Timer& timer) override;

    /// Uses only hops overheard within the active route timeout.
    PathKnowledge path_for(NodeId src, NodeId dst, SimTime now) const;
    bool in_range(NodeId n, SimTime now) const;
    std::uint32_t known_seq(NodeId dst) const;

    const AttackerCounters& counters() const { return counters_; }
    const std::vector<AttackSpec>& attacks() const { return attacks_; }
    NodeId phantom() const { return phantom_; }

    // Individual launches, public for direct testing. Each returns false and
    // traces an infeasible record when its preconditions do not hold.
    bool launch_rc(aodv::NodeContext& ctx, const AttackSpec& spec);
    bool launch_rd(aodv::NodeContext& ctx, const AttackSpec& spec);
    bool launch_ri(aodv::NodeContext& ctx, const AttackSpec& spec);

protected:
    void on_relay(aodv::NodeContext& ctx, const wire::DataPacket& pkt) override;

private:
    void learn(aodv::NodeContext& ctx, const wire::Frame& frame, NodeId intended);
    bool blackhole_active(SimTime now) const;
    void forge_rrep(aodv::NodeContext& ctx, NodeId to, NodeId impersonate, NodeId dst, NodeId originator,
                    std::uint32_t seq, const char* label);
    void infeasible(aodv::NodeContext& ctx, const AttackSpec& spec, const char* why);

    std::vector<AttackSpec> attacks_;
    NodeId phantom_;
    AttackerCounters counters_;
    std::map<NodeId, SimTime> heard_;
    struct Hop {
        NodeId next;
        SimTime heard;
    };
    std::map<std::pair<NodeId, NodeId>, std::map<NodeId, Hop>> flow_hops_;
    std::map<NodeId, std::uint32_t> seq_seen_;
    Timestamp last_stamp_;
    std::set<std::pair<NodeId, std::uint32_t>> answered_;
    std::map<std::uint32_t, std::uint32_t> attempts_;
};

}  // namespace manet::adv
