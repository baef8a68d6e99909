#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "manet/adversary.hpp"
#include "manet/node.hpp"
#include "manet/scenario.hpp"
#include "manet/trace.hpp"

namespace manet::sim {

/// Stateless keyed randomness: the same key always yields the same draw, so
/// the outcome of one transmission never depends on unrelated traffic.
std::uint64_t mix(std::uint64_t seed, std::initializer_list<std::uint64_t> key);
double unit(std::uint64_t bits);  // [0, 1) from the top 53 bits

double distance(Vec2 a, Vec2 b);

/// Node positions over time: fixed, random waypoint, or scripted keyframes.
/// Random waypoint legs are generated lazily and kept, so queries may go
/// back in time.
class Mobility {
public:
    Mobility(const Scenario& s, std::uint64_t seed);

    Vec2 position(NodeId n, SimTime t);
    std::uint32_t node_count() const { return static_cast<std::uint32_t>(start_.size()); }
    const std::vector<Vec2>& initial() const { return start_; }

private:
    struct Leg {
        SimTime depart;
        SimTime arrive;
        SimTime resume;  // arrive + pause
        Vec2 from;
        Vec2 to;
    };
    struct Track {
        std::vector<Leg> legs;
        std::mt19937_64 rng;
        std::vector<Keyframe> script;
    };
    void extend(Track& t, SimTime until);

    double width_;
    double height_;
    MobilityModel model_;
    std::vector<Vec2> start_;
    std::vector<Track> tracks_;
};

/// Seeded placement, resampled until the unit-disk graph is connected.
std::vector<Vec2> random_placement(const Topology& topo, std::uint64_t seed);
bool connected(const std::vector<Vec2>& pos, double range);
/// Hop distances from `from` over the unit-disk graph; -1 when unreachable.
std::vector<int> bfs_hops(const std::vector<Vec2>& pos, double range, std::uint32_t from);

struct RunOptions {
    bool wall_clock = false;  // record handler wall time (makes traces nondeterministic)
    std::uint64_t seed_override = 0;
    bool has_seed_override = false;
};

struct Conservation {
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::map<DropReason, std::uint64_t> drops;
    std::uint64_t in_flight_engine = 0;  // queued or on the air when the run ended
    std::int64_t in_flight_trace = 0;    // generated - delivered - drops
    bool balanced() const { return in_flight_trace >= 0 && static_cast<std::uint64_t>(in_flight_trace) == in_flight_engine; }
};

struct RunOutput {
    std::string scenario;
    Protocol protocol = Protocol::Aodv;
    std::uint64_t seed = 0;
    SimTime end;
    SimTime window;
    TraceLog trace;
    std::map<NodeId, adv::AttackerCounters> attackers;
    Conservation conservation;
};

class CapabilityError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class Engine final : public aodv::NodeContext {
public:
    Engine(const Scenario& s, RunOptions opts = {});
    ~Engine() override;

    // NodeContext
    SimTime now() const override { return now_; }
    void broadcast(NodeId from, NodeId net_sender, wire::Message msg, bool forged) override;
    void unicast(NodeId from, NodeId to, NodeId net_sender, wire::Message msg, bool forged) override;
    void set_timer(NodeId node, SimTime at, aodv::Timer timer) override;
    void trace(TraceRecord r) override;

    /// Processes every event scheduled at or before `t`.
    void run_until(SimTime t);
    RunOutput finish();

    aodv::Node& node(NodeId n);
    bool up(NodeId n) const;
    Mobility& mobility() { return mobility_; }
    const TraceLog& log() const { return log_; }
    std::uint64_t in_flight() const;

private:
    enum class EvKind : std::uint8_t { Delivery, Overhear, UnicastAttempt, UnicastFailed, Timer, Traffic, Down };
    struct Event {
        SimTime at;
        std::uint64_t order = 0;
        EvKind kind = EvKind::Timer;
        NodeId node;      // receiver / timer owner / failing node
        NodeId from;      // link sender
        NodeId net_sender;
        NodeId intended;  // unicast addressee, for overheard copies
        std::uint64_t frame = 0;
        bool forged = false;
        bool data = false;
        std::uint32_t attempt = 0;
        std::uint64_t tx = 0;
        std::vector<std::uint8_t> bytes;
        aodv::Timer timer;
        std::uint32_t flow = 0;
        std::uint32_t seq = 0;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            return a.at != b.at ? a.at > b.at : a.order > b.order;
        }
    };

    void push(Event e);
    void dispatch(Event& e);
    void deliver(Event& e);
    void attempt(Event& e);
    void traffic(const Event& e);
    void drop_in_engine(NodeId at, const std::vector<std::uint8_t>& bytes, DropReason reason);
    bool in_range(NodeId a, NodeId b, SimTime t);
    bool lost(NodeId from, std::uint64_t tx, NodeId to, std::uint32_t attempt) const;
    std::vector<std::uint8_t> encode_or_drop(NodeId from, const wire::Message& msg);
    void enter(NodeId n) { current_ = n; }
    void guard(NodeId from) const;

    Scenario scenario_;
    RunOptions opts_;
    std::uint64_t seed_;
    Mobility mobility_;
    std::vector<std::unique_ptr<aodv::Node>> nodes_;  // index addr - 1
    std::vector<bool> up_;
    std::vector<adv::Adversary*> adversaries_;
    std::vector<std::uint64_t> bcast_count_;
    std::vector<std::uint64_t> tx_count_;
    std::vector<Event> queue_;  // binary heap under Later
    std::uint64_t order_ = 0;
    std::uint64_t next_frame_ = 0;
    SimTime now_;
    NodeId current_;
    TraceLog log_;
};

/// Runs one scenario to completion.
RunOutput run(const Scenario& s, const RunOptions& opts = {});

}  // namespace manet::sim
