#include <gtest/gtest.h>

#include <random>
#include <set>

#include "manet/simnet.hpp"

using namespace manet;

namespace {

Scenario load(const std::string& name) {
    std::vector<ScenarioError> errs;
    auto s = load_scenario(std::string(MANET_SCENARIO_DIR) + "/" + name, errs);
    EXPECT_TRUE(errs.empty());
    return s;
}

struct Row {
    NodeId next;
    std::uint32_t hops;
    std::uint32_t seq;
    aodv::RouteState state;
    bool operator==(const Row&) const = default;
};

std::map<std::pair<NodeId, NodeId>, Row> snapshot(sim::Engine& e, std::uint32_t n, const std::set<NodeId>& skip) {
    std::map<std::pair<NodeId, NodeId>, Row> out;
    for (std::uint32_t a = 1; a <= n; ++a) {
        if (skip.contains(NodeId(a))) continue;
        for (const auto& [d, r] : e.node(NodeId(a)).table().entries())
            out[{NodeId(a), d}] = {r.next_hop, r.hop_count, r.dest_seq, r.state};
    }
    return out;
}

Scenario random_static(std::mt19937_64& rng, std::uint32_t n) {
    Scenario s;
    s.sim_time = SimTime::from_ms(60'000);
    s.topology.node_count = n;
    s.topology.width = 600;
    s.topology.height = 400;
    s.seed = rng();
    const auto pos = sim::random_placement(s.topology, rng());
    for (std::uint32_t i = 0; i < n; ++i) s.topology.positions[NodeId(i + 1)] = pos[i];
    for (int f = 0; f < 3; ++f) {
        FlowSpec flow;
        flow.src = NodeId(1 + static_cast<std::uint32_t>(rng() % n));
        do flow.dst = NodeId(1 + static_cast<std::uint32_t>(rng() % n));
        while (flow.dst == flow.src);
        flow.start = SimTime::from_ms(1'000 + static_cast<std::int64_t>(rng() % 5'000));
        flow.stop = s.sim_time;
        s.flows.push_back(flow);
    }
    return s;
}

}  // namespace

// Honest routing tables under AODVSEC never notice the attackers.
class AttackIsolation : public ::testing::TestWithParam<const char*> {};

TEST_P(AttackIsolation, HonestTablesMatchAttackFreeRun) {
    Scenario attacked = load(GetParam());
    attacked.protocol = Protocol::AodvSec;
    Scenario clean = attacked;
    clean.attacks.clear();
    std::set<NodeId> attackers;
    for (const auto& a : attacked.attacks) attackers.insert(a.attacker);

    sim::Engine x(attacked), y(clean);
    const auto n = attacked.topology.node_count;
    for (SimTime t = SimTime::from_ms(5'000); t <= attacked.sim_time; t += SimTime::from_ms(5'000)) {
        x.run_until(t);
        y.run_until(t);
        ASSERT_EQ(snapshot(x, n, attackers), snapshot(y, n, attackers)) << "diverged by " << t.seconds() << " s";
    }
}

INSTANTIATE_TEST_SUITE_P(Scenarios, AttackIsolation,
                         ::testing::Values("rc.scn", "rd.scn", "ri.scn", "combined.scn", "blackhole.scn"));

TEST(Property, SecureTableWritesFromRrepsAreValidated) {
    std::mt19937_64 rng(17);
    for (int g = 0; g < 20; ++g) {
        auto s = random_static(rng, 6 + g % 6);
        s.protocol = Protocol::AodvSec;
        s.topology.radio.loss_rate = 0.05 * (g % 3);
        const auto out = sim::run(s);
        std::set<std::uint64_t> rrep_frames, validated;
        for (const auto& r : out.trace.records()) {
            if (r.kind == TraceKind::Recv && r.msg == wire::MsgType::Rrep) rrep_frames.insert(r.frame);
            if (r.kind == TraceKind::CacheHit) validated.insert(r.frame);
            if (r.kind == TraceKind::RouteWrite && rrep_frames.contains(r.frame))
                ASSERT_TRUE(validated.contains(r.frame)) << "graph " << g << " frame " << r.frame;
        }
    }
}

TEST(Property, LosslessStaticTablesMatchAcrossProtocols) {
    std::mt19937_64 rng(23);
    for (int g = 0; g < 20; ++g) {
        auto s = random_static(rng, 5 + g % 8);
        s.protocol = Protocol::Aodv;
        sim::Engine a(s);
        s.protocol = Protocol::AodvSec;
        sim::Engine b(s);
        for (SimTime t = SimTime::from_ms(10'000); t <= s.sim_time; t += SimTime::from_ms(10'000)) {
            a.run_until(t);
            b.run_until(t);
            ASSERT_EQ(snapshot(a, s.topology.node_count, {}), snapshot(b, s.topology.node_count, {}))
                << "graph " << g << " at " << t.seconds();
        }
    }
}

TEST(Property, TraceIsTimeOrdered) {
    for (const char* name : {"normal.scn", "combined.scn"}) {
        auto s = load(name);
        for (Protocol p : {Protocol::Aodv, Protocol::AodvSec}) {
            s.protocol = p;
            const auto out = sim::run(s);
            SimTime last;
            for (const auto& r : out.trace.records()) {
                ASSERT_GE(r.time, last) << name;
                last = r.time;
            }
        }
    }
}

TEST(Property, EveryAckPrecedesItsReply) {
    auto s = load("normal.scn");
    s.protocol = Protocol::AodvSec;
    const auto out = sim::run(s);
    const auto& rs = out.trace.records();
    std::size_t acks = 0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (rs[i].kind != TraceKind::Send || rs[i].msg != wire::MsgType::RreqAck) continue;
        ++acks;
        std::size_t j = i + 1;
        while (j < rs.size() && !(rs[j].kind == TraceKind::Send && rs[j].node == rs[i].node)) ++j;
        ASSERT_LT(j, rs.size());
        EXPECT_EQ(rs[j].msg, wire::MsgType::Rrep);
        EXPECT_EQ(rs[j].peer, rs[i].peer);
    }
    EXPECT_GT(acks, 0u);
}

TEST(Property, PlainAodvNeverAcks) {
    auto s = load("normal.scn");
    const auto out = sim::run(s);
    for (const auto& r : out.trace.records()) ASSERT_NE(r.msg == wire::MsgType::RreqAck && r.kind == TraceKind::Send, true);
}
