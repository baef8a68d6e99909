#include <gtest/gtest.h>

#include <filesystem>

#include "manet/scenario.hpp"

using namespace manet;

namespace {

const char* kBase = R"(# minimal
name = tiny
protocol = AODVSEC
sim_time = 100
seed = 9
nodes = 3
area = 600 100
mobility = static
position = 1 50 50
position = 2 250 50
position = 3 450 50
flow = 1 3 rate=2 size=256 start=5 stop=90
)";

Scenario parse(const std::string& text, std::vector<ScenarioError>& errs) { return parse_scenario(text, errs); }

bool mentions(const std::vector<ScenarioError>& errs, std::size_t line, const std::string& word) {
    for (const auto& e : errs)
        if (e.line == line && e.message.find(word) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST(Scenario, ParsesMinimalFile) {
    std::vector<ScenarioError> errs;
    const auto s = parse(kBase, errs);
    ASSERT_TRUE(errs.empty()) << errs[0].message;
    EXPECT_EQ(s.name, "tiny");
    EXPECT_EQ(s.protocol, Protocol::AodvSec);
    EXPECT_EQ(s.seed, 9u);
    EXPECT_EQ(s.sim_time, SimTime::from_ms(100'000));
    EXPECT_EQ(s.topology.positions.at(NodeId(2)), (Vec2{250, 50}));
    ASSERT_EQ(s.flows.size(), 1u);
    EXPECT_EQ(s.flows[0].packet_size, 256u);
    EXPECT_DOUBLE_EQ(s.flows[0].rate_pps, 2.0);
    EXPECT_EQ(s.flows[0].start, SimTime::from_ms(5'000));
}

TEST(Scenario, AttackAfterEndRejectedWithLine) {
    std::vector<ScenarioError> errs;
    parse(std::string(kBase) + "attack = RC attacker=2 start=600 src=1 dst=3\n", errs);
    ASSERT_FALSE(errs.empty());
    EXPECT_EQ(errs[0].line, 13u);
}

TEST(Scenario, FlowToItselfRejected) {
    std::vector<ScenarioError> errs;
    parse(std::string(kBase) + "flow = 2 2\n", errs);
    ASSERT_EQ(errs.size(), 1u);
    EXPECT_EQ(errs[0].line, 13u);
}

TEST(Scenario, UnknownKeyReported) {
    std::vector<ScenarioError> errs;
    parse(std::string(kBase) + "colour = blue\n", errs);
    EXPECT_TRUE(mentions(errs, 13, "colour"));
}

TEST(Scenario, AllErrorsCollected) {
    std::vector<ScenarioError> errs;
    parse(std::string(kBase) + "range = -1\nloss = 2\nbogus\n", errs);
    EXPECT_GE(errs.size(), 3u);
}

TEST(Scenario, PositionOutsideAreaRejected) {
    std::vector<ScenarioError> errs;
    parse(std::string(kBase) + "position = 3 900 50\n", errs);
    EXPECT_FALSE(errs.empty());
}

TEST(Scenario, ExplicitPlacementMustCoverEveryNode) {
    std::vector<ScenarioError> errs;
    parse(std::string(kBase) + "nodes = 4\n", errs);
    EXPECT_FALSE(errs.empty());
}

TEST(Scenario, AttackerMustExist) {
    std::vector<ScenarioError> errs;
    parse(std::string(kBase) + "attack = BH attacker=7 start=10\n", errs);
    EXPECT_FALSE(errs.empty());
}

TEST(Scenario, AttacksAndScriptsParsed) {
    std::vector<ScenarioError> errs;
    const auto s = parse(std::string(kBase) +
                             "attack = RD attacker=2 start=50 src=1 dst=3 interval=7\n"
                             "waypoint = 2 60 250 90\n"
                             "down = 3 80\n"
                             "const.active_route_timeout = 3\n",
                         errs);
    ASSERT_TRUE(errs.empty()) << errs[0].message;
    ASSERT_EQ(s.attacks.size(), 1u);
    EXPECT_EQ(s.attacks[0].kind, adv::AttackKind::RouteDisturb);
    EXPECT_EQ(s.attacks[0].repeat_interval, SimTime::from_ms(7'000));
    EXPECT_EQ(s.mobility.scripted.at(NodeId(2)).at(0).at, SimTime::from_ms(60'000));
    ASSERT_EQ(s.failures.size(), 1u);
    EXPECT_EQ(s.constants.active_route_timeout, SimTime::from_ms(3'000));
}

TEST(Scenario, ShippedScenariosValidate) {
    std::size_t n = 0;
    for (const auto& entry : std::filesystem::directory_iterator(MANET_SCENARIO_DIR)) {
        if (entry.path().extension() != ".scn") continue;
        std::vector<ScenarioError> errs;
        load_scenario(entry.path().string(), errs);
        EXPECT_TRUE(errs.empty()) << entry.path() << ": " << (errs.empty() ? "" : errs[0].message);
        ++n;
    }
    EXPECT_GE(n, 6u);
}

TEST(Scenario, MissingFileIsAnError) {
    std::vector<ScenarioError> errs;
    load_scenario("/nonexistent/file.scn", errs);
    EXPECT_FALSE(errs.empty());
}
