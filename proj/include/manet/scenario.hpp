#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "manet/adversary.hpp"
#include "manet/types.hpp"

namespace manet {

struct Vec2 {
    double x = 0;
    double y = 0;
    bool operator==(const Vec2&) const = default;
};

struct RadioConfig {
    double range_m = 250.0;
    double loss_rate = 0.0;
    SimTime prop_delay = SimTime::from_ms(1);
    SimTime flood_jitter = SimTime::from_ms(10);
    std::uint32_t unicast_retries = 2;
    SimTime retry_gap = SimTime::from_ms(5);
};

struct Topology {
    double width = 850.0;
    double height = 550.0;
    std::uint32_t node_count = 15;
    std::map<NodeId, Vec2> positions;  // explicit placement; empty means seeded random placement
    RadioConfig radio;
};

struct Keyframe {
    SimTime at;
    Vec2 pos;
};

struct MobilityModel {
    enum class Kind : std::uint8_t { Static, RandomWaypoint } kind = Kind::Static;
    double min_speed = 1.0;
    double max_speed = 5.0;
    SimTime pause = SimTime::from_ms(10'000);
    /// Scripted movement: a node with keyframes moves linearly between them
    /// and stays at the last one. Overrides the model for that node.
    std::map<NodeId, std::vector<Keyframe>> scripted;
};

struct FlowSpec {
    NodeId src;
    NodeId dst;
    std::uint32_t packet_size = 512;
    double rate_pps = 4.0;
    SimTime start = SimTime::from_ms(1'000);
    SimTime stop = SimTime::from_ms(500'000);
};

struct NodeFailure {
    NodeId node;
    SimTime at;
};

struct Scenario {
    std::string name = "unnamed";
    Protocol protocol = Protocol::Aodv;
    SimTime sim_time = SimTime::from_ms(500'000);
    Topology topology;
    MobilityModel mobility;
    std::vector<FlowSpec> flows;
    std::vector<adv::AttackSpec> attacks;
    std::vector<NodeFailure> failures;
    std::uint64_t seed = 1;
    ProtocolConstants constants;
    SimTime metrics_window = SimTime::from_ms(25'000);
};

struct ScenarioError {
    std::size_t line = 0;  // 0 when not tied to a line
    std::string message;
};

/// Invariant checks shared by the file loader and programmatic construction.
std::vector<ScenarioError> validate(const Scenario& s);

/// Parses the line-oriented scenario format (see docs/scenario-format.md).
/// Returns every error found; the scenario is only meaningful when none are.
Scenario parse_scenario(const std::string& text, std::vector<ScenarioError>& errors);
Scenario load_scenario(const std::string& path, std::vector<ScenarioError>& errors);

}  // namespace manet
