#pragma once

#include "manet/scenario.hpp"

namespace manet::testing {

// Static line of `n` nodes, 200 m apart, one CBR flow from the first to the last.
inline Scenario chain(std::uint32_t n, double seconds = 30.0) {
    Scenario s;
    s.name = "chain" + std::to_string(n);
    s.sim_time = SimTime::from_seconds(seconds);
    s.topology.node_count = n;
    s.topology.width = 200.0 * n;
    s.topology.height = 100.0;
    for (std::uint32_t i = 0; i < n; ++i) s.topology.positions[NodeId(i + 1)] = {100.0 + 200.0 * i, 50.0};
    FlowSpec f;
    f.src = NodeId(1);
    f.dst = NodeId(n);
    f.start = SimTime::from_ms(1'000);
    f.stop = s.sim_time;
    s.flows = {f};
    s.metrics_window = SimTime::from_ms(5'000);
    return s;
}

}  // namespace manet::testing
