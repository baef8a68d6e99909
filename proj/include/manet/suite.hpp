#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "manet/metrics.hpp"
#include "manet/scenario.hpp"
#include "manet/simnet.hpp"

namespace manet::suite {

struct RunSpec {
    Scenario scenario;  // protocol and seed already applied
};

struct RunResult {
    std::string scenario;
    Protocol protocol = Protocol::Aodv;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    sim::RunOutput output;
    metrics::MetricsReport report;
};

/// Cartesian product; an empty seed list means seed 1.
std::vector<RunSpec> expand(const std::vector<Scenario>& scenarios, const std::vector<Protocol>& protocols,
                            const std::vector<std::uint64_t>& seeds);

/// Runs every spec, one simulation per OpenMP iteration. A failing run is
/// recorded in its result and does not stop the others.
std::vector<RunResult> run_batch(const std::vector<RunSpec>& specs, const sim::RunOptions& opts = {});
/// Same results, one after another on the calling thread.
std::vector<RunResult> run_batch_serial(const std::vector<RunSpec>& specs, const sim::RunOptions& opts = {});

RunResult run_one(const RunSpec& spec, const sim::RunOptions& opts = {});

/// out/<scenario>/<protocol>/seed-<n>/{trace.jsonl, metrics.json, metrics.csv}
std::filesystem::path run_dir(const std::filesystem::path& out, const RunResult& r);
void write_run(const std::filesystem::path& out, const RunResult& r);

/// One row per (scenario, seed, window, metric) with one column per protocol.
void write_comparison(std::ostream& os, const std::vector<RunResult>& results);

struct SuiteSummary {
    std::size_t runs = 0;
    std::size_t failures = 0;
    std::vector<std::string> errors;
};

SuiteSummary run_suite(const std::vector<Scenario>& scenarios, const std::vector<Protocol>& protocols,
                       const std::vector<std::uint64_t>& seeds, const std::filesystem::path& out,
                       const sim::RunOptions& opts = {});

}  // namespace manet::suite
