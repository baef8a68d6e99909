#include "manet/suite.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>
#include <map>
#include <sstream>


namespace manet::suite {

std::vector<RunSpec> expand(const std::vector<Scenario>& scenarios, const std::vector<Protocol>& protocols,
                            const std::vector<std::uint64_t>& seeds) {
    const std::vector<std::uint64_t> use = seeds.empty() ? std::vector<std::uint64_t>{1} : seeds;
    std::vector<RunSpec> out;
    for (const auto& s : scenarios)
        for (Protocol p : protocols)
            for (std::uint64_t seed : use) {
                RunSpec r{s};
                r.scenario.protocol = p;
                r.scenario.seed = seed;
                out.push_back(std::move(r));
            }
    return out;
}

RunResult run_one(const RunSpec& spec, const sim::RunOptions& opts) {
    RunResult r;
    r.scenario = spec.scenario.name;
    r.protocol = spec.scenario.protocol;
    r.seed = spec.scenario.seed;
    try {
        if (auto errs = validate(spec.scenario); !errs.empty()) throw std::runtime_error(errs.front().message);
        sim::RunOptions o = opts;
        o.has_seed_override = false;
        r.output = sim::run(spec.scenario, o);
        r.report = metrics::build_report(r.output.trace, {r.scenario, to_string(r.protocol), r.seed, r.output.end,
                                                          spec.scenario.metrics_window});
        r.ok = true;
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

std::vector<RunResult> run_batch(const std::vector<RunSpec>& specs, const sim::RunOptions& opts) {
    std::vector<RunResult> out(specs.size());
    const auto n = static_cast<std::int64_t>(specs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) out[i] = run_one(specs[i], opts);
    return out;
}

std::vector<RunResult> run_batch_serial(const std::vector<RunSpec>& specs, const sim::RunOptions& opts) {
    std::vector<RunResult> out;
    out.reserve(specs.size());
    for (const auto& s : specs) out.push_back(run_one(s, opts));
    return out;
}

std::filesystem::path run_dir(const std::filesystem::path& out, const RunResult& r) {
    return out / r.scenario / to_string(r.protocol) / ("seed-" + std::to_string(r.seed));
}

void write_run(const std::filesystem::path& out, const RunResult& r) {
    const auto dir = run_dir(out, r);
    std::filesystem::create_directories(dir);
    std::ofstream trace(dir / "trace.jsonl");
    r.output.trace.write_jsonl(trace);
    std::ofstream json(dir / "metrics.json");
    json << r.report.to_json() << '\n';
    std::ofstream csv(dir / "metrics.csv");
    r.report.write_csv(csv);
    if (!trace || !json || !csv) throw std::runtime_error("failed writing outputs under " + dir.string());
}

void write_comparison(std::ostream& os, const std::vector<RunResult>& results) {
    std::vector<Protocol> protocols;
    for (const auto& r : results)
        if (r.ok && std::find(protocols.begin(), protocols.end(), r.protocol) == protocols.end())
            protocols.push_back(r.protocol);
    std::sort(protocols.begin(), protocols.end());

    os << "schema_version,scenario,seed,window_start,window_end,metric";
    for (Protocol p : protocols) os << ',' << to_string(p);
    os << '\n';

    using Key = std::tuple<std::string, std::uint64_t, std::size_t, std::size_t>;  // scenario, seed, window, metric
    std::map<Key, std::map<Protocol, std::optional<double>>> cells;
    std::map<Key, std::pair<metrics::Window, std::string>> labels;
    for (const auto& r : results) {
        if (!r.ok) continue;
        for (std::size_t w = 0; w < r.report.rows.size(); ++w) {
            const auto values = metrics::metric_values(r.report.rows[w]);
            for (std::size_t m = 0; m < values.size(); ++m) {
                const Key k{r.scenario, r.seed, w, m};
                cells[k][r.protocol] = values[m].second;
                labels[k] = {r.report.rows[w].window, values[m].first};
            }
        }
    }
    for (const auto& [k, byp] : cells) {
        const auto& [w, metric] = labels[k];
        os << metrics::kSchemaVersion << ',' << std::get<0>(k) << ',' << std::get<1>(k) << ',' << w.begin.seconds()
           << ',' << w.end.seconds() << ',' << metric;
        for (Protocol p : protocols) {
            os << ',';
            if (auto it = byp.find(p); it != byp.end() && it->second) {
                std::ostringstream v;
                v.precision(10);
                v << *it->second;
                os << v.str();
            }
        }
        os << '\n';
    }
}

SuiteSummary run_suite(const std::vector<Scenario>& scenarios, const std::vector<Protocol>& protocols,
                       const std::vector<std::uint64_t>& seeds, const std::filesystem::path& out,
                       const sim::RunOptions& opts) {
    const auto results = run_batch(expand(scenarios, protocols, seeds), opts);
    SuiteSummary sum;
    sum.runs = results.size();
    for (const auto& r : results) {
        const std::string label = r.scenario + "/" + to_string(r.protocol) + "/seed-" + std::to_string(r.seed);
        if (!r.ok) {
            ++sum.failures;
            sum.errors.push_back(label + ": " + r.error);
            continue;
        }
        try {
            write_run(out, r);
        } catch (const std::exception& e) {
            ++sum.failures;
            sum.errors.push_back(label + ": " + e.what());
        }
    }
    std::filesystem::create_directories(out);
    std::ofstream cmp(out / "comparison.csv");
    write_comparison(cmp, results);
    return sum;
}

}  // namespace manet::suite
