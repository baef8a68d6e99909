// aodvsim: scenario runner for the AODV / AODVSEC simulator.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "manet/metrics.hpp"
#include "manet/scenario.hpp"
#include "manet/simnet.hpp"
#include "manet/suite.hpp"

namespace fs = std::filesystem;
using namespace manet;

namespace {

enum class Level { Quiet, Info, Debug };

Level log_level() {
    const char* v = std::getenv("AODVSIM_LOG");
    if (v == nullptr) return Level::Info;
    const std::string s = v;
    if (s == "quiet" || s == "0") return Level::Quiet;
    if (s == "debug" || s == "2") return Level::Debug;
    return Level::Info;
}

void info(const std::string& msg) {
    if (log_level() != Level::Quiet) std::cerr << msg << '\n';
}

void debug(const std::string& msg) {
    if (log_level() == Level::Debug) std::cerr << "debug: " << msg << '\n';
}

bool load(const std::string& path, Scenario& out) {
    std::vector<ScenarioError> errors;
    out = load_scenario(path, errors);
    for (const auto& e : errors) {
        std::cerr << path;
        if (e.line) std::cerr << ':' << e.line;
        std::cerr << ": error: " << e.message << '\n';
    }
    return errors.empty();
}

std::string fmt(const std::optional<double>& v) {
    if (!v) return "-";
    std::ostringstream os;
    os.precision(4);
    os << *v;
    return os.str();
}

void print_summary(const metrics::MetricsReport& rep) {
    const auto& t = rep.total;
    std::cout << rep.meta.scenario << " " << rep.meta.protocol << " seed " << rep.meta.seed << ": pdf " << fmt(t.pdf)
              << ", nrl " << fmt(t.nrl) << ", at " << fmt(t.at) << " kb/s, aed " << fmt(t.aed) << " s, jitter "
              << fmt(t.jitter) << " s, ops/msg " << fmt(rep.processing.all.avg_ops()) << '\n';
    for (const auto& [n, a] : rep.attackers)
        std::cout << "  attacker " << n.addr << ": forged " << a.forged << ", snooped " << a.snooped << ", swallowed "
                  << a.swallowed << '\n';
}

std::vector<Protocol> parse_protocols(const std::vector<std::string>& names) {
    std::vector<Protocol> out;
    for (const auto& n : names) {
        Protocol p;
        if (!parse_protocol(n, p)) throw CLI::ValidationError("--protocols", "unknown protocol '" + n + "'");
        out.push_back(p);
    }
    return out;
}

int cmd_run(const std::string& path, const std::string& protocol, const std::optional<std::uint64_t>& seed,
            const fs::path& out, bool wall) {
    Scenario s;
    if (!load(path, s)) return 2;
    if (!protocol.empty() && !parse_protocol(protocol, s.protocol)) {
        std::cerr << "error: unknown protocol '" << protocol << "'\n";
        return 2;
    }
    if (seed) s.seed = *seed;
    sim::RunOptions opts;
    opts.wall_clock = wall;
    const auto r = suite::run_one({s}, opts);
    if (!r.ok) {
        std::cerr << "error: run failed: " << r.error << '\n';
        return 1;
    }
    suite::write_run(out, r);
    info("wrote " + suite::run_dir(out, r).string());
    const auto& c = r.output.conservation;
    debug("conservation: generated " + std::to_string(c.generated) + ", delivered " + std::to_string(c.delivered) +
          ", in flight " + std::to_string(c.in_flight_engine));
    print_summary(r.report);
    if (!c.balanced()) {
        std::cerr << "error: packet conservation violated (trace " << c.in_flight_trace << " in flight, engine "
                  << c.in_flight_engine << ")\n";
        return 1;
    }
    return 0;
}

int cmd_suite(const fs::path& dir, const std::vector<std::string>& protocol_names,
              const std::vector<std::uint64_t>& seeds, const fs::path& out, bool wall) {
    std::vector<fs::path> files;
    if (fs::is_directory(dir)) {
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".scn") files.push_back(e.path());
    } else {
        files.push_back(dir);
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "error: no .scn files in " << dir << '\n';
        return 2;
    }
    bool bad = false;
    std::vector<Scenario> scenarios;
    for (const auto& f : files) {
        Scenario s;
        if (load(f.string(), s)) scenarios.push_back(std::move(s));
        else bad = true;
    }
    const auto protocols = parse_protocols(protocol_names);
    sim::RunOptions opts;
    opts.wall_clock = wall;
    info("running " + std::to_string(scenarios.size() * protocols.size() * std::max<std::size_t>(seeds.size(), 1)) +
         " simulations");
    const auto sum = suite::run_suite(scenarios, protocols, seeds, out, opts);
    for (const auto& e : sum.errors) std::cerr << "error: " << e << '\n';
    std::cout << sum.runs - sum.failures << " of " << sum.runs << " runs succeeded; outputs in " << out.string()
              << '\n';
    return bad || sum.failures > 0 ? 1 : 0;
}

int cmd_validate(const std::string& path) {
    Scenario s;
    if (!load(path, s)) return 2;
    std::cout << path << ": ok (" << s.name << ", " << s.topology.node_count << " nodes, " << s.flows.size()
              << " flow(s), " << s.attacks.size() << " attack(s), " << s.sim_time.seconds() << " s)\n";
    return 0;
}

int cmd_replay(const std::string& path, double window, std::optional<double> end, const std::string& label,
               const fs::path& csv_out) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open " << path << '\n';
        return 2;
    }
    TraceLog log;
    try {
        log = TraceLog::read_jsonl(in);
    } catch (const std::exception& e) {
        std::cerr << "error: " << path << ": " << e.what() << '\n';
        return 2;
    }
    metrics::ReportMeta meta;
    meta.scenario = fs::path(path).stem().string();
    meta.protocol = label;
    meta.window = SimTime::from_seconds(window);
    if (end) {
        meta.end = SimTime::from_seconds(*end);
    } else {
        SimTime last;
        for (const auto& r : log.records()) last = std::max(last, r.time);
        const std::int64_t w = meta.window.ns();
        meta.end = SimTime::from_ns((last.ns() / w + 1) * w);
    }
    const auto rep = metrics::build_report(log, meta);
    std::cout << rep.to_json() << '\n';
    if (!csv_out.empty()) {
        std::ofstream csv(csv_out);
        rep.write_csv(csv);
        if (!csv) {
            std::cerr << "error: cannot write " << csv_out << '\n';
            return 1;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AODV / AODVSEC routing simulator"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run one scenario and write trace and metrics");
    std::string run_path, run_protocol;
    std::optional<std::uint64_t> run_seed;
    std::string run_out = "out";
    bool run_wall = false;
    run->add_option("scenario", run_path, "Scenario file")->required();
    run->add_option("--protocol", run_protocol, "AODV or AODVSEC (overrides the file)");
    run->add_option("--seed", run_seed, "Random seed (overrides the file)");
    run->add_option("--out", run_out, "Output directory");
    run->add_flag("--wall-clock", run_wall, "Record handler wall time (non-deterministic)");

    auto* suite_cmd = app.add_subcommand("suite", "Run every scenario in a directory under each protocol and seed");
    std::string suite_dir, suite_out = "out";
    std::vector<std::string> suite_protocols{"AODV", "AODVSEC"};
    std::vector<std::uint64_t> suite_seeds;
    bool suite_wall = false;
    suite_cmd->add_option("dir", suite_dir, "Directory of .scn files (or a single file)")->required();
    suite_cmd->add_option("--protocols", suite_protocols, "Protocols to compare")->delimiter(',');
    suite_cmd->add_option("--seeds", suite_seeds, "Seeds (default 1)")->delimiter(',');
    suite_cmd->add_option("--out", suite_out, "Output directory");
    suite_cmd->add_flag("--wall-clock", suite_wall, "Record handler wall time");

    auto* val = app.add_subcommand("validate", "Check a scenario file and report every error");
    std::string val_path;
    val->add_option("scenario", val_path, "Scenario file")->required();

    auto* rep = app.add_subcommand("replay", "Recompute metrics from a trace file alone");
    std::string rep_path, rep_label = "unknown", rep_csv;
    double rep_window = 25.0;
    std::optional<double> rep_end;
    rep->add_option("trace", rep_path, "trace.jsonl")->required();
    rep->add_option("--window", rep_window, "Window length in seconds")->check(CLI::PositiveNumber);
    rep->add_option("--end", rep_end, "Run length in seconds (default: last record, rounded up to a window)");
    rep->add_option("--protocol", rep_label, "Protocol label for the report");
    rep->add_option("--csv", rep_csv, "Also write the per-window CSV here");

    try {
        app.parse(argc, argv);
        if (*run) return cmd_run(run_path, run_protocol, run_seed, run_out, run_wall);
        if (*suite_cmd) return cmd_suite(suite_dir, suite_protocols, suite_seeds, suite_out, suite_wall);
        if (*val) return cmd_validate(val_path);
        if (*rep) return cmd_replay(rep_path, rep_window, rep_end, rep_label, rep_csv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
