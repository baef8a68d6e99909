#include "manet/metrics.hpp"

#include <cmath>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace manet::metrics {

namespace {

using Key = std::pair<std::uint32_t, std::uint32_t>;  // (flow, seq)

bool is_data_drop(const TraceRecord& r) { return r.kind == TraceKind::Drop && r.flow != 0; }

std::set<Key> delivered_keys(const TraceLog& trace) {
    std::set<Key> out;
    for (const auto& r : trace.records())
        if (r.kind == TraceKind::DataDelivered) out.insert({r.flow, r.seq});
    return out;
}

}  // namespace

std::vector<Window> windows(SimTime end, SimTime length) {
    std::vector<Window> out;
    if (length <= SimTime{}) return out;
    for (SimTime b; b < end; b += length) out.push_back({b, std::min(b + length, end)});
    return out;
}

std::optional<double> compute_pdf(const TraceLog& trace, Window w) {
    const auto delivered = delivered_keys(trace);
    std::uint64_t gen = 0, ok = 0;
    for (const auto& r : trace.records()) {
        if (r.kind != TraceKind::DataGenerated || !w.contains(r.time)) continue;
        ++gen;
        ok += delivered.contains({r.flow, r.seq});
    }
    if (gen == 0) return std::nullopt;
    return static_cast<double>(ok) / static_cast<double>(gen);
}

std::optional<double> compute_nrl(const TraceLog& trace, Window w) {
    std::uint64_t control = 0, delivered = 0;
    for (const auto& r : trace.records()) {
        if (!w.contains(r.time)) continue;
        if (r.kind == TraceKind::Send && wire::is_control(r.msg) && !r.forged) ++control;
        if (r.kind == TraceKind::DataDelivered) ++delivered;
    }
    if (delivered == 0) return std::nullopt;
    return static_cast<double>(control) / static_cast<double>(delivered);
}

double compute_at(const TraceLog& trace, Window w) {
    if (w.seconds() <= 0) return 0;
    std::uint64_t bytes = 0;
    for (const auto& r : trace.records())
        if (r.kind == TraceKind::DataDelivered && w.contains(r.time)) bytes += r.bytes;
    return static_cast<double>(bytes) * 8.0 / w.seconds() / 1000.0;
}

std::optional<double> compute_aed(const TraceLog& trace, Window w) {
    std::map<Key, SimTime> born;
    for (const auto& r : trace.records())
        if (r.kind == TraceKind::DataGenerated) born.emplace(Key{r.flow, r.seq}, r.time);
    double sum = 0;
    std::uint64_t n = 0;
    for (const auto& r : trace.records()) {
        if (r.kind != TraceKind::DataDelivered || !w.contains(r.time)) continue;
        auto it = born.find({r.flow, r.seq});
        const SimTime sent = it != born.end() ? it->second : r.sent_at;
        sum += (r.time - sent).seconds();
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

std::optional<double> compute_jitter(const TraceLog& trace, Window w) {
    std::map<std::uint32_t, std::vector<SimTime>> arrivals;
    for (const auto& r : trace.records())
        if (r.kind == TraceKind::DataDelivered && w.contains(r.time)) arrivals[r.flow].push_back(r.time);
    double sum = 0;
    std::uint64_t n = 0;
    for (const auto& [flow, t] : arrivals) {
        for (std::size_t i = 2; i < t.size(); ++i) {
            const double g1 = (t[i] - t[i - 1]).seconds();
            const double g0 = (t[i - 1] - t[i - 2]).seconds();
            sum += std::abs(g1 - g0);
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

Processing compute_processing(const TraceLog& trace) {
    Processing p;
    for (const auto& r : trace.records()) {
        if (r.kind != TraceKind::Handler) continue;
        for (HandlerCost* c : {&p.all, &p.by_type[r.msg]}) {
            ++c->messages;
            c->ops += r.ops;
            c->wall_ns += r.wall_ns;
        }
    }
    return p;
}

Counters compute_counters(const TraceLog& trace, Window w) {
    Counters c;
    for (const auto& r : trace.records()) {
        if (!w.contains(r.time)) continue;
        switch (r.kind) {
            case TraceKind::DataGenerated: ++c.generated; break;
            case TraceKind::DataDelivered: ++c.delivered; break;
            case TraceKind::Send:
                if (!wire::is_control(r.msg)) break;
                if (r.forged) {
                    ++c.forged_tx;
                } else {
                    ++c.control_tx;
                    if (r.msg == wire::MsgType::RreqAck) ++c.rreq_ack_tx;
                }
                break;
            case TraceKind::Snoop: ++c.snooped; break;
            case TraceKind::Swallow: ++c.swallowed; break;
            default:
                if (is_data_drop(r)) ++c.drops[r.reason];
                break;
        }
    }
    return c;
}

namespace {

Row make_row(const TraceLog& trace, Window w) {
    Row r;
    r.window = w;
    r.pdf = compute_pdf(trace, w);
    r.nrl = compute_nrl(trace, w);
    r.at = compute_at(trace, w);
    r.aed = compute_aed(trace, w);
    r.jitter = compute_jitter(trace, w);
    r.counters = compute_counters(trace, w);
    return r;
}

nlohmann::ordered_json opt(const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nullptr; }

nlohmann::ordered_json row_json(const Row& r) {
    nlohmann::ordered_json j;
    j["start"] = r.window.begin.seconds();
    j["end"] = r.window.end.seconds();
    for (const auto& [name, v] : metric_values(r)) j[name] = opt(v);
    nlohmann::ordered_json drops = nlohmann::ordered_json::object();
    for (const auto& [reason, k] : r.counters.drops) drops[name_of(reason)] = k;
    j["drops"] = drops;
    return j;
}

nlohmann::ordered_json cost_json(const HandlerCost& c) {
    return {{"messages", c.messages}, {"ops", c.ops}, {"avg_ops", c.avg_ops()}, {"avg_us", c.avg_us()}};
}

std::string csv_number(const std::optional<double>& v) {
    if (!v) return "";
    std::ostringstream os;
    os.precision(10);
    os << *v;
    return os.str();
}

}  // namespace

std::vector<std::pair<std::string, std::optional<double>>> metric_values(const Row& r) {
    const auto& c = r.counters;
    auto d = [](std::uint64_t v) { return std::optional<double>(static_cast<double>(v)); };
    return {
        {"pdf", r.pdf},
        {"nrl", r.nrl},
        {"at_kbps", r.at},
        {"aed_s", r.aed},
        {"jitter_s", r.jitter},
        {"generated", d(c.generated)},
        {"delivered", d(c.delivered)},
        {"control_tx", d(c.control_tx)},
        {"rreq_ack_tx", d(c.rreq_ack_tx)},
        {"forged_tx", d(c.forged_tx)},
        {"snooped", d(c.snooped)},
        {"swallowed", d(c.swallowed)},
    };
}

MetricsReport build_report(const TraceLog& trace, const ReportMeta& meta) {
    MetricsReport rep;
    rep.meta = meta;
    for (const auto& w : windows(meta.end, meta.window)) rep.rows.push_back(make_row(trace, w));
    rep.total = make_row(trace, {SimTime{}, meta.end});
    rep.processing = compute_processing(trace);
    for (const auto& r : trace.records()) {
        switch (r.kind) {
            case TraceKind::AttackLaunched: ++rep.attackers[r.node].forged; break;
            case TraceKind::Snoop: ++rep.attackers[r.node].snooped; break;
            case TraceKind::Swallow: ++rep.attackers[r.node].swallowed; break;
            default: break;
        }
    }
    return rep;
}

std::string MetricsReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["scenario"] = meta.scenario;
    j["protocol"] = meta.protocol;
    j["seed"] = meta.seed;
    j["sim_time_s"] = meta.end.seconds();
    j["window_s"] = meta.window.seconds();
    j["total"] = row_json(total);
    nlohmann::ordered_json proc;
    proc["all"] = cost_json(processing.all);
    for (const auto& [type, c] : processing.by_type) proc[wire::name_of(type)] = cost_json(c);
    j["processing"] = proc;
    nlohmann::ordered_json att = nlohmann::ordered_json::array();
    for (const auto& [n, a] : attackers)
        att.push_back({{"node", n.addr}, {"forged", a.forged}, {"snooped", a.snooped}, {"swallowed", a.swallowed}});
    j["attackers"] = att;
    nlohmann::ordered_json ws = nlohmann::ordered_json::array();
    for (const auto& r : rows) ws.push_back(row_json(r));
    j["windows"] = ws;
    return j.dump(2);
}

void MetricsReport::write_csv(std::ostream& os, bool header) const {
    if (header) os << "schema_version,scenario,protocol,seed,window_start,window_end,metric,value\n";
    for (const auto& r : rows)
        for (const auto& [name, v] : metric_values(r))
            os << kSchemaVersion << ',' << meta.scenario << ',' << meta.protocol << ',' << meta.seed << ','
               << r.window.begin.seconds() << ',' << r.window.end.seconds() << ',' << name << ',' << csv_number(v)
               << '\n';
}

}  // namespace manet::metrics
