#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "manet/trace.hpp"

namespace manet::metrics {

inline constexpr int kSchemaVersion = 1;

/// Half-open interval [begin, end).
struct Window {
    SimTime begin;
    SimTime end;
    bool contains(SimTime t) const { return t >= begin && t < end; }
    double seconds() const { return (end - begin).seconds(); }
};

/// Consecutive windows of `length` covering [0, end); the last may be shorter.
std::vector<Window> windows(SimTime end, SimTime length);

// Each metric is a pure function of the trace. Optional results are absent
// when the quantity is undefined for the window.

/// Of the packets generated in the window, the fraction eventually delivered.
std::optional<double> compute_pdf(const TraceLog& trace, Window w);
/// Honest control transmissions per delivered data packet, both counted by time in the window.
std::optional<double> compute_nrl(const TraceLog& trace, Window w);
/// Delivered payload in kilobits per second.
double compute_at(const TraceLog& trace, Window w);
/// Mean generation-to-arrival latency of packets arriving in the window.
std::optional<double> compute_aed(const TraceLog& trace, Window w);
/// Mean |gap_i - gap_{i-1}| over successive inter-arrival gaps, per flow, pooled.
std::optional<double> compute_jitter(const TraceLog& trace, Window w);

struct HandlerCost {
    std::uint64_t messages = 0;
    std::uint64_t ops = 0;
    std::int64_t wall_ns = 0;
    double avg_ops() const { return messages ? static_cast<double>(ops) / static_cast<double>(messages) : 0.0; }
    double avg_us() const { return messages ? static_cast<double>(wall_ns) / 1e3 / static_cast<double>(messages) : 0.0; }
};

struct Processing {
    HandlerCost all;
    std::map<wire::MsgType, HandlerCost> by_type;
};

Processing compute_processing(const TraceLog& trace);

struct Counters {
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;       // by arrival time
    std::uint64_t control_tx = 0;      // honest only
    std::uint64_t rreq_ack_tx = 0;
    std::uint64_t forged_tx = 0;
    std::uint64_t snooped = 0;
    std::uint64_t swallowed = 0;
    std::map<DropReason, std::uint64_t> drops;  // data packets only
};

Counters compute_counters(const TraceLog& trace, Window w);

struct Row {
    Window window;
    std::optional<double> pdf;
    std::optional<double> nrl;
    double at = 0;
    std::optional<double> aed;
    std::optional<double> jitter;
    Counters counters;
};

struct AttackerSummary {
    std::uint64_t forged = 0;
    std::uint64_t snooped = 0;
    std::uint64_t swallowed = 0;
};

struct ReportMeta {
    std::string scenario;
    std::string protocol;
    std::uint64_t seed = 0;
    SimTime end;
    SimTime window = SimTime::from_ms(25'000);
};

struct MetricsReport {
    ReportMeta meta;
    std::vector<Row> rows;
    Row total;
    Processing processing;
    std::map<NodeId, AttackerSummary> attackers;

    std::string to_json() const;
    void write_csv(std::ostream& os, bool header = true) const;
};

MetricsReport build_report(const TraceLog& trace, const ReportMeta& meta);

/// Row values by metric name, used by the CSV writer and comparison tables.
std::vector<std::pair<std::string, std::optional<double>>> metric_values(const Row& r);

}  // namespace manet::metrics
