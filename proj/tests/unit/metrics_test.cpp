#include <gtest/gtest.h>

#include <json.hpp>
#include <sstream>

#include "manet/metrics.hpp"
#include "manet/simnet.hpp"
#include "scenario_builders.hpp"

using namespace manet;
using namespace manet::metrics;

namespace {

SimTime s_(double s) { return SimTime::from_seconds(s); }

TraceRecord gen(double t, std::uint32_t seq, std::uint32_t flow = 1) {
    TraceRecord r;
    r.time = s_(t);
    r.kind = TraceKind::DataGenerated;
    r.flow = flow;
    r.seq = seq;
    r.bytes = 512;
    return r;
}

TraceRecord got(double t, std::uint32_t seq, std::uint32_t flow = 1) {
    TraceRecord r;
    r.time = s_(t);
    r.kind = TraceKind::DataDelivered;
    r.flow = flow;
    r.seq = seq;
    r.bytes = 512;
    return r;
}

TraceRecord control(double t, bool forged = false, wire::MsgType m = wire::MsgType::Rreq) {
    TraceRecord r;
    r.time = s_(t);
    r.kind = TraceKind::Send;
    r.msg = m;
    r.forged = forged;
    return r;
}

const Window kAll{SimTime{}, s_(100)};

}  // namespace

TEST(Metrics, PdfCountsGeneratedPackets) {
    TraceLog t;
    for (std::uint32_t i = 0; i < 100; ++i) {
        t.add(gen(1 + i * 0.1, i));
        if (i >= 5) t.add(got(1.05 + i * 0.1, i));
    }
    EXPECT_DOUBLE_EQ(*compute_pdf(t, kAll), 0.95);
    EXPECT_FALSE(compute_pdf(t, {s_(50), s_(60)}).has_value());
}

TEST(Metrics, PdfFollowsPacketAcrossWindowEdge) {
    TraceLog t;
    t.add(gen(24.9, 0));
    t.add(got(25.1, 0));
    EXPECT_DOUBLE_EQ(*compute_pdf(t, {SimTime{}, s_(25)}), 1.0);
    EXPECT_FALSE(compute_pdf(t, {s_(25), s_(50)}).has_value());
}

TEST(Metrics, NrlIgnoresForgedFrames) {
    TraceLog t;
    for (int i = 0; i < 40; ++i) t.add(control(1 + i * 0.01));
    for (int i = 0; i < 5; ++i) t.add(control(2, true, wire::MsgType::Rrep));
    for (std::uint32_t i = 0; i < 80; ++i) t.add(got(3 + i * 0.01, i));
    EXPECT_DOUBLE_EQ(*compute_nrl(t, kAll), 0.5);
    EXPECT_FALSE(compute_nrl(t, {s_(50), s_(60)}).has_value());
}

TEST(Metrics, NrlCountsAcks) {
    TraceLog t;
    t.add(control(1, false, wire::MsgType::RreqAck));
    t.add(control(1, false, wire::MsgType::Rerr));
    t.add(got(2, 0));
    EXPECT_DOUBLE_EQ(*compute_nrl(t, kAll), 2.0);
}

TEST(Metrics, ThroughputKilobits) {
    TraceLog t;
    for (std::uint32_t i = 0; i < 100; ++i) t.add(got(i * 0.1, i));
    EXPECT_DOUBLE_EQ(compute_at(t, {SimTime{}, s_(10)}), 40.96);
    EXPECT_DOUBLE_EQ(compute_at(t, {s_(20), s_(30)}), 0.0);
}

TEST(Metrics, EndToEndDelay) {
    TraceLog t;
    t.add(gen(1.0, 0));
    t.add(gen(2.0, 1));
    t.add(got(1.1, 0));
    t.add(got(2.3, 1));
    EXPECT_NEAR(*compute_aed(t, kAll), 0.2, 1e-12);
    EXPECT_FALSE(compute_aed(t, {s_(50), s_(60)}).has_value());
}

TEST(Metrics, JitterExamples) {
    TraceLog periodic;
    for (double a : {1.0, 2.0, 3.0}) periodic.add(got(a, static_cast<std::uint32_t>(a)));
    EXPECT_DOUBLE_EQ(*compute_jitter(periodic, kAll), 0.0);

    TraceLog uneven;
    for (double a : {1.0, 2.0, 3.5}) uneven.add(got(a, static_cast<std::uint32_t>(a)));
    EXPECT_DOUBLE_EQ(*compute_jitter(uneven, kAll), 0.5);

    TraceLog two;
    two.add(got(1, 0));
    two.add(got(2, 1));
    EXPECT_FALSE(compute_jitter(two, kAll).has_value());
}

TEST(Metrics, JitterIsPerFlow) {
    TraceLog t;
    for (double a : {1.0, 2.0, 3.0}) t.add(got(a, 0, 1));
    for (double a : {1.5, 2.5, 3.5}) t.add(got(a, 0, 2));
    EXPECT_DOUBLE_EQ(*compute_jitter(t, kAll), 0.0);
}

TEST(Metrics, WindowsCoverRun) {
    const auto w = windows(s_(60), s_(25));
    ASSERT_EQ(w.size(), 3u);
    EXPECT_EQ(w[2].begin, s_(50));
    EXPECT_EQ(w[2].end, s_(60));
    EXPECT_TRUE(w[0].contains(SimTime{}));
    EXPECT_FALSE(w[0].contains(s_(25)));
}

TEST(Metrics, ProcessingAverages) {
    TraceLog t;
    for (std::uint64_t ops : {2, 4}) {
        TraceRecord r;
        r.kind = TraceKind::Handler;
        r.msg = wire::MsgType::Rreq;
        r.ops = ops;
        t.add(r);
    }
    const auto p = compute_processing(t);
    EXPECT_DOUBLE_EQ(p.all.avg_ops(), 3.0);
    EXPECT_EQ(p.by_type.at(wire::MsgType::Rreq).messages, 2u);
    EXPECT_FALSE(p.by_type.contains(wire::MsgType::RreqAck));
}

TEST(Metrics, WindowCountersSumToTotals) {
    auto s = manet::testing::chain(4, 40.0);
    s.topology.radio.loss_rate = 0.2;
    const auto out = sim::run(s);
    const auto rep = build_report(out.trace, {"chain", "AODV", 1, out.end, s.metrics_window});
    Counters sum;
    for (const auto& row : rep.rows) {
        sum.generated += row.counters.generated;
        sum.delivered += row.counters.delivered;
        sum.control_tx += row.counters.control_tx;
    }
    EXPECT_EQ(sum.generated, rep.total.counters.generated);
    EXPECT_EQ(sum.delivered, rep.total.counters.delivered);
    EXPECT_EQ(sum.control_tx, rep.total.counters.control_tx);
    EXPECT_EQ(rep.total.counters.generated, out.conservation.generated);
}

TEST(Metrics, ReportSerializations) {
    auto s = manet::testing::chain(3, 12.0);
    const auto out = sim::run(s);
    const auto rep = build_report(out.trace, {"chain", "AODV", 1, out.end, s.metrics_window});
    const auto j = nlohmann::json::parse(rep.to_json());
    EXPECT_EQ(j.at("schema_version"), kSchemaVersion);
    std::ostringstream csv;
    rep.write_csv(csv);
    std::istringstream in(csv.str());
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "schema_version,scenario,protocol,seed,window_start,window_end,metric,value");
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_GT(rows, rep.rows.size());
}

TEST(Metrics, TraceRoundTripPreservesMetrics) {
    auto s = manet::testing::chain(3, 12.0);
    const auto out = sim::run(s);
    std::stringstream io;
    out.trace.write_jsonl(io);
    const auto back = TraceLog::read_jsonl(io);
    EXPECT_EQ(back.digest(), out.trace.digest());
    const Window w{SimTime{}, out.end};
    EXPECT_EQ(compute_pdf(back, w), compute_pdf(out.trace, w));
    EXPECT_EQ(compute_aed(back, w), compute_aed(out.trace, w));
}
