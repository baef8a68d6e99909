#include <gtest/gtest.h>

#include <random>

#include "manet/rreq_ack_cache.hpp"

using namespace manet;
using namespace manet::sec;

namespace {

const SimTime kPdt = ProtocolConstants{}.path_discovery_time();
const Timestamp kT10 = Timestamp::from_seconds(10.0);

}  // namespace

TEST(Cache, PathDiscoveryTimeIs5600ms) { EXPECT_EQ(kPdt, SimTime::from_ms(5600)); }

TEST(Cache, AckInsertExample) {
    RreqAckCache c(kPdt);
    const auto e = recv_rreq_ack(c, {NodeId(5), NodeId(5), kT10}, SimTime::from_ms(10'300));
    EXPECT_EQ(e.nb, NodeId(5));
    EXPECT_TRUE(e.f);
    EXPECT_EQ(e.ex, SimTime::from_ms(15'900));
}

TEST(Cache, ExpiryIsAlwaysNowPlusPdt) {
    std::mt19937_64 rng(11);
    RreqAckCache c(kPdt, 100'000);
    for (int i = 0; i < 1000; ++i) {
        const SimTime now = SimTime::from_ns(static_cast<std::int64_t>(rng() >> 20));
        const auto& e = c.upsert(NodeId(rng() % 30 + 1), NodeId(rng() % 30 + 1), Timestamp{rng() % 8}, rng() & 1, now);
        ASSERT_EQ(e.ex - now, kPdt);
    }
}

TEST(Cache, UpsertRefreshesExpiry) {
    RreqAckCache c(kPdt);
    c.upsert(NodeId(3), NodeId(5), kT10, false, SimTime::from_ms(10'000));
    const auto& e = c.upsert(NodeId(3), NodeId(5), kT10, false, SimTime::from_ms(11'000));
    EXPECT_EQ(c.size(), 1u);
    EXPECT_EQ(e.ex, SimTime::from_ms(16'600));
}

TEST(Cache, BoundaryIsInclusive) {
    RreqAckCache c(kPdt);
    const auto& e = c.upsert(NodeId(4), NodeId(5), kT10, true, SimTime::from_ms(10'300));
    const SimTime ex = e.ex;
    EXPECT_TRUE(c.lookup(NodeId(4), NodeId(5), kT10, ex));
    EXPECT_FALSE(c.lookup(NodeId(4), NodeId(5), kT10, ex + SimTime::from_ns(1)));
    EXPECT_TRUE(c.purge_expired(ex).empty());
    EXPECT_EQ(c.purge_expired(SimTime::from_ms(16'000)).size(), 1u);
    EXPECT_EQ(c.size(), 0u);
}

TEST(Cache, PurgeAllPastExpiry) {
    std::mt19937_64 rng(5);
    RreqAckCache c(kPdt, 5000);
    for (int i = 0; i < 1000; ++i)
        c.upsert(NodeId(i + 1), NodeId(2), Timestamp{rng()}, false, SimTime::from_ms(static_cast<std::int64_t>(rng() % 100'000)));
    const auto gone = c.purge_expired(SimTime::from_ms(200'000));
    EXPECT_EQ(gone.size(), 1000u);
    EXPECT_EQ(c.size(), 0u);
    for (std::size_t i = 1; i < gone.size(); ++i) EXPECT_LE(gone[i - 1].ex, gone[i].ex);
}

TEST(Cache, CapacityEvictsEarliestExpiry) {
    RreqAckCache c(kPdt, 2);
    c.upsert(NodeId(1), NodeId(9), kT10, false, SimTime::from_ms(1));
    c.upsert(NodeId(2), NodeId(9), kT10, false, SimTime::from_ms(2));
    c.upsert(NodeId(3), NodeId(9), kT10, false, SimTime::from_ms(3));
    EXPECT_EQ(c.size(), 2u);
    EXPECT_FALSE(c.lookup(NodeId(1), NodeId(9), kT10, SimTime::from_ms(3)));
    EXPECT_TRUE(c.lookup(NodeId(3), NodeId(9), kT10, SimTime::from_ms(3)));
}

TEST(Cache, DuplicateRreqNamingSelf) {
    RreqAckCache c(kPdt);
    wire::RreqMessage r;
    r.destination = NodeId(5);
    r.timestamp = kT10;
    r.previous_node = NodeId(2);
    const SimTime now = SimTime::from_ms(10'050);
    EXPECT_FALSE(on_duplicate_rreq(c, NodeId(2), NodeId(3), r, now));  // plain AODV request
    r.ack_required = true;
    auto e = on_duplicate_rreq(c, NodeId(2), NodeId(3), r, now);
    ASSERT_TRUE(e);
    EXPECT_EQ(*e, (RreqAckCacheEntry{NodeId(3), NodeId(5), kT10, false, now + kPdt}));
    EXPECT_TRUE(on_duplicate_rreq(c, NodeId(2), NodeId(3), r, now));
    EXPECT_EQ(c.size(), 1u);

    r.previous_node = NodeId(1);
    EXPECT_FALSE(on_duplicate_rreq(c, NodeId(2), NodeId(4), r, now));
    EXPECT_EQ(c.size(), 1u);
}

TEST(Cache, ValidateMatchesAllThreeFields) {
    RreqAckCache c(kPdt);
    c.upsert(NodeId(4), NodeId(5), kT10, true, SimTime::from_ms(10'000));
    wire::RrepMessage r;
    r.destination = NodeId(5);
    r.timestamp = kT10;
    const SimTime now = SimTime::from_ms(10'100);
    EXPECT_EQ(validate_rrep(c, NodeId(4), r, now), Verdict::Accept);
    EXPECT_EQ(validate_rrep(c, NodeId(6), r, now), Verdict::Discard);
    r.timestamp = Timestamp::from_seconds(11.0);
    EXPECT_EQ(validate_rrep(c, NodeId(4), r, now), Verdict::Discard);
    r.timestamp = kT10;
    r.destination = NodeId(7);
    EXPECT_EQ(validate_rrep(c, NodeId(4), r, now), Verdict::Discard);
}

TEST(Cache, MakeAckCopiesRreqFields) {
    wire::RreqMessage r;
    r.destination = NodeId(5);
    r.timestamp = kT10;
    EXPECT_EQ(make_rreq_ack(NodeId(3), r), (wire::RreqAckMessage{NodeId(3), NodeId(5), kT10}));
}
