#include <gtest/gtest.h>

#include "manet/routing_table.hpp"

using namespace manet;
using namespace manet::aodv;

namespace {

const SimTime kLife = SimTime::from_ms(10'000);

RouteCandidate cand(std::uint32_t seq, std::uint32_t hops, std::uint32_t via = 2) {
    return {NodeId(5), NodeId(via), hops, seq, true};
}

}  // namespace

TEST(RoutingTable, HigherSeqWinsDespiteHops) {
    RoutingTable t;
    ASSERT_TRUE(t.update(cand(5, 3), SimTime{}, kLife));
    EXPECT_TRUE(t.update(cand(6, 9, 3), SimTime{}, kLife));
    EXPECT_EQ(t.find(NodeId(5))->next_hop, NodeId(3));
}

TEST(RoutingTable, EqualSeqFewerHopsWins) {
    RoutingTable t;
    t.update(cand(5, 3), SimTime{}, kLife);
    EXPECT_TRUE(t.update(cand(5, 2, 4), SimTime{}, kLife));
    EXPECT_FALSE(t.update(cand(5, 2, 6), SimTime{}, kLife));
    EXPECT_EQ(t.find(NodeId(5))->next_hop, NodeId(4));
}

TEST(RoutingTable, StaleSeqRejected) {
    RoutingTable t;
    t.update(cand(5, 3), SimTime{}, kLife);
    EXPECT_FALSE(t.update(cand(4, 1, 9), SimTime{}, kLife));
    EXPECT_EQ(t.find(NodeId(5))->hop_count, 3u);
}

TEST(RoutingTable, SeqComparisonWraps) {
    EXPECT_TRUE(seq_newer(1, 0xFFFFFFFFu));
    EXPECT_FALSE(seq_newer(0xFFFFFFFFu, 1));
    EXPECT_FALSE(seq_newer(7, 7));
}

TEST(RoutingTable, ExpiryInvalidatesOnLookup) {
    RoutingTable t;
    t.update(cand(5, 3), SimTime{}, kLife);
    EXPECT_NE(t.active(NodeId(5), kLife), nullptr);
    EXPECT_EQ(t.active(NodeId(5), kLife + SimTime::from_ns(1)), nullptr);
    EXPECT_EQ(t.find(NodeId(5))->state, RouteState::Invalid);
}

TEST(RoutingTable, InvalidateViaBumpsSeq) {
    RoutingTable t;
    t.update(cand(5, 3, 2), SimTime{}, kLife);
    t.update({NodeId(7), NodeId(2), 1, 1, true}, SimTime{}, kLife);
    t.update({NodeId(8), NodeId(3), 1, 1, true}, SimTime{}, kLife);
    const auto lost = t.invalidate_via(NodeId(2), SimTime{});
    ASSERT_EQ(lost.size(), 2u);
    EXPECT_EQ(t.find(NodeId(5))->dest_seq, 6u);
    EXPECT_EQ(t.find(NodeId(8))->state, RouteState::Valid);
}

TEST(RoutingTable, InvalidateIfViaNeedsMatchingHop) {
    RoutingTable t;
    t.update(cand(5, 3, 2), SimTime{}, kLife);
    EXPECT_FALSE(t.invalidate_if_via(NodeId(5), NodeId(4), 6));
    EXPECT_TRUE(t.invalidate_if_via(NodeId(5), NodeId(2), 6));
    EXPECT_FALSE(t.invalidate_if_via(NodeId(9), NodeId(2), 1));
}

TEST(RoutingTable, InvalidEntryYieldsToSameSeq) {
    RoutingTable t;
    t.update(cand(5, 2, 2), SimTime{}, kLife);
    t.invalidate_if_via(NodeId(5), NodeId(2), 5);
    EXPECT_TRUE(t.update(cand(5, 4, 3), SimTime{}, kLife));
    EXPECT_EQ(t.find(NodeId(5))->state, RouteState::Valid);
}

TEST(RoutingTable, PrecursorsSurviveReplacement) {
    RoutingTable t;
    t.update(cand(5, 3), SimTime{}, kLife);
    t.find(NodeId(5))->precursors.insert(NodeId(1));
    t.update(cand(6, 3), SimTime{}, kLife);
    EXPECT_TRUE(t.find(NodeId(5))->precursors.contains(NodeId(1)));
}
