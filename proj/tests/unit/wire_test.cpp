#include <gtest/gtest.h>

#include <random>

#include "manet/wire.hpp"

using namespace manet;
using namespace manet::wire;

namespace {

bool throws_code(std::span<const std::uint8_t> bytes, WireErrc code) {
    try {
        (void)decode(bytes);
    } catch (const WireError& e) {
        return e.code() == code;
    }
    return false;
}

RreqMessage sample_rreq() {
    RreqMessage m;
    m.ack_required = true;
    m.hop_count = 3;
    m.broadcast_id = 77;
    m.destination = NodeId(5);
    m.destination_seq = 9;
    m.originator = NodeId(1);
    m.originator_seq = 4;
    m.timestamp = Timestamp::from_seconds(10.0);
    m.previous_node = NodeId(2);
    return m;
}

}  // namespace

TEST(Wire, RreqAckLayout) {
    const auto bytes = encode(RreqAckMessage{NodeId(4), NodeId(5), Timestamp::from_seconds(12.0)});
    const std::vector<std::uint8_t> want = {5, 0, 0, 0,  0, 0, 0, 4,  0, 0, 0, 5,
                                            0, 0, 0, 12, 0, 0, 0, 0};
    EXPECT_EQ(bytes, want);
}

TEST(Wire, FixedSizes) {
    EXPECT_EQ(encode(sample_rreq()).size(), 36u);
    EXPECT_EQ(encode(RrepMessage{}).size(), 28u);
    EXPECT_EQ(encode(DataPacket{}).size(), 32u);
    EXPECT_EQ(encode(RerrMessage{{{NodeId(1), 1}, {NodeId(2), 2}}}).size(), 4u + 16u);
}

TEST(Wire, HopCountOverflow) {
    auto m = sample_rreq();
    m.hop_count = 256;
    try {
        (void)encode(m);
        FAIL() << "expected overflow";
    } catch (const WireError& e) {
        EXPECT_EQ(e.code(), WireErrc::FieldOverflow);
    }
}

TEST(Wire, PrefixOverflow) {
    RrepMessage m;
    m.prefix_size = 32;
    EXPECT_THROW((void)encode(m), WireError);
}

TEST(Wire, EmptyRerrRejectedBothWays) {
    EXPECT_THROW((void)encode(RerrMessage{}), WireError);
    const std::vector<std::uint8_t> bytes = {3, 0, 0, 0};
    EXPECT_TRUE(throws_code(bytes, WireErrc::EmptyRerr));
}

TEST(Wire, EmptyBufferIsTruncated) { EXPECT_TRUE(throws_code({}, WireErrc::Truncated)); }

TEST(Wire, UnknownTag) {
    auto bytes = encode(RreqAckMessage{NodeId(1), NodeId(2), Timestamp{}});
    bytes[0] = 0x42;
    EXPECT_TRUE(throws_code(bytes, WireErrc::UnknownType));
}

TEST(Wire, ReservedBitInRreq) {
    auto bytes = encode(sample_rreq());
    bytes[2] |= 0x01;
    EXPECT_TRUE(throws_code(bytes, WireErrc::ReservedBits));
}

TEST(Wire, TrailingByte) {
    auto bytes = encode(sample_rreq());
    bytes.push_back(0);
    EXPECT_TRUE(throws_code(bytes, WireErrc::TrailingBytes));
}

TEST(Wire, EveryTruncationRejected) {
    const Message msgs[] = {sample_rreq(), RrepMessage{}, RerrMessage{{{NodeId(3), 1}}},
                            RreqAckMessage{NodeId(1), NodeId(2), Timestamp{5}}, DataPacket{}};
    for (const auto& m : msgs) {
        const auto bytes = encode(m);
        for (std::size_t n = 0; n < bytes.size(); ++n)
            EXPECT_TRUE(throws_code({bytes.data(), n}, WireErrc::Truncated)) << name_of(type_of(m)) << " len " << n;
    }
}

TEST(Wire, RoundTripRandomRrep) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        RrepMessage m;
        m.repair = rng() & 1;
        m.ack_required = rng() & 1;
        m.prefix_size = rng() % 32;
        m.hop_count = rng() % 256;
        m.destination = NodeId(static_cast<std::uint32_t>(rng()));
        m.destination_seq = static_cast<std::uint32_t>(rng());
        m.originator = NodeId(static_cast<std::uint32_t>(rng()));
        m.lifetime_ms = static_cast<std::uint32_t>(rng());
        m.timestamp = Timestamp{rng()};
        ASSERT_EQ(std::get<RrepMessage>(decode(encode(m))), m);
    }
}

TEST(Wire, TimestampFixedPoint) {
    EXPECT_EQ(Timestamp::from_seconds(1.5).raw, (1ULL << 32) + (1ULL << 31));
    EXPECT_DOUBLE_EQ(Timestamp::from_seconds(12.25).seconds(), 12.25);
    EXPECT_EQ(Timestamp::from_sim(SimTime::from_ms(2500)), Timestamp::from_seconds(2.5));
}
