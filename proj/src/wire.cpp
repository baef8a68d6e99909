#include "manet/wire.hpp"

#include <cstdio>
#include <type_traits>

namespace manet::wire {

namespace {

class Writer {
public:
    void u8(std::uint32_t v, const char* field) {
        if (v > 0xFF) throw WireError(WireErrc::FieldOverflow, std::string(field) + " exceeds 8 bits");
        out_.push_back(static_cast<std::uint8_t>(v));
    }
    void u32(std::uint32_t v) {
        for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
    void u64(std::uint64_t v) {
        for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint8_t u8() {
        need(1);
        return in_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
        return v;
    }
    void reserved(std::uint8_t byte, std::uint8_t mask) {
        if ((byte & mask) != 0) throw WireError(WireErrc::ReservedBits, "nonzero reserved bits");
    }
    void finish() const {
        if (pos_ != in_.size()) throw WireError(WireErrc::TrailingBytes, "trailing bytes after message");
    }

private:
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) throw WireError(WireErrc::Truncated, "truncated buffer");
    }
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

std::uint32_t bit(bool b, int pos) { return b ? (1u << pos) : 0u; }

void put(Writer& w, const RreqMessage& m) {
    w.u8(static_cast<std::uint8_t>(MsgType::Rreq), "type");
    w.u8(bit(m.join, 7) | bit(m.repair, 6) | bit(m.gratuitous, 5) | bit(m.dest_only, 4) | bit(m.unknown_seq, 3) |
             bit(m.ack_required, 2),
         "flags");
    w.u8(0, "reserved");
    w.u8(m.hop_count, "hop_count");
    w.u32(m.broadcast_id);
    w.u32(m.destination.addr);
    w.u32(m.destination_seq);
    w.u32(m.originator.addr);
    w.u32(m.originator_seq);
    w.u64(m.timestamp.raw);
    w.u32(m.previous_node.addr);
}

void put(Writer& w, const RrepMessage& m) {
    if (m.prefix_size > 0x1F) throw WireError(WireErrc::FieldOverflow, "prefix_size exceeds 5 bits");
    w.u8(static_cast<std::uint8_t>(MsgType::Rrep), "type");
    w.u8(bit(m.repair, 7) | bit(m.ack_required, 6), "flags");
    w.u8(m.prefix_size, "prefix_size");
    w.u8(m.hop_count, "hop_count");
    w.u32(m.destination.addr);
    w.u32(m.destination_seq);
    w.u32(m.originator.addr);
    w.u32(m.lifetime_ms);
    w.u64(m.timestamp.raw);
}

void put(Writer& w, const RerrMessage& m) {
    if (m.unreachable.empty()) throw WireError(WireErrc::EmptyRerr, "RERR with no destinations");
    w.u8(static_cast<std::uint8_t>(MsgType::Rerr), "type");
    w.u8(0, "reserved");
    w.u8(0, "reserved");
    w.u8(static_cast<std::uint32_t>(std::min<std::size_t>(m.unreachable.size(), 0x100)), "dest_count");
    for (const auto& u : m.unreachable) {
        w.u32(u.destination.addr);
        w.u32(u.destination_seq);
    }
}

void put(Writer& w, const RreqAckMessage& m) {
    w.u8(static_cast<std::uint8_t>(MsgType::RreqAck), "type");
    w.u8(0, "reserved");
    w.u8(0, "reserved");
    w.u8(0, "reserved");
    w.u32(m.own_address.addr);
    w.u32(m.destination.addr);
    w.u64(m.timestamp.raw);
}

void put(Writer& w, const DataPacket& m) {
    w.u8(static_cast<std::uint8_t>(MsgType::Data), "type");
    w.u8(0, "reserved");
    w.u8(0, "reserved");
    w.u8(m.ttl, "ttl");
    w.u32(m.flow_id);
    w.u32(m.seq);
    w.u32(m.src.addr);
    w.u32(m.dst.addr);
    w.u32(m.payload_len);
    w.u64(m.sent_at.raw);
}

RreqMessage get_rreq(Reader& r) {
    RreqMessage m;
    const std::uint8_t flags = r.u8();
    r.reserved(flags, 0x03);
    m.join = flags & 0x80;
    m.repair = flags & 0x40;
    m.gratuitous = flags & 0x20;
    m.dest_only = flags & 0x10;
    m.unknown_seq = flags & 0x08;
    m.ack_required = flags & 0x04;
    r.reserved(r.u8(), 0xFF);
    m.hop_count = r.u8();
    m.broadcast_id = r.u32();
    m.destination = NodeId(r.u32());
    m.destination_seq = r.u32();
    m.originator = NodeId(r.u32());
    m.originator_seq = r.u32();
    m.timestamp.raw = r.u64();
    m.previous_node = NodeId(r.u32());
    return m;
}

RrepMessage get_rrep(Reader& r) {
    RrepMessage m;
    const std::uint8_t flags = r.u8();
    r.reserved(flags, 0x3F);
    m.repair = flags & 0x80;
    m.ack_required = flags & 0x40;
    const std::uint8_t prefix = r.u8();
    r.reserved(prefix, 0xE0);
    m.prefix_size = prefix;
    m.hop_count = r.u8();
    m.destination = NodeId(r.u32());
    m.destination_seq = r.u32();
    m.originator = NodeId(r.u32());
    m.lifetime_ms = r.u32();
    m.timestamp.raw = r.u64();
    return m;
}

RerrMessage get_rerr(Reader& r) {
    r.reserved(r.u8(), 0xFF);
    r.reserved(r.u8(), 0xFF);
    const std::uint8_t count = r.u8();
    if (count == 0) throw WireError(WireErrc::EmptyRerr, "RERR with no destinations");
    RerrMessage m;
    m.unreachable.reserve(count);
    for (int i = 0; i < count; ++i) {
        Unreachable u;
        u.destination = NodeId(r.u32());
        u.destination_seq = r.u32();
        m.unreachable.push_back(u);
    }
    return m;
}

RreqAckMessage get_rreq_ack(Reader& r) {
    for (int i = 0; i < 3; ++i) r.reserved(r.u8(), 0xFF);
    RreqAckMessage m;
    m.own_address = NodeId(r.u32());
    m.destination = NodeId(r.u32());
    m.timestamp.raw = r.u64();
    return m;
}

DataPacket get_data(Reader& r) {
    r.reserved(r.u8(), 0xFF);
    r.reserved(r.u8(), 0xFF);
    DataPacket m;
    m.ttl = r.u8();
    m.flow_id = r.u32();
    m.seq = r.u32();
    m.src = NodeId(r.u32());
    m.dst = NodeId(r.u32());
    m.payload_len = r.u32();
    m.sent_at.raw = r.u64();
    return m;
}

}  // namespace

MsgType type_of(const Message& m) {
    return std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, RreqMessage>) return MsgType::Rreq;
            else if constexpr (std::is_same_v<T, RrepMessage>) return MsgType::Rrep;
            else if constexpr (std::is_same_v<T, RerrMessage>) return MsgType::Rerr;
            else if constexpr (std::is_same_v<T, RreqAckMessage>) return MsgType::RreqAck;
            else return MsgType::Data;
        },
        m);
}

bool is_control(MsgType t) { return t != MsgType::Data; }

const char* name_of(MsgType t) {
    switch (t) {
        case MsgType::Rreq: return "RREQ";
        case MsgType::Rrep: return "RREP";
        case MsgType::Rerr: return "RERR";
        case MsgType::RreqAck: return "RREQ-ACK";
        case MsgType::Data: return "DATA";
    }
    return "?";
}

std::vector<std::uint8_t> encode(const Message& msg) {
    if (const auto* rerr = std::get_if<RerrMessage>(&msg); rerr && rerr->unreachable.size() > 0xFF)
        throw WireError(WireErrc::FieldOverflow, "dest_count exceeds 8 bits");
    Writer w;
    std::visit([&](const auto& m) { put(w, m); }, msg);
    return w.take();
}

Message decode(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    const std::uint8_t tag = r.u8();
    Message out;
    switch (static_cast<MsgType>(tag)) {
        case MsgType::Rreq: out = get_rreq(r); break;
        case MsgType::Rrep: out = get_rrep(r); break;
        case MsgType::Rerr: out = get_rerr(r); break;
        case MsgType::RreqAck: out = get_rreq_ack(r); break;
        case MsgType::Data: out = get_data(r); break;
        default: throw WireError(WireErrc::UnknownType, "unknown type tag " + std::to_string(tag));
    }
    r.finish();
    return out;
}

std::string hex_dump(std::span<const std::uint8_t> bytes) {
    std::string out;
    char buf[8];
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (i % 4 == 0 && i != 0) out += (i % 16 == 0) ? '\n' : ' ';
        std::snprintf(buf, sizeof buf, "%02x", bytes[i]);
        out += buf;
    }
    return out;
}

}  // namespace manet::wire
