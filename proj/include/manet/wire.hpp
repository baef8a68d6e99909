#pragma once

// Control and data packet formats. Multi-byte fields are big-endian; timestamps
// are 32.32 fixed point. Layouts:
//
//   RREQ (36 B)     type | J R G D U A rsv(2) | rsv(8) | hop
//                   broadcast id | dest | dest seq | orig | orig seq
//                   timestamp(8) | previous node
//   RREP (28 B)     type | R A rsv(6) | rsv(3) prefix(5) | hop
//                   dest | dest seq | orig | lifetime ms | timestamp(8)
//   RERR (4+8n B)   type | rsv(16) | count | count x (dest | dest seq)
//   RREQ-ACK (20 B) type | rsv(24) | own address | dest | timestamp(8)
//   DATA (32 B)     type | rsv(16) | ttl | flow | seq | src | dst | payload len
//                   sent at(8)

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "manet/types.hpp"

namespace manet::wire {

enum class MsgType : std::uint8_t {
    Rreq = 1,
    Rrep = 2,
    Rerr = 3,
    RreqAck = 5,
    Data = 0x10,
};

struct RreqMessage {
    bool join = false;
    bool repair = false;
    bool gratuitous = false;
    bool dest_only = false;
    bool unknown_seq = false;
    bool ack_required = false;  // A flag: originator runs the RREQ-ACK extension
    std::uint32_t hop_count = 0;
    std::uint32_t broadcast_id = 0;
    NodeId destination;
    std::uint32_t destination_seq = 0;
    NodeId originator;
    std::uint32_t originator_seq = 0;
    Timestamp timestamp;
    NodeId previous_node;

    bool operator==(const RreqMessage&) const = default;
};

struct RrepMessage {
    bool repair = false;
    bool ack_required = false;
    std::uint32_t prefix_size = 0;
    std::uint32_t hop_count = 0;
    NodeId destination;
    std::uint32_t destination_seq = 0;
    NodeId originator;
    std::uint32_t lifetime_ms = 0;
    Timestamp timestamp;

    bool operator==(const RrepMessage&) const = default;
};

struct Unreachable {
    NodeId destination;
    std::uint32_t destination_seq = 0;
    bool operator==(const Unreachable&) const = default;
};

struct RerrMessage {
    std::vector<Unreachable> unreachable;
    bool operator==(const RerrMessage&) const = default;
};

struct RreqAckMessage {
    NodeId own_address;
    NodeId destination;
    Timestamp timestamp;
    bool operator==(const RreqAckMessage&) const = default;
};

struct DataPacket {
    std::uint32_t flow_id = 0;
    std::uint32_t seq = 0;
    NodeId src;
    NodeId dst;
    std::uint32_t payload_len = 512;
    Timestamp sent_at;
    std::uint32_t ttl = 64;

    bool operator==(const DataPacket&) const = default;
};

using Message = std::variant<RreqMessage, RrepMessage, RerrMessage, RreqAckMessage, DataPacket>;

MsgType type_of(const Message& m);
bool is_control(MsgType t);
const char* name_of(MsgType t);

/// A message as seen by a receiver. link_sender is stamped by the radio and
/// cannot be forged; net_sender is the (spoofable) network-layer source.
struct Frame {
    NodeId link_sender;
    NodeId net_sender;
    Message body;
    std::uint64_t id = 0;  // assigned by the engine, not part of the encoding
};

enum class WireErrc {
    FieldOverflow,
    UnknownType,
    Truncated,
    ReservedBits,
    TrailingBytes,
    EmptyRerr,
};

class WireError : public std::runtime_error {
public:
    WireError(WireErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    WireErrc code() const { return code_; }

private:
    WireErrc code_;
};

std::vector<std::uint8_t> encode(const Message& msg);
Message decode(std::span<const std::uint8_t> bytes);

std::string hex_dump(std::span<const std::uint8_t> bytes);

}  // namespace manet::wire
