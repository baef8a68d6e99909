#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace manet {

/// Network-layer node identity (stands for an IPv4 address). Zero means unspecified.
struct NodeId {
    std::uint32_t addr = 0;

    constexpr NodeId() = default;
    constexpr explicit NodeId(std::uint32_t a) : addr(a) {}

    constexpr bool specified() const { return addr != 0; }
    constexpr auto operator<=>(const NodeId&) const = default;
};

inline constexpr NodeId kUnspecified{};

/// Simulation clock in integer nanoseconds. All protocol timers use this type so
/// that expiry arithmetic is exact.
class SimTime {
public:
    constexpr SimTime() = default;
    static constexpr SimTime from_ns(std::int64_t ns) { return SimTime(ns); }
    static constexpr SimTime from_ms(std::int64_t ms) { return SimTime(ms * 1'000'000); }
    static SimTime from_seconds(double s);

    constexpr std::int64_t ns() const { return ns_; }
    constexpr double seconds() const { return static_cast<double>(ns_) / 1e9; }

    constexpr SimTime operator+(SimTime o) const { return SimTime(ns_ + o.ns_); }
    constexpr SimTime operator-(SimTime o) const { return SimTime(ns_ - o.ns_); }
    constexpr SimTime operator*(std::int64_t k) const { return SimTime(ns_ * k); }
    constexpr SimTime& operator+=(SimTime o) { ns_ += o.ns_; return *this; }
    constexpr auto operator<=>(const SimTime&) const = default;

private:
    constexpr explicit SimTime(std::int64_t ns) : ns_(ns) {}
    std::int64_t ns_ = 0;
};

/// Wire timestamp: unsigned 32.32 fixed-point seconds.
struct Timestamp {
    std::uint64_t raw = 0;

    static Timestamp from_seconds(double s);
    static Timestamp from_sim(SimTime t);
    double seconds() const;
    constexpr auto operator<=>(const Timestamp&) const = default;
};

/// Route-discovery and cache timing constants (RFC 3561 derived defaults).
struct ProtocolConstants {
    SimTime node_traversal_time = SimTime::from_ms(40);
    std::uint32_t net_diameter = 35;
    SimTime active_route_timeout = SimTime::from_ms(10'000);
    std::uint32_t rreq_retries = 2;
    std::uint8_t ttl_data = 64;
    std::size_t data_queue_limit = 64;
    std::size_t cache_capacity = 4096;

    SimTime net_traversal_time() const { return node_traversal_time * (2 * net_diameter); }
    SimTime path_discovery_time() const { return net_traversal_time() * 2; }
};

enum class Protocol : std::uint8_t { Aodv, AodvSec };

std::string to_string(Protocol p);
bool parse_protocol(const std::string& s, Protocol& out);

}  // namespace manet

template <>
struct std::hash<manet::NodeId> {
    std::size_t operator()(manet::NodeId n) const noexcept { return std::hash<std::uint32_t>{}(n.addr); }
};
