#include "manet/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace manet {

SimTime SimTime::from_seconds(double s) { return SimTime(static_cast<std::int64_t>(std::llround(s * 1e9))); }

Timestamp Timestamp::from_seconds(double s) {
    return Timestamp{static_cast<std::uint64_t>(std::llround(std::ldexp(s, 32)))};
}

Timestamp Timestamp::from_sim(SimTime t) {
    // ns * 2^32 / 1e9, rounded half up
    const unsigned __int128 scaled = (static_cast<unsigned __int128>(t.ns()) << 32) + 500'000'000u;
    return Timestamp{static_cast<std::uint64_t>(scaled / 1'000'000'000u)};
}

double Timestamp::seconds() const { return std::ldexp(static_cast<double>(raw), -32); }

std::string to_string(Protocol p) { return p == Protocol::Aodv ? "AODV" : "AODVSEC"; }

bool parse_protocol(const std::string& s, Protocol& out) {
    std::string up = s;
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
    if (up == "AODV") {
        out = Protocol::Aodv;
        return true;
    }
    if (up == "AODVSEC") {
        out = Protocol::AodvSec;
        return true;
    }
    return false;
}

}  // namespace manet
