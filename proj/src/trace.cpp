#include "manet/trace.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace manet {

namespace {

constexpr std::array kKindNames{
    "send",       "recv",        "data_gen",   "data_deliver", "drop",         "route_write",   "route_invalidate",
    "disc_start", "disc_failed", "cache_insert", "cache_hit",  "cache_miss",   "cache_purge",   "rrep_discard",
    "handler",    "snoop",       "swallow",    "attack",       "attack_infeasible", "warning",
};

constexpr std::array kReasonNames{
    "none",      "loss", "no-route", "ttl", "blackhole", "link-failure", "queue-overflow", "discovery-failed",
    "decode",    "duplicate",
};

constexpr std::array kMsgTags{wire::MsgType::Rreq, wire::MsgType::Rrep, wire::MsgType::Rerr,
                              wire::MsgType::RreqAck, wire::MsgType::Data};

wire::MsgType parse_msg(const std::string& s) {
    for (auto t : kMsgTags)
        if (s == wire::name_of(t)) return t;
    throw std::runtime_error("unknown message type in trace: " + s);
}

}  // namespace

const char* name_of(TraceKind k) { return kKindNames.at(static_cast<std::size_t>(k)); }
const char* name_of(DropReason r) { return kReasonNames.at(static_cast<std::size_t>(r)); }

bool parse_trace_kind(const std::string& s, TraceKind& out) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i)
        if (s == kKindNames[i]) {
            out = static_cast<TraceKind>(i);
            return true;
        }
    return false;
}

bool parse_drop_reason(const std::string& s, DropReason& out) {
    for (std::size_t i = 0; i < kReasonNames.size(); ++i)
        if (s == kReasonNames[i]) {
            out = static_cast<DropReason>(i);
            return true;
        }
    return false;
}

std::string to_json_line(const TraceRecord& r) {
    nlohmann::ordered_json j;
    j["t"] = r.time.ns();
    j["node"] = r.node.addr;
    j["kind"] = name_of(r.kind);
    const bool has_msg = r.msg != wire::MsgType::Data || r.kind == TraceKind::Send || r.kind == TraceKind::Recv;
    if (has_msg) j["msg"] = wire::name_of(r.msg);
    if (r.peer.specified()) j["peer"] = r.peer.addr;
    if (r.target.specified()) j["target"] = r.target.addr;
    if (r.next_hop.specified()) j["next_hop"] = r.next_hop.addr;
    if (r.frame) j["frame"] = r.frame;
    if (r.forged) j["forged"] = true;
    if (r.flag) j["flag"] = true;
    if (r.reason != DropReason::None) j["reason"] = name_of(r.reason);
    if (r.flow) j["flow"] = r.flow;
    if (r.seq) j["seq"] = r.seq;
    if (r.hops) j["hops"] = r.hops;
    if (r.dest_seq) j["dest_seq"] = r.dest_seq;
    if (r.bytes) j["bytes"] = r.bytes;
    if (r.sent_at.ns()) j["sent_at"] = r.sent_at.ns();
    if (r.expiry.ns()) j["expiry"] = r.expiry.ns();
    if (r.stamp.raw) j["stamp"] = r.stamp.raw;
    if (r.ops) j["ops"] = r.ops;
    if (r.wall_ns) j["wall_ns"] = r.wall_ns;
    if (!r.note.empty()) j["note"] = r.note;
    return j.dump();
}

void TraceLog::write_jsonl(std::ostream& os) const {
    for (const auto& r : records_) os << to_json_line(r) << '\n';
}

TraceLog TraceLog::read_jsonl(std::istream& is) {
    TraceLog log;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            TraceRecord r;
            r.time = SimTime::from_ns(j.at("t").get<std::int64_t>());
            r.node = NodeId(j.at("node").get<std::uint32_t>());
            if (!parse_trace_kind(j.at("kind").get<std::string>(), r.kind))
                throw std::runtime_error("unknown kind");
            if (j.contains("msg")) r.msg = parse_msg(j["msg"].get<std::string>());
            r.peer = NodeId(j.value("peer", 0u));
            r.target = NodeId(j.value("target", 0u));
            r.next_hop = NodeId(j.value("next_hop", 0u));
            r.frame = j.value("frame", std::uint64_t{0});
            r.forged = j.value("forged", false);
            r.flag = j.value("flag", false);
            if (j.contains("reason") && !parse_drop_reason(j["reason"].get<std::string>(), r.reason))
                throw std::runtime_error("unknown drop reason");
            r.flow = j.value("flow", 0u);
            r.seq = j.value("seq", 0u);
            r.hops = j.value("hops", 0u);
            r.dest_seq = j.value("dest_seq", 0u);
            r.bytes = j.value("bytes", 0u);
            r.sent_at = SimTime::from_ns(j.value("sent_at", std::int64_t{0}));
            r.expiry = SimTime::from_ns(j.value("expiry", std::int64_t{0}));
            r.stamp.raw = j.value("stamp", std::uint64_t{0});
            r.ops = j.value("ops", std::uint64_t{0});
            r.wall_ns = j.value("wall_ns", std::int64_t{0});
            r.note = j.value("note", std::string{});
            log.add(std::move(r));
        } catch (const std::exception& e) {
            throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return log;
}

std::uint64_t TraceLog::digest() const {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& r : records_) {
        for (unsigned char c : to_json_line(r)) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= '\n';
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace manet
