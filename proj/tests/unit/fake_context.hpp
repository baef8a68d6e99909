#pragma once

#include <vector>

#include "manet/node.hpp"

namespace manet::testing {

// Records everything a node asks of its environment.
struct Sent {
    NodeId from;
    NodeId to;  // unspecified for broadcasts
    NodeId net_sender;
    wire::Message msg;
    bool forged = false;
};

class FakeContext final : public aodv::NodeContext {
public:
    SimTime clock;
    std::vector<Sent> sent;
    std::vector<std::pair<SimTime, aodv::Timer>> timers;
    std::vector<TraceRecord> records;

    SimTime now() const override { return clock; }
    void broadcast(NodeId from, NodeId net_sender, wire::Message msg, bool forged) override {
        sent.push_back({from, {}, net_sender, std::move(msg), forged});
    }
    void unicast(NodeId from, NodeId to, NodeId net_sender, wire::Message msg, bool forged) override {
        sent.push_back({from, to, net_sender, std::move(msg), forged});
    }
    void set_timer(NodeId, SimTime at, aodv::Timer timer) override { timers.emplace_back(at, timer); }
    void trace(TraceRecord r) override { records.push_back(std::move(r)); }

    template <class T>
    std::vector<const Sent*> of() const {
        std::vector<const Sent*> out;
        for (const auto& s : sent)
            if (std::holds_alternative<T>(s.msg)) out.push_back(&s);
        return out;
    }
    std::size_t count(TraceKind k) const {
        std::size_t n = 0;
        for (const auto& r : records) n += r.kind == k;
        return n;
    }
    void clear() {
        sent.clear();
        records.clear();
        timers.clear();
    }
};

inline wire::Frame frame(NodeId from, wire::Message m, std::uint64_t id = 1) {
    return wire::Frame{from, from, std::move(m), id};
}

}  // namespace manet::testing
