#include "manet/simnet.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

namespace manet::sim {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

enum Stream : std::uint64_t { kJitter = 1, kLoss = 2, kPlacement = 3, kMotion = 4 };

Vec2 lerp(Vec2 a, Vec2 b, double f) { return {a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f}; }

double fraction(SimTime t, SimTime a, SimTime b) {
    if (b <= a) return 1.0;
    return static_cast<double>((t - a).ns()) / static_cast<double>((b - a).ns());
}

}  // namespace

std::uint64_t mix(std::uint64_t seed, std::initializer_list<std::uint64_t> key) {
    std::uint64_t h = splitmix(seed);
    for (std::uint64_t k : key) h = splitmix(h ^ splitmix(k));
    return h;
}

double unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::vector<int> bfs_hops(const std::vector<Vec2>& pos, double range, std::uint32_t from) {
    std::vector<int> hops(pos.size(), -1);
    if (from >= pos.size()) return hops;
    std::deque<std::uint32_t> q{from};
    hops[from] = 0;
    while (!q.empty()) {
        const auto u = q.front();
        q.pop_front();
        for (std::uint32_t v = 0; v < pos.size(); ++v) {
            if (hops[v] >= 0 || distance(pos[u], pos[v]) > range) continue;
            hops[v] = hops[u] + 1;
            q.push_back(v);
        }
    }
    return hops;
}

bool connected(const std::vector<Vec2>& pos, double range) {
    if (pos.empty()) return true;
    const auto h = bfs_hops(pos, range, 0);
    return std::all_of(h.begin(), h.end(), [](int x) { return x >= 0; });
}

std::vector<Vec2> random_placement(const Topology& topo, std::uint64_t seed) {
    std::mt19937_64 rng(mix(seed, {kPlacement}));
    std::vector<Vec2> pos(topo.node_count);
    for (int attempt = 0; attempt < 100'000; ++attempt) {
        for (auto& p : pos) {
            p.x = unit(rng()) * topo.width;
            p.y = unit(rng()) * topo.height;
        }
        if (connected(pos, topo.radio.range_m)) return pos;
    }
    throw std::runtime_error("no connected placement found for " + std::to_string(topo.node_count) +
                             " nodes; enlarge the radio range or shrink the area");
}

// ---------------------------------------------------------------- mobility

Mobility::Mobility(const Scenario& s, std::uint64_t seed)
    : width_(s.topology.width), height_(s.topology.height), model_(s.mobility) {
    const auto& topo = s.topology;
    if (topo.positions.empty()) {
        start_ = random_placement(topo, seed);
    } else {
        start_.resize(topo.node_count);
        for (const auto& [n, p] : topo.positions)
            if (n.addr >= 1 && n.addr <= topo.node_count) start_[n.addr - 1] = p;
    }
    tracks_.resize(start_.size());
    for (std::uint32_t i = 0; i < tracks_.size(); ++i) {
        Track& t = tracks_[i];
        t.rng.seed(mix(seed, {kMotion, i + 1}));
        if (auto it = model_.scripted.find(NodeId(i + 1)); it != model_.scripted.end()) {
            t.script = it->second;
            std::stable_sort(t.script.begin(), t.script.end(),
                             [](const Keyframe& a, const Keyframe& b) { return a.at < b.at; });
        }
        t.legs.push_back({SimTime{}, SimTime{}, model_.pause, start_[i], start_[i]});
    }
}

void Mobility::extend(Track& t, SimTime until) {
    while (t.legs.back().resume <= until) {
        const Leg& last = t.legs.back();
        const Vec2 to{unit(t.rng()) * width_, unit(t.rng()) * height_};
        const double speed = model_.min_speed + unit(t.rng()) * (model_.max_speed - model_.min_speed);
        const SimTime travel = SimTime::from_seconds(distance(last.to, to) / speed);
        const SimTime depart = last.resume;
        t.legs.push_back({depart, depart + travel, depart + travel + model_.pause, last.to, to});
    }
}

Vec2 Mobility::position(NodeId n, SimTime t) {
    const std::uint32_t i = n.addr - 1;
    if (n.addr == 0 || i >= start_.size()) return {-1e9, -1e9};
    Track& tr = tracks_[i];
    if (!tr.script.empty()) {
        Keyframe prev{SimTime{}, start_[i]};
        for (const auto& k : tr.script) {
            if (t < k.at) return lerp(prev.pos, k.pos, fraction(t, prev.at, k.at));
            prev = k;
        }
        return prev.pos;
    }
    if (model_.kind == MobilityModel::Kind::Static) return start_[i];
    extend(tr, t);
    auto it = std::upper_bound(tr.legs.begin(), tr.legs.end(), t,
                               [](SimTime v, const Leg& l) { return v < l.depart; });
    const Leg& leg = *std::prev(it);
    if (t >= leg.arrive) return leg.to;
    return lerp(leg.from, leg.to, fraction(t, leg.depart, leg.arrive));
}

// ---------------------------------------------------------------- engine

Engine::Engine(const Scenario& s, RunOptions opts)
    : scenario_(s),
      opts_(opts),
      seed_(opts.has_seed_override ? opts.seed_override : s.seed),
      mobility_(s, seed_) {
    const std::uint32_t n = s.topology.node_count;
    up_.assign(n, true);
    bcast_count_.assign(n, 0);
    tx_count_.assign(n, 0);
    for (std::uint32_t a = 1; a <= n; ++a) {
        std::vector<adv::AttackSpec> mine;
        for (const auto& spec : s.attacks)
            if (spec.attacker.addr == a) mine.push_back(spec);
        if (mine.empty()) {
            nodes_.push_back(std::make_unique<aodv::Node>(NodeId(a), s.protocol, s.constants));
        } else {
            auto adv = std::make_unique<adv::Adversary>(NodeId(a), s.protocol, s.constants, std::move(mine),
                                                        NodeId(1'000'000 + a));
            adversaries_.push_back(adv.get());
            nodes_.push_back(std::move(adv));
        }
    }

    if (s.mobility.kind == MobilityModel::Kind::Static && s.mobility.scripted.empty() &&
        !connected(mobility_.initial(), s.topology.radio.range_m)) {
        TraceRecord w;
        w.kind = TraceKind::Warning;
        w.note = "topology is not connected at t=0";
        log_.add(std::move(w));
    }

    for (std::uint32_t i = 0; i < s.flows.size(); ++i) {
        Event e;
        e.at = s.flows[i].start;
        e.kind = EvKind::Traffic;
        e.flow = i;
        e.seq = 0;
        push(std::move(e));
    }
    for (const auto& f : s.failures) {
        Event e;
        e.at = f.at;
        e.kind = EvKind::Down;
        e.node = f.node;
        push(std::move(e));
    }
    for (auto* a : adversaries_) {
        enter(a->id());
        a->arm(*this);
    }
    current_ = {};
}

Engine::~Engine() = default;

aodv::Node& Engine::node(NodeId n) {
    if (n.addr == 0 || n.addr > nodes_.size()) throw std::out_of_range("no node " + std::to_string(n.addr));
    return *nodes_[n.addr - 1];
}

bool Engine::up(NodeId n) const { return n.addr >= 1 && n.addr <= up_.size() && up_[n.addr - 1]; }

void Engine::push(Event e) {
    e.order = order_++;
    queue_.push_back(std::move(e));
    std::push_heap(queue_.begin(), queue_.end(), Later{});
}

void Engine::guard(NodeId from) const {
    if (from != current_)
        throw CapabilityError("node " + std::to_string(current_.addr) + " attempted to transmit as link sender " +
                              std::to_string(from.addr));
}

bool Engine::in_range(NodeId a, NodeId b, SimTime t) {
    if (!up(a) || !up(b)) return false;
    return distance(mobility_.position(a, t), mobility_.position(b, t)) <= scenario_.topology.radio.range_m;
}

bool Engine::lost(NodeId from, std::uint64_t tx, NodeId to, std::uint32_t attempt) const {
    const double p = scenario_.topology.radio.loss_rate;
    if (p <= 0) return false;
    return unit(mix(seed_, {kLoss, from.addr, tx, to.addr, attempt})) < p;
}

void Engine::trace(TraceRecord r) {
    if (r.time == SimTime{}) r.time = now_;
    log_.add(std::move(r));
}

std::vector<std::uint8_t> Engine::encode_or_drop(NodeId from, const wire::Message& msg) {
    try {
        return wire::encode(msg);
    } catch (const wire::WireError& err) {
        TraceRecord r;
        r.time = now_;
        r.node = from;
        r.kind = TraceKind::Drop;
        r.msg = wire::type_of(msg);
        r.reason = DropReason::Decode;
        r.note = err.what();
        if (const auto* pkt = std::get_if<wire::DataPacket>(&msg)) {
            r.flow = pkt->flow_id;
            r.seq = pkt->seq;
        }
        log_.add(std::move(r));
        return {};
    }
}

void Engine::drop_in_engine(NodeId at, const std::vector<std::uint8_t>& bytes, DropReason reason) {
    const auto pkt = std::get<wire::DataPacket>(wire::decode(bytes));
    TraceRecord r;
    r.time = now_;
    r.node = at;
    r.kind = TraceKind::Drop;
    r.reason = reason;
    r.flow = pkt.flow_id;
    r.seq = pkt.seq;
    r.peer = pkt.src;
    r.target = pkt.dst;
    r.note = "node-down";
    log_.add(std::move(r));
}

void Engine::broadcast(NodeId from, NodeId net_sender, wire::Message msg, bool forged) {
    guard(from);
    auto bytes = encode_or_drop(from, msg);
    if (bytes.empty()) return;
    const std::uint64_t frame = ++next_frame_;
    const std::uint64_t tx = tx_count_[from.addr - 1]++;
    const std::uint64_t b = bcast_count_[from.addr - 1]++;

    TraceRecord r;
    r.time = now_;
    r.node = from;
    r.kind = TraceKind::Send;
    r.msg = wire::type_of(msg);
    r.frame = frame;
    r.forged = forged;
    r.bytes = static_cast<std::uint32_t>(bytes.size());
    log_.add(std::move(r));

    // The sender holds the frame for a random backoff and every neighbor hears
    // the same transmission. Drawing the delay per receiver instead would let a
    // reply overtake the re-flood it depends on.
    const auto& radio = scenario_.topology.radio;
    const auto jitter = static_cast<std::int64_t>(unit(mix(seed_, {kJitter, from.addr, b})) *
                                                  static_cast<double>(radio.flood_jitter.ns()));
    const SimTime departs = now_ + SimTime::from_ns(jitter);
    for (std::uint32_t a = 1; a <= nodes_.size(); ++a) {
        const NodeId to(a);
        if (to == from || !in_range(from, to, departs) || lost(from, tx, to, 0)) continue;
        Event e;
        e.at = departs + radio.prop_delay;
        e.kind = EvKind::Delivery;
        e.node = to;
        e.from = from;
        e.net_sender = net_sender;
        e.frame = frame;
        e.forged = forged;
        e.bytes = bytes;
        push(std::move(e));
    }
}

void Engine::unicast(NodeId from, NodeId to, NodeId net_sender, wire::Message msg, bool forged) {
    guard(from);
    auto bytes = encode_or_drop(from, msg);
    if (bytes.empty()) return;
    const bool data = std::holds_alternative<wire::DataPacket>(msg);
    const std::uint64_t frame = ++next_frame_;
    const std::uint64_t tx = tx_count_[from.addr - 1]++;

    TraceRecord r;
    r.time = now_;
    r.node = from;
    r.kind = TraceKind::Send;
    r.msg = wire::type_of(msg);
    r.peer = to;
    r.frame = frame;
    r.forged = forged;
    r.bytes = static_cast<std::uint32_t>(bytes.size());
    if (const auto* pkt = std::get_if<wire::DataPacket>(&msg)) {
        r.flow = pkt->flow_id;
        r.seq = pkt->seq;
    }
    log_.add(std::move(r));

    for (auto* a : adversaries_) {
        if (a->id() == from || a->id() == to || !in_range(from, a->id(), now_)) continue;
        Event o;
        o.at = now_ + scenario_.topology.radio.prop_delay;
        o.kind = EvKind::Overhear;
        o.node = a->id();
        o.from = from;
        o.net_sender = net_sender;
        o.intended = to;
        o.frame = frame;
        o.forged = forged;
        o.bytes = bytes;
        push(std::move(o));
    }

    Event e;
    e.at = now_;
    e.kind = EvKind::UnicastAttempt;
    e.node = to;
    e.from = from;
    e.net_sender = net_sender;
    e.frame = frame;
    e.forged = forged;
    e.data = data;
    e.tx = tx;
    e.bytes = std::move(bytes);
    attempt(e);
}

void Engine::attempt(Event& e) {
    const auto& radio = scenario_.topology.radio;
    if (!up(e.from)) {
        if (e.data) drop_in_engine(e.from, e.bytes, DropReason::LinkFailure);
        return;
    }
    if (in_range(e.from, e.node, now_) && !lost(e.from, e.tx, e.node, e.attempt)) {
        Event d = std::move(e);
        d.at = now_ + radio.prop_delay;
        d.kind = EvKind::Delivery;
        push(std::move(d));
        return;
    }
    Event next = std::move(e);
    if (next.attempt < radio.unicast_retries) {
        ++next.attempt;
        next.at = now_ + radio.retry_gap;
        next.kind = EvKind::UnicastAttempt;
    } else {
        next.at = now_;
        next.kind = EvKind::UnicastFailed;
    }
    push(std::move(next));
}

void Engine::deliver(Event& e) {
    if (!up(e.node)) {
        if (e.data && e.kind == EvKind::Delivery) drop_in_engine(e.node, e.bytes, DropReason::LinkFailure);
        return;
    }
    wire::Frame f;
    try {
        f.body = wire::decode(e.bytes);
    } catch (const wire::WireError& err) {
        TraceRecord r;
        r.time = now_;
        r.node = e.node;
        r.kind = TraceKind::Drop;
        r.reason = DropReason::Decode;
        r.frame = e.frame;
        r.note = err.what();
        log_.add(std::move(r));
        return;
    }
    f.link_sender = e.from;
    f.net_sender = e.net_sender;
    f.id = e.frame;
    aodv::Node& n = node(e.node);
    enter(e.node);
    if (e.kind == EvKind::Overhear) {
        n.overhear(*this, f, e.intended);
        current_ = {};
        return;
    }

    const wire::MsgType type = wire::type_of(f.body);
    TraceRecord r;
    r.time = now_;
    r.node = e.node;
    r.kind = TraceKind::Recv;
    r.msg = type;
    r.peer = e.from;
    r.frame = e.frame;
    r.forged = e.forged;
    r.bytes = static_cast<std::uint32_t>(e.bytes.size());
    log_.add(std::move(r));

    if (!wire::is_control(type)) {
        n.receive(*this, f);
        current_ = {};
        return;
    }
    const std::uint64_t ops0 = n.op_count();
    const auto wall0 = opts_.wall_clock ? std::chrono::steady_clock::now() : std::chrono::steady_clock::time_point{};
    n.receive(*this, f);
    TraceRecord h;
    h.time = now_;
    h.node = e.node;
    h.kind = TraceKind::Handler;
    h.msg = type;
    h.frame = e.frame;
    h.ops = n.op_count() - ops0;
    if (opts_.wall_clock)
        h.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - wall0).count();
    log_.add(std::move(h));
    current_ = {};
}

void Engine::traffic(const Event& e) {
    const FlowSpec& flow = scenario_.flows.at(e.flow);
    if (!up(flow.src) || e.at >= flow.stop) return;
    wire::DataPacket pkt;
    pkt.flow_id = e.flow + 1;
    pkt.seq = e.seq;
    pkt.src = flow.src;
    pkt.dst = flow.dst;
    pkt.payload_len = flow.packet_size;
    pkt.sent_at = Timestamp::from_sim(now_);
    pkt.ttl = scenario_.constants.ttl_data;
    enter(flow.src);
    node(flow.src).send_data(*this, pkt);
    current_ = {};

    const SimTime interval = SimTime::from_seconds(1.0 / flow.rate_pps);
    const SimTime next = flow.start + interval * (static_cast<std::int64_t>(e.seq) + 1);
    if (next < flow.stop) {
        Event t;
        t.at = next;
        t.kind = EvKind::Traffic;
        t.flow = e.flow;
        t.seq = e.seq + 1;
        push(std::move(t));
    }
}

void Engine::set_timer(NodeId n, SimTime at, aodv::Timer timer) {
    guard(n);
    Event e;
    e.at = std::max(at, now_);
    e.kind = EvKind::Timer;
    e.node = n;
    e.timer = timer;
    push(std::move(e));
}

void Engine::dispatch(Event& e) {
    switch (e.kind) {
        case EvKind::Delivery:
        case EvKind::Overhear: deliver(e); break;
        case EvKind::UnicastAttempt: attempt(e); break;
        case EvKind::UnicastFailed: {
            if (!up(e.from)) {
                if (e.data) drop_in_engine(e.from, e.bytes, DropReason::LinkFailure);
                break;
            }
            const auto msg = wire::decode(e.bytes);
            enter(e.from);
            node(e.from).on_unicast_failure(*this, e.node, msg);
            current_ = {};
            break;
        }
        case EvKind::Timer:
            if (!up(e.node)) break;
            enter(e.node);
            node(e.node).on_timer(*this, e.timer);
            current_ = {};
            break;
        case EvKind::Traffic: traffic(e); break;
        case EvKind::Down:
            if (!up(e.node)) break;
            enter(e.node);
            node(e.node).shutdown(*this);
            up_[e.node.addr - 1] = false;
            current_ = {};
            break;
    }
}

void Engine::run_until(SimTime t) {
    while (!queue_.empty() && queue_.front().at <= t) {
        std::pop_heap(queue_.begin(), queue_.end(), Later{});
        Event e = std::move(queue_.back());
        queue_.pop_back();
        now_ = e.at;
        dispatch(e);
    }
    now_ = std::max(now_, t);
}

std::uint64_t Engine::in_flight() const {
    std::uint64_t n = 0;
    for (const auto& e : queue_)
        if (e.data && (e.kind == EvKind::Delivery || e.kind == EvKind::UnicastAttempt || e.kind == EvKind::UnicastFailed))
            ++n;
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) n += nodes_[i]->queued_total();
    return n;
}

RunOutput Engine::finish() {
    RunOutput out;
    out.scenario = scenario_.name;
    out.protocol = scenario_.protocol;
    out.seed = seed_;
    out.end = now_;
    out.window = scenario_.metrics_window;
    for (auto* a : adversaries_) out.attackers[a->id()] = a->counters();

    Conservation& c = out.conservation;
    for (const auto& r : log_.records()) {
        if (r.kind == TraceKind::DataGenerated) ++c.generated;
        else if (r.kind == TraceKind::DataDelivered) ++c.delivered;
        else if (r.kind == TraceKind::Drop && r.flow != 0) ++c.drops[r.reason];
    }
    std::uint64_t dropped = 0;
    for (const auto& [reason, k] : c.drops) dropped += k;
    c.in_flight_engine = in_flight();
    c.in_flight_trace = static_cast<std::int64_t>(c.generated) - static_cast<std::int64_t>(c.delivered) -
                        static_cast<std::int64_t>(dropped);
    out.trace = std::move(log_);
    log_ = TraceLog{};
    return out;
}

RunOutput run(const Scenario& s, const RunOptions& opts) {
    Engine e(s, opts);
    e.run_until(s.sim_time);
    return e.finish();
}

}  // namespace manet::sim
