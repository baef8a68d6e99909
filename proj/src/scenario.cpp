#include "manet/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace manet {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string tok; is >> tok;) out.push_back(tok);
    return out;
}

bool to_double(const std::string& s, double& out) {
    try {
        std::size_t used = 0;
        out = std::stod(s, &used);
        return used == s.size();
    } catch (...) {
        return false;
    }
}

template <class T>
bool to_uint(const std::string& s, T& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

bool declared(const Scenario& s, NodeId n) { return n.addr >= 1 && n.addr <= s.topology.node_count; }

class Parser {
public:
    Parser(Scenario& s, std::vector<ScenarioError>& errors) : s_(s), errors_(errors) {}

    void line(std::size_t no, const std::string& raw) {
        no_ = no;
        std::string text = raw.substr(0, raw.find('#'));
        text = trim(text);
        if (text.empty()) return;
        const auto eq = text.find('=');
        if (eq == std::string::npos) return fail("expected 'key = value'");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        const auto args = split_ws(value);
        if (args.empty()) return fail("missing value for '" + key + "'");
        dispatch(key, value, args);
    }

private:
    void fail(const std::string& msg) { errors_.push_back({no_, msg}); }

    bool num(const std::string& s, double& out, const char* what) {
        if (to_double(s, out)) return true;
        fail(std::string("invalid number for ") + what + ": '" + s + "'");
        return false;
    }
    bool seconds(const std::string& s, SimTime& out, const char* what) {
        double v = 0;
        if (!num(s, v, what)) return false;
        if (v < 0) {
            fail(std::string(what) + " must be non-negative");
            return false;
        }
        out = SimTime::from_seconds(v);
        return true;
    }
    bool node(const std::string& s, NodeId& out, const char* what) {
        std::uint32_t v = 0;
        if (!to_uint(s, v) || v == 0) {
            fail(std::string("invalid node id for ") + what + ": '" + s + "'");
            return false;
        }
        out = NodeId(v);
        return true;
    }
    template <class T>
    bool uint(const std::string& s, T& out, const char* what) {
        if (to_uint(s, out)) return true;
        fail(std::string("invalid integer for ") + what + ": '" + s + "'");
        return false;
    }
    bool arity(const std::vector<std::string>& args, std::size_t n, const std::string& key) {
        if (args.size() == n) return true;
        fail("'" + key + "' expects " + std::to_string(n) + " value(s)");
        return false;
    }

    // Splits "k=v" options; returns false on malformed tokens.
    std::map<std::string, std::string> options(const std::vector<std::string>& args, std::size_t from,
                                               const std::vector<std::string>& allowed) {
        std::map<std::string, std::string> out;
        for (std::size_t i = from; i < args.size(); ++i) {
            const auto eq = args[i].find('=');
            if (eq == std::string::npos) {
                fail("expected option 'name=value', got '" + args[i] + "'");
                continue;
            }
            const std::string k = args[i].substr(0, eq);
            if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
                fail("unknown option '" + k + "'");
                continue;
            }
            out[k] = args[i].substr(eq + 1);
        }
        return out;
    }

    void dispatch(const std::string& key, const std::string& value, const std::vector<std::string>& a) {
        auto& topo = s_.topology;
        auto& radio = topo.radio;
        if (key == "name") {
            s_.name = value;
        } else if (key == "protocol") {
            if (!parse_protocol(value, s_.protocol)) fail("unknown protocol '" + value + "'");
        } else if (key == "sim_time") {
            seconds(value, s_.sim_time, "sim_time");
        } else if (key == "seed") {
            uint(value, s_.seed, "seed");
        } else if (key == "window") {
            seconds(value, s_.metrics_window, "window");
        } else if (key == "area") {
            if (arity(a, 2, key)) num(a[0], topo.width, "area width"), num(a[1], topo.height, "area height");
        } else if (key == "nodes") {
            uint(value, topo.node_count, "nodes");
        } else if (key == "range") {
            num(value, radio.range_m, "range");
        } else if (key == "loss") {
            num(value, radio.loss_rate, "loss");
        } else if (key == "prop_delay") {
            seconds(value, radio.prop_delay, "prop_delay");
        } else if (key == "flood_jitter") {
            seconds(value, radio.flood_jitter, "flood_jitter");
        } else if (key == "unicast_retries") {
            uint(value, radio.unicast_retries, "unicast_retries");
        } else if (key == "retry_gap") {
            seconds(value, radio.retry_gap, "retry_gap");
        } else if (key == "position") {
            NodeId n;
            Vec2 p;
            if (arity(a, 3, key) && node(a[0], n, "position") && num(a[1], p.x, "x") && num(a[2], p.y, "y")) {
                if (topo.positions.contains(n)) fail("duplicate position for node " + a[0]);
                topo.positions[n] = p;
                position_lines_[n] = no_;
            }
        } else if (key == "mobility") {
            if (value == "static") s_.mobility.kind = MobilityModel::Kind::Static;
            else if (value == "random_waypoint") s_.mobility.kind = MobilityModel::Kind::RandomWaypoint;
            else fail("unknown mobility model '" + value + "'");
        } else if (key == "speed") {
            if (arity(a, 2, key)) num(a[0], s_.mobility.min_speed, "min speed"), num(a[1], s_.mobility.max_speed, "max speed");
        } else if (key == "pause") {
            seconds(value, s_.mobility.pause, "pause");
        } else if (key == "waypoint") {
            NodeId n;
            Keyframe k;
            if (arity(a, 4, key) && node(a[0], n, "waypoint") && seconds(a[1], k.at, "waypoint time") &&
                num(a[2], k.pos.x, "x") && num(a[3], k.pos.y, "y"))
                s_.mobility.scripted[n].push_back(k);
        } else if (key == "flow") {
            FlowSpec f;
            if (a.size() < 2) return fail("'flow' expects src and dst");
            bool ok = node(a[0], f.src, "flow src") & node(a[1], f.dst, "flow dst");
            for (const auto& [k, v] : options(a, 2, {"rate", "size", "start", "stop"})) {
                if (k == "rate") ok &= num(v, f.rate_pps, "rate");
                if (k == "size") ok &= uint(v, f.packet_size, "size");
                if (k == "start") ok &= seconds(v, f.start, "start");
                if (k == "stop") ok &= seconds(v, f.stop, "stop");
            }
            if (ok) {
                s_.flows.push_back(f);
                flow_lines_.push_back(no_);
            }
        } else if (key == "attack") {
            adv::AttackSpec spec;
            if (!adv::parse_attack_kind(a[0], spec.kind)) return fail("unknown attack kind '" + a[0] + "'");
            bool ok = true;
            bool have_attacker = false, have_start = false, have_src = false, have_dst = false;
            for (const auto& [k, v] : options(a, 1, {"attacker", "start", "src", "dst", "interval"})) {
                if (k == "attacker") ok &= have_attacker = node(v, spec.attacker, "attacker");
                if (k == "start") ok &= have_start = seconds(v, spec.start, "attack start");
                if (k == "src") ok &= have_src = node(v, spec.flow_src, "attack src");
                if (k == "dst") ok &= have_dst = node(v, spec.flow_dst, "attack dst");
                if (k == "interval") ok &= seconds(v, spec.repeat_interval, "interval");
            }
            if (!have_attacker) fail("attack requires attacker=<id>");
            if (!have_start) fail("attack requires start=<seconds>");
            if (spec.kind != adv::AttackKind::Blackhole && (!have_src || !have_dst))
                fail("attack requires src=<id> and dst=<id>");
            if (ok && have_attacker && have_start) {
                s_.attacks.push_back(spec);
                attack_lines_.push_back(no_);
            }
        } else if (key == "down") {
            NodeFailure f;
            if (arity(a, 2, key) && node(a[0], f.node, "down") && seconds(a[1], f.at, "down time")) s_.failures.push_back(f);
        } else if (key.rfind("const.", 0) == 0) {
            constant(key.substr(6), value);
        } else {
            fail("unknown key '" + key + "'");
        }
    }

    void constant(const std::string& name, const std::string& value) {
        auto& c = s_.constants;
        if (name == "active_route_timeout") seconds(value, c.active_route_timeout, "active_route_timeout");
        else if (name == "node_traversal_time") seconds(value, c.node_traversal_time, "node_traversal_time");
        else if (name == "net_diameter") uint(value, c.net_diameter, "net_diameter");
        else if (name == "rreq_retries") uint(value, c.rreq_retries, "rreq_retries");
        else if (name == "ttl_data") {
            unsigned v = 0;
            if (uint(value, v, "ttl_data")) {
                if (v == 0 || v > 255) fail("ttl_data must be in [1, 255]");
                else c.ttl_data = static_cast<std::uint8_t>(v);
            }
        } else if (name == "cache_capacity") uint(value, c.cache_capacity, "cache_capacity");
        else if (name == "queue_limit") uint(value, c.data_queue_limit, "queue_limit");
        else fail("unknown constant '" + name + "'");
    }

    Scenario& s_;
    std::vector<ScenarioError>& errors_;
    std::size_t no_ = 0;

public:
    std::map<NodeId, std::size_t> position_lines_;
    std::vector<std::size_t> flow_lines_;
    std::vector<std::size_t> attack_lines_;
};

}  // namespace

std::vector<ScenarioError> validate(const Scenario& s) {
    std::vector<ScenarioError> errs;
    auto err = [&](std::string m) { errs.push_back({0, std::move(m)}); };
    const auto& topo = s.topology;
    if (topo.node_count == 0) err("nodes must be at least 1");
    if (topo.node_count > 65535) err("nodes must be at most 65535");
    if (topo.width <= 0 || topo.height <= 0) err("area dimensions must be positive");
    if (topo.radio.range_m <= 0) err("range must be positive");
    if (topo.radio.loss_rate < 0 || topo.radio.loss_rate > 1) err("loss must be within [0, 1]");
    if (s.sim_time <= SimTime{}) err("sim_time must be positive");
    if (s.metrics_window <= SimTime{}) err("window must be positive");
    if (s.mobility.min_speed <= 0 || s.mobility.max_speed < s.mobility.min_speed)
        err("speed must satisfy 0 < min <= max");
    if (!topo.positions.empty() && topo.positions.size() != topo.node_count)
        err("explicit placement must give a position for every node (" + std::to_string(topo.positions.size()) +
            " of " + std::to_string(topo.node_count) + ")");
    for (const auto& [n, p] : topo.positions) {
        if (!declared(s, n)) err("position for undeclared node " + std::to_string(n.addr));
        if (p.x < 0 || p.x > topo.width || p.y < 0 || p.y > topo.height)
            err("position of node " + std::to_string(n.addr) + " lies outside the area");
    }
    for (const auto& [n, frames] : s.mobility.scripted)
        if (!declared(s, n)) err("waypoint for undeclared node " + std::to_string(n.addr));
    for (const auto& f : s.flows) {
        if (!declared(s, f.src) || !declared(s, f.dst)) err("flow endpoint is not a declared node");
        if (f.src == f.dst) err("flow source and destination must differ");
        if (f.rate_pps <= 0) err("flow rate must be positive");
        if (f.stop <= f.start) err("flow stop must be after start");
    }
    for (const auto& a : s.attacks) {
        if (!declared(s, a.attacker)) err("attacker " + std::to_string(a.attacker.addr) + " is not a declared node");
        if (a.start >= s.sim_time) err("attack start must be before sim_time");
        if (a.kind != adv::AttackKind::Blackhole) {
            if (!declared(s, a.flow_src) || !declared(s, a.flow_dst)) err("attack target flow endpoints must be declared");
            if (a.flow_src == a.flow_dst) err("attack target flow source and destination must differ");
        }
        if (a.kind == adv::AttackKind::RouteDisturb && a.repeat_interval <= SimTime{})
            err("route disturb interval must be positive");
    }
    for (const auto& f : s.failures)
        if (!declared(s, f.node)) err("down node " + std::to_string(f.node.addr) + " is not declared");
    return errs;
}

Scenario parse_scenario(const std::string& text, std::vector<ScenarioError>& errors) {
    Scenario s;
    Parser p(s, errors);
    std::istringstream is(text);
    std::size_t no = 0;
    for (std::string line; std::getline(is, line);) p.line(++no, line);

    // Attach line numbers to invariant violations where they can be located.
    for (auto e : validate(s)) {
        if (e.message.rfind("attack", 0) == 0 && p.attack_lines_.size() == s.attacks.size()) {
            for (std::size_t i = 0; i < s.attacks.size(); ++i) {
                Scenario one = s;
                one.attacks = {s.attacks[i]};
                one.flows.clear();
                one.failures.clear();
                for (const auto& e1 : validate(one))
                    if (e1.message == e.message) e.line = p.attack_lines_[i];
            }
        } else if (e.message.rfind("flow", 0) == 0 && p.flow_lines_.size() == s.flows.size()) {
            for (std::size_t i = 0; i < s.flows.size(); ++i) {
                Scenario one = s;
                one.flows = {s.flows[i]};
                one.attacks.clear();
                for (const auto& e1 : validate(one))
                    if (e1.message == e.message) e.line = p.flow_lines_[i];
            }
        }
        errors.push_back(e);
    }
    return s;
}

Scenario load_scenario(const std::string& path, std::vector<ScenarioError>& errors) {
    std::ifstream in(path);
    if (!in) {
        errors.push_back({0, "cannot open scenario file '" + path + "'"});
        return {};
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), errors);
}

}  // namespace manet
