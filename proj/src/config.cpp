#include "meshsim/config.hpp"

#include <arpa/inet.h>

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace meshsim::cli {

ConfigError::ConfigError(const std::string& source, int line, const std::string& what)
    : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what), line_(line) {}

namespace {

class Reader {
  public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const {
        int line = n.IsDefined() ? n.Mark().line + 1 : 0;
        throw ConfigError(source_, line, msg);
    }

    void keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) const {
        if (!map.IsMap()) fail(map, where + " must be a mapping");
        for (const auto& kv : map) {
            auto k = kv.first.as<std::string>();
            if (!allowed.contains(k)) fail(kv.first, "unknown key '" + k + "' in " + where);
        }
    }

    template <typename T>
    T as(const YAML::Node& n, const std::string& what) const {
        if (!n.IsDefined() || n.IsNull()) fail(n, what + " is missing");
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            fail(n, what + " has the wrong type");
        }
    }

    template <typename T>
    void opt(const YAML::Node& map, const char* key, T& out, const std::string& where) const {
        if (auto n = map[key]) out = as<T>(n, where + "." + key);
    }

    const std::string& source() const { return source_; }

  private:
    std::string source_;
};

Band band_of(const Reader& r, const YAML::Node& n) {
    auto b = parse_band(r.as<std::string>(n, "band"));
    if (!b) r.fail(n, "band must be b24 or b5");
    return *b;
}

Protocol protocol_of(const Reader& r, const YAML::Node& n) {
    auto s = r.as<std::string>(n, "protocol");
    if (s == "tcp") return Protocol::TcpLike;
    if (s == "udp") return Protocol::UdpLike;
    r.fail(n, "protocol must be tcp or udp");
}

Curve curve_of(const Reader& r, const YAML::Node& n, const std::string& what) {
    if (!n.IsMap()) r.fail(n, what + " must map x to multiplier");
    std::vector<std::pair<double, double>> pts;
    for (const auto& kv : n) pts.emplace_back(r.as<double>(kv.first, what), r.as<double>(kv.second, what));
    try {
        return Curve(std::move(pts));
    } catch (const Error& e) {
        r.fail(n, what + ": " + e.what());
    }
}

Address ipv4_of(const Reader& r, const YAML::Node& n, const std::string& text) {
    in_addr a{};
    if (inet_pton(AF_INET, text.c_str(), &a) != 1) r.fail(n, "bad address '" + text + "'");
    return Address{ntohl(a.s_addr)};
}

olsr::HnaNet hna_of(const Reader& r, const YAML::Node& n) {
    auto s = r.as<std::string>(n, "hna network");
    auto slash = s.find('/');
    if (slash == std::string::npos) r.fail(n, "hna network needs a /prefix");
    int prefix = 0;
    try {
        prefix = std::stoi(s.substr(slash + 1));
    } catch (const std::exception&) {
        r.fail(n, "bad prefix in '" + s + "'");
    }
    if (prefix < 0 || prefix > 32) r.fail(n, "prefix out of range in '" + s + "'");
    std::uint32_t mask = prefix == 0 ? 0 : ~std::uint32_t{0} << (32 - prefix);
    return {ipv4_of(r, n, s.substr(0, slash)), Address{mask}};
}

struct Parser {
    Reader r;
    Config cfg;
    std::map<std::string, NodeId> ids;

    NodeId node_ref(const YAML::Node& n) {
        auto name = r.as<std::string>(n, "node reference");
        auto it = ids.find(name);
        if (it == ids.end()) r.fail(n, "unknown node '" + name + "'");
        return it->second;
    }

    std::vector<NodeId> node_list(const YAML::Node& n) {
        if (!n.IsSequence()) r.fail(n, "expected a list of node names");
        std::vector<NodeId> out;
        for (const auto& x : n) out.push_back(node_ref(x));
        return out;
    }

    void scenario(const YAML::Node& s) {
        r.keys(s, {"name", "stack", "horizon_s", "tick_s", "control_loss", "charge_control", "signaling_delay_s"},
               "scenario");
        auto& sc = cfg.scenario;
        r.opt(s, "name", sc.name, "scenario");
        if (auto st = s["stack"]) {
            auto v = r.as<std::string>(st, "scenario.stack");
            if (v == "full") sc.stack = StackMode::Full;
            else if (v == "bare") sc.stack = StackMode::Bare;
            else r.fail(st, "stack must be full or bare");
        }
        r.opt(s, "horizon_s", sc.horizon_s, "scenario");
        r.opt(s, "tick_s", sc.tick_s, "scenario");
        r.opt(s, "control_loss", sc.control_loss, "scenario");
        r.opt(s, "charge_control", sc.charge_control, "scenario");
        r.opt(s, "signaling_delay_s", sc.signaling_delay_s, "scenario");
    }

    void run(const YAML::Node& s) {
        r.keys(s, {"seed", "reps"}, "run");
        r.opt(s, "seed", cfg.run.seed, "run");
        r.opt(s, "reps", cfg.run.reps, "run");
        if (cfg.run.reps < 1) r.fail(s["reps"], "reps must be >= 1");
    }

    void topology(const YAML::Node& t) {
        r.keys(t, {"band", "rate_mbps", "range", "signaling_band", "signaling_channel", "nodes", "links", "range_pairs"},
               "topology");
        Band band = Band::B5;
        if (auto b = t["band"]) band = band_of(r, b);
        double rate = band == Band::B5 ? 12.0 : 11.0;
        r.opt(t, "rate_mbps", rate, "topology");
        Band sig_band = Band::B24;
        if (auto b = t["signaling_band"]) sig_band = band_of(r, b);
        int sig_channel = 1;
        r.opt(t, "signaling_channel", sig_channel, "topology");

        auto& spec = cfg.scenario.topology;
        if (auto m = t["range"]) {
            auto v = r.as<std::string>(m, "topology.range");
            if (v == "all") spec.range = RangeMode::All;
            else if (v == "adjacency") spec.range = RangeMode::Adjacency;
            else if (v == "explicit") spec.range = RangeMode::Explicit;
            else r.fail(m, "range must be all, adjacency or explicit");
        }

        auto nodes = t["nodes"];
        if (!nodes || !nodes.IsSequence() || nodes.size() == 0) r.fail(nodes ? nodes : t, "topology.nodes must be a non-empty list");
        NodeId next = 1;
        for (const auto& n : nodes) {
            r.keys(n, {"name", "id", "data", "antenna_cm", "pos", "band", "rate_mbps"}, "node");
            NodeSpec ns;
            ns.name = r.as<std::string>(n["name"], "node.name");
            if (ns.name.empty()) r.fail(n, "node needs a name");
            ns.id = next;
            r.opt(n, "id", ns.id, "node");
            next = ns.id + 1;
            if (ids.contains(ns.name)) r.fail(n["name"], "duplicate node name '" + ns.name + "'");
            for (const auto& [name, id] : ids)
                if (id == ns.id) r.fail(n, "duplicate node id " + std::to_string(ns.id));
            ids[ns.name] = ns.id;
            cfg.names[ns.id] = ns.name;

            Band nb = band;
            if (auto b = n["band"]) nb = band_of(r, b);
            double nrate = rate;
            r.opt(n, "rate_mbps", nrate, "node");
            if (auto p = n["pos"]) {
                auto xy = r.as<std::vector<double>>(p, "node.pos");
                if (xy.size() != 2) r.fail(p, "pos needs two numbers");
                ns.position = {xy[0], xy[1]};
            }
            auto data = n["data"];
            if (!data) r.fail(n, "node " + ns.name + " needs data channels");
            auto chans = data.IsSequence() ? r.as<std::vector<int>>(data, "node.data")
                                           : std::vector<int>{r.as<int>(data, "node.data")};
            std::vector<double> antennas;
            if (auto a = n["antenna_cm"]) {
                antennas = a.IsSequence() ? r.as<std::vector<double>>(a, "node.antenna_cm")
                                          : std::vector<double>{r.as<double>(a, "node.antenna_cm")};
                if (antennas.size() != chans.size()) r.fail(a, "antenna_cm needs one value per data channel");
            }
            InterfaceSpec sig;
            sig.role = InterfaceRole::Signaling;
            sig.band = sig_band;
            sig.channel = sig_channel;
            sig.rate_mbps = sig_band == Band::B5 ? 12.0 : 11.0;
            ns.interfaces.push_back(sig);
            for (std::size_t k = 0; k < chans.size(); ++k) {
                if (!center_frequency_mhz(nb, chans[k]))
                    r.fail(data, "channel " + std::to_string(chans[k]) + " is not in band " + to_string(nb));
                InterfaceSpec d;
                d.role = InterfaceRole::Data;
                d.band = nb;
                d.channel = chans[k];
                d.rate_mbps = nrate;
                d.antenna_position_cm = antennas.empty() ? 30.0 * static_cast<double>(k) : antennas[k];
                ns.interfaces.push_back(d);
            }
            spec.nodes.push_back(std::move(ns));
        }

        if (auto links = t["links"]) {
            if (!links.IsSequence()) r.fail(links, "topology.links must be a list");
            for (const auto& l : links) {
                NodeId a = 0, b = 0;
                if (l.IsSequence()) {
                    if (l.size() != 2) r.fail(l, "link needs two node names");
                    a = node_ref(l[0]);
                    b = node_ref(l[1]);
                } else {
                    r.keys(l, {"a", "b", "channel"}, "link");
                    a = node_ref(l["a"]);
                    b = node_ref(l["b"]);
                    if (auto c = l["channel"]) {
                        if (a == b) r.fail(l, "link is a self-loop");
                        cfg.scenario.pinned_channels[Edge::of(a, b)] = r.as<int>(c, "link.channel");
                    }
                }
                if (a == b) r.fail(l, "link is a self-loop");
                spec.edges.emplace_back(a, b);
            }
        }
        if (auto pairs = t["range_pairs"]) {
            if (!pairs.IsSequence()) r.fail(pairs, "topology.range_pairs must be a list");
            for (const auto& p : pairs) {
                if (!p.IsSequence() || p.size() != 2) r.fail(p, "range pair needs two node names");
                spec.range_pairs.emplace_back(node_ref(p[0]), node_ref(p[1]));
            }
        }
    }

    void radio(const YAML::Node& s) {
        r.keys(s, {"c_base", "adjacent_b24", "adjacent_b5", "coupling", "orthogonality_b24_mhz", "orthogonality_b5_mhz",
                   "hop_latency_ms", "per_packet_overhead_ms", "mac_delay", "mac"},
               "radio");
        auto& p = cfg.scenario.radio;
        if (auto c = s["c_base"]) {
            r.keys(c, {"udp_b24", "udp_b5", "tcp_b24", "tcp_b5"}, "radio.c_base");
            r.opt(c, "udp_b24", p.c_base_udp_b24, "radio.c_base");
            r.opt(c, "udp_b5", p.c_base_udp_b5, "radio.c_base");
            r.opt(c, "tcp_b24", p.c_base_tcp_b24, "radio.c_base");
            r.opt(c, "tcp_b5", p.c_base_tcp_b5, "radio.c_base");
        }
        if (auto c = s["adjacent_b24"]) p.adjacent_b24 = curve_of(r, c, "radio.adjacent_b24");
        if (auto c = s["adjacent_b5"]) p.adjacent_b5 = curve_of(r, c, "radio.adjacent_b5");
        if (auto c = s["coupling"]) p.coupling = curve_of(r, c, "radio.coupling");
        r.opt(s, "orthogonality_b24_mhz", p.orthogonality_b24_mhz, "radio");
        r.opt(s, "orthogonality_b5_mhz", p.orthogonality_b5_mhz, "radio");
        r.opt(s, "hop_latency_ms", p.hop_latency_ms, "radio");
        r.opt(s, "per_packet_overhead_ms", p.per_packet_overhead_ms, "radio");
        if (auto v = s["mac_delay"]) {
            auto x = r.as<std::string>(v, "radio.mac_delay");
            if (x == "no_cts") p.mac_delay = MacDelayModel::NoCts;
            else if (x == "with_cts") p.mac_delay = MacDelayModel::WithCts;
            else r.fail(v, "mac_delay must be no_cts or with_cts");
        }
        if (auto m = s["mac"]) {
            r.keys(m, {"alpha_header_bits", "beta_payload_bits", "t_difs", "t_sifs", "t_bo", "t_rts", "t_cts", "t_ack",
                       "t_data", "ack_rate_mbps"},
                   "radio.mac");
            r.opt(m, "alpha_header_bits", p.alpha_header_bits, "radio.mac");
            r.opt(m, "beta_payload_bits", p.beta_payload_bits, "radio.mac");
            r.opt(m, "t_difs", p.t_difs, "radio.mac");
            r.opt(m, "t_sifs", p.t_sifs, "radio.mac");
            r.opt(m, "t_bo", p.t_bo, "radio.mac");
            r.opt(m, "t_rts", p.t_rts, "radio.mac");
            r.opt(m, "t_cts", p.t_cts, "radio.mac");
            r.opt(m, "t_ack", p.t_ack, "radio.mac");
            r.opt(m, "t_data", p.t_data, "radio.mac");
            r.opt(m, "ack_rate_mbps", p.ack_rate_mbps, "radio.mac");
        }
        try {
            p.validate();
        } catch (const Error& e) {
            r.fail(s, e.what());
        }
    }

    void olsr(const YAML::Node& s) {
        r.keys(s, {"HelloInterval", "HelloValidityTime", "TcInterval", "TcValidityTime", "MidInterval",
                   "MidValidityTime", "HnaInterval", "HnaValidityTime", "TcRedundancy", "MprCoverage",
                   "LinkQualityLevel", "LinkQualityWinSize", "UseHysteresis", "HystScaling", "HystThrHigh",
                   "HystThrLow", "Willingness", "EmitMid", "MprFlooding", "hna"},
               "olsr");
        auto& p = cfg.scenario.olsr;
        r.opt(s, "HelloInterval", p.hello_interval, "olsr");
        r.opt(s, "HelloValidityTime", p.hello_validity, "olsr");
        r.opt(s, "TcInterval", p.tc_interval, "olsr");
        r.opt(s, "TcValidityTime", p.tc_validity, "olsr");
        r.opt(s, "MidInterval", p.mid_interval, "olsr");
        r.opt(s, "MidValidityTime", p.mid_validity, "olsr");
        r.opt(s, "HnaInterval", p.hna_interval, "olsr");
        r.opt(s, "HnaValidityTime", p.hna_validity, "olsr");
        r.opt(s, "TcRedundancy", p.tc_redundancy, "olsr");
        r.opt(s, "MprCoverage", p.mpr_coverage, "olsr");
        r.opt(s, "LinkQualityLevel", p.link_quality_level, "olsr");
        r.opt(s, "LinkQualityWinSize", p.link_quality_window, "olsr");
        r.opt(s, "UseHysteresis", p.use_hysteresis, "olsr");
        r.opt(s, "HystScaling", p.hyst_scaling, "olsr");
        r.opt(s, "HystThrHigh", p.hyst_thr_high, "olsr");
        r.opt(s, "HystThrLow", p.hyst_thr_low, "olsr");
        r.opt(s, "Willingness", p.willingness, "olsr");
        r.opt(s, "EmitMid", p.emit_mid, "olsr");
        r.opt(s, "MprFlooding", p.mpr_flooding, "olsr");
        try {
            p.validate();
        } catch (const Error& e) {
            r.fail(s, e.what());
        }
        if (auto h = s["hna"]) {
            if (!h.IsMap()) r.fail(h, "olsr.hna must map node names to network lists");
            for (const auto& kv : h) {
                NodeId id = node_ref(kv.first);
                if (!kv.second.IsSequence()) r.fail(kv.second, "hna networks must be a list");
                for (const auto& net : kv.second) cfg.scenario.hna[id].push_back(hna_of(r, net));
            }
        }
    }

    void negotiation(const YAML::Node& s) {
        r.keys(s, {"allowed_channels", "window_halfwidth", "switch_threshold_dbm", "refresh_weight", "round_period_s",
                   "first_round_s", "timeout_s", "separacio"},
               "negotiation");
        auto& p = cfg.scenario.negotiation;
        r.opt(s, "allowed_channels", p.allowed_channels, "negotiation");
        r.opt(s, "window_halfwidth", p.window_halfwidth, "negotiation");
        r.opt(s, "switch_threshold_dbm", p.switch_threshold_dbm, "negotiation");
        r.opt(s, "refresh_weight", p.refresh_weight, "negotiation");
        r.opt(s, "round_period_s", p.round_period_s, "negotiation");
        r.opt(s, "first_round_s", p.first_round_s, "negotiation");
        r.opt(s, "timeout_s", p.timeout_s, "negotiation");
        r.opt(s, "separacio", p.separacio, "negotiation");
        try {
            p.validate();
        } catch (const Error& e) {
            r.fail(s, e.what());
        }
    }

    void flows(const YAML::Node& s) {
        if (!s.IsSequence()) r.fail(s, "flows must be a list");
        int next = 1;
        for (const auto& f : s) {
            r.keys(f, {"id", "name", "src", "dst", "protocol", "rate_mbps", "start_s", "duration_s", "path"}, "flow");
            sim::Flow fl;
            fl.id = next;
            r.opt(f, "id", fl.id, "flow");
            next = fl.id + 1;
            r.opt(f, "name", fl.name, "flow");
            fl.src = node_ref(f["src"]);
            fl.dst = node_ref(f["dst"]);
            if (auto p = f["protocol"]) fl.protocol = protocol_of(r, p);
            if (auto rate = f["rate_mbps"]) {
                if (rate.IsScalar() && rate.Scalar() == "saturate") fl.rate_mbps.reset();
                else fl.rate_mbps = r.as<double>(rate, "flow.rate_mbps");
            }
            r.opt(f, "start_s", fl.start_s, "flow");
            r.opt(f, "duration_s", fl.duration_s, "flow");
            if (auto p = f["path"]) fl.path = node_list(p);
            if (fl.name.empty()) fl.name = cfg.names[fl.src] + "-" + cfg.names[fl.dst];
            cfg.scenario.flows.push_back(std::move(fl));
        }
    }

    void interferers(const YAML::Node& s) {
        if (!s.IsSequence()) r.fail(s, "interferers must be a list");
        for (const auto& i : s) {
            r.keys(i, {"band", "channel", "level_dbm", "on_s", "off_s", "nodes", "center", "radius_m"}, "interferer");
            negotiation::Interferer it;
            Band band = Band::B5;
            if (!cfg.scenario.topology.nodes.empty())
                for (const auto& ifs : cfg.scenario.topology.nodes.front().interfaces)
                    if (ifs.role == InterfaceRole::Data) band = ifs.band;
            if (auto b = i["band"]) band = band_of(r, b);
            try {
                it.channel = Channel::make(band, r.as<int>(i["channel"], "interferer.channel"));
            } catch (const DomainError& e) {
                r.fail(i["channel"], e.what());
            }
            r.opt(i, "level_dbm", it.level_dbm, "interferer");
            double on = 0.0;
            r.opt(i, "on_s", on, "interferer");
            it.on = Time::from_seconds(on);
            if (auto off = i["off_s"]) it.off = Time::from_seconds(r.as<double>(off, "interferer.off_s"));
            if (auto n = i["nodes"]) it.nodes = node_list(n);
            if (auto c = i["center"]) {
                auto xy = r.as<std::vector<double>>(c, "interferer.center");
                if (xy.size() != 2) r.fail(c, "center needs two numbers");
                it.center = Position{xy[0], xy[1]};
            }
            r.opt(i, "radius_m", it.radius_m, "interferer");
            cfg.scenario.interferers.push_back(std::move(it));
        }
    }

    void random_interferers(const YAML::Node& s) {
        r.keys(s, {"count", "level_min_dbm", "level_max_dbm", "min_duration_s", "max_duration_s", "audible_probability"},
               "random_interferers");
        auto& p = cfg.scenario.random_interferers;
        r.opt(s, "count", p.count, "random_interferers");
        r.opt(s, "level_min_dbm", p.level_min_dbm, "random_interferers");
        r.opt(s, "level_max_dbm", p.level_max_dbm, "random_interferers");
        r.opt(s, "min_duration_s", p.min_duration_s, "random_interferers");
        r.opt(s, "max_duration_s", p.max_duration_s, "random_interferers");
        r.opt(s, "audible_probability", p.audible_probability, "random_interferers");
    }

    void link_changes(const YAML::Node& s) {
        if (!s.IsSequence()) r.fail(s, "link_changes must be a list");
        for (const auto& c : s) {
            r.keys(c, {"at_s", "a", "b", "up"}, "link change");
            sim::LinkChange lc;
            lc.at_s = r.as<double>(c["at_s"], "link_change.at_s");
            lc.a = node_ref(c["a"]);
            lc.b = node_ref(c["b"]);
            r.opt(c, "up", lc.up, "link change");
            cfg.scenario.link_changes.push_back(lc);
        }
    }

    void parse(const YAML::Node& root) {
        if (!root.IsMap()) r.fail(root, "top level must be a mapping");
        r.keys(root, {"scenario", "run", "topology", "radio", "olsr", "negotiation", "flows", "interferers",
                      "random_interferers", "link_changes"},
               "top level");
        if (!root["topology"]) r.fail(root, "missing topology section");
        if (auto s = root["scenario"]) scenario(s);
        if (auto s = root["run"]) run(s);
        topology(root["topology"]);
        if (auto s = root["radio"]) radio(s);
        if (auto s = root["olsr"]) olsr(s);
        if (auto s = root["negotiation"]) negotiation(s);
        if (auto s = root["flows"]) flows(s);
        if (auto s = root["interferers"]) interferers(s);
        if (auto s = root["random_interferers"]) random_interferers(s);
        if (auto s = root["link_changes"]) link_changes(s);
    }
};

}  // namespace

Config parse_config(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source, e.mark.line + 1, e.msg);
    }
    Parser p{Reader(source), {}, {}};
    p.parse(root);
    // Semantic checks that need the built topology.
    try {
        Topology topo = build_topology(p.cfg.scenario.topology);
        p.cfg.scenario.validate(topo);
    } catch (const Error& e) {
        throw ConfigError(source, 0, e.what());
    }
    return std::move(p.cfg);
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot read file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

namespace {

void emit_curve(YAML::Emitter& out, const char* key, const Curve& c) {
    out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginMap;
    for (const auto& [x, y] : c.points()) out << YAML::Key << x << YAML::Value << y;
    out << YAML::EndMap;
}

}  // namespace

std::string dump_config(const Config& cfg) {
    const auto& sc = cfg.scenario;
    auto name = [&](NodeId id) {
        auto it = cfg.names.find(id);
        return it == cfg.names.end() ? std::to_string(id) : it->second;
    };
    YAML::Emitter out;
    out << YAML::BeginMap;

    out << YAML::Key << "scenario" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << sc.name;
    out << YAML::Key << "stack" << YAML::Value << (sc.stack == StackMode::Full ? "full" : "bare");
    out << YAML::Key << "horizon_s" << YAML::Value << sc.horizon_s;
    out << YAML::Key << "tick_s" << YAML::Value << sc.tick_s;
    out << YAML::Key << "control_loss" << YAML::Value << sc.control_loss;
    out << YAML::Key << "charge_control" << YAML::Value << sc.charge_control;
    out << YAML::Key << "signaling_delay_s" << YAML::Value << sc.signaling_delay_s;
    out << YAML::EndMap;

    out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "seed" << YAML::Value << cfg.run.seed;
    out << YAML::Key << "reps" << YAML::Value << cfg.run.reps;
    out << YAML::EndMap;

    out << YAML::Key << "topology" << YAML::Value << YAML::BeginMap;
    const char* range = sc.topology.range == RangeMode::All         ? "all"
                        : sc.topology.range == RangeMode::Adjacency ? "adjacency"
                                                                    : "explicit";
    out << YAML::Key << "range" << YAML::Value << range;
    out << YAML::Key << "nodes" << YAML::Value << YAML::BeginSeq;
    for (const auto& n : sc.topology.nodes) {
        out << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value << n.name;
        out << YAML::Key << "id" << YAML::Value << n.id;
        std::vector<int> data;
        std::vector<double> antenna;
        std::string band;
        for (const auto& i : n.interfaces) {
            if (i.role == InterfaceRole::Signaling) continue;
            data.push_back(i.channel);
            antenna.push_back(i.antenna_position_cm);
            band = to_string(i.band);
        }
        out << YAML::Key << "band" << YAML::Value << band;
        out << YAML::Key << "data" << YAML::Value << YAML::Flow << data;
        out << YAML::Key << "antenna_cm" << YAML::Value << YAML::Flow << antenna;
        out << YAML::Key << "pos" << YAML::Value << YAML::Flow << std::vector<double>{n.position.x, n.position.y};
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "links" << YAML::Value << YAML::BeginSeq;
    for (const auto& [a, b] : sc.topology.edges) {
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "a" << YAML::Value << name(a) << YAML::Key << "b"
            << YAML::Value << name(b);
        if (auto it = sc.pinned_channels.find(Edge::of(a, b)); it != sc.pinned_channels.end())
            out << YAML::Key << "channel" << YAML::Value << it->second;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;

    const auto& p = sc.radio;
    out << YAML::Key << "radio" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "c_base" << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "udp_b24" << YAML::Value << p.c_base_udp_b24 << YAML::Key << "udp_b5" << YAML::Value
        << p.c_base_udp_b5 << YAML::Key << "tcp_b24" << YAML::Value << p.c_base_tcp_b24 << YAML::Key << "tcp_b5"
        << YAML::Value << p.c_base_tcp_b5;
    out << YAML::EndMap;
    emit_curve(out, "adjacent_b24", p.adjacent_b24);
    emit_curve(out, "adjacent_b5", p.adjacent_b5);
    emit_curve(out, "coupling", p.coupling);
    out << YAML::Key << "orthogonality_b24_mhz" << YAML::Value << p.orthogonality_b24_mhz;
    out << YAML::Key << "orthogonality_b5_mhz" << YAML::Value << p.orthogonality_b5_mhz;
    out << YAML::Key << "hop_latency_ms" << YAML::Value << p.hop_latency_ms;
    out << YAML::Key << "per_packet_overhead_ms" << YAML::Value << p.per_packet_overhead_ms;
    out << YAML::Key << "mac_delay" << YAML::Value << (p.mac_delay == MacDelayModel::NoCts ? "no_cts" : "with_cts");
    out << YAML::EndMap;

    const auto& o = sc.olsr;
    out << YAML::Key << "olsr" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "HelloInterval" << YAML::Value << o.hello_interval;
    out << YAML::Key << "HelloValidityTime" << YAML::Value << o.hello_validity;
    out << YAML::Key << "TcInterval" << YAML::Value << o.tc_interval;
    out << YAML::Key << "TcValidityTime" << YAML::Value << o.tc_validity;
    out << YAML::Key << "MidInterval" << YAML::Value << o.mid_interval;
    out << YAML::Key << "MidValidityTime" << YAML::Value << o.mid_validity;
    out << YAML::Key << "HnaInterval" << YAML::Value << o.hna_interval;
    out << YAML::Key << "HnaValidityTime" << YAML::Value << o.hna_validity;
    out << YAML::Key << "TcRedundancy" << YAML::Value << o.tc_redundancy;
    out << YAML::Key << "MprCoverage" << YAML::Value << o.mpr_coverage;
    out << YAML::Key << "LinkQualityLevel" << YAML::Value << o.link_quality_level;
    out << YAML::Key << "LinkQualityWinSize" << YAML::Value << o.link_quality_window;
    out << YAML::Key << "UseHysteresis" << YAML::Value << o.use_hysteresis;
    out << YAML::Key << "HystScaling" << YAML::Value << o.hyst_scaling;
    out << YAML::Key << "HystThrHigh" << YAML::Value << o.hyst_thr_high;
    out << YAML::Key << "HystThrLow" << YAML::Value << o.hyst_thr_low;
    out << YAML::Key << "Willingness" << YAML::Value << o.willingness;
    out << YAML::Key << "EmitMid" << YAML::Value << o.emit_mid;
    out << YAML::Key << "MprFlooding" << YAML::Value << o.mpr_flooding;
    out << YAML::EndMap;

    const auto& g = sc.negotiation;
    out << YAML::Key << "negotiation" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "allowed_channels" << YAML::Value << YAML::Flow << g.allowed_channels;
    out << YAML::Key << "window_halfwidth" << YAML::Value << g.window_halfwidth;
    out << YAML::Key << "switch_threshold_dbm" << YAML::Value << g.switch_threshold_dbm;
    out << YAML::Key << "refresh_weight" << YAML::Value << g.refresh_weight;
    out << YAML::Key << "round_period_s" << YAML::Value << g.round_period_s;
    out << YAML::Key << "first_round_s" << YAML::Value << g.first_round_s;
    out << YAML::Key << "timeout_s" << YAML::Value << g.timeout_s;
    out << YAML::Key << "separacio" << YAML::Value << g.separacio;
    out << YAML::EndMap;

    out << YAML::Key << "flows" << YAML::Value << YAML::BeginSeq;
    for (const auto& f : sc.flows) {
        out << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << f.id;
        out << YAML::Key << "name" << YAML::Value << f.name;
        out << YAML::Key << "src" << YAML::Value << name(f.src);
        out << YAML::Key << "dst" << YAML::Value << name(f.dst);
        out << YAML::Key << "protocol" << YAML::Value << to_string(f.protocol);
        out << YAML::Key << "rate_mbps" << YAML::Value;
        if (f.rate_mbps) out << *f.rate_mbps;
        else out << "saturate";
        out << YAML::Key << "start_s" << YAML::Value << f.start_s;
        out << YAML::Key << "duration_s" << YAML::Value << f.duration_s;
        if (!f.path.empty()) {
            std::vector<std::string> names;
            for (NodeId n : f.path) names.push_back(name(n));
            out << YAML::Key << "path" << YAML::Value << YAML::Flow << names;
        }
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace meshsim::cli
