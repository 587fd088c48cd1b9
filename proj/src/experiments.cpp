#include "meshsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace meshsim::cli {

namespace {

InterfaceSpec signaling_for(Band data_band) {
    InterfaceSpec s;
    s.role = InterfaceRole::Signaling;
    // Keep the control radio out of the data band.
    s.band = data_band == Band::B5 ? Band::B24 : Band::B5;
    s.channel = data_band == Band::B5 ? 1 : 165;
    s.rate_mbps = data_band == Band::B5 ? 11.0 : 12.0;
    return s;
}

InterfaceSpec data_iface(Band band, int channel, double antenna_cm) {
    InterfaceSpec d;
    d.band = band;
    d.channel = channel;
    d.rate_mbps = band == Band::B5 ? 12.0 : 11.0;
    d.antenna_position_cm = antenna_cm;
    return d;
}

sim::Flow saturating(NodeId src, NodeId dst, Protocol protocol) {
    sim::Flow f;
    f.id = 1;
    f.src = src;
    f.dst = dst;
    f.protocol = protocol;
    f.name = std::string(1, static_cast<char>('A' + src - 1)) + "-" + std::string(1, static_cast<char>('A' + dst - 1));
    return f;
}

}  // namespace

sim::Scenario chain_scenario(Band band, const std::vector<int>& link_channels, Protocol protocol,
                             double relay_antenna_gap_cm, StackMode stack) {
    if (link_channels.empty()) throw Error("chain needs at least one link");
    sim::Scenario s;
    s.name = "chain" + std::to_string(link_channels.size() + 1);
    s.stack = stack;
    const std::size_t n = link_channels.size() + 1;
    for (std::size_t k = 0; k < n; ++k) {
        NodeSpec ns;
        ns.id = static_cast<NodeId>(k + 1);
        ns.name = std::string(1, static_cast<char>('A' + k));
        ns.position = {2.0 * static_cast<double>(k), 0.0};
        ns.interfaces.push_back(signaling_for(band));
        std::vector<int> chans;
        if (k > 0) chans.push_back(link_channels[k - 1]);
        if (k + 1 < n && std::find(chans.begin(), chans.end(), link_channels[k]) == chans.end())
            chans.push_back(link_channels[k]);
        for (std::size_t c = 0; c < chans.size(); ++c)
            ns.interfaces.push_back(data_iface(band, chans[c], c == 0 ? 0.0 : relay_antenna_gap_cm));
        s.topology.nodes.push_back(std::move(ns));
        if (k > 0) s.topology.edges.emplace_back(static_cast<NodeId>(k), static_cast<NodeId>(k + 1));
    }
    s.topology.range = RangeMode::All;
    s.flows.push_back(saturating(1, static_cast<NodeId>(n), protocol));
    return s;
}

sim::Scenario square_scenario(Band band, int channel_a, int channel_b, Protocol protocol, int path) {
    if (path != 1 && path != 2) throw Error("square path must be 1 or 2");
    sim::Scenario s;
    s.name = "square_path" + std::to_string(path);
    const Position pos[] = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
    for (NodeId k = 1; k <= 4; ++k) {
        NodeSpec ns;
        ns.id = k;
        ns.name = std::string(1, static_cast<char>('A' + k - 1));
        ns.position = pos[k - 1];
        ns.interfaces.push_back(signaling_for(band));
        ns.interfaces.push_back(data_iface(band, channel_a, 0.0));
        ns.interfaces.push_back(data_iface(band, channel_b, 30.0));
        s.topology.nodes.push_back(std::move(ns));
    }
    s.topology.edges = {{1, 2}, {2, 3}, {3, 4}, {4, 1}};
    s.topology.range = RangeMode::All;
    auto f = saturating(1, 3, protocol);
    if (path == 2) f.path = {1, 4, 3};
    s.flows.push_back(f);
    return s;
}

double Check::deviation_pct() const {
    if (reference == 0.0) return measured == 0.0 ? 0.0 : INFINITY;
    return 100.0 * (measured - reference) / reference;
}

bool Check::pass() const { return std::abs(deviation_pct()) <= tolerance_pct + 1e-9; }

bool Reproduction::pass() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

double measured_mbps(const sim::Scenario& scenario, std::uint64_t seed) {
    auto stats = sim::run(scenario, seed);
    if (stats.flows.empty()) throw Error("scenario has no flow");
    return stats.flows.front().mbps;
}

namespace {

struct Tolerances {
    double udp = 6.0;
    double tcp = 8.0;
    double latency = 6.0;
};

using Builder = std::function<sim::Scenario(Protocol)>;

struct Entry {
    std::string title;
    std::function<std::vector<Check>(const Tolerances&, std::uint64_t)> run;
};

std::vector<Check> tcp_udp(const Builder& build, double tcp_ref, double udp_ref, const Tolerances& tol,
                           std::uint64_t seed) {
    return {
        {"tcp", "mbps", tcp_ref, measured_mbps(build(Protocol::TcpLike), seed), tol.tcp},
        {"udp", "mbps", udp_ref, measured_mbps(build(Protocol::UdpLike), seed), tol.udp},
    };
}

Entry chain_entry(std::string title, Band band, std::vector<int> channels, double tcp_ref, double udp_ref,
                  std::optional<double> udp_tol = std::nullopt) {
    return {std::move(title), [=](const Tolerances& tol, std::uint64_t seed) {
                Tolerances t = tol;
                if (udp_tol) t.udp = *udp_tol;
                return tcp_udp([&](Protocol p) { return chain_scenario(band, channels, p); }, tcp_ref, udp_ref, t,
                               seed);
            }};
}

Entry square_entry(std::string title, Band band, int a, int b, int path, double tcp_ref, double udp_ref) {
    return {std::move(title), [=](const Tolerances& tol, std::uint64_t seed) {
                return tcp_udp([&](Protocol p) { return square_scenario(band, a, b, p, path); }, tcp_ref, udp_ref,
                               tol, seed);
            }};
}

Entry coupling_entry(std::string title, int second_channel, Protocol protocol, std::vector<double> refs) {
    return {std::move(title), [=](const Tolerances& tol, std::uint64_t seed) {
                std::vector<Check> out;
                for (std::size_t k = 0; k < refs.size(); ++k) {
                    double d = 5.0 * static_cast<double>(k);
                    auto s = chain_scenario(Band::B24, {1, second_channel}, protocol, d);
                    std::string label = to_string(protocol) + " " + std::to_string(static_cast<int>(d)) + "cm";
                    out.push_back({label, "mbps", refs[k], measured_mbps(s, seed),
                                   protocol == Protocol::TcpLike ? tol.tcp : tol.udp});
                }
                return out;
            }};
}

Entry latency_entry() {
    return {"3-station two-channel chain, per-packet latency without and with the stack",
            [](const Tolerances& tol, std::uint64_t seed) {
                std::vector<Check> out;
                for (auto [mode, label, ref] : {std::tuple{StackMode::Bare, "bare", 1.8},
                                                std::tuple{StackMode::Full, "full", 2.95}}) {
                    auto s = chain_scenario(Band::B5, {36, 64}, Protocol::UdpLike, 30.0, mode);
                    auto stats = sim::run(s, seed);
                    out.push_back({label, "latency_ms", ref, stats.flows.front().latency_ms, tol.latency});
                }
                return out;
            }};
}

const std::map<std::string, Entry>& registry() {
    static const std::map<std::string, Entry> r = [] {
        std::map<std::string, Entry> m;
        m["6.1"] = latency_entry();

        const double b5_one[4][2] = {{8.82, 9.93}, {4.39, 5.01}, {2.90, 3.25}, {2.18, 2.43}};
        const double b24_one[4][2] = {{6.35, 7.37}, {3.22, 3.71}, {2.10, 2.56}, {1.61, 1.93}};
        for (int n = 2; n <= 5; ++n) {
            std::vector<int> b5(static_cast<std::size_t>(n - 1), 36);
            std::vector<int> b24(static_cast<std::size_t>(n - 1), 1);
            auto k = static_cast<std::size_t>(n - 2);
            m["6." + std::to_string(n)] = chain_entry(std::to_string(n) + "-station chain, 5 GHz, one channel",
                                                      Band::B5, b5, b5_one[k][0], b5_one[k][1]);
            m["6." + std::to_string(n + 4)] = chain_entry(std::to_string(n) + "-station chain, 2.4 GHz, one channel",
                                                          Band::B24, b24, b24_one[k][0], b24_one[k][1]);
        }

        m["6.10"] = chain_entry("3-station chain, 5 GHz, channels 36/64", Band::B5, {36, 64}, 8.32, 9.88, 3.0);
        m["6.11"] = chain_entry("4-station chain, 5 GHz, alternating 36/64", Band::B5, {36, 64, 36}, 4.37, 4.87);
        m["6.12"] = chain_entry("4-station chain, 5 GHz, channels 36/64/64", Band::B5, {36, 64, 64}, 4.44, 4.81);
        m["6.13"] = chain_entry("5-station chain, 5 GHz, alternating 36/64", Band::B5, {36, 64, 36, 64}, 4.42, 5.02);
        m["6.14"] = square_entry("square, 5 GHz, channels 36/64, path 1", Band::B5, 36, 64, 1, 8.17, 9.68);
        m["6.15"] = square_entry("square, 5 GHz, channels 36/64, path 2", Band::B5, 36, 64, 2, 8.08, 9.90);
        m["6.16"] = chain_entry("3-station chain, 2.4 GHz, channels 1/11", Band::B24, {1, 11}, 5.17, 6.63);
        m["6.17"] = chain_entry("4-station chain, 2.4 GHz, alternating 1/11", Band::B24, {1, 11, 1}, 3.00, 3.80);
        m["6.18"] = chain_entry("4-station chain, 2.4 GHz, channels 1/11/11", Band::B24, {1, 11, 11}, 3.05, 3.75);
        m["6.19"] = chain_entry("5-station chain, 2.4 GHz, alternating 1/11", Band::B24, {1, 11, 1, 11}, 2.77, 3.37);
        m["6.20"] = square_entry("square, 2.4 GHz, channels 1/11, path 1", Band::B24, 1, 11, 1, 3.26, 5.11);
        m["6.21"] = square_entry("square, 2.4 GHz, channels 1/11, path 2", Band::B24, 1, 11, 2, 4.02, 5.11);

        const int b5_pairs[] = {40, 44, 48, 52, 56, 60};
        const double b5_pair_refs[][2] = {{4.35, 4.97}, {5.67, 6.59}, {6.12, 6.82},
                                          {6.63, 8.17}, {7.24, 9.45}, {8.17, 9.76}};
        for (int k = 0; k < 6; ++k)
            m["6." + std::to_string(22 + k)] =
                chain_entry("3-station chain, 5 GHz, channels 36/" + std::to_string(b5_pairs[k]), Band::B5,
                            {36, b5_pairs[k]}, b5_pair_refs[k][0], b5_pair_refs[k][1]);
        const double b24_pair_refs[][2] = {{3.03, 3.55}, {2.58, 3.42}, {2.73, 3.47}, {3.41, 5.18}, {5.53, 6.85}};
        for (int k = 0; k < 5; ++k)
            m["6." + std::to_string(28 + k)] =
                chain_entry("3-station chain, 2.4 GHz, channels 1/" + std::to_string(k + 2), Band::B24, {1, k + 2},
                            b24_pair_refs[k][0], b24_pair_refs[k][1]);

        m["6.33"] = coupling_entry("relay antenna distance 0-30 cm, channels 1/11, TCP", 11, Protocol::TcpLike,
                                   {2.31, 2.95, 3.36, 3.47, 4.60, 5.44, 5.59});
        m["6.34"] = coupling_entry("relay antenna distance 0-30 cm, channels 1/11, UDP", 11, Protocol::UdpLike,
                                   {2.87, 3.54, 4.01, 4.20, 5.74, 6.42, 6.79});
        m["6.35"] = coupling_entry("relay antenna distance 0-30 cm, channels 1/6, TCP", 6, Protocol::TcpLike,
                                   {2.58, 2.63, 3.58, 3.64, 3.84, 5.04, 5.25});
        m["6.36"] = coupling_entry("relay antenna distance 0-30 cm, channels 1/6, UDP", 6, Protocol::UdpLike,
                                   {3.11, 3.12, 4.06, 4.16, 4.41, 6.89, 6.97});
        return m;
    }();
    return r;
}

int minor_of(const std::string& id) { return std::stoi(id.substr(id.find('.') + 1)); }

}  // namespace

std::vector<std::string> reproduction_ids() {
    std::vector<std::string> ids;
    for (const auto& [id, e] : registry()) ids.push_back(id);
    std::sort(ids.begin(), ids.end(), [](const auto& a, const auto& b) { return minor_of(a) < minor_of(b); });
    return ids;
}

bool is_reproduction(const std::string& id) { return registry().contains(id); }

Reproduction reproduce(const std::string& id, std::optional<double> tolerance_pct, std::uint64_t seed) {
    auto it = registry().find(id);
    if (it == registry().end()) throw Error("unknown table id '" + id + "'");
    Tolerances tol;
    Reproduction r{id, it->second.title, {}};
    if (tolerance_pct) {
        if (!(*tolerance_pct >= 0.0)) throw Error("tolerance must be >= 0");
        // An explicit tolerance replaces every default, including the
        // tighter per-table ones.
        r.checks = it->second.run(Tolerances{}, seed);
        for (auto& c : r.checks) c.tolerance_pct = *tolerance_pct;
        return r;
    }
    r.checks = it->second.run(tol, seed);
    return r;
}

std::vector<SweepPoint> sweep(SweepKind kind, Band band, std::uint64_t seed) {
    std::vector<SweepPoint> out;
    const int first = band_channels(band).front();
    for (Protocol proto : {Protocol::TcpLike, Protocol::UdpLike}) {
        std::vector<SweepPoint> rows;
        if (kind == SweepKind::Orthogonality) {
            const int step = band == Band::B5 ? 4 : 1;
            const int limit = RadioParams::defaults().orthogonality_mhz(band);
            for (int ch = first;; ch += step) {
                Channel a = Channel::make(band, first);
                auto center = center_frequency_mhz(band, ch);
                if (!center) break;
                int sep = *center - a.center_mhz();
                if (sep > limit) break;
                SweepPoint p;
                p.label = std::to_string(first) + "/" + std::to_string(ch);
                p.x = sep;
                p.protocol = proto;
                p.mbps = measured_mbps(chain_scenario(band, {first, ch}, proto), seed);
                rows.push_back(p);
            }
        } else {
            const int second = band == Band::B5 ? 64 : 11;
            for (int d = 0; d <= 30; d += 5) {
                SweepPoint p;
                p.label = std::to_string(d) + "cm";
                p.x = d;
                p.protocol = proto;
                p.mbps = measured_mbps(chain_scenario(band, {first, second}, proto, d), seed);
                rows.push_back(p);
            }
        }
        double top = rows.empty() ? 0.0 : rows.back().mbps;
        for (auto& p : rows) {
            p.normalized = top > 0.0 ? p.mbps / top : 0.0;
            out.push_back(p);
        }
    }
    return out;
}

}  // namespace meshsim::cli
