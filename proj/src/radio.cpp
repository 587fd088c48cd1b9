#include "meshsim/radio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace meshsim {

std::string to_string(Protocol p) { return p == Protocol::TcpLike ? "tcp" : "udp"; }

Curve::Curve(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
    std::sort(points_.begin(), points_.end());
    for (std::size_t i = 1; i < points_.size(); ++i)
        if (points_[i].first == points_[i - 1].first)
            throw DomainError("curve has duplicate x value " + std::to_string(points_[i].first));
}

double Curve::at(double x) const {
    if (points_.empty()) return 1.0;
    if (x <= points_.front().first) return points_.front().second;
    if (x >= points_.back().first) return points_.back().second;
    auto hi = std::upper_bound(points_.begin(), points_.end(), x,
                               [](double v, const auto& p) { return v < p.first; });
    auto lo = hi - 1;
    double t = (x - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

bool Curve::monotone_non_decreasing() const {
    for (std::size_t i = 1; i < points_.size(); ++i)
        if (points_[i].second < points_[i - 1].second) return false;
    return true;
}

RadioParams RadioParams::defaults() {
    RadioParams p;
    // Normalised against the orthogonal two-channel result of each band.
    p.adjacent_b24 = Curve({{5, 0.50}, {10, 0.48}, {15, 0.49}, {20, 0.73}, {25, 0.97}});
    p.adjacent_b5 = Curve({{20, 0.51}, {40, 0.68}, {60, 0.70}, {80, 0.84}, {100, 0.97}, {120, 1.0}});
    p.coupling =
        Curve({{0, 0.41}, {5, 0.53}, {10, 0.60}, {15, 0.62}, {20, 0.82}, {25, 0.97}, {30, 1.0}});
    return p;
}

double RadioParams::c_base(Band band, Protocol protocol) const {
    if (protocol == Protocol::UdpLike) return band == Band::B24 ? c_base_udp_b24 : c_base_udp_b5;
    return band == Band::B24 ? c_base_tcp_b24 : c_base_tcp_b5;
}

int RadioParams::orthogonality_mhz(Band band) const {
    return band == Band::B24 ? orthogonality_b24_mhz : orthogonality_b5_mhz;
}

const Curve& RadioParams::adjacent_curve(Band band) const {
    return band == Band::B24 ? adjacent_b24 : adjacent_b5;
}

void RadioParams::validate() const {
    const std::pair<const char*, double> durations[] = {
        {"t_difs", t_difs}, {"t_sifs", t_sifs}, {"t_bo", t_bo},     {"t_rts", t_rts},
        {"t_cts", t_cts},   {"t_ack", t_ack},   {"t_data", t_data},
    };
    for (const auto& [name, v] : durations)
        if (v < 0.0) throw DomainError(std::string(name) + " must be >= 0");
    if (alpha_header_bits < 0.0) throw DomainError("alpha_header_bits must be >= 0");
    if (beta_payload_bits <= 0.0) throw DomainError("beta_payload_bits must be > 0");
    if (ack_rate_mbps <= 0.0) throw DomainError("ack_rate_mbps must be > 0");
    if (orthogonality_b24_mhz < 0 || orthogonality_b5_mhz < 0)
        throw DomainError("orthogonality threshold must be >= 0");
    if (hop_latency_ms < 0.0 || per_packet_overhead_ms < 0.0)
        throw DomainError("latency parameters must be >= 0");
    for (double c : {c_base_udp_b24, c_base_udp_b5, c_base_tcp_b24, c_base_tcp_b5})
        if (!(c > 0.0)) throw DomainError("c_base values must be > 0");
    for (const Curve* c : {&adjacent_b24, &adjacent_b5, &coupling})
        for (const auto& [x, y] : c->points())
            if (y < 0.0 || y > 1.0) throw DomainError("curve multiplier outside [0,1]");
    if (!coupling.monotone_non_decreasing()) throw DomainError("coupling curve must be non-decreasing");
}

double tmt_app(double tmt_mac_bps, double alpha_bits, double beta_bits) {
    if (beta_bits <= 0.0) throw DomainError("tmt_app: beta must be > 0");
    if (alpha_bits < 0.0) throw DomainError("tmt_app: alpha must be >= 0");
    if (tmt_mac_bps < 0.0) throw DomainError("tmt_app: tmt_mac must be >= 0");
    return beta_bits / (alpha_bits + beta_bits) * tmt_mac_bps;
}

double tmt_mac(const RadioParams& p, double msdu_size_bits) {
    double total = p.t_difs + p.t_sifs + p.t_bo + p.t_rts + p.t_ack + p.t_data;
    if (p.mac_delay == MacDelayModel::WithCts) total += p.t_cts;
    if (!(total > 0.0)) throw DomainError("tmt_mac: total SDU delay must be > 0");
    return msdu_size_bits / (total * 1e-6);
}

OverlapClass classify_overlap(const Channel& a, const Channel& b, const RadioParams& params) {
    auto sep = channel_separation_mhz(a, b);
    if (!sep) return {OverlapClass::Kind::Orthogonal, 0};
    if (*sep == 0) return {OverlapClass::Kind::CoChannel, 0};
    if (*sep >= params.orthogonality_mhz(a.band)) return {OverlapClass::Kind::Orthogonal, *sep};
    return {OverlapClass::Kind::AdjacentOverlap, *sep};
}

double gupta_kumar_bound(int n, double w, GkMode mode) {
    if (n < 2) throw DomainError("gupta_kumar_bound: n must be >= 2");
    double nn = static_cast<double>(n);
    switch (mode.kind) {
        case GkMode::Kind::Random3D:
            return w / std::sqrt(nn * std::log(nn));
        case GkMode::Kind::Random2D:
            return w / std::sqrt(nn);
        case GkMode::Kind::Arbitrary:
            if (!(mode.alpha > 2.0)) throw DomainError("gupta_kumar_bound: alpha must be > 2");
            return w / (mode.alpha * std::sqrt(nn));
    }
    return 0.0;
}

namespace {

bool links_near(const Topology& topo, NodeId a1, NodeId a2, NodeId b1, NodeId b2) {
    return topo.in_range(a1, b1) || topo.in_range(a1, b2) || topo.in_range(a2, b1) ||
           topo.in_range(a2, b2);
}

// Union-find over link indices.
struct Dsu {
    std::vector<std::size_t> parent;
    explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

std::vector<ContentionSet> contention_sets(const Topology& topo, const std::vector<DirectedLink>& active) {
    for (const auto& l : active)
        if (!l.channel)
            throw DomainError("link " + std::to_string(l.tx) + "->" + std::to_string(l.rx) +
                              " has no channel");
    Dsu dsu(active.size());
    for (std::size_t i = 0; i < active.size(); ++i)
        for (std::size_t j = i + 1; j < active.size(); ++j)
            if (*active[i].channel == *active[j].channel &&
                links_near(topo, active[i].tx, active[i].rx, active[j].tx, active[j].rx))
                dsu.unite(i, j);

    std::map<std::size_t, ContentionSet> groups;
    for (std::size_t i = 0; i < active.size(); ++i) groups[dsu.find(i)].push_back(active[i]);
    std::vector<ContentionSet> out;
    for (auto& [root, set] : groups) out.push_back(std::move(set));
    return out;
}

std::vector<ContentionSet> contention_sets(const Topology& topo, const ChannelAssignment& assignment) {
    std::vector<DirectedLink> active;
    for (const auto& e : topo.adjacency()) {
        auto it = assignment.find(e);
        DirectedLink l{e.a, e.b, std::nullopt};
        if (it != assignment.end()) l.channel = it->second;
        active.push_back(l);
    }
    return contention_sets(topo, active);
}

std::vector<double> evaluate_paths(const Topology& topo, const std::vector<PathLoad>& loads,
                                   const RadioParams& params,
                                   std::vector<std::vector<HopFactors>>* factors) {
    struct Ref {
        std::size_t load;
        std::size_t hop;
    };
    std::vector<Ref> refs;
    std::vector<DirectedLink> active;
    for (std::size_t i = 0; i < loads.size(); ++i)
        for (std::size_t h = 0; h < loads[i].hops.size(); ++h) {
            const Hop& hop = loads[i].hops[h];
            refs.push_back({i, h});
            active.push_back({hop.tx, hop.rx, hop.channel});
        }

    Dsu dsu(active.size());
    for (std::size_t i = 0; i < active.size(); ++i)
        for (std::size_t j = i + 1; j < active.size(); ++j)
            if (*active[i].channel == *active[j].channel &&
                links_near(topo, active[i].tx, active[i].rx, active[j].tx, active[j].rx))
                dsu.unite(i, j);
    std::map<std::size_t, int> set_size;
    for (std::size_t i = 0; i < active.size(); ++i) ++set_size[dsu.find(i)];

    std::vector<std::vector<HopFactors>> hop_factors(loads.size());
    for (std::size_t i = 0; i < loads.size(); ++i) hop_factors[i].resize(loads[i].hops.size());

    for (std::size_t k = 0; k < active.size(); ++k) {
        HopFactors& f = hop_factors[refs[k].load][refs[k].hop];
        f.contention = set_size[dsu.find(k)];
        for (std::size_t j = 0; j < active.size(); ++j) {
            if (j == k) continue;
            auto oc = classify_overlap(*active[k].channel, *active[j].channel, params);
            if (oc.kind != OverlapClass::Kind::AdjacentOverlap) continue;
            if (!links_near(topo, active[k].tx, active[k].rx, active[j].tx, active[j].rx)) continue;
            f.adjacent = std::min(f.adjacent, params.adjacent_curve(active[k].channel->band).at(oc.separation_mhz));
        }
    }

    // Relay coupling: receiving on one radio while sending on another.
    for (std::size_t i = 0; i < loads.size(); ++i) {
        const auto& hops = loads[i].hops;
        for (std::size_t h = 1; h < hops.size(); ++h) {
            const Hop& in = hops[h - 1];
            const Hop& out = hops[h];
            if (in.rx != out.tx || in.rx_iface == out.tx_iface) continue;
            const Node& relay = topo.node(in.rx);
            const Interface* a = relay.interface_by_id(in.rx_iface);
            const Interface* b = relay.interface_by_id(out.tx_iface);
            if (!a || !b) continue;
            double d = std::abs(a->antenna_position_cm - b->antenna_position_cm);
            double c = params.coupling.at(d);
            hop_factors[i][h - 1].coupling = std::min(hop_factors[i][h - 1].coupling, c);
            hop_factors[i][h].coupling = std::min(hop_factors[i][h].coupling, c);
        }
    }

    std::vector<double> out(loads.size(), 0.0);
    for (std::size_t i = 0; i < loads.size(); ++i) {
        if (loads[i].hops.empty()) continue;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t h = 0; h < loads[i].hops.size(); ++h) {
            const HopFactors& f = hop_factors[i][h];
            double base = params.c_base(loads[i].hops[h].channel.band, loads[i].protocol);
            best = std::min(best, base * f.adjacent * f.coupling / f.contention);
        }
        out[i] = best;
    }
    if (factors) *factors = std::move(hop_factors);
    return out;
}

std::vector<Hop> hops_for_path(const Topology& topo, const ChannelAssignment& assignment,
                               const std::vector<NodeId>& path) {
    std::vector<Hop> hops;
    for (std::size_t i = 1; i < path.size(); ++i) {
        NodeId a = path[i - 1];
        NodeId b = path[i];
        if (!topo.adjacent(a, b))
            throw TopologyError("path is disconnected between " + std::to_string(a) + " and " +
                                std::to_string(b));
        auto it = assignment.find(Edge::of(a, b));
        if (it == assignment.end())
            throw TopologyError("no channel assigned to link " + std::to_string(a) + "-" + std::to_string(b));
        const Interface* ta = topo.node(a).data_interface_on(it->second);
        const Interface* rb = topo.node(b).data_interface_on(it->second);
        if (!ta || !rb)
            throw TopologyError("channel " + to_string(it->second) + " not tuned at both ends of " +
                                std::to_string(a) + "-" + std::to_string(b));
        hops.push_back({a, b, it->second, ta->id, rb->id});
    }
    return hops;
}

double path_throughput(const Topology& topo, const ChannelAssignment& assignment,
                       const std::vector<NodeId>& path, const RadioParams& params, Protocol protocol) {
    if (path.size() < 2) throw TopologyError("path needs at least two nodes");
    PathLoad load{hops_for_path(topo, assignment, path), protocol};
    return evaluate_paths(topo, {load}, params).front();
}

double path_latency_ms(std::size_t hop_count, const RadioParams& params, StackMode mode) {
    double ms = static_cast<double>(hop_count) * params.hop_latency_ms;
    if (mode == StackMode::Full) ms += params.per_packet_overhead_ms;
    return ms;
}

}  // namespace meshsim
