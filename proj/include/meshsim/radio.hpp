#pragma once

// Analytic capacity model: MAC/application throughput bounds, channel
// overlap classes, co-channel sharing, adjacent-channel degradation and
// intra-node antenna coupling.

#include <map>
#include <utility>
#include <vector>

#include "meshsim/core.hpp"

namespace meshsim {

enum class Protocol { TcpLike, UdpLike };

std::string to_string(Protocol p);

// Whether the full routing/negotiation/bonding stack is running or the
// bare static-route configuration.
enum class StackMode { Bare, Full };

// Piecewise-linear (x, y) mapping, clamped at both ends.
class Curve {
  public:
    Curve() = default;
    explicit Curve(std::vector<std::pair<double, double>> points);

    double at(double x) const;
    bool monotone_non_decreasing() const;
    bool empty() const { return points_.empty(); }
    const std::vector<std::pair<double, double>>& points() const { return points_; }

  private:
    std::vector<std::pair<double, double>> points_;
};

// Whether the per-SDU delay sum includes a CTS frame time.
enum class MacDelayModel { NoCts, WithCts };

struct RadioParams {
    double alpha_header_bits = 320.0;
    double beta_payload_bits = 11680.0;

    // microseconds
    double t_difs = 50.0;
    double t_sifs = 10.0;
    double t_bo = 310.0;
    double t_rts = 0.0;
    double t_cts = 0.0;
    double t_ack = 106.0;
    double t_data = 1212.0;
    double ack_rate_mbps = 11.0;
    MacDelayModel mac_delay = MacDelayModel::NoCts;

    int orthogonality_b24_mhz = 25;
    int orthogonality_b5_mhz = 120;
    Curve adjacent_b24;
    Curve adjacent_b5;
    Curve coupling;  // antenna distance cm -> multiplier

    // Single-hop saturation throughput per band and transport, Mbps.
    double c_base_udp_b24 = 7.37;
    double c_base_udp_b5 = 9.93;
    double c_base_tcp_b24 = 6.35;
    double c_base_tcp_b5 = 8.82;

    double hop_latency_ms = 0.9;
    double per_packet_overhead_ms = 1.0;

    static RadioParams defaults();

    double c_base(Band band, Protocol protocol) const;
    int orthogonality_mhz(Band band) const;
    const Curve& adjacent_curve(Band band) const;

    // Throws DomainError on negative durations, multipliers outside [0,1]
    // or a non-monotone coupling curve.
    void validate() const;
};

// beta/(alpha+beta) * tmt_mac
double tmt_app(double tmt_mac_bps, double alpha_bits, double beta_bits);
// msdu / delaySDU
double tmt_mac(const RadioParams& params, double msdu_size_bits);

struct OverlapClass {
    enum class Kind { CoChannel, AdjacentOverlap, Orthogonal };
    Kind kind = Kind::Orthogonal;
    int separation_mhz = 0;

    bool operator==(const OverlapClass&) const = default;
};

OverlapClass classify_overlap(const Channel& a, const Channel& b, const RadioParams& params);

struct GkMode {
    enum class Kind { Random3D, Random2D, Arbitrary };
    Kind kind = Kind::Random2D;
    double alpha = 3.0;  // Arbitrary only
};

double gupta_kumar_bound(int n_nodes, double w_bps, GkMode mode);

// One transmission hop with the interfaces it uses at both ends.
struct Hop {
    NodeId tx = 0;
    NodeId rx = 0;
    Channel channel;
    int tx_iface = -1;
    int rx_iface = -1;
};

struct DirectedLink {
    NodeId tx = 0;
    NodeId rx = 0;
    std::optional<Channel> channel;
};

using ContentionSet = std::vector<DirectedLink>;

// Connected components of the conflict graph: two active links conflict
// when they share a channel and some endpoint of one is within range of
// some endpoint of the other. Duplicate links (several flows over the
// same hop) each count. Throws DomainError on an unassigned link.
std::vector<ContentionSet> contention_sets(const Topology& topo, const std::vector<DirectedLink>& active);

using ChannelAssignment = std::map<Edge, Channel>;

// Every adjacency edge counts as one active link.
std::vector<ContentionSet> contention_sets(const Topology& topo, const ChannelAssignment& assignment);

struct PathLoad {
    std::vector<Hop> hops;
    Protocol protocol = Protocol::UdpLike;
};

struct HopFactors {
    int contention = 1;
    double adjacent = 1.0;
    double coupling = 1.0;
};

// Throughput of each path when all of them are active together, Mbps.
// Path i gets min over its hops of C_base(band, protocol) * adjacent *
// coupling / contention.
std::vector<double> evaluate_paths(const Topology& topo, const std::vector<PathLoad>& loads,
                                   const RadioParams& params,
                                   std::vector<std::vector<HopFactors>>* factors = nullptr);

// Single active path over a static channel assignment. Throws
// TopologyError when consecutive nodes are not adjacent or a node has no
// data interface on the assigned channel.
double path_throughput(const Topology& topo, const ChannelAssignment& assignment,
                       const std::vector<NodeId>& path, const RadioParams& params, Protocol protocol);

// Hops for `path` using the assignment, resolving interfaces by channel.
std::vector<Hop> hops_for_path(const Topology& topo, const ChannelAssignment& assignment,
                               const std::vector<NodeId>& path);

double path_latency_ms(std::size_t hop_count, const RadioParams& params, StackMode mode);

}  // namespace meshsim
