#pragma once

// Built-in experiments: the testbed scenario builders, the table
// reproductions and the orthogonality / antenna-coupling sweeps.

#include <optional>
#include <string>
#include <vector>

#include "meshsim/sim.hpp"

namespace meshsim::cli {

// Line of stations A, B, C, ... with link k on link_channels[k]. Every
// station gets one data interface per distinct channel on its links;
// relays keep `relay_antenna_gap_cm` between their two antennas. All
// stations hear each other, as in a room-sized testbed. Single flow from
// the first to the last station, 30 s starting at 40 s.
sim::Scenario chain_scenario(Band band, const std::vector<int>& link_channels, Protocol protocol,
                             double relay_antenna_gap_cm = 30.0, StackMode stack = StackMode::Full);

// Square A-B-C-D with 2 m sides and channels a/b on every station. The
// flow runs A -> C, through B (path 1, left to routing) or through D
// (path 2, forced).
sim::Scenario square_scenario(Band band, int channel_a, int channel_b, Protocol protocol, int path);

struct Check {
    std::string label;     // e.g. "udp" or "tcp 15cm"
    std::string quantity;  // "mbps" or "latency_ms"
    double reference = 0.0;
    double measured = 0.0;
    double tolerance_pct = 0.0;

    double deviation_pct() const;
    bool pass() const;
};

struct Reproduction {
    std::string id;
    std::string title;
    std::vector<Check> checks;

    bool pass() const;
};

// Table ids in numeric order.
std::vector<std::string> reproduction_ids();
bool is_reproduction(const std::string& id);

// Default tolerance: 6% for UDP-like and latency checks, 8% for TCP-like,
// 3% for the UDP value of the three-station two-channel chain. A given
// `tolerance_pct` replaces all of them. Throws Error for unknown ids.
Reproduction reproduce(const std::string& id, std::optional<double> tolerance_pct = std::nullopt,
                       std::uint64_t seed = 1);

// Saturation throughput of the single flow of `scenario` after a full run.
double measured_mbps(const sim::Scenario& scenario, std::uint64_t seed = 1);

enum class SweepKind { Orthogonality, Coupling };

struct SweepPoint {
    std::string label;  // channel pair or distance
    double x = 0.0;     // channel separation MHz or antenna distance cm
    Protocol protocol = Protocol::UdpLike;
    double mbps = 0.0;
    double normalized = 0.0;  // mbps over the sweep's orthogonal value
};

// Orthogonality: 3-station chain, first link on the band's lowest channel,
// second link moving up to orthogonal separation. Coupling: 3-station
// orthogonal chain with the relay's antenna distance going 0..30 cm.
std::vector<SweepPoint> sweep(SweepKind kind, Band band, std::uint64_t seed = 1);

}  // namespace meshsim::cli
