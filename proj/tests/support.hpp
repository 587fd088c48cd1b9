#pragma once

// Small topology builders shared by the test binaries.

#include <vector>

#include "meshsim/core.hpp"

namespace meshsim::test {

inline InterfaceSpec signaling(Band band, int channel) {
    InterfaceSpec s;
    s.role = InterfaceRole::Signaling;
    s.band = band;
    s.channel = channel;
    return s;
}

inline InterfaceSpec data(Band band, int channel, double antenna_cm = 0.0) {
    InterfaceSpec s;
    s.role = InterfaceRole::Data;
    s.band = band;
    s.channel = channel;
    s.rate_mbps = band == Band::B5 ? 12.0 : 11.0;
    s.antenna_position_cm = antenna_cm;
    return s;
}

// n nodes with ids 1..n, each with a signaling radio and one data radio
// per entry of `channels`, antennas 30 cm apart.
inline TopologySpec uniform_spec(int n, Band band, const std::vector<int>& channels,
                                 const std::vector<std::pair<NodeId, NodeId>>& edges) {
    TopologySpec spec;
    Band sig_band = band == Band::B5 ? Band::B24 : Band::B5;
    int sig_channel = band == Band::B5 ? 1 : 165;
    for (int i = 1; i <= n; ++i) {
        NodeSpec ns;
        ns.id = static_cast<NodeId>(i);
        ns.name = std::string(1, static_cast<char>('A' + (i - 1) % 26));
        ns.position = {2.0 * (i - 1), 0.0};
        ns.interfaces.push_back(signaling(sig_band, sig_channel));
        for (std::size_t k = 0; k < channels.size(); ++k)
            ns.interfaces.push_back(data(band, channels[k], 30.0 * static_cast<double>(k)));
        spec.nodes.push_back(ns);
    }
    spec.edges = edges;
    return spec;
}

inline std::vector<std::pair<NodeId, NodeId>> chain_edges(int n) {
    std::vector<std::pair<NodeId, NodeId>> e;
    for (int i = 1; i < n; ++i) e.emplace_back(i, i + 1);
    return e;
}

inline std::vector<NodeId> chain_path(int n) {
    std::vector<NodeId> p;
    for (int i = 1; i <= n; ++i) p.push_back(static_cast<NodeId>(i));
    return p;
}

}  // namespace meshsim::test
