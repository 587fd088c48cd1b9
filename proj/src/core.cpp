#include "meshsim/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>

namespace meshsim {

namespace {

constexpr std::array<int, 11> kB24Channels = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
constexpr std::array<int, 13> kB5Channels = {36, 40, 44, 48, 52, 56, 60, 64,
                                             149, 153, 157, 161, 165};

}  // namespace

Time Time::from_seconds(double s) {
    return Time{static_cast<std::int64_t>(std::llround(s * 1e6))};
}

std::string to_string(Band b) { return b == Band::B24 ? "b24" : "b5"; }

std::optional<Band> parse_band(std::string_view s) {
    if (s == "b24" || s == "B24" || s == "2.4") return Band::B24;
    if (s == "b5" || s == "B5" || s == "5") return Band::B5;
    return std::nullopt;
}

std::span<const int> band_channels(Band b) {
    if (b == Band::B24) return kB24Channels;
    return kB5Channels;
}

std::optional<int> center_frequency_mhz(Band b, int index) {
    auto list = band_channels(b);
    if (std::find(list.begin(), list.end(), index) == list.end()) return std::nullopt;
    if (b == Band::B24) return 2412 + 5 * (index - 1);
    return 5000 + 5 * index;
}

Channel Channel::make(Band b, int index) {
    if (!center_frequency_mhz(b, index)) {
        throw DomainError("channel " + std::to_string(index) + " is not part of band " +
                          to_string(b));
    }
    return Channel{b, index};
}

int Channel::center_mhz() const { return *center_frequency_mhz(band, index); }

std::string to_string(const Channel& c) { return to_string(c.band) + ":" + std::to_string(c.index); }

std::optional<int> channel_separation_mhz(const Channel& a, const Channel& b) {
    if (a.band != b.band) return std::nullopt;
    return std::abs(a.center_mhz() - b.center_mhz());
}

std::string to_string(Address a) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", (a.value >> 24) & 0xff, (a.value >> 16) & 0xff,
                  (a.value >> 8) & 0xff, a.value & 0xff);
    return buf;
}

std::string to_string(MacAddress m) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x",
                  static_cast<unsigned>((m.value >> 40) & 0xff),
                  static_cast<unsigned>((m.value >> 32) & 0xff),
                  static_cast<unsigned>((m.value >> 24) & 0xff),
                  static_cast<unsigned>((m.value >> 16) & 0xff),
                  static_cast<unsigned>((m.value >> 8) & 0xff), static_cast<unsigned>(m.value & 0xff));
    return buf;
}

Address interface_address(NodeId node, int iface_ordinal) {
    return Address{(10u << 24) | (static_cast<std::uint32_t>(iface_ordinal + 1) & 0xff) << 16 |
                   (node & 0xffff)};
}

MacAddress interface_mac(NodeId node, int iface_ordinal) {
    return MacAddress{(0x02ull << 40) | (static_cast<std::uint64_t>(node & 0xffff) << 16) |
                      static_cast<std::uint64_t>(iface_ordinal & 0xff)};
}

const Interface& Node::signaling() const {
    for (const auto& i : interfaces)
        if (i.role == InterfaceRole::Signaling) return i;
    throw TopologyError("node " + name + " has no signaling interface");
}

std::vector<const Interface*> Node::data_interfaces() const {
    std::vector<const Interface*> out;
    for (const auto& i : interfaces)
        if (i.role == InterfaceRole::Data) out.push_back(&i);
    return out;
}

const Interface* Node::data_interface_on(const Channel& channel) const {
    for (const auto& i : interfaces)
        if (i.role == InterfaceRole::Data && i.channel == channel) return &i;
    return nullptr;
}

const Interface* Node::interface_by_id(int id) const {
    for (const auto& i : interfaces)
        if (i.id == id) return &i;
    return nullptr;
}

bool Topology::has_node(NodeId id) const {
    return std::any_of(nodes_.begin(), nodes_.end(), [&](const Node& n) { return n.id == id; });
}

const Node& Topology::node(NodeId id) const {
    for (const auto& n : nodes_)
        if (n.id == id) return n;
    throw TopologyError("unknown node id " + std::to_string(id));
}

bool Topology::adjacent(NodeId x, NodeId y) const {
    if (x == y) return false;
    return adjacency_.contains(Edge::of(x, y));
}

bool Topology::in_range(NodeId x, NodeId y) const {
    if (x == y) return true;
    switch (range_mode_) {
        case RangeMode::All:
            return true;
        case RangeMode::Adjacency:
            return adjacent(x, y);
        case RangeMode::Explicit:
            return adjacent(x, y) || range_extra_.contains(Edge::of(x, y));
    }
    return false;
}

std::vector<NodeId> Topology::neighbors(NodeId id) const {
    std::vector<NodeId> out;
    for (const auto& e : adjacency_) {
        if (e.a == id) out.push_back(e.b);
        if (e.b == id) out.push_back(e.a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<NodeId> Topology::owner_of(Address addr) const {
    for (const auto& n : nodes_)
        for (const auto& i : n.interfaces)
            if (i.ip == addr) return n.id;
    return std::nullopt;
}

void Topology::set_edge(NodeId x, NodeId y, bool present) {
    if (!has_node(x) || !has_node(y) || x == y) throw TopologyError("set_edge: invalid node pair");
    if (present)
        adjacency_.insert(Edge::of(x, y));
    else
        adjacency_.erase(Edge::of(x, y));
}

Topology build_topology(const TopologySpec& spec) {
    Topology topo;
    std::set<NodeId> ids;
    for (const auto& ns : spec.nodes) {
        if (!ids.insert(ns.id).second)
            throw TopologyError("duplicate node id " + std::to_string(ns.id));
        if (ns.id > 0xffff) throw TopologyError("node id " + std::to_string(ns.id) + " exceeds 65535");

        Node node;
        node.id = ns.id;
        node.name = ns.name.empty() ? "n" + std::to_string(ns.id) : ns.name;
        node.position = ns.position;

        int signaling = 0;
        int data_ordinal = 0;
        int ordinal = 0;
        for (const auto& is : ns.interfaces) {
            Interface iface;
            iface.id = ordinal;
            iface.role = is.role;
            try {
                iface.channel = Channel::make(is.band, is.channel);
            } catch (const DomainError& e) {
                throw TopologyError("node " + node.name + ": " + e.what());
            }
            if (!(is.rate_mbps > 0.0))
                throw TopologyError("node " + node.name + ": interface rate must be positive");
            iface.rate_mbps = is.rate_mbps;
            iface.antenna_position_cm = is.antenna_position_cm;
            iface.ip = interface_address(ns.id, ordinal);
            iface.mac = interface_mac(ns.id, ordinal);
            if (is.role == InterfaceRole::Signaling) {
                ++signaling;
                iface.name = is.name.empty() ? "wlan0" : is.name;
            } else {
                iface.name = is.name.empty() ? "ath" + std::to_string(data_ordinal) : is.name;
                ++data_ordinal;
            }
            node.interfaces.push_back(std::move(iface));
            ++ordinal;
        }
        if (signaling != 1)
            throw TopologyError("node " + node.name + " must have exactly one signaling interface, has " +
                                std::to_string(signaling));
        if (data_ordinal == 0) throw TopologyError("node " + node.name + " has no data interface");
        topo.nodes_.push_back(std::move(node));
    }
    std::sort(topo.nodes_.begin(), topo.nodes_.end(),
              [](const Node& x, const Node& y) { return x.id < y.id; });

    auto check_pair = [&](NodeId x, NodeId y, const char* what) {
        if (!ids.contains(x) || !ids.contains(y))
            throw TopologyError(std::string(what) + " references unknown node (" + std::to_string(x) +
                                ", " + std::to_string(y) + ")");
        if (x == y) throw TopologyError(std::string(what) + " is a self-loop on node " + std::to_string(x));
    };
    for (const auto& [x, y] : spec.edges) {
        check_pair(x, y, "adjacency edge");
        topo.adjacency_.insert(Edge::of(x, y));
    }
    topo.range_mode_ = spec.range;
    for (const auto& [x, y] : spec.range_pairs) {
        check_pair(x, y, "range pair");
        topo.range_extra_.insert(Edge::of(x, y));
    }
    return topo;
}

std::string to_string(PacketKind k) {
    switch (k) {
        case PacketKind::Data: return "data";
        case PacketKind::Hello: return "hello";
        case PacketKind::Tc: return "tc";
        case PacketKind::Mid: return "mid";
        case PacketKind::Hna: return "hna";
        case PacketKind::NegotiationMsg: return "negotiation";
    }
    return "?";
}

}  // namespace meshsim
