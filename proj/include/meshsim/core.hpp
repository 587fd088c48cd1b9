#pragma once

// Domain model shared by every module: channels, interfaces, nodes,
// topology construction and validation, simulated time.

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace meshsim {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Invalid argument to a numeric routine (beta = 0, p outside [0,1], ...).
class DomainError : public Error {
  public:
    using Error::Error;
};

class TopologyError : public Error {
  public:
    using Error::Error;
};

// Simulated time, fixed-point microseconds.
struct Time {
    std::int64_t us = 0;

    static constexpr Time from_us(std::int64_t v) { return Time{v}; }
    static Time from_seconds(double s);
    static constexpr Time zero() { return Time{0}; }
    static constexpr Time never() { return Time{INT64_MAX}; }

    double seconds() const { return static_cast<double>(us) * 1e-6; }

    constexpr auto operator<=>(const Time&) const = default;
    constexpr Time operator+(Time o) const { return Time{us + o.us}; }
    constexpr Time operator-(Time o) const { return Time{us - o.us}; }
    constexpr Time& operator+=(Time o) {
        us += o.us;
        return *this;
    }
};

enum class Band { B24, B5 };

std::string to_string(Band b);
std::optional<Band> parse_band(std::string_view s);

// Channel numbers a band exposes, in ascending order.
std::span<const int> band_channels(Band b);

// Center frequency for (band, index); nullopt when the index is not part
// of the band's channel list.
std::optional<int> center_frequency_mhz(Band b, int index);

struct Channel {
    Band band = Band::B24;
    int index = 1;

    // Throws DomainError when index is not a channel of the band.
    static Channel make(Band b, int index);

    int center_mhz() const;

    constexpr auto operator<=>(const Channel&) const = default;
};

std::string to_string(const Channel& c);

// |center(a) - center(b)| for same-band channels, nullopt across bands
// (cross-band pairs never interfere).
std::optional<int> channel_separation_mhz(const Channel& a, const Channel& b);

// 32-bit opaque network address.
struct Address {
    std::uint32_t value = 0;
    constexpr auto operator<=>(const Address&) const = default;
    explicit operator bool() const { return value != 0; }
};

// 48-bit opaque hardware address.
struct MacAddress {
    std::uint64_t value = 0;
    constexpr auto operator<=>(const MacAddress&) const = default;
};

std::string to_string(Address a);
// Colon-separated text form, 17 characters.
std::string to_string(MacAddress m);

using NodeId = std::uint32_t;

// Address scheme: 10.<ordinal+1>.<node_id hi>.<node_id lo>.
// Node ids must stay below 65536.
Address interface_address(NodeId node, int iface_ordinal);
// 02:00:<node hi>:<node lo>:00:<ordinal>
MacAddress interface_mac(NodeId node, int iface_ordinal);

enum class InterfaceRole { Signaling, Data };

struct Interface {
    int id = 0;  // node-scoped ordinal
    std::string name;
    InterfaceRole role = InterfaceRole::Data;
    Channel channel;
    Address ip;
    MacAddress mac;
    double rate_mbps = 11.0;
    double antenna_position_cm = 0.0;
};

struct Position {
    double x = 0.0;
    double y = 0.0;
};

struct Node {
    NodeId id = 0;
    std::string name;
    std::vector<Interface> interfaces;
    Position position;

    const Interface& signaling() const;
    std::vector<const Interface*> data_interfaces() const;
    // First data interface tuned to `channel`, if any.
    const Interface* data_interface_on(const Channel& channel) const;
    const Interface* interface_by_id(int id) const;
};

// Unordered node pair, stored with a < b.
struct Edge {
    NodeId a = 0;
    NodeId b = 0;

    static Edge of(NodeId x, NodeId y) { return x < y ? Edge{x, y} : Edge{y, x}; }
    constexpr auto operator<=>(const Edge&) const = default;
};

enum class RangeMode {
    All,        // every node senses every other node
    Adjacency,  // carrier sense only between adjacent nodes
    Explicit    // adjacency plus listed extra pairs
};

struct InterfaceSpec {
    std::string name;  // empty -> wlan0 / ath<k> by role order
    InterfaceRole role = InterfaceRole::Data;
    Band band = Band::B24;
    int channel = 1;
    double rate_mbps = 11.0;
    double antenna_position_cm = 0.0;
};

struct NodeSpec {
    NodeId id = 0;
    std::string name;
    Position position;
    std::vector<InterfaceSpec> interfaces;
};

struct TopologySpec {
    std::vector<NodeSpec> nodes;
    std::vector<std::pair<NodeId, NodeId>> edges;
    RangeMode range = RangeMode::All;
    std::vector<std::pair<NodeId, NodeId>> range_pairs;
};

class Topology {
  public:
    Topology() = default;

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::set<Edge>& adjacency() const { return adjacency_; }

    bool has_node(NodeId id) const;
    // Throws TopologyError for unknown ids.
    const Node& node(NodeId id) const;

    bool adjacent(NodeId x, NodeId y) const;
    // Carrier-sense predicate; reflexive.
    bool in_range(NodeId x, NodeId y) const;
    std::vector<NodeId> neighbors(NodeId id) const;

    // Node owning `addr` on any interface.
    std::optional<NodeId> owner_of(Address addr) const;

    // Removes / restores an adjacency edge at run time (link failure).
    void set_edge(NodeId x, NodeId y, bool present);

  private:
    friend Topology build_topology(const TopologySpec& spec);

    std::vector<Node> nodes_;
    std::set<Edge> adjacency_;
    RangeMode range_mode_ = RangeMode::All;
    std::set<Edge> range_extra_;
};

// Validates the spec and materialises addresses. Errors: duplicate node
// ids, not exactly one signaling interface, no data interface, channel
// index outside band, edge to an unknown node or self-loop.
Topology build_topology(const TopologySpec& spec);

enum class PacketKind { Data, Hello, Tc, Mid, Hna, NegotiationMsg };

std::string to_string(PacketKind k);

struct PacketRecord {
    NodeId src = 0;
    NodeId dst = 0;
    std::uint32_t size_bytes = 1;
    int flow_id = 0;
    PacketKind kind = PacketKind::Data;
};

}  // namespace meshsim
