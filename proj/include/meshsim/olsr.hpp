#pragma once

// Proactive link-state routing: link sensing, neighbour detection, MPR
// selection, TC flooding, route calculation and hysteresis, plus the
// remapping of computed routes onto the bonded data interface.
//
// One NodeState per node, driven by the simulator. All algorithms are
// free functions over NodeState so they can be exercised directly.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "meshsim/core.hpp"
#include "meshsim/metrics.hpp"

namespace meshsim::olsr {

constexpr int kWillNever = 0;
constexpr int kWillDefault = 3;
constexpr int kWillAlways = 7;

struct Params {
    double hello_interval = 2.0;
    double hello_validity = 40.0;
    double tc_interval = 3.0;
    double tc_validity = 15.0;
    double mid_interval = 5.0;
    double mid_validity = 15.0;
    double hna_interval = 5.0;
    double hna_validity = 15.0;
    int tc_redundancy = 2;        // 0 selectors, 1 selectors+MPRs, 2 all sym neighbours
    int mpr_coverage = 3;
    int link_quality_level = 2;   // 0 hop count, 2 ETX
    int link_quality_window = 20;
    bool use_hysteresis = false;
    double hyst_scaling = 0.10;
    double hyst_thr_high = 0.80;
    double hyst_thr_low = 0.30;
    int willingness = kWillDefault;
    bool emit_mid = false;
    bool mpr_flooding = true;     // false: every node relays every flood once
    double duplicate_hold = 30.0;

    void validate() const;
};

enum class MsgType { Hello, Tc, Mid, Hna };
enum class LinkCode { Asym, Sym, MprNeigh, Lost };

std::string to_string(MsgType t);
std::string to_string(LinkCode c);

struct HelloNeighbor {
    Address address;
    double lq = 1.0;   // sender's reception ratio of this neighbour's Hellos
    double etx = 1.0;  // sender's link ETX towards this neighbour
};

struct HelloBlock {
    LinkCode code = LinkCode::Sym;
    std::vector<HelloNeighbor> neighbors;
};

struct HelloBody {
    double htime = 2.0;
    int willingness = kWillDefault;
    std::vector<HelloBlock> blocks;
};

struct TcNeighbor {
    Address address;
    double etx = 1.0;
};

struct TcBody {
    std::uint16_t ansn = 0;
    std::vector<TcNeighbor> neighbors;
};

struct MidBody {
    std::vector<Address> addresses;
};

struct HnaNet {
    Address network;
    Address netmask;
    auto operator<=>(const HnaNet&) const = default;
};

struct HnaBody {
    std::vector<HnaNet> networks;
};

struct Message {
    MsgType type = MsgType::Hello;
    double vtime = 0.0;
    Address originator;
    int ttl = 1;
    int hop_count = 0;
    std::uint16_t seq = 0;
    std::variant<HelloBody, TcBody, MidBody, HnaBody> body;

    // One line: "<TYPE> orig=<a> seq=<n> ttl=<n> hops=<n> vtime=<s> ..."
    // followed by type-specific fields.
    std::string dump() const;
};

// True when a is newer than b under 16-bit wraparound.
bool seq_newer(std::uint16_t a, std::uint16_t b);

struct LinkTuple {
    Address local_iface;
    Address neighbor_iface;
    Time sym_until;
    Time asym_until;
    Time expiry;
    double quality = 0.0;  // hysteresis
    bool pending = false;
    std::deque<bool> loss_window;  // true = received
    Time next_loss_deadline = Time::never();
    double htime = 2.0;
    double nlq = 0.0;  // neighbour's reception ratio of our Hellos

    double lq() const;
    Metric etx() const;
};

enum class NeighborStatus { Asym, Sym };

struct NeighborTuple {
    Address main;
    NeighborStatus status = NeighborStatus::Asym;
    int willingness = kWillDefault;
};

struct TwoHopTuple {
    Address neighbor;
    Address two_hop;
    Time expiry;
    double etx = 1.0;
};

struct TopologyTuple {
    Address dest;
    Address last;
    std::uint16_t seq = 0;
    Time expiry;
    double etx = 1.0;
};

struct DuplicateTuple {
    Time expiry;
    bool retransmitted = false;
};

struct MidTuple {
    Address main;
    Time expiry;
};

struct HnaTuple {
    Address gateway;
    HnaNet net;
    Time expiry;
};

struct RouteEntry {
    Address destination;
    Address next_hop;
    int hop_count = 1;
    std::string egress_interface;
    Metric metric;
    bool hna = false;  // destination is an external network
    Address netmask;   // HNA only

    bool operator==(const RouteEntry&) const = default;
};

using RouteTable = std::vector<RouteEntry>;

struct Counters {
    std::uint64_t hello_sent = 0;
    std::uint64_t tc_sent = 0;
    std::uint64_t mid_sent = 0;
    std::uint64_t hna_sent = 0;
    std::uint64_t received = 0;
    std::uint64_t forwarded = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t stale_tc = 0;
    std::uint64_t malformed = 0;
    std::uint64_t uncoverable = 0;
};

struct NodeState {
    Address main_address;
    std::string iface_name = "wlan0";

    std::map<Address, LinkTuple> links;  // by neighbour interface
    std::map<Address, NeighborTuple> neighbors;
    std::map<std::pair<Address, Address>, TwoHopTuple> two_hops;  // (neighbor, two_hop)
    std::set<Address> mprs;
    std::map<Address, Time> mpr_selectors;
    std::map<std::pair<Address, Address>, TopologyTuple> topology;  // (dest, last)
    std::map<std::pair<Address, std::uint16_t>, DuplicateTuple> duplicates;
    std::map<Address, MidTuple> mid;  // alias -> main
    std::vector<HnaTuple> hna;
    std::vector<HnaNet> local_hna;
    std::vector<Address> local_aliases;  // announced by MID when enabled

    std::uint16_t msg_seq = 0;
    std::uint16_t ansn = 0;
    std::set<Address> last_advertised;
    Time advertised_empty_since = Time::never();

    Counters counters;

    bool link_symmetric(const LinkTuple& l, Time now) const;
    bool neighbor_symmetric(Address main, Time now) const;
    std::vector<Address> sym_neighbors(Time now) const;
};

enum class LinkEvent { Received, Lost };

// Hysteresis step on one link; updates quality and pending.
LinkTuple hysteresis_update(LinkTuple link, LinkEvent ev, const Params& p);

// Records missed Hellos whose deadline passed and drops expired tuples.
void expire(NodeState& s, const Params& p, Time now);

Message emit_hello(NodeState& s, const Params& p, Time now);
// nullopt when there is nothing to advertise.
std::optional<Message> emit_tc(NodeState& s, const Params& p, Time now);
std::optional<Message> emit_mid(NodeState& s, const Params& p, Time now);
std::optional<Message> emit_hna(NodeState& s, const Params& p, Time now);

// `from` is the interface address of the one-hop sender.
void process_hello(NodeState& s, const Params& p, const Message& m, Address from, Time now);

// Processes a flooded message (TC, MID, HNA) and returns the copy to
// retransmit, if any.
std::optional<Message> process_flooded(NodeState& s, const Params& p, const Message& m, Address from,
                                       Time now);

// Greedy cover of the strict two-hop set. Stores the result in s.mprs.
std::set<Address> select_mprs(NodeState& s, const Params& p, Time now);

RouteTable compute_routes(const NodeState& s, const Params& p, Time now);

// Engine wrapper: one per node.
class Node {
  public:
    Node(Address main, Params params);

    Address address() const { return state_.main_address; }
    const Params& params() const { return params_; }
    NodeState& state() { return state_; }
    const NodeState& state() const { return state_; }

    Message hello(Time now);
    std::optional<Message> tc(Time now);
    std::optional<Message> mid(Time now);
    std::optional<Message> hna(Time now);

    // Returns a message to retransmit on the signaling interface, if any.
    std::optional<Message> receive(const Message& m, Address from, Time now);

    void tick(Time now);
    RouteTable routes(Time now);

  private:
    NodeState state_;
    Params params_;
};

struct RemapResult {
    RouteTable routes;
    std::vector<std::string> diagnostics;
};

// Rewrites signaling addresses to bond addresses and the signaling
// egress interface to `bond_iface`. Entries whose addresses are neither
// keys nor values of the mapping are dropped (HNA destinations are kept
// as they are). Idempotent.
RemapResult remap_routes(const RouteTable& routes, const std::map<Address, Address>& mapping,
                         const std::string& signaling_iface = "wlan0",
                         const std::string& bond_iface = "bond0");

}  // namespace meshsim::olsr
