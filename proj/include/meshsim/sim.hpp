#pragma once

// Deterministic discrete-event simulation of a mesh: OLSR on the
// signaling interfaces, channel negotiation, bonding, and saturating or
// fixed-rate flows whose throughput comes from the radio model.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "meshsim/bonding.hpp"
#include "meshsim/core.hpp"
#include "meshsim/negotiation.hpp"
#include "meshsim/olsr.hpp"
#include "meshsim/radio.hpp"

namespace meshsim::sim {

struct Flow {
    int id = 0;
    std::string name;
    NodeId src = 0;
    NodeId dst = 0;
    Protocol protocol = Protocol::UdpLike;
    double start_s = 40.0;
    double duration_s = 30.0;
    std::optional<double> rate_mbps;  // nullopt: saturate
    std::vector<NodeId> path;         // explicit route, empty: use routing
};

struct LinkChange {
    double at_s = 0.0;
    NodeId a = 0;
    NodeId b = 0;
    bool up = false;
};

// Seed-dependent interferer schedule generated at run start.
struct RandomInterferers {
    int count = 0;
    double level_min_dbm = -80.0;
    double level_max_dbm = -30.0;
    double min_duration_s = 1.0;
    double max_duration_s = 20.0;
    double audible_probability = 0.5;
};

struct Scenario {
    std::string name = "scenario";
    TopologySpec topology;
    RadioParams radio = RadioParams::defaults();
    olsr::Params olsr;
    negotiation::Params negotiation;
    StackMode stack = StackMode::Full;
    std::map<Edge, int> pinned_channels;  // link -> channel, excluded from negotiation
    std::map<NodeId, std::vector<olsr::HnaNet>> hna;
    std::vector<Flow> flows;
    std::vector<negotiation::Interferer> interferers;
    RandomInterferers random_interferers;
    std::vector<LinkChange> link_changes;
    double horizon_s = 70.0;
    double control_loss = 0.0;
    bool charge_control = false;
    double signaling_delay_s = 0.0005;
    double tick_s = 0.1;

    // Throws Error for flows outside the horizon, unknown nodes, bad
    // probabilities and similar.
    void validate(const Topology& topo) const;
};

// Integrates a piecewise-constant rate.
class FlowMeter {
  public:
    void set_rate(Time now, double mbps, std::optional<double> latency_ms = std::nullopt);
    void stop(Time now);

    double delivered_bits() const { return bits_; }
    double mean_latency_ms() const;
    double busy_seconds() const { return latency_time_; }

  private:
    void advance(Time now);

    Time last_;
    bool running_ = false;
    double rate_mbps_ = 0.0;
    std::optional<double> latency_;
    double bits_ = 0.0;
    double latency_weighted_ = 0.0;
    double latency_time_ = 0.0;
};

struct FlowResult {
    int id = 0;
    std::string name;
    NodeId src = 0;
    NodeId dst = 0;
    Protocol protocol = Protocol::UdpLike;
    double mbps = 0.0;
    double latency_ms = 0.0;
    std::uint64_t switches = 0;
    double offered_bits = 0.0;
    double delivered_bits = 0.0;
    bool routed = false;
    std::vector<NodeId> last_path;
};

struct ChannelChange {
    double at_s = 0.0;
    int channel = 0;

    bool operator==(const ChannelChange&) const = default;
};

struct RunStats {
    std::string scenario;
    std::uint64_t seed = 0;
    std::vector<FlowResult> flows;
    std::map<NodeId, bonding::Counters> bonding;
    std::map<std::pair<NodeId, NodeId>, std::vector<ChannelChange>> channel_history;
    std::map<std::string, std::uint64_t> messages;
    std::vector<std::string> diagnostics;
    double signaling_utilization = 0.0;  // only with charge_control
    std::uint64_t events = 0;
};

class Simulator {
  public:
    Simulator(Scenario scenario, std::uint64_t seed, std::ostream* trace = nullptr);
    ~Simulator();
    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    // Throws Error when `at` is earlier than the current time.
    void schedule(Time at, std::function<void()> action);
    void run_until(Time t);
    Time now() const { return now_; }

    const Scenario& scenario() const { return scenario_; }
    const Topology& topology() const { return topo_; }
    // Channels fixed at start: pinned links plus the initial assignment.
    const ChannelAssignment& assignment() const { return assignment_; }
    olsr::Node& olsr_node(NodeId id);
    bonding::Bond& bond(NodeId id);
    negotiation::Agent* agent(NodeId id);

    // Signaling address -> bond address for every node.
    const std::map<Address, Address>& address_map() const { return addr_map_; }
    // Routes of `id` after remapping onto the bond.
    olsr::RouteTable routes(NodeId id);

    // Current forward path of a flow, empty when unroutable.
    std::vector<NodeId> flow_path(const Flow& f);

    RunStats stats();

  private:
    struct Event {
        Time at;
        std::uint64_t seq;
        std::function<void()> action;
        bool operator>(const Event& o) const { return at != o.at ? at > o.at : seq > o.seq; }
    };
    struct FlowRuntime {
        Flow flow;
        FlowMeter meter;
        std::vector<Hop> hops;
        bool active = false;
        bool routed = false;
        std::uint64_t switches = 0;
        std::vector<NodeId> path;
    };

    void setup();
    void send_olsr(NodeId from, const olsr::Message& m);
    void deliver_olsr(NodeId to, NodeId from, olsr::Message m);
    void start_negotiation_round();
    void handle_outbox(NodeId who, negotiation::Outbox&& out);
    void deliver_negotiation(negotiation::Msg m);
    void flow_tick(std::size_t index);
    void refresh_rates();
    bool lose_control();
    double uniform();
    void charge(std::size_t bytes);
    void note(const std::string& diag);
    void trace(const std::string& line);
    std::vector<NodeId> static_path(NodeId src, NodeId dst) const;
    std::vector<Hop> build_hops(FlowRuntime& fr, const std::vector<NodeId>& path, bool transmit);
    const olsr::RouteTable& cached_routes(NodeId id);

    Scenario scenario_;
    std::uint64_t seed_;
    std::ostream* trace_;
    std::mt19937_64 rng_;
    Topology topo_;
    Time now_;
    std::uint64_t seq_ = 0;
    std::uint64_t events_ = 0;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;

    std::map<NodeId, std::unique_ptr<olsr::Node>> olsr_;
    std::map<NodeId, std::unique_ptr<bonding::Bond>> bonds_;
    std::map<NodeId, std::unique_ptr<negotiation::Agent>> agents_;
    std::map<Address, Address> addr_map_;
    std::map<Address, NodeId> bond_owner_;
    ChannelAssignment assignment_;
    std::vector<negotiation::Interferer> interferers_;
    std::vector<FlowRuntime> flows_;
    std::map<NodeId, std::pair<Time, olsr::RouteTable>> route_cache_;

    std::map<std::pair<NodeId, NodeId>, std::vector<ChannelChange>> channel_history_;
    std::map<std::string, std::uint64_t> messages_;
    std::vector<std::string> diagnostics_;
    double signaling_bits_ = 0.0;
};

// Builds, runs to the horizon and collects statistics.
RunStats run(const Scenario& scenario, std::uint64_t seed, std::ostream* trace = nullptr);

// Convenience wrapper around the radio model for one flow over the
// simulated world's current configuration.
double measure_flow(Simulator& sim, const Flow& flow);

}  // namespace meshsim::sim
