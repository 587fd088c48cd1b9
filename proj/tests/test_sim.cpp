#include <gtest/gtest.h>

#include <sstream>

#include "meshsim/experiments.hpp"
#include "meshsim/sim.hpp"
#include "support.hpp"

using namespace meshsim;
using namespace meshsim::sim;
using meshsim::test::chain_edges;
using meshsim::test::uniform_spec;

namespace {

Scenario bare_triangle() {
    Scenario s;
    s.name = "triangle";
    s.stack = StackMode::Bare;
    s.topology = uniform_spec(3, Band::B5, {36}, {{1, 2}, {2, 3}, {1, 3}});
    Flow f;
    f.id = 1;
    f.src = 1;
    f.dst = 3;
    s.flows.push_back(f);
    return s;
}

}  // namespace

TEST(FlowMeter, TwoSegmentAverage) {
    FlowMeter m;
    m.set_rate(Time::from_seconds(0), 10.0, 2.0);
    m.set_rate(Time::from_seconds(10), 4.0, 3.0);
    m.stop(Time::from_seconds(30));
    EXPECT_DOUBLE_EQ(m.delivered_bits(), 10e6 * 10 + 4e6 * 20);
    EXPECT_DOUBLE_EQ(m.delivered_bits() / 30 / 1e6, 6.0);
    EXPECT_NEAR(m.mean_latency_ms(), (2.0 * 10 + 3.0 * 20) / 30, 1e-12);
}

TEST(FlowMeter, ZeroRateSegmentsCarryNoLatency) {
    FlowMeter m;
    m.set_rate(Time::from_seconds(0), 5.0, 1.0);
    m.set_rate(Time::from_seconds(5), 0.0);
    m.stop(Time::from_seconds(10));
    EXPECT_DOUBLE_EQ(m.delivered_bits(), 25e6);
    EXPECT_DOUBLE_EQ(m.mean_latency_ms(), 1.0);
}

TEST(Run, SingleLinkSaturatesAtBase) {
    auto s = cli::chain_scenario(Band::B5, {36}, Protocol::UdpLike);
    auto r = run(s, 1);
    ASSERT_EQ(r.flows.size(), 1u);
    EXPECT_NEAR(r.flows[0].mbps, 9.93, 9.93 * 0.02);
    EXPECT_GE(r.flows[0].latency_ms, s.radio.per_packet_overhead_ms);
}

TEST(Run, TwoChannelChain) {
    auto r = run(cli::chain_scenario(Band::B5, {36, 64}, Protocol::UdpLike), 1);
    EXPECT_NEAR(r.flows[0].mbps, 9.88, 9.88 * 0.03);
    EXPECT_EQ(r.flows[0].last_path, (std::vector<NodeId>{1, 2, 3}));
}

TEST(Run, DeterministicAcrossRunsAndSeeds) {
    auto s = cli::chain_scenario(Band::B24, {1, 11, 1}, Protocol::TcpLike);
    auto a = run(s, 1), b = run(s, 1), c = run(s, 99);
    EXPECT_EQ(a.flows[0].mbps, b.flows[0].mbps);
    EXPECT_EQ(a.messages, b.messages);
    EXPECT_EQ(a.events, b.events);
    EXPECT_EQ(a.flows[0].mbps, c.flows[0].mbps);
}

TEST(Run, TraceIsReproducible) {
    auto s = cli::chain_scenario(Band::B24, {1, 11}, Protocol::UdpLike);
    std::ostringstream t1, t2;
    run(s, 3, &t1);
    run(s, 3, &t2);
    EXPECT_FALSE(t1.str().empty());
    EXPECT_EQ(t1.str(), t2.str());
}

TEST(Run, EmptyFlowListStillExchangesHellos) {
    auto s = cli::chain_scenario(Band::B24, {1, 11}, Protocol::UdpLike);
    s.flows.clear();
    auto r = run(s, 1);
    EXPECT_TRUE(r.flows.empty());
    EXPECT_GT(r.messages["hello_tx"], 0u);
    EXPECT_GT(r.messages["tc_tx"], 0u);
}

TEST(Run, FixedRateUnderCapacityIsDelivered) {
    auto s = cli::chain_scenario(Band::B5, {36, 64}, Protocol::UdpLike);
    s.flows[0].rate_mbps = 1.0;
    auto r = run(s, 1);
    EXPECT_NEAR(r.flows[0].mbps, 1.0, 1e-9);
    EXPECT_LE(r.flows[0].delivered_bits, r.flows[0].offered_bits + 1e-6);
}

TEST(Run, ConservationOnSaturatingFlows) {
    for (auto s : {cli::chain_scenario(Band::B5, {36}, Protocol::UdpLike),
                   cli::chain_scenario(Band::B24, {1, 1, 1, 1}, Protocol::TcpLike),
                   cli::square_scenario(Band::B5, 36, 64, Protocol::UdpLike, 2)}) {
        for (const auto& f : run(s, 1).flows) EXPECT_LE(f.delivered_bits, f.offered_bits + 1e-6) << s.name;
    }
}

TEST(Run, BareTriangleLinkFailureHalvesSecondHalf) {
    auto s = bare_triangle();
    s.link_changes.push_back({55.0, 1, 3, false});
    auto r = run(s, 1);
    // 15 s direct, 15 s over two co-channel hops
    EXPECT_NEAR(r.flows[0].mbps, 0.75 * 9.93, 1e-6);
    EXPECT_EQ(r.flows[0].last_path, (std::vector<NodeId>{1, 2, 3}));
}

TEST(Run, UnroutableFlowGivesZeroWithDiagnostic) {
    Scenario s;
    s.topology = uniform_spec(3, Band::B5, {36}, {{1, 2}});
    Flow f;
    f.id = 1;
    f.src = 1;
    f.dst = 3;
    s.flows.push_back(f);
    auto r = run(s, 1);
    EXPECT_EQ(r.flows[0].mbps, 0.0);
    EXPECT_FALSE(r.flows[0].routed);
    EXPECT_FALSE(r.diagnostics.empty());
    EXPECT_GT(r.messages["unrouted_ticks"], 0u);
}

TEST(Run, LatencyGapBetweenStacks) {
    auto full = cli::chain_scenario(Band::B5, {36, 36}, Protocol::UdpLike);
    auto bare = cli::chain_scenario(Band::B5, {36, 36}, Protocol::UdpLike, 30.0, StackMode::Bare);
    double gap = run(full, 1).flows[0].latency_ms - run(bare, 1).flows[0].latency_ms;
    EXPECT_NEAR(gap, 1.0, 1e-9);
}

TEST(Simulator, CannotScheduleIntoThePast) {
    Simulator sim(cli::chain_scenario(Band::B24, {1}, Protocol::UdpLike), 1);
    sim.run_until(Time::from_seconds(5));
    EXPECT_THROW(sim.schedule(Time::from_seconds(4), [] {}), Error);
    bool fired = false;
    Time seen;
    sim.schedule(Time::from_seconds(6), [&] {
        fired = true;
        seen = sim.now();
    });
    sim.run_until(Time::from_seconds(7));
    EXPECT_TRUE(fired);
    EXPECT_EQ(seen, Time::from_seconds(6));
}

TEST(Simulator, RoutesConvergeAndAreRemapped) {
    Scenario s;
    s.topology = uniform_spec(6, Band::B24, {1, 11}, chain_edges(6));
    s.flows.clear();
    Simulator sim(s, 1);
    sim.run_until(Time::from_seconds(3 * s.olsr.tc_validity));
    std::set<Address> signaling;
    for (const auto& n : sim.topology().nodes()) signaling.insert(n.signaling().ip);
    for (const auto& n : sim.topology().nodes()) {
        auto routes = sim.routes(n.id);
        EXPECT_EQ(routes.size(), 5u) << n.name;
        for (const auto& r : routes) {
            EXPECT_EQ(r.egress_interface, "bond0");
            EXPECT_FALSE(signaling.contains(r.destination));
            EXPECT_FALSE(signaling.contains(r.next_hop));
        }
    }
}

TEST(Simulator, NegotiationPublishesToBonds) {
    auto s = cli::chain_scenario(Band::B24, {1, 11}, Protocol::UdpLike);
    Simulator sim(s, 1);
    sim.run_until(Time::from_seconds(20));
    Address c = sim.address_map().at(sim.topology().node(3).signaling().ip);
    const auto* pkt = sim.bond(2).stored(c);
    ASSERT_NE(pkt, nullptr);
    EXPECT_EQ(pkt->channel, 11);
    EXPECT_EQ(sim.bond(2).resolve(c).channel.index, 11);
    EXPECT_NEAR(measure_flow(sim, s.flows[0]), 7.37, 1e-9);
}

TEST(Simulator, InterfererMovesLink) {
    auto s = cli::chain_scenario(Band::B24, {1, 11}, Protocol::UdpLike);
    s.topology.nodes[0].interfaces.back().channel = 1;
    // give A and B a second radio so the link has somewhere to go
    s.topology.nodes[0].interfaces.push_back(meshsim::test::data(Band::B24, 6, 30));
    s.topology.nodes[1].interfaces.push_back(meshsim::test::data(Band::B24, 6, 60));
    negotiation::Interferer i;
    i.on = Time::from_seconds(15);
    i.channel = Channel::make(Band::B24, 1);
    i.level_dbm = -30;
    i.nodes = {1, 2};
    s.interferers.push_back(i);
    s.negotiation.window_halfwidth = 2;
    auto r = run(s, 1);
    const auto& hist = r.channel_history[{1, 2}];
    ASSERT_FALSE(hist.empty());
    EXPECT_EQ(hist.back().channel, 6);
    EXPECT_LE(hist.back().at_s, 15.0 + s.negotiation.round_period_s + 1.0);
    EXPECT_GT(r.messages["negotiation_switches"], 0u);
}

TEST(Scenario, ValidationErrors) {
    auto s = cli::chain_scenario(Band::B24, {1}, Protocol::UdpLike);
    s.flows[0].duration_s = 100;
    EXPECT_THROW(run(s, 1), Error);

    s = cli::chain_scenario(Band::B24, {1}, Protocol::UdpLike);
    s.flows[0].dst = 9;
    EXPECT_THROW(run(s, 1), Error);

    s = cli::chain_scenario(Band::B24, {1}, Protocol::UdpLike);
    s.control_loss = 2;
    EXPECT_THROW(run(s, 1), Error);

    s = cli::chain_scenario(Band::B24, {1}, Protocol::UdpLike);
    s.pinned_channels[Edge::of(1, 2)] = 6;
    EXPECT_THROW(run(s, 1), Error);
}

TEST(Run, RandomInterferersDependOnSeedOnly) {
    auto s = cli::chain_scenario(Band::B24, {1, 6, 11}, Protocol::UdpLike);
    for (auto& n : s.topology.nodes) {
        n.interfaces.resize(1);
        for (int c : {1, 6, 11}) n.interfaces.push_back(meshsim::test::data(Band::B24, c, 30.0 * c));
    }
    s.random_interferers.count = 6;
    auto a = run(s, 5), b = run(s, 5);
    EXPECT_EQ(a.channel_history, b.channel_history);
    EXPECT_EQ(a.flows[0].mbps, b.flows[0].mbps);
}
