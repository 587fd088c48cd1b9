// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if
// any line fails. Every tolerance used here is fixed in this file.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "meshsim/config.hpp"
#include "meshsim/experiments.hpp"
#include "meshsim/metrics.hpp"
#include "meshsim/report.hpp"
#include "negotiation_oracles.hpp"
#include "olsr_net.hpp"

using namespace meshsim;
using namespace meshsim::test;
using cli::chain_scenario;
using cli::measured_mbps;

namespace {

constexpr double kUdpChainTolPct = 6.0;
constexpr double kTcpChainTolPct = 8.0;
constexpr double kTwoChannelTolPct = 3.0;
constexpr double kTwoChannelFloor = 0.99;
constexpr double kFactorFloor = 1.5 - 1e-9;
constexpr double kFactorCeiling = 2.0 + 1e-9;
constexpr double kAdjacentPairTolPct = 10.0;
constexpr double kOrthogonalPairTolPct = 5.0;
constexpr double kCouplingAt0Max = 0.45;
constexpr double kCouplingAt25Min = 0.90;
constexpr double kEtxSeriesTol = 1e-6;
constexpr double kLatencyGapMin = 0.8;
constexpr double kLatencyGapMax = 1.3;
constexpr double kExact = 1e-9;

struct Outcome {
    bool ok = true;
    std::ostringstream detail;
    std::string failed;

    void require(bool cond, const std::string& what) {
        if (cond) return;
        failed += (ok ? "" : "; ") + what;
        ok = false;
    }
};

int failures = 0;

void report(int n, const std::string& name, const std::function<void(Outcome&)>& body) {
    Outcome o;
    try {
        body(o);
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    if (!o.ok) ++failures;
    std::string detail = o.detail.str();
    if (!o.failed.empty()) detail += (detail.empty() ? "" : " | ") + o.failed;
    std::printf("%s %2d %s%s%s\n", o.ok ? "PASS" : "FAIL", n, name.c_str(), detail.empty() ? "" : ": ",
                detail.c_str());
}

bool within_pct(double measured, double reference, double pct) {
    return std::abs(measured - reference) <= reference * pct / 100.0;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::vector<int> single(int hops, int ch) { return std::vector<int>(static_cast<std::size_t>(hops), ch); }

std::vector<int> alternating(int hops, int a, int b) {
    std::vector<int> v;
    for (int i = 0; i < hops; ++i) v.push_back(i % 2 ? b : a);
    return v;
}

void chain_means(Outcome& o, Protocol proto, const std::vector<double>& refs, double tol) {
    double c = RadioParams::defaults().c_base(Band::B5, proto);
    for (int n = 2; n <= 5; ++n) {
        double m = measured_mbps(chain_scenario(Band::B5, single(n - 1, 36), proto));
        double ref = refs[static_cast<std::size_t>(n - 2)];
        o.detail << (n > 2 ? " " : "") << "n=" << n << " " << fmt(m) << "/" << ref;
        o.require(std::abs(m - c / (n - 1)) < kExact, "n=" + std::to_string(n) + " not C/(n-1)");
        o.require(within_pct(m, ref, tol), "n=" + std::to_string(n) + " outside tolerance");
    }
}

std::vector<cli::SweepPoint> of(const std::vector<cli::SweepPoint>& pts, Protocol p) {
    std::vector<cli::SweepPoint> out;
    for (const auto& s : pts)
        if (s.protocol == p) out.push_back(s);
    return out;
}

// Built-in scenarios: shipped example configs plus the testbed layouts.
std::vector<sim::Scenario> builtin_scenarios() {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(MESHSIM_CONFIG_DIR))
        if (e.path().extension() == ".yaml") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<sim::Scenario> out;
    for (const auto& f : files) out.push_back(cli::load_config(f.string()).scenario);
    for (Band band : {Band::B5, Band::B24}) {
        int a = band == Band::B5 ? 36 : 1, b = band == Band::B5 ? 64 : 11;
        for (int hops = 1; hops <= 4; ++hops) {
            out.push_back(chain_scenario(band, single(hops, a), Protocol::UdpLike));
            out.push_back(chain_scenario(band, alternating(hops, a, b), Protocol::TcpLike));
        }
        for (int path : {1, 2}) out.push_back(cli::square_scenario(band, a, b, Protocol::UdpLike, path));
    }
    return out;
}

}  // namespace

int main() {
    report(1, "single-channel chain, UDP-like, B5", [](Outcome& o) {
        chain_means(o, Protocol::UdpLike, {9.93, 5.01, 3.25, 2.43}, kUdpChainTolPct);
    });

    report(2, "single-channel chain, TCP-like, B5", [](Outcome& o) {
        chain_means(o, Protocol::TcpLike, {8.82, 4.39, 2.90, 2.18}, kTcpChainTolPct);
    });

    report(3, "two-channel 3-station chain, B5", [](Outcome& o) {
        double base = measured_mbps(chain_scenario(Band::B5, {36}, Protocol::UdpLike));
        double two = measured_mbps(chain_scenario(Band::B5, {36, 64}, Protocol::UdpLike));
        o.detail << fmt(two) << " vs single hop " << fmt(base) << ", reference 9.88";
        o.require(two >= kTwoChannelFloor * base, "below 0.99 x single hop");
        o.require(within_pct(two, 9.88, kTwoChannelTolPct), "outside 3%");
    });

    report(4, "improvement factor, 2 channels vs 1", [](Outcome& o) {
        std::map<int, double> f;
        for (int n = 3; n <= 5; ++n) {
            double one = measured_mbps(chain_scenario(Band::B5, single(n - 1, 36), Protocol::UdpLike));
            double two = measured_mbps(chain_scenario(Band::B5, alternating(n - 1, 36, 64), Protocol::UdpLike));
            f[n] = two / one;
            o.detail << (n > 3 ? " " : "") << "n=" << n << " " << fmt(f[n]);
            o.require(f[n] >= kFactorFloor && f[n] <= kFactorCeiling, "n=" + std::to_string(n) + " outside [1.5, 2]");
        }
        o.require(f[3] > f[4] && f[5] > f[4], "even hop counts not above odd");
    });

    report(5, "orthogonality sweep, B5", [](Outcome& o) {
        auto pts = of(cli::sweep(cli::SweepKind::Orthogonality, Band::B5), Protocol::UdpLike);
        double same = measured_mbps(chain_scenario(Band::B5, {36, 36}, Protocol::UdpLike));
        double optimum = measured_mbps(chain_scenario(Band::B5, {36, 64}, Protocol::UdpLike));
        double prev = 0, at40 = -1, at60 = -1;
        for (const auto& p : pts) {
            if (p.x > 120) break;
            o.require(p.mbps >= prev - kExact, "drop at " + p.label);
            prev = p.mbps;
            if (p.x == 20) at40 = p.mbps;
            if (p.x == 120) at60 = p.mbps;
        }
        o.detail << "(36,40) " << fmt(at40) << " vs same " << fmt(same) << ", (36,60) " << fmt(at60) << " vs "
                 << fmt(optimum);
        o.require(at40 >= 0 && within_pct(at40, same, kAdjacentPairTolPct), "(36,40) outside 10% of same-channel");
        o.require(at60 >= 0 && within_pct(at60, optimum, kOrthogonalPairTolPct), "(36,60) outside 5% of optimum");
    });

    report(6, "orthogonality anomaly, B24 (1,3) TCP-like", [](Outcome& o) {
        double pair = measured_mbps(chain_scenario(Band::B24, {1, 3}, Protocol::TcpLike));
        double same = measured_mbps(chain_scenario(Band::B24, {1, 1}, Protocol::TcpLike));
        o.detail << fmt(pair) << " vs same-channel " << fmt(same);
        o.require(pair < same, "not below same-channel");
    });

    report(7, "antenna coupling, B24", [](Outcome& o) {
        auto pts = cli::sweep(cli::SweepKind::Coupling, Band::B24);
        for (const auto& p : pts) {
            if (p.x == 0) {
                o.detail << (o.detail.str().empty() ? "" : " ") << to_string(p.protocol) << "@0cm " << fmt(p.normalized);
                o.require(p.normalized <= kCouplingAt0Max, "0 cm above 0.45");
            }
            if (p.x == 25) {
                o.detail << " " << to_string(p.protocol) << "@25cm " << fmt(p.normalized);
                o.require(p.normalized >= kCouplingAt25Min, "25 cm below 0.90");
            }
        }
    });

    report(8, "negotiation properties", [](Outcome& o) {
        using namespace meshsim::negotiation;
        std::mt19937 rng(4242);
        int mismatches = 0;
        for (int i = 0; i < 1000; ++i) {
            Band band = i % 2 ? Band::B5 : Band::B24;
            auto q = random_list(rng, band);
            auto list = band_channels(band);
            std::vector<int> allowed;
            for (int c : list)
                if (rng() % 3 == 0) allowed.push_back(c);
            if (allowed.empty()) allowed.push_back(list[rng() % list.size()]);
            negotiation::Params p;
            p.allowed_channels = allowed;
            p.window_halfwidth = static_cast<int>(rng() % 6);
            mismatches += select_channel(q, p) != oracle_select(q, allowed, p.window_halfwidth);
        }
        o.require(mismatches == 0, std::to_string(mismatches) + " select mismatches");

        int law = 0;
        for (int i = 0; i < 500; ++i) {
            auto a = random_list(rng, Band::B5), b = random_list(rng, Band::B5), c = random_list(rng, Band::B5);
            law += merge_quality(a, b) != merge_quality(b, a);
            law += merge_quality(merge_quality(a, b), c) != merge_quality(a, merge_quality(b, c));
            law += merge_quality(a, a) != a;
        }
        o.require(law == 0, "merge law violated");

        int flaps = 0;
        for (int trial = 0; trial < 100; ++trial) {
            QualityList fixed = random_list(rng, Band::B24);
            ScanProvider scan = [fixed](NodeId, Time) { return fixed; };
            std::map<NodeId, Agent> agents;
            agents.emplace(1, Agent(1, Band::B24, {1, 6, 11}, "a", negotiation::Params{}, scan));
            agents.emplace(2, Agent(2, Band::B24, {1, 6, 11}, "b", negotiation::Params{}, scan));
            int start = std::vector<int>{1, 6, 11}[rng() % 3];
            agents.at(1).add_peer(2, Address{2}, start);
            agents.at(2).add_peer(1, Address{1}, start);
            for (int r = 0; r < 20; ++r) run_round(agents, Time::from_seconds(1 + 10 * r));
            flaps += agents.at(1).stats().switches > 1;
        }
        o.require(flaps == 0, std::to_string(flaps) + " flapping links");

        double level = kFloorDbm;
        ScanProvider scan = [&level](NodeId, Time) {
            QualityList q(Band::B24);
            q.set_channel(1, level);
            return q;
        };
        std::map<NodeId, Agent> pair;
        pair.emplace(1, Agent(1, Band::B24, {1, 11}, "a", negotiation::Params{}, scan));
        pair.emplace(2, Agent(2, Band::B24, {1, 11}, "b", negotiation::Params{}, scan));
        pair.at(1).add_peer(2, Address{2}, 1);
        pair.at(2).add_peer(1, Address{1}, 1);
        run_round(pair, Time::from_seconds(1));
        level = -30;
        run_round(pair, Time::from_seconds(11));
        o.require(pair.at(1).link_channel(2) == 11 && pair.at(2).link_channel(1) == 11,
                  "interfered link not moved in one round");
        o.detail << "1000 selections, 500 merge triples, 100 no-flap trials, interferer switch";
    });

    report(9, "OLSR properties", [](Outcome& o) {
        using olsr::Params;
        Params hp;
        Net hs(chain(5), hp);
        Time limit = secs(2 * hp.hello_interval + 0.1);
        hs.run_until(limit);
        for (int a = 0; a < 5; ++a)
            for (int b : hs.adj[a])
                o.require(hs.nodes[a].state().neighbor_symmetric(addr(b), limit), "handshake late");

        std::mt19937 rng(2024);
        int bad_routes = 0;
        for (int trial = 0; trial < 50; ++trial) {
            int n = 2 + static_cast<int>(rng() % 9);
            auto g = random_connected(rng, n, 0.2);
            Params p;
            Net net(g, p);
            Time t = secs(3 * p.tc_validity);
            net.run_until(t);
            for (int v = 0; v < n; ++v) {
                auto dist = bfs(g, v);
                auto routes = net.nodes[v].routes(t);
                bad_routes += routes.size() != static_cast<std::size_t>(n - 1);
                for (const auto& r : routes) {
                    int dst = index_of(r.destination);
                    int nh = index_of(r.next_hop);
                    bad_routes += r.hop_count != dist[dst];
                    bad_routes += std::find(g[v].begin(), g[v].end(), nh) == g[v].end();
                    bad_routes += bfs(g, nh)[dst] != dist[dst] - 1;
                }
            }
        }
        o.require(bad_routes == 0, std::to_string(bad_routes) + " routes differ from BFS");

        int uncovered = 0;
        for (int trial = 0; trial < 30; ++trial) {
            int n = 3 + static_cast<int>(rng() % 8);
            auto g = random_connected(rng, n, 0.25);
            Params p;
            p.mpr_coverage = 1;
            Net net(g, p);
            Time t = secs(20);
            net.run_until(t);
            for (int v = 0; v < n; ++v) {
                auto mprs = olsr::select_mprs(net.nodes[v].state(), p, t);
                auto dist = bfs(g, v);
                for (int th = 0; th < n; ++th) {
                    if (dist[th] != 2) continue;
                    bool covered = false;
                    for (int nb : g[v])
                        covered |= mprs.contains(addr(nb)) &&
                                   std::find(g[nb].begin(), g[nb].end(), th) != g[nb].end();
                    uncovered += !covered;
                }
            }
        }
        o.require(uncovered == 0, std::to_string(uncovered) + " two-hop neighbours uncovered");

        int worse = 0;
        for (int trial = 0; trial < 30; ++trial) {
            int n = 3 + static_cast<int>(rng() % 8);
            auto g = random_connected(rng, n, 0.3);
            Params mpr;
            mpr.mpr_coverage = 1;
            Params full = mpr;
            full.mpr_flooding = false;
            Net a(g, mpr), b(g, full);
            a.run_until(secs(30));
            b.run_until(secs(30));
            worse += a.forwarded() > b.forwarded();
        }
        o.require(worse == 0, "MPR flooding forwarded more");
        o.detail << "handshake, 50 BFS topologies, 30 MPR covers, 30 flooding comparisons";
    });

    report(10, "metric equalities", [](Outcome& o) {
        double series = 0, pk = 1;
        for (long k = 1; k <= 1'000'000 && pk > 0; ++k, pk *= 0.5) series += static_cast<double>(k) * pk * 0.5;
        o.require(std::abs(etx(0.5).value() - series) < kEtxSeriesTol, "etx(0.5) differs from series");
        o.require(std::abs(etx(0.5).value() - 2.0) < kEtxSeriesTol, "etx(0.5) != 2");

        auto link = [](double e, int ch) {
            PathLink l;
            l.etx = e;
            l.channel = ch;
            l.size_bits = 1e6;
            l.bandwidth_bps = 1e6;
            return l;
        };
        PathSpec p{{link(1, 1), link(2, 1), link(1.5, 11)}};
        o.require(wcett(p, 0) == 4.5, "wcett(beta=0) != sum");
        o.require(wcett(p, 1) == 3.0, "wcett(beta=1) != max channel sum");
        p.links[0].interface_usage = {{1, 0.5}, {11, 0.5}};
        for (double b : {0.0, 0.3, 1.0}) o.require(mcr(p, b, 0.0) == wcett(p, b), "mcr(delay=0) != wcett");

        std::mt19937 rng(5);
        std::uniform_real_distribution<double> u(0, 1);
        int violations = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            double e1 = 1 + 3 * u(rng), e2 = 1 + 3 * u(rng), beta = u(rng);
            PathSpec diverse{{link(e1, 1), link(e2, 11)}};
            PathSpec same{{link(e1, 1), link(e2, 1)}};
            violations += wcett(diverse, beta) > wcett(same, beta);
        }
        o.require(violations == 0, std::to_string(violations) + " diversity violations");
        o.detail << "etx(0.5)=" << fmt(etx(0.5).value()) << ", 1000 diversity cases";
    });

    report(11, "remapped routes never use signaling", [](Outcome& o) {
        int scenarios = 0, routes = 0, leaks = 0;
        for (auto s : builtin_scenarios()) {
            sim::Simulator sim(s, 1);
            sim.run_until(Time::from_seconds(std::min(s.horizon_s, 3 * s.olsr.tc_validity)));
            std::set<Address> signaling;
            for (const auto& n : sim.topology().nodes()) signaling.insert(n.signaling().ip);
            for (const auto& n : sim.topology().nodes())
                for (const auto& r : sim.routes(n.id)) {
                    ++routes;
                    leaks += signaling.contains(r.destination) || signaling.contains(r.next_hop) ||
                             r.egress_interface == n.signaling().name;
                }
            ++scenarios;
        }
        o.detail << scenarios << " scenarios, " << routes << " routes, " << leaks << " leaks";
        o.require(routes > 0, "no routes scanned");
        o.require(leaks == 0, "signaling referenced");
    });

    report(12, "byte-identical results.csv", [](Outcome& o) {
        int scenarios = 0;
        for (const auto& s : builtin_scenarios()) {
            std::ostringstream a, b;
            cli::write_results_csv(a, cli::run_reps(s, 1, 3, 2));
            cli::write_results_csv(b, cli::run_reps(s, 1, 3, 1));
            o.require(a.str() == b.str(), s.name + " differs");
            ++scenarios;
        }
        o.detail << scenarios << " scenarios, 3 reps";
    });

    report(13, "latency, full stack minus bare", [](Outcome& o) {
        auto full = chain_scenario(Band::B5, {36}, Protocol::UdpLike);
        auto bare = chain_scenario(Band::B5, {36}, Protocol::UdpLike, 30.0, StackMode::Bare);
        double lf = sim::run(full, 1).flows.at(0).latency_ms;
        double lb = sim::run(bare, 1).flows.at(0).latency_ms;
        double gap = lf - lb;
        o.detail << fmt(lb) << " -> " << fmt(lf) << " ms, gap " << fmt(gap);
        o.require(gap >= kLatencyGapMin && gap <= kLatencyGapMax, "gap outside [0.8, 1.3]");
    });

    std::printf("%d of 13 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
