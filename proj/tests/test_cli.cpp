#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "meshsim/config.hpp"
#include "meshsim/experiments.hpp"
#include "meshsim/report.hpp"

using namespace meshsim;
using namespace meshsim::cli;

// chain3_2ch.yaml, seed 1, two reps
#define GOLDEN_RESULTS                          \
    "chain3_2ch,0,A-C,udp,9.9300,2.8000,0\n"   \
    "chain3_2ch,0,C-A,tcp,2.0000,2.8000,399\n" \
    "chain3_2ch,1,A-C,udp,9.9300,2.8000,0\n"   \
    "chain3_2ch,1,C-A,tcp,2.0000,2.8000,399\n"

namespace {

const char* kMinimal = R"(scenario:
  name: tiny
  horizon_s: 30
topology:
  band: b24
  nodes:
    - {name: A, data: [1]}
    - {name: B, data: [1, 11]}
    - {name: C, data: [11]}
  links:
    - [A, B]
    - [B, C]
flows:
  - {src: A, dst: C, protocol: udp, rate_mbps: saturate, start_s: 10, duration_s: 15}
)";

int line_of(const std::string& text) {
    try {
        parse_config(text, "t.yaml");
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    auto pos = s.find(from);
    if (pos == std::string::npos) throw std::logic_error("pattern not found: " + from);
    return s.replace(pos, from.size(), to);
}

int exit_code(const std::string& args) {
    std::string cmd = std::string(MESHSIM_BIN) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("meshsim_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST(Config, ParsesMinimalFile) {
    Config c = parse_config(kMinimal);
    EXPECT_EQ(c.scenario.name, "tiny");
    EXPECT_EQ(c.scenario.topology.nodes.size(), 3u);
    EXPECT_EQ(c.scenario.topology.edges.size(), 2u);
    ASSERT_EQ(c.scenario.flows.size(), 1u);
    EXPECT_FALSE(c.scenario.flows[0].rate_mbps);
    EXPECT_EQ(c.names.at(1), "A");
    EXPECT_EQ(c.run.reps, 10);
    auto r = sim::run(c.scenario, 1);
    EXPECT_NEAR(r.flows[0].mbps, 7.37, 1e-9);
}

TEST(Config, ErrorsCarryLineNumbers) {
    std::string s = kMinimal;
    EXPECT_EQ(line_of(replace(s, "  horizon_s: 30", "  horizon: 30")), 3);
    EXPECT_EQ(line_of(replace(s, "data: [1, 11]", "data: [1, 14]")), 8);
    EXPECT_EQ(line_of(replace(s, "- [B, C]", "- [B, Z]")), 12);
    EXPECT_EQ(line_of(replace(s, "protocol: udp", "protocol: sctp")), 14);
    EXPECT_EQ(line_of(replace(s, "start_s: 10", "start_s: soon")), 14);
    EXPECT_EQ(line_of("scenario: [1, 2\n"), 2);
    try {
        parse_config(replace(s, "  horizon_s: 30", "  horizon: 30"), "t.yaml");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("t.yaml:3: ", 0), 0u) << e.what();
    }
}

TEST(Config, SemanticErrorsAreConfigErrors) {
    std::string late = replace(kMinimal, "duration_s: 15", "duration_s: 50");
    EXPECT_THROW(parse_config(late), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/meshsim.yaml"), ConfigError);
}

TEST(Config, DumpRoundTrips) {
    Config c = parse_config(kMinimal);
    std::string once = dump_config(c);
    std::string twice = dump_config(parse_config(once));
    EXPECT_EQ(once, twice);
}

TEST(Config, ShippedExamplesLoad) {
    for (const auto& entry : std::filesystem::directory_iterator(MESHSIM_CONFIG_DIR)) {
        if (entry.path().extension() != ".yaml") continue;
        EXPECT_NO_THROW(load_config(entry.path().string())) << entry.path();
    }
}

TEST(Reproduce, KnownIds) {
    auto ids = reproduction_ids();
    ASSERT_EQ(ids.size(), 36u);
    EXPECT_EQ(ids.front(), "6.1");
    EXPECT_EQ(ids.back(), "6.36");
    EXPECT_TRUE(is_reproduction("6.10"));
    EXPECT_FALSE(is_reproduction("9.9"));
    EXPECT_THROW(reproduce("9.9"), Error);
}

TEST(Reproduce, ChainTablesPass) {
    auto r = reproduce("6.5");
    EXPECT_TRUE(r.pass());
    bool seen = false;
    for (const auto& c : r.checks)
        if (c.label == "udp") {
            EXPECT_NEAR(c.measured, 9.93 / 4, 1e-9);
            EXPECT_DOUBLE_EQ(c.reference, 2.43);
            seen = true;
        }
    EXPECT_TRUE(seen);
    EXPECT_TRUE(reproduce("6.10").pass());
    EXPECT_FALSE(reproduce("6.5", 0.0).pass());
}

TEST(Sweep, OrthogonalityShapes) {
    auto b5 = sweep(SweepKind::Orthogonality, Band::B5);
    double prev = 0;
    for (const auto& p : b5)
        if (p.protocol == Protocol::UdpLike) {
            EXPECT_GE(p.mbps, prev - 1e-12) << p.label;
            prev = p.mbps;
        }

    auto b24 = sweep(SweepKind::Orthogonality, Band::B24);
    double same = 6.35 / 2;
    bool dipped = false;
    for (const auto& p : b24)
        if (p.protocol == Protocol::TcpLike && p.x == 10) dipped = p.mbps < same;
    EXPECT_TRUE(dipped);
}

TEST(Sweep, CouplingCrossesValidityAt25cm) {
    auto pts = sweep(SweepKind::Coupling, Band::B24);
    for (const auto& p : pts) {
        if (p.x == 0) {
            EXPECT_LE(p.normalized, 0.45);
        }
        if (p.x >= 25) {
            EXPECT_GE(p.normalized, 0.90);
        }
    }
}

TEST(Report, CsvHeadersAndGolden) {
    Config c = load_config(std::string(MESHSIM_CONFIG_DIR) + "/chain3_2ch.yaml");
    auto runs = run_reps(c.scenario, 1, 2, 2);
    std::ostringstream results, summary;
    write_results_csv(results, runs);
    write_summary_csv(summary, runs);
    EXPECT_EQ(results.str(),
              "scenario,rep,flow,protocol,mbps,latency_ms,switches\n"
              GOLDEN_RESULTS);
    EXPECT_EQ(summary.str().substr(0, summary.str().find('\n')),
              "scenario,flow,protocol,reps,mean_mbps,stddev_mbps,mean_latency_ms,stddev_latency_ms");

    std::ostringstream sw;
    write_sweep_csv(sw, SweepKind::Coupling, Band::B24, {});
    EXPECT_EQ(sw.str(), "kind,band,label,x,protocol,mbps,normalized\n");
}

TEST(Report, ThreadCountDoesNotChangeOutput) {
    auto s = chain_scenario(Band::B24, {1, 11, 1}, Protocol::TcpLike);
    std::ostringstream a, b;
    write_results_csv(a, run_reps(s, 7, 4, 1));
    write_results_csv(b, run_reps(s, 7, 4, 4));
    EXPECT_EQ(a.str(), b.str());
}

TEST(Binary, ExitCodes) {
    EXPECT_EQ(exit_code("list"), 0);
    EXPECT_EQ(exit_code("reproduce 6.5"), 0);
    EXPECT_EQ(exit_code("reproduce 6.5 --tolerance 0"), 1);
    EXPECT_EQ(exit_code("reproduce 9.9"), 2);
    EXPECT_EQ(exit_code("run /nonexistent/meshsim.yaml"), 2);
    EXPECT_EQ(exit_code("frobnicate"), 2);
    EXPECT_EQ(exit_code(""), 2);

    auto dir = scratch("bad");
    std::ofstream(dir / "bad.yaml") << replace(kMinimal, "  horizon_s: 30", "  horizon: 30");
    EXPECT_EQ(exit_code("run " + (dir / "bad.yaml").string() + " --out " + (dir / "out").string()), 2);
}

TEST(Binary, RunWritesOutputsAndDryRunDoesNot) {
    auto dir = scratch("run");
    std::ofstream(dir / "tiny.yaml") << kMinimal;
    auto cfg = (dir / "tiny.yaml").string();
    EXPECT_EQ(exit_code("run " + cfg + " --dry-run --out " + (dir / "dry").string()), 0);
    EXPECT_FALSE(std::filesystem::exists(dir / "dry"));

    EXPECT_EQ(exit_code("run " + cfg + " --reps 3 --trace --out " + (dir / "out").string()), 0);
    std::ifstream results(dir / "out" / "results.csv");
    std::string line;
    int rows = -1;
    while (std::getline(results, line)) ++rows;
    EXPECT_EQ(rows, 3);
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / "summary.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / "trace-rep2.jsonl"));
}

TEST(Binary, SweepWritesCsvAndSvg) {
    auto dir = scratch("sweep");
    EXPECT_EQ(exit_code("sweep coupling --band b24 --out " + dir.string()), 0);
    EXPECT_TRUE(std::filesystem::exists(dir / "coupling_b24.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "coupling_b24.svg"));
    EXPECT_EQ(exit_code("sweep coupling --band b7"), 2);
}
