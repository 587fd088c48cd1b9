#pragma once

// Repetition runner and the CSV / SVG writers.
//
// results.csv  scenario,rep,flow,protocol,mbps,latency_ms,switches
// summary.csv  scenario,flow,protocol,reps,mean_mbps,stddev_mbps,mean_latency_ms,stddev_latency_ms
// sweep.csv    kind,band,label,x,protocol,mbps,normalized
//
// Numbers carry four decimals; rows are in (rep, flow id) order.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "meshsim/experiments.hpp"
#include "meshsim/sim.hpp"

namespace meshsim::cli {

// Repetition k runs with seed base_seed + k. Repetitions are spread over
// up to `threads` workers (0: hardware concurrency) and returned in rep
// order. When trace_dir is non-empty each rep writes trace-rep<k>.jsonl
// there.
std::vector<sim::RunStats> run_reps(const sim::Scenario& scenario, std::uint64_t base_seed, int reps,
                                    unsigned threads = 0, const std::string& trace_dir = {});

void write_results_csv(std::ostream& out, const std::vector<sim::RunStats>& runs);
void write_summary_csv(std::ostream& out, const std::vector<sim::RunStats>& runs);

void write_sweep_csv(std::ostream& out, SweepKind kind, Band band, const std::vector<SweepPoint>& points);
// Normalized throughput against x, one polyline per protocol.
void write_sweep_svg(std::ostream& out, SweepKind kind, Band band, const std::vector<SweepPoint>& points);

std::string to_string(SweepKind k);

}  // namespace meshsim::cli
