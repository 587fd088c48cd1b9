// meshsim: run scenario files, reproduce the reference tables, sweep the
// interference curves.
//
// Exit codes: 0 ok, 1 a reproduction is out of tolerance, 2 usage or
// configuration error.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "meshsim/config.hpp"
#include "meshsim/experiments.hpp"
#include "meshsim/report.hpp"

namespace fs = std::filesystem;
using namespace meshsim;

namespace {

constexpr int kOk = 0;
constexpr int kToleranceFail = 1;
constexpr int kUsage = 2;

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw Error("cannot write " + p.string());
    return f;
}

int cmd_run(const std::string& cfg_path, std::optional<std::uint64_t> seed, std::optional<int> reps,
            const std::string& out_dir, bool trace, bool dry_run, unsigned threads) {
    auto cfg = cli::load_config(cfg_path);
    if (seed) cfg.run.seed = *seed;
    if (reps) {
        if (*reps < 1) throw cli::ConfigError("--reps", 0, "must be >= 1");
        cfg.run.reps = *reps;
    }
    if (dry_run) {
        std::cout << cli::dump_config(cfg);
        return kOk;
    }
    fs::create_directories(out_dir);
    auto runs = cli::run_reps(cfg.scenario, cfg.run.seed, cfg.run.reps, threads, trace ? out_dir : std::string());
    {
        auto f = open_out(fs::path(out_dir) / "results.csv");
        cli::write_results_csv(f, runs);
    }
    {
        auto f = open_out(fs::path(out_dir) / "summary.csv");
        cli::write_summary_csv(f, runs);
    }
    cli::write_summary_csv(std::cout, runs);
    for (const auto& d : runs.front().diagnostics) std::cerr << "note: " << d << '\n';
    return kOk;
}

void print_reproduction(const cli::Reproduction& r) {
    std::cout << "table " << r.id << ": " << r.title << '\n';
    for (const auto& c : r.checks) {
        std::cout << "  " << std::left << std::setw(10) << c.label << std::right << std::fixed << std::setprecision(3)
                  << " model " << std::setw(7) << c.measured << "  reference " << std::setw(7) << c.reference << "  "
                  << std::showpos << std::setprecision(1) << c.deviation_pct() << std::noshowpos << "% (tol "
                  << c.tolerance_pct << "%)  " << (c.pass() ? "PASS" : "FAIL") << '\n';
    }
    std::cout << "  => " << (r.pass() ? "PASS" : "FAIL") << '\n';
}

int cmd_reproduce(const std::string& id, std::optional<double> tolerance, std::uint64_t seed) {
    std::vector<std::string> ids;
    if (id == "all") ids = cli::reproduction_ids();
    else if (cli::is_reproduction(id)) ids = {id};
    else {
        std::cerr << "meshsim: unknown table id '" << id << "' (known:";
        for (const auto& k : cli::reproduction_ids()) std::cerr << ' ' << k;
        std::cerr << ")\n";
        return kUsage;
    }
    int failed = 0;
    for (const auto& k : ids) {
        auto r = cli::reproduce(k, tolerance, seed);
        print_reproduction(r);
        failed += r.pass() ? 0 : 1;
    }
    if (ids.size() > 1) std::cout << ids.size() - failed << "/" << ids.size() << " tables within tolerance\n";
    return failed ? kToleranceFail : kOk;
}

int cmd_sweep(const std::string& kind_s, const std::string& band_s, const std::string& out_dir, std::uint64_t seed) {
    cli::SweepKind kind = kind_s == "orthogonality" ? cli::SweepKind::Orthogonality : cli::SweepKind::Coupling;
    Band band = *parse_band(band_s);
    auto points = cli::sweep(kind, band, seed);
    fs::create_directories(out_dir);
    std::string stem = cli::to_string(kind) + "_" + to_string(band);
    {
        auto f = open_out(fs::path(out_dir) / (stem + ".csv"));
        cli::write_sweep_csv(f, kind, band, points);
    }
    {
        auto f = open_out(fs::path(out_dir) / (stem + ".svg"));
        cli::write_sweep_svg(f, kind, band, points);
    }
    cli::write_sweep_csv(std::cout, kind, band, points);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-radio, multi-channel mesh network simulator"};
    app.require_subcommand(1);

    std::string cfg_path, out_dir = "out", table, kind, band;
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    std::optional<double> tolerance;
    std::uint64_t fixed_seed = 1;
    bool trace = false, dry_run = false;
    unsigned threads = 0;

    auto* run = app.add_subcommand("run", "Run a scenario file");
    run->add_option("config", cfg_path, "Scenario file (YAML)")->required();
    run->add_option("--seed", seed, "Base seed; rep k uses seed + k");
    run->add_option("--reps", reps, "Number of repetitions");
    run->add_option("--out", out_dir, "Output directory")->capture_default_str();
    run->add_option("--threads", threads, "Worker threads, 0 = all cores")->capture_default_str();
    run->add_flag("--trace", trace, "Write a JSON-lines event trace per repetition");
    run->add_flag("--dry-run", dry_run, "Validate and print the resolved configuration");

    auto* rep = app.add_subcommand("reproduce", "Reproduce a reference table, or 'all'");
    rep->add_option("table", table, "Table id, e.g. 6.10")->required();
    rep->add_option("--tolerance", tolerance, "Tolerance in percent, replaces the defaults")
        ->check(CLI::NonNegativeNumber);
    rep->add_option("--seed", fixed_seed, "Seed")->capture_default_str();

    auto* sw = app.add_subcommand("sweep", "Orthogonality or antenna-coupling sweep");
    sw->add_option("kind", kind, "orthogonality | coupling")
        ->required()
        ->check(CLI::IsMember({"orthogonality", "coupling"}));
    sw->add_option("--band", band, "b24 | b5")->required()->check(CLI::IsMember({"b24", "b5"}));
    sw->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sw->add_option("--seed", fixed_seed, "Seed")->capture_default_str();

    auto* list = app.add_subcommand("list", "List reproducible table ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*run) return cmd_run(cfg_path, seed, reps, out_dir, trace, dry_run, threads);
        if (*rep) return cmd_reproduce(table, tolerance, fixed_seed);
        if (*sw) return cmd_sweep(kind, band, out_dir, fixed_seed);
        if (*list) {
            for (const auto& id : cli::reproduction_ids()) std::cout << id << '\n';
            return kOk;
        }
    } catch (const cli::ConfigError& e) {
        std::cerr << "meshsim: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "meshsim: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
