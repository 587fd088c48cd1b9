#include "meshsim/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

namespace meshsim::cli {

std::string to_string(SweepKind k) { return k == SweepKind::Orthogonality ? "orthogonality" : "coupling"; }

std::vector<sim::RunStats> run_reps(const sim::Scenario& scenario, std::uint64_t base_seed, int reps,
                                    unsigned threads, const std::string& trace_dir) {
    if (reps < 1) throw Error("reps must be >= 1");
    std::vector<sim::RunStats> out(static_cast<std::size_t>(reps));
    std::vector<std::exception_ptr> errors(out.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t k = next++; k < out.size(); k = next++) {
            try {
                std::uint64_t seed = base_seed + k;
                if (trace_dir.empty()) {
                    out[k] = sim::run(scenario, seed);
                } else {
                    auto path = std::filesystem::path(trace_dir) / ("trace-rep" + std::to_string(k) + ".jsonl");
                    std::ofstream trace(path);
                    if (!trace) throw Error("cannot write " + path.string());
                    out[k] = sim::run(scenario, seed, &trace);
                }
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(out.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

namespace {

std::string fixed4(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << (v == 0.0 ? 0.0 : v);
    return s.str();
}

// Names are ours or from config files; quote anything CSV-hostile.
std::string field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;
};

// Sample standard deviation; zero for a single value.
Moments moments(const std::vector<double>& v) {
    Moments m;
    if (v.empty()) return m;
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - m.mean) * (x - m.mean);
        m.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return m;
}

}  // namespace

void write_results_csv(std::ostream& out, const std::vector<sim::RunStats>& runs) {
    out << "scenario,rep,flow,protocol,mbps,latency_ms,switches\n";
    for (std::size_t rep = 0; rep < runs.size(); ++rep)
        for (const auto& f : runs[rep].flows)
            out << field(runs[rep].scenario) << ',' << rep << ',' << field(f.name) << ',' << to_string(f.protocol)
                << ',' << fixed4(f.mbps) << ',' << fixed4(f.latency_ms) << ',' << f.switches << '\n';
}

void write_summary_csv(std::ostream& out, const std::vector<sim::RunStats>& runs) {
    out << "scenario,flow,protocol,reps,mean_mbps,stddev_mbps,mean_latency_ms,stddev_latency_ms\n";
    if (runs.empty()) return;
    const auto& first = runs.front();
    for (std::size_t i = 0; i < first.flows.size(); ++i) {
        std::vector<double> mbps, lat;
        for (const auto& r : runs) {
            mbps.push_back(r.flows.at(i).mbps);
            lat.push_back(r.flows.at(i).latency_ms);
        }
        auto m = moments(mbps);
        auto l = moments(lat);
        out << field(first.scenario) << ',' << field(first.flows[i].name) << ',' << to_string(first.flows[i].protocol)
            << ',' << runs.size() << ',' << fixed4(m.mean) << ',' << fixed4(m.stddev) << ',' << fixed4(l.mean) << ','
            << fixed4(l.stddev) << '\n';
    }
}

void write_sweep_csv(std::ostream& out, SweepKind kind, Band band, const std::vector<SweepPoint>& points) {
    out << "kind,band,label,x,protocol,mbps,normalized\n";
    for (const auto& p : points)
        out << to_string(kind) << ',' << to_string(band) << ',' << p.label << ',' << fixed4(p.x) << ','
            << to_string(p.protocol) << ',' << fixed4(p.mbps) << ',' << fixed4(p.normalized) << '\n';
}

void write_sweep_svg(std::ostream& out, SweepKind kind, Band band, const std::vector<SweepPoint>& points) {
    const double w = 640, h = 400, left = 60, right = 20, top = 30, bottom = 50;
    double xmax = 1.0;
    for (const auto& p : points) xmax = std::max(xmax, p.x);
    auto sx = [&](double x) { return left + (w - left - right) * x / xmax; };
    auto sy = [&](double y) { return h - bottom - (h - top - bottom) * std::clamp(y, 0.0, 1.1) / 1.1; };

    out << std::fixed << std::setprecision(1);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
        << to_string(kind) << " sweep, " << to_string(band) << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << sy(0) << "\" x2=\"" << w - right << "\" y2=\"" << sy(0)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << sy(0) << "\" x2=\"" << left << "\" y2=\"" << top
        << "\" stroke=\"black\"/>\n";
    for (double y : {0.0, 0.25, 0.5, 0.75, 1.0})
        out << "<text x=\"" << left - 6 << "\" y=\"" << sy(y) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << std::setprecision(2) << y
            << std::setprecision(1) << "</text>\n";
    std::map<double, bool> ticks;
    for (const auto& p : points) ticks[p.x] = true;
    for (const auto& [x, _] : ticks)
        out << "<text x=\"" << sx(x) << "\" y=\"" << sy(0) + 16
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << x << "</text>\n";
    out << "<text x=\"" << (left + w - right) / 2 << "\" y=\"" << h - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << (kind == SweepKind::Orthogonality ? "channel separation (MHz)" : "relay antenna distance (cm)")
        << "</text>\n";

    const std::pair<Protocol, const char*> series[] = {{Protocol::TcpLike, "#c0392b"}, {Protocol::UdpLike, "#2471a3"}};
    double legend_y = top + 10;
    for (const auto& [proto, color] : series) {
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& p : points)
            if (p.protocol == proto) out << sx(p.x) << ',' << sy(p.normalized) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << w - right - 40 << "\" y=\"" << legend_y << "\" fill=\"" << color
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << to_string(proto) << "</text>\n";
        legend_y += 16;
    }
    out << "</svg>\n";
}

}  // namespace meshsim::cli
