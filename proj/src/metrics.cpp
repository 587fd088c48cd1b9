#include "meshsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace meshsim {

Metric::Metric(double v) : v_(v) {
    if (std::isnan(v) || v < 0.0) throw DomainError("metric must be a non-negative number");
    if (std::isinf(v)) inf_ = true;
}

namespace {

void check_prob(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(what) + " must lie in [0,1]");
}

void check_path(const PathSpec& path, double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0,1]");
    if (path.links.empty()) throw DomainError("path has no links");
}

// sum of ETT over the path and the busiest channel's ETT share
std::pair<double, double> ett_terms(const PathSpec& path) {
    double sum = 0.0;
    std::map<int, double> per_channel;
    for (const auto& l : path.links) {
        double t = ett(l.etx, l.size_bits, l.bandwidth_bps);
        sum += t;
        per_channel[l.channel] += t;
    }
    double max_x = 0.0;
    for (const auto& [ch, x] : per_channel) max_x = std::max(max_x, x);
    return {sum, max_x};
}

}  // namespace

double error_prob(const LossPair& lp) {
    check_prob(lp.p_f, "p_f");
    check_prob(lp.p_r, "p_r");
    return 1.0 - (1.0 - lp.p_f) * (1.0 - lp.p_r);
}

Metric etx(double p) {
    check_prob(p, "loss probability");
    if (p >= 1.0) return Metric::infinite();
    return Metric(1.0 / (1.0 - p));
}

Metric etx_from_ratios(double d_f, double d_r) {
    check_prob(d_f, "forward delivery ratio");
    check_prob(d_r, "reverse delivery ratio");
    if (d_f == 0.0 || d_r == 0.0) return Metric::infinite();
    return Metric(1.0 / (d_f * d_r));
}

double ett(double etx_value, double size_bits, double bandwidth_bps) {
    if (!(bandwidth_bps > 0.0)) throw DomainError("ett: bandwidth must be > 0");
    if (!(size_bits > 0.0)) throw DomainError("ett: size must be > 0");
    if (etx_value < 1.0) throw DomainError("ett: etx must be >= 1");
    return etx_value * size_bits / bandwidth_bps;
}

double wcett(const PathSpec& path, double beta) {
    check_path(path, beta);
    auto [sum, max_x] = ett_terms(path);
    return (1.0 - beta) * sum + beta * max_x;
}

double mcr(const PathSpec& path, double beta, double switching_delay_s) {
    check_path(path, beta);
    if (switching_delay_s < 0.0) throw DomainError("switching delay must be >= 0");
    auto [sum, max_x] = ett_terms(path);
    double switching = 0.0;
    for (const auto& l : path.links) {
        double p_s = 0.0;
        for (const auto& [ch, usage] : l.interface_usage) {
            check_prob(usage, "interface usage");
            if (ch != l.channel) p_s += usage;
        }
        switching += std::min(p_s, 1.0) * switching_delay_s;
    }
    return (1.0 - beta) * (sum + switching) + beta * max_x;
}

}  // namespace meshsim
