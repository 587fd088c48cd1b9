#pragma once

// Routing metrics: ETX, ETT, WCETT and MCR with channel switching cost.

#include <compare>
#include <limits>
#include <optional>
#include <vector>

#include "meshsim/core.hpp"

namespace meshsim {

// Non-negative path cost with a saturating infinite top element.
class Metric {
  public:
    constexpr Metric() = default;
    explicit Metric(double v);

    static constexpr Metric infinite() {
        Metric m;
        m.inf_ = true;
        return m;
    }

    bool is_infinite() const { return inf_; }
    // +inf for the sentinel.
    double value() const { return inf_ ? std::numeric_limits<double>::infinity() : v_; }

    Metric operator+(const Metric& o) const {
        if (inf_ || o.inf_) return infinite();
        return Metric(v_ + o.v_);
    }

    std::partial_ordering operator<=>(const Metric& o) const {
        if (inf_ || o.inf_) return inf_ == o.inf_ ? std::partial_ordering::equivalent
                                                  : (inf_ ? std::partial_ordering::greater
                                                          : std::partial_ordering::less);
        return v_ <=> o.v_;
    }
    bool operator==(const Metric& o) const { return (*this <=> o) == 0; }

  private:
    double v_ = 0.0;
    bool inf_ = false;
};

struct LossPair {
    double p_f = 0.0;
    double p_r = 0.0;
};

// 1 - (1-p_f)(1-p_r)
double error_prob(const LossPair& lp);

// 1/(1-p); infinite at p = 1.
Metric etx(double p);

// Link ETX from delivery ratios measured in each direction.
Metric etx_from_ratios(double d_f, double d_r);

// etx * S / B seconds.
double ett(double etx_value, double size_bits, double bandwidth_bps);

struct PathLink {
    double etx = 1.0;
    double size_bits = 8000.0;
    double bandwidth_bps = 1e6;
    int channel = 0;
    // Fraction of time each interface of the node (keyed by channel) is
    // busy; entries for channels other than `channel` produce switching
    // probability.
    std::vector<std::pair<int, double>> interface_usage;
};

struct PathSpec {
    std::vector<PathLink> links;
};

double wcett(const PathSpec& path, double beta);

// wcett plus per-hop switching cost p_s(c) * switching_delay.
double mcr(const PathSpec& path, double beta, double switching_delay_s);

}  // namespace meshsim
