#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <random>

#include "meshsim/metrics.hpp"

using namespace meshsim;

namespace {

// Expected number of attempts, summed term by term.
double etx_series(double p, long terms) {
    double sum = 0.0;
    double pk = 1.0;  // p^(k-1)
    for (long k = 1; k <= terms; ++k) {
        sum += static_cast<double>(k) * pk * (1.0 - p);
        pk *= p;
        if (pk == 0.0) break;
    }
    return sum;
}

PathLink link(double etx_v, int channel, double bw = 1e6, double size = 1e6) {
    PathLink l;
    l.etx = etx_v;
    l.channel = channel;
    l.bandwidth_bps = bw;
    l.size_bits = size;
    return l;
}

}  // namespace

TEST(ErrorProb, Examples) {
    EXPECT_DOUBLE_EQ(error_prob({0, 0}), 0.0);
    EXPECT_DOUBLE_EQ(error_prob({0.5, 0}), 0.5);
    EXPECT_NEAR(error_prob({0.1, 0.1}), 0.19, 1e-15);
    EXPECT_THROW(error_prob({1.5, 0}), DomainError);
    EXPECT_THROW(error_prob({0, -0.1}), DomainError);
}

TEST(Etx, MatchesSeries) {
    EXPECT_DOUBLE_EQ(etx(0).value(), 1.0);
    EXPECT_NEAR(etx(0.5).value(), etx_series(0.5, 1'000'000), 1e-6);
    EXPECT_NEAR(etx(0.5).value(), 2.0, 1e-12);
    EXPECT_NEAR(etx(0.9).value(), etx_series(0.9, 1'000'000), 1e-6);
    EXPECT_NEAR(etx(0.9).value(), 10.0, 1e-9);
    EXPECT_TRUE(etx(1.0).is_infinite());
    EXPECT_THROW(etx(-0.1), DomainError);
}

TEST(Etx, MonotoneInLoss) {
    double prev = 0.0;
    for (int i = 0; i < 100; ++i) {
        double v = etx(i / 100.0).value();
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(Etx, FromRatios) {
    EXPECT_DOUBLE_EQ(etx_from_ratios(1, 1).value(), 1.0);
    EXPECT_DOUBLE_EQ(etx_from_ratios(0.5, 0.8).value(), 2.5);
    EXPECT_TRUE(etx_from_ratios(0, 1).is_infinite());
    EXPECT_TRUE(etx_from_ratios(1, 0).is_infinite());
}

TEST(MetricSentinel, SaturatesAndOrdersAboveFinite) {
    Metric inf = Metric::infinite();
    EXPECT_TRUE((inf + Metric(3)).is_infinite());
    EXPECT_TRUE(Metric(1e300) < inf);
    EXPECT_FALSE(inf < inf);
    EXPECT_EQ(inf, Metric::infinite());
    EXPECT_EQ(Metric(2) + Metric(3), Metric(5));
    EXPECT_THROW(Metric(-1), DomainError);
}

TEST(Ett, Examples) {
    EXPECT_DOUBLE_EQ(ett(1, 1000, 1000), 1.0);
    EXPECT_DOUBLE_EQ(ett(2, 8192, 1e6), 0.016384);
    EXPECT_DOUBLE_EQ(ett(2, 8192, 2e6), ett(2, 8192, 1e6) / 2);
    EXPECT_THROW(ett(1, 1000, 0), DomainError);
    EXPECT_LT(ett(1, 1000, 1000), ett(1.5, 1000, 1000));
    EXPECT_LT(ett(1, 1000, 1000), ett(1, 2000, 1000));
}

TEST(Wcett, Endpoints) {
    PathSpec p{{link(1, 1), link(2, 1), link(1.5, 11)}};
    double sum = 1 + 2 + 1.5;
    double max_x = 3;  // channel 1
    EXPECT_DOUBLE_EQ(wcett(p, 0), sum);
    EXPECT_DOUBLE_EQ(wcett(p, 1), max_x);
    for (double b = 0; b <= 1.0; b += 0.125) {
        double v = wcett(p, b);
        EXPECT_GE(v, std::min(sum, max_x) - 1e-12);
        EXPECT_LE(v, std::max(sum, max_x) + 1e-12);
    }
    PathSpec one{{link(1, 6), link(2, 6)}};
    EXPECT_DOUBLE_EQ(wcett(one, 1), 3.0);
    EXPECT_THROW(wcett(p, 1.5), DomainError);
    EXPECT_THROW(wcett(PathSpec{}, 0.5), DomainError);
}

TEST(Wcett, TwoChannelExample) {
    PathSpec p{{link(1, 1), link(1, 11)}};
    EXPECT_DOUBLE_EQ(wcett(p, 0.5), 1.5);
}

TEST(Mcr, Reductions) {
    PathSpec p{{link(1, 1), link(2, 11), link(1, 1)}};
    p.links[0].interface_usage = {{1, 0.5}, {11, 0.5}};
    p.links[1].interface_usage = {{1, 0.3}, {11, 0.7}};
    for (double b : {0.0, 0.3, 1.0}) EXPECT_DOUBLE_EQ(mcr(p, b, 0.0), wcett(p, b));

    PathSpec single{{link(1, 6), link(1, 6)}};
    for (auto& l : single.links) l.interface_usage = {{6, 1.0}};
    EXPECT_DOUBLE_EQ(mcr(single, 0.4, 0.2), wcett(single, 0.4));

    PathSpec half{{link(1, 1), link(1, 11)}};
    for (auto& l : half.links) l.interface_usage = {{1, 0.5}, {11, 0.5}};
    // Each hop adds 0.5 * 0.1 s to the sum term.
    EXPECT_NEAR(mcr(half, 0.0, 0.1), wcett(half, 0.0) + 2 * 0.05, 1e-12);
    EXPECT_NEAR(mcr(half, 0.5, 0.1), wcett(half, 0.5) + 0.5 * 2 * 0.05, 1e-12);
    EXPECT_THROW(mcr(half, 0.5, -1), DomainError);
}

TEST(Mcr, NeverBelowWcett) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 500; ++trial) {
        PathSpec p;
        int n = 1 + static_cast<int>(rng() % 5);
        for (int i = 0; i < n; ++i) {
            auto l = link(1 + 4 * u(rng), 1 + static_cast<int>(rng() % 3) * 5, 1e6 * (0.5 + u(rng)));
            l.interface_usage = {{1, u(rng)}, {6, u(rng)}, {11, u(rng)}};
            p.links.push_back(l);
        }
        double beta = u(rng);
        EXPECT_GE(mcr(p, beta, 0.1 * u(rng)), wcett(p, beta) - 1e-12);
    }
}

TEST(Wcett, PrefersChannelDiversity) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 1000; ++trial) {
        double e1 = 1 + 3 * u(rng), e2 = 1 + 3 * u(rng);
        double bw = 1e6 * (0.5 + 10 * u(rng));
        PathSpec diverse{{link(e1, 1, bw), link(e2, 11, bw)}};
        PathSpec same{{link(e1, 1, bw), link(e2, 1, bw)}};
        double beta = u(rng);
        EXPECT_LE(wcett(diverse, beta), wcett(same, beta));
        if (beta > 0.01) {
            EXPECT_LT(wcett(diverse, beta), wcett(same, beta));
        }
    }
}

// Exhaustive best path on small multigraphs agrees with Dijkstra when
// beta = 0 (the metric is then additive).
TEST(Wcett, ExhaustiveBestPathMatchesDijkstra) {
    struct E {
        int a, b;
        PathLink l;
    };
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 3 + static_cast<int>(rng() % 4);
        std::vector<E> edges;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                for (int par = 0; par < 2; ++par)
                    if (u(rng) < 0.5) edges.push_back({a, b, link(1 + 3 * u(rng), par ? 11 : 1, 1e6 * (1 + u(rng)))});

        // brute force over simple paths 0 -> n-1
        double best = std::numeric_limits<double>::infinity();
        std::vector<bool> seen(n, false);
        PathSpec cur;
        std::function<void(int)> dfs = [&](int v) {
            if (v == n - 1) {
                best = std::min(best, wcett(cur, 0.0));
                return;
            }
            seen[v] = true;
            for (const auto& e : edges) {
                int w = e.a == v ? e.b : e.b == v ? e.a : -1;
                if (w < 0 || seen[w]) continue;
                cur.links.push_back(e.l);
                dfs(w);
                cur.links.pop_back();
            }
            seen[v] = false;
        };
        dfs(0);

        std::vector<double> dist(n, std::numeric_limits<double>::infinity());
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
        dist[0] = 0;
        q.push({0, 0});
        while (!q.empty()) {
            auto [d, v] = q.top();
            q.pop();
            if (d > dist[v]) continue;
            for (const auto& e : edges) {
                int w = e.a == v ? e.b : e.b == v ? e.a : -1;
                if (w < 0) continue;
                double nd = d + wcett(PathSpec{{e.l}}, 0.0);
                if (nd < dist[w]) {
                    dist[w] = nd;
                    q.push({nd, w});
                }
            }
        }
        if (std::isinf(best))
            EXPECT_TRUE(std::isinf(dist[n - 1]));
        else
            EXPECT_NEAR(best, dist[n - 1], 1e-9);
    }
}
