#include "fadr/caputo.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace fadr;

TEST(L1Weights, UniformValues) {
    const auto w = l1_weights_uniform(0.5, 4);
    EXPECT_DOUBLE_EQ(w.weights[0], 1.0);
    EXPECT_NEAR(w.weights[1], std::sqrt(2.0) - 1.0, 1e-15);
    // mpmath: 4^0.1 − 3^0.1
    EXPECT_NEAR(l1_weights_uniform(0.9, 4).weights[3], 0.032575180963130572356, 1e-15);
    EXPECT_NEAR(w.scale, 1.0 / 0.88622692545275801365, 1e-12);
}

TEST(L1Weights, PositiveAndDecreasing) {
    for (double a : {0.05, 0.3, 0.5, 0.67, 0.9, 0.99}) {
        const auto w = l1_weights_uniform(a, 2000);
        for (std::size_t j = 0; j + 1 < w.size(); ++j) {
            ASSERT_GT(w.weights[j + 1], 0.0);
            ASSERT_GT(w.weights[j], w.weights[j + 1]) << "alpha=" << a << " j=" << j;
        }
    }
}

TEST(L1Weights, DomainChecks) {
    EXPECT_THROW(l1_weights_uniform(0.0, 3), DomainError);
    EXPECT_THROW(l1_weights_uniform(1.0, 3), DomainError);
    EXPECT_THROW(l1_weights_uniform(0.5, 0), DomainError);
    const std::vector<double> bad{0.0, 0.2, 0.2};
    EXPECT_THROW(l1_weights_nonuniform(0.5, bad), DomainError);
    const std::vector<double> one{0.0};
    EXPECT_THROW(l1_weights_nonuniform(0.5, one), DomainError);
}

TEST(L1Weights, NonuniformReducesToUniform) {
    for (double a : {0.5, 0.67, 0.9}) {
        const double h = 1.0 / 64.0;  // dyadic: the grid is exactly uniform
        std::vector<double> grid;
        for (int k = 0; k <= 300; ++k) grid.push_back(k * h);
        const auto u = l1_weights_uniform(a, 300, h);
        const auto n = l1_weights_nonuniform(a, grid);
        ASSERT_EQ(u.size(), n.size());
        for (std::size_t j = 0; j < u.size(); ++j) {
            EXPECT_NEAR(n.weights[j], u.weights[j], 1e-14 * u.weights[j]) << j;
        }
        EXPECT_NEAR(n.scale, u.scale, 1e-13 * u.scale);
    }
}

TEST(L1Weights, NonuniformExactOnIntegerGrid) {
    std::vector<double> grid{0.0, 1.0, 2.0, 3.0, 4.0};
    const auto u = l1_weights_uniform(0.7, 4);
    const auto n = l1_weights_nonuniform(0.7, grid);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(n.weights[j], u.weights[j], 1e-14 * u.weights[j]);
}

namespace {

std::vector<double> random_grid(std::mt19937& rng, std::size_t n) {
    std::uniform_real_distribution<double> step(0.001, 0.05);
    std::vector<double> g{0.0};
    for (std::size_t k = 0; k < n; ++k) g.push_back(g.back() + step(rng));
    return g;
}

}  // namespace

TEST(Caputo, LinearFunctionExactOnAnyGrid) {
    std::mt19937 rng(7);
    for (double a : {0.5, 0.67, 0.9}) {
        const auto grid = random_grid(rng, 60);
        L1History h;
        h.push(grid[0], {2.0 + 3.0 * grid[0]});
        for (std::size_t n = 1; n < grid.size(); ++n) {
            const std::vector<double> g(grid.begin(), grid.begin() + static_cast<long>(n) + 1);
            const auto w = l1_weights_nonuniform(a, g);
            const std::vector<double> cur{2.0 + 3.0 * grid[n]};
            const auto d = caputo_apply(h, w, cur);
            const double exact = 3.0 * std::pow(grid[n], 1.0 - a) / gamma_two_minus(a);
            EXPECT_NEAR(d[0], exact, 1e-10 * std::max(1.0, exact)) << "alpha=" << a << " n=" << n;
            h.push(grid[n], cur);
        }
    }
}

TEST(Caputo, ConstantHistoryGivesZero) {
    L1History h;
    for (int k = 0; k < 5; ++k) h.push(0.1 * k, {4.0, -1.0});
    const auto w = l1_weights_uniform(0.5, 5, 0.1);
    const auto d = caputo_apply(h, w, std::vector<double>{4.0, -1.0});
    EXPECT_EQ(d[0], 0.0);
    EXPECT_EQ(d[1], 0.0);
}

TEST(Caputo, NearOneIsBackwardDifference) {
    L1History h;
    h.push(0.0, {1.0});
    const double dt = 0.01;
    const auto w = l1_weights_uniform(0.999, 1, dt);
    const auto d = caputo_apply(h, w, std::vector<double>{1.5});
    EXPECT_NEAR(d[0], 0.5 / dt, 0.01 * 0.5 / dt);
}

TEST(Caputo, LinearInHistory) {
    std::mt19937 rng(11);
    std::normal_distribution<double> nd;
    const std::size_t steps = 40, m = 6;
    L1History hu, hv, hs;
    const double a = 1.7, b = -0.4;
    std::vector<double> u(m), v(m), s(m);
    for (std::size_t k = 0; k <= steps; ++k) {
        for (std::size_t i = 0; i < m; ++i) {
            u[i] = nd(rng);
            v[i] = nd(rng);
            s[i] = a * u[i] + b * v[i];
        }
        if (k == steps) break;
        hu.push(0.02 * k, u);
        hv.push(0.02 * k, v);
        hs.push(0.02 * k, s);
    }
    const auto w = l1_weights_uniform(0.6, steps, 0.02);
    const auto du = caputo_apply(hu, w, u), dv = caputo_apply(hv, w, v), ds = caputo_apply(hs, w, s);
    for (std::size_t i = 0; i < m; ++i) EXPECT_NEAR(ds[i], a * du[i] + b * dv[i], 1e-12 * std::max(1.0, std::abs(ds[i])));
}

TEST(Caputo, ShapeErrors) {
    L1History h;
    h.push(0.0, {1.0, 2.0});
    EXPECT_THROW(h.push(0.1, {1.0}), StructuralError);
    EXPECT_THROW(h.push(0.0, {1.0, 2.0}), StructuralError);
    const auto w = l1_weights_uniform(0.5, 1);
    EXPECT_THROW(caputo_apply(h, w, std::vector<double>{1.0}), StructuralError);
    const auto w2 = l1_weights_uniform(0.5, 3);
    EXPECT_THROW(caputo_apply(h, w2, std::vector<double>{1.0, 2.0}), StructuralError);
}

TEST(AdaptStep, Examples) {
    AdaptiveConfig cfg;
    const std::vector<double> u{1.0, 2.0, 3.0};
    EXPECT_DOUBLE_EQ(adapt_step(u, u, cfg, cfg.dt_max / 4).dt, cfg.dt_max / 2);
    EXPECT_DOUBLE_EQ(adapt_step(u, u, cfg, cfg.dt_max).dt, cfg.dt_max);

    // relative change exactly 2δ
    const double n = std::sqrt(14.0);
    std::vector<double> moved{1.0 + 2e-3 * n, 2.0, 3.0};
    const auto d = adapt_step(moved, u, cfg, 4e-3);
    EXPECT_NEAR(d.relative_change, 2e-3, 1e-12);
    EXPECT_DOUBLE_EQ(d.dt, 4e-3);
    EXPECT_FALSE(d.grew);
}

TEST(AdaptStep, DegenerateNorm) {
    AdaptiveConfig cfg;
    const std::vector<double> zero(3, 0.0), one(3, 1.0);
    const auto d = adapt_step(one, zero, cfg, 2e-3);
    EXPECT_TRUE(d.degenerate_norm);
    EXPECT_DOUBLE_EQ(d.dt, 2e-3);
}

TEST(AdaptStep, ScheduleNonDecreasingAndBounded) {
    AdaptiveConfig cfg;
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> change(0.0, 2.5e-3);
    double dt = cfg.dt_min;
    std::vector<double> u{1.0};
    for (int k = 0; k < 200; ++k) {
        std::vector<double> next{u[0] * (1.0 + change(rng))};
        const double nd = adapt_step(next, u, cfg, dt).dt;
        EXPECT_GE(nd, dt);
        EXPECT_LE(nd, cfg.dt_max);
        EXPECT_GE(nd, cfg.dt_min);
        dt = nd;
        u = next;
    }
    EXPECT_DOUBLE_EQ(dt, cfg.dt_max);
}

TEST(AdaptStep, ConfigValidation) {
    const std::vector<double> u{1.0};
    EXPECT_THROW(adapt_step(u, u, {.delta = 0.0}, 1e-3), DomainError);
    EXPECT_THROW(adapt_step(u, u, {.dt_min = 1.0, .dt_max = 0.5}, 0.5), DomainError);
    EXPECT_THROW(adapt_step(u, u, {.growth_factor = 3.0}, 1e-3), DomainError);
}
