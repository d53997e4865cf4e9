#include "fadr/stencil.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace fadr;

namespace {

constexpr auto P = BoundaryKind::periodic;
constexpr auto D = BoundaryKind::dirichlet;
constexpr auto N = BoundaryKind::neumann;

}  // namespace

TEST(Grid, Validation) {
    EXPECT_THROW(Grid2D::make(4, 5, 0, 1, 0, 1, {D, D, D, D}), StructuralError);
    EXPECT_THROW(Grid2D::make(5, 3, 0, 1, 0, 1, {D, D, D, D}), StructuralError);
    EXPECT_THROW(Grid2D::make(5, 5, 0, 1, 0, 1, {P, D, D, D}), StructuralError);
    EXPECT_THROW(Grid2D::make(5, 5, 1, 1, 0, 1, {D, D, D, D}), StructuralError);
    const auto g = Grid2D::make(11, 6, 0, 1, 0, 5, {P, P, D, D});
    EXPECT_DOUBLE_EQ(g.dx, 0.1);
    EXPECT_DOUBLE_EQ(g.dy, 1.0);
    EXPECT_DOUBLE_EQ(g.x(10), 1.0);
}

TEST(Advection, ConstantFieldIsZero) {
    const auto g = Grid2D::make(9, 7, 0, 1, 0, 1, {D, D, N, N});
    const Field u(g, 3.5);
    for (Axis a : {Axis::x, Axis::y}) {
        const auto out = advect_uds(g, u, 1.3, a);
        EXPECT_EQ(max_abs(out.values()), 0.0);
    }
}

TEST(Advection, LinearIsExact) {
    const auto g = Grid2D::make(21, 9, 0, 2, 0, 1, {D, D, D, D});
    const auto u = Field::from_function(g, [](double x, double) { return x; });
    for (double k : {1.0, -2.0}) {
        const auto out = advect_uds(g, u, k, Axis::x);
        for (std::size_t j = 0; j < g.ny; ++j)
            for (std::size_t i = 0; i < g.nx; ++i) EXPECT_NEAR(out(i, j), k, 1e-12);
    }
}

TEST(Advection, QuadraticAtInteriorPoint) {
    const auto g = Grid2D::line(21, 0.0, 2.0, D, D);
    const auto u = Field::from_function(g, [](double x, double) { return x * x; });
    const auto out = advect_uds(g, u, 1.0, Axis::x);
    // third differences of a quadratic vanish: the UD3 correction is zero
    EXPECT_NEAR(out(10, 0), 2.0, 1e-12);
}

TEST(Advection, HandComputedCorrection) {
    // u = x³ on a unit spacing line; at i = 5 with K = 1:
    // central (216 − 64)/2 = 76, u⁻ = (27 − 192 + 375 − 216)/3 = −2, UD3 = 76 − 1 = 75 = 3·5²
    const auto g = Grid2D::line(11, 0.0, 10.0, D, D);
    const auto u = Field::from_function(g, [](double x, double) { return x * x * x; });
    EXPECT_NEAR(advect_uds(g, u, 1.0, Axis::x)(5, 0), 75.0, 1e-12);
    EXPECT_NEAR(advect_uds(g, u, 1.0, Axis::x, {.q = 0.0})(5, 0), 76.0, 1e-12);
    // K < 0 uses u⁺ = (64 − 375 + 648 − 343)/3 = −2
    EXPECT_NEAR(advect_uds(g, u, -1.0, Axis::x)(5, 0), -75.0, 1e-12);
}

TEST(Advection, QZeroIsCentral) {
    const auto g = Grid2D::make(15, 12, 0, 1, 0, 1, {P, P, D, D});
    std::mt19937 rng(5);
    std::normal_distribution<double> nd;
    Field u(g);
    for (double& v : u.values()) v = nd(rng);
    u = apply_bc(g, u, BoundarySpec::homogeneous(g));
    const auto out = advect_uds(g, u, 0.7, Axis::x, {.q = 0.0});
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            const std::size_t ip = (i + 1) % (g.nx - 1), im = (i + g.nx - 2) % (g.nx - 1);
            const double c = 0.7 * (u(ip, j) - u(im, j)) / (2 * g.dx);
            EXPECT_NEAR(out(i, j), c, 1e-14 * std::max(1.0, std::abs(c)));
        }
    }
}

TEST(Advection, MirrorSymmetry) {
    // With the speed negated and the field mirrored, the derivative of the
    // mirrored field flips sign and cancels the flipped speed: the result is
    // the mirrored output.
    const auto g = Grid2D::make(17, 11, 0, 1, 0, 1, {D, D, D, D});
    std::mt19937 rng(9);
    std::normal_distribution<double> nd;
    Field u(g), k(g);
    for (double& v : u.values()) v = nd(rng);
    for (double& v : k.values()) v = nd(rng);
    for (Axis a : {Axis::x, Axis::y}) {
        Field um(g), km(g);
        for (std::size_t j = 0; j < g.ny; ++j) {
            for (std::size_t i = 0; i < g.nx; ++i) {
                const std::size_t mi = a == Axis::x ? g.nx - 1 - i : i;
                const std::size_t mj = a == Axis::y ? g.ny - 1 - j : j;
                um(mi, mj) = u(i, j);
                km(mi, mj) = -k(i, j);
            }
        }
        const auto out = advect_uds(g, u, k, a);
        const auto outm = advect_uds(g, um, km, a);
        for (std::size_t j = 0; j < g.ny; ++j) {
            for (std::size_t i = 0; i < g.nx; ++i) {
                const std::size_t mi = a == Axis::x ? g.nx - 1 - i : i;
                const std::size_t mj = a == Axis::y ? g.ny - 1 - j : j;
                EXPECT_NEAR(outm(mi, mj), out(i, j), 1e-12);
            }
        }
    }
}

TEST(Advection, ThirdOrderOnPeriodicSine) {
    std::vector<double> hs, errs;
    for (std::size_t n : {17u, 33u, 65u, 129u}) {
        const auto g = Grid2D::line(n, 0.0, 2 * std::numbers::pi, P, P);
        const auto u = Field::from_function(g, [](double x, double) { return std::sin(x); });
        const auto out = advect_uds(g, u, 1.0, Axis::x);
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(out(i, 0) - std::cos(g.x(i))));
        hs.push_back(std::log(g.dx));
        errs.push_back(std::log(e));
    }
    // least-squares slope
    const double mx = (hs[0] + hs[1] + hs[2] + hs[3]) / 4, my = (errs[0] + errs[1] + errs[2] + errs[3]) / 4;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < 4; ++i) {
        sxy += (hs[i] - mx) * (errs[i] - my);
        sxx += (hs[i] - mx) * (hs[i] - mx);
    }
    EXPECT_GE(sxy / sxx, 2.9);
}

TEST(Advection, AxisErrors) {
    const auto line = Grid2D::line(9, 0, 1, D, D);
    EXPECT_THROW(advect_uds(line, Field(line), 1.0, Axis::y), StructuralError);
    const auto g = Grid2D::make(9, 9, 0, 1, 0, 1, {D, D, D, D});
    EXPECT_THROW(advect_uds(g, Field(line), 1.0, Axis::x), StructuralError);
}

TEST(Laplacian, ConstantAndQuadratic) {
    const auto g = Grid2D::make(13, 9, -1, 1, 0, 3, {D, D, D, D});
    EXPECT_EQ(max_abs(laplacian_cds(g, Field(g, 2.0)).values()), 0.0);
    const auto u = Field::from_function(g, [](double x, double y) { return x * x + y * y + 0.5 * x * y - x; });
    const auto l = laplacian_cds(g, u);
    for (std::size_t j = 1; j + 1 < g.ny; ++j)
        for (std::size_t i = 1; i + 1 < g.nx; ++i) EXPECT_NEAR(l(i, j), 4.0, 1e-12);
    EXPECT_EQ(l(0, 3), 0.0);
}

TEST(Laplacian, EigenfunctionSecondOrder) {
    const double pi = std::numbers::pi;
    double prev = 0.0;
    for (std::size_t n : {26u, 51u}) {
        const auto g = Grid2D::make(n, n, -1, 1, -1, 1, {D, D, D, D});
        const auto u = Field::from_function(g, [&](double x, double y) { return std::sin(pi * x / 2) * std::sin(pi * y / 2); });
        const auto l = laplacian_cds(g, u);
        double e = 0.0;
        for (std::size_t j = 1; j + 1 < n; ++j)
            for (std::size_t i = 1; i + 1 < n; ++i) e = std::max(e, std::abs(l(i, j) + pi * pi / 2 * u(i, j)));
        // truncation error h²/12·(u_xxxx + u_yyyy) ≤ h²·π⁴/96
        EXPECT_LT(e, 1.05 * g.dx * g.dx);
        if (prev > 0.0) {
            EXPECT_NEAR(prev / e, 4.0, 0.2);
        }
        prev = e;
    }
}

TEST(Laplacian, NeumannMirrorAndPeriodicWrap) {
    const auto g = Grid2D::make(9, 9, 0, 1, 0, 1, {P, P, N, N});
    const double pi = std::numbers::pi;
    // cos(πy) has zero normal derivative at both walls; sin(2πx) is periodic
    const auto u = Field::from_function(g, [&](double x, double y) { return std::sin(2 * pi * x) + std::cos(pi * y); });
    const auto l = laplacian_cds(g, u);
    EXPECT_NEAR(l(0, 0), l(g.nx - 1, 0), 1e-12);
    const double h = g.dy;
    const double expect_wall = 2.0 * (std::cos(pi * h) - 1.0) / (h * h);
    EXPECT_NEAR(l(0, 0), expect_wall, 1e-10);
}

TEST(ApplyBC, Dirichlet) {
    const auto g = Grid2D::make(7, 6, 0, 1, 0, 1, {D, D, D, D});
    const auto u = apply_bc(g, Field(g, 5.0), BoundarySpec::homogeneous(g));
    for (std::size_t i = 0; i < g.nx; ++i) {
        EXPECT_EQ(u(i, 0), 0.0);
        EXPECT_EQ(u(i, g.ny - 1), 0.0);
    }
    for (std::size_t j = 0; j < g.ny; ++j) {
        EXPECT_EQ(u(0, j), 0.0);
        EXPECT_EQ(u(g.nx - 1, j), 0.0);
    }
    EXPECT_EQ(u(3, 3), 5.0);
}

TEST(ApplyBC, PeriodicCopiesColumn) {
    const auto g = Grid2D::make(8, 6, 0, 1, 0, 1, {P, P, D, D});
    auto u = Field::from_function(g, [](double x, double y) { return x + 10 * y; });
    u = apply_bc(g, u, BoundarySpec::homogeneous(g));
    for (std::size_t j = 0; j < g.ny; ++j) EXPECT_EQ(u(0, j), u(g.nx - 1, j));
}

TEST(ApplyBC, NeumannOneSided) {
    const auto g = Grid2D::make(9, 7, 0, 1, 0, 1, {N, N, D, D});
    auto u = Field::from_function(g, [](double x, double) { return 3.0 * x + 1.0; });
    BoundarySpec s = BoundarySpec::homogeneous(g);
    u = apply_bc(g, u, s);
    const double h = g.dx;
    for (std::size_t j = 1; j + 1 < g.ny; ++j) {
        EXPECT_NEAR((-3 * u(0, j) + 4 * u(1, j) - u(2, j)) / (2 * h), 0.0, 1e-12);
        EXPECT_NEAR(u(0, j), 1.0 + 2.0 * h, 1e-12);
    }
    // prescribed outward flux
    s.value[1] = 2.5;
    u = apply_bc(g, u, s);
    const std::size_t n = g.nx - 1;
    EXPECT_NEAR((3 * u(n, 3) - 4 * u(n - 1, 3) + u(n - 2, 3)) / (2 * h), 2.5, 1e-12);
}

TEST(ApplyBC, Errors) {
    const auto g = Grid2D::make(7, 6, 0, 1, 0, 1, {D, D, D, D});
    BoundarySpec s = BoundarySpec::homogeneous(g);
    s.value[0] = 1.0;
    EXPECT_THROW(apply_bc(g, Field(g), s), StructuralError);
    s = BoundarySpec::homogeneous(g);
    s.kind[2] = N;
    EXPECT_THROW(apply_bc(g, Field(g), s), StructuralError);
}
