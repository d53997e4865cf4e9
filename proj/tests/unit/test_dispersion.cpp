#include "fadr/dispersion.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace fadr;

namespace {

const double pi = std::numbers::pi;

/// Companion-matrix eigenvalues (independent of the Aberth iteration).
std::vector<cplx> companion_roots(const std::vector<cplx>& a) {
    const auto n = static_cast<Eigen::Index>(a.size() - 1);
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) C(0, k) = -a[static_cast<std::size_t>(k + 1)] / a[0];
    for (Eigen::Index k = 1; k < n; ++k) C(k, k - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    std::vector<cplx> out;
    for (Eigen::Index k = 0; k < n; ++k) out.push_back(es.eigenvalues()(k));
    return out;
}

SpectralParams params(double alpha, double theta, double Pe, double Da) {
    SpectralParams p;
    p.alpha = alpha;
    p.theta = theta;
    p.Pe = Pe;
    p.Da = Da;
    return p;
}

}  // namespace

TEST(Polynomial, SimpleRoots) {
    // (z − 1)(z + 2)(z − i) = z³ + (1 − i) z² + (−2 − i) z + 2i
    const std::vector<cplx> a{1.0, cplx(1, -1), cplx(-2, -1), cplx(0, 2)};
    auto r = polynomial_roots(a);
    ASSERT_EQ(r.size(), 3u);
    for (cplx expect : {cplx(1), cplx(-2), cplx(0, 1)}) {
        double best = 1e9;
        for (auto z : r) best = std::min(best, std::abs(z - expect));
        EXPECT_LT(best, 1e-12);
    }
}

TEST(Polynomial, ZeroAndLeadingCoefficients) {
    const std::vector<cplx> a{0.0, 2.0, -2.0, 0.0, 0.0};  // 2z²(z − 1)... after stripping
    const auto r = polynomial_roots(a);
    ASSERT_EQ(r.size(), 3u);
    int zeros = 0;
    for (auto z : r) zeros += std::abs(z) == 0.0;
    EXPECT_EQ(zeros, 2);
    EXPECT_THROW(polynomial_roots(std::vector<cplx>{0.0, 0.0}), RootFindingError);
    try {
        polynomial_roots(std::vector<cplx>{1.0, std::nan("")});
        FAIL();
    } catch (const RootFindingError& e) {
        EXPECT_EQ(e.coefficients().size(), 2u);
    }
}

TEST(Polynomial, MatchesCompanionMatrixOnDispersionPolynomials) {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 12; ++trial) {
        auto p = params(0.3 + 0.65 * u(rng), u(rng), 0.5 * u(rng), -0.05 * u(rng));
        const double kh = pi * u(rng), Nc = u(rng);
        const auto co = dispersion_coefficients(p, kh, Nc);
        const auto ours = polynomial_roots(co.poly);
        const auto ref = companion_roots(co.poly);
        ASSERT_EQ(ours.size(), p.n_poly);
        for (auto z : ref) {
            double best = 1e9;
            for (auto w : ours) best = std::min(best, std::abs(z - w));
            EXPECT_LT(best, 1e-7) << "trial " << trial;
        }
        for (auto z : ours) EXPECT_LE(poly_relative_residual(co.poly, z), 1e-8);
    }
}

TEST(Dispersion, CoefficientIdentities) {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 50; ++k) {
        auto p = params(0.2 + 0.8 * u(rng), u(rng), u(rng), -0.1 * u(rng));
        const double Nc = u(rng);
        const auto at0 = dispersion_coefficients(p, 0.0, Nc);
        EXPECT_EQ(at0.C0, cplx(1.0));
        EXPECT_NEAR(std::abs(at0.C1 - cplx(-1.0 - p.Da * Nc * gamma_two_minus(p.alpha))), 0.0, 1e-15);
        const auto d = dispersion_coefficients(p, 2 * pi * u(rng), Nc);
        EXPECT_GE(std::abs(d.C0), 1.0);
        p.Pe = 0.0;
        EXPECT_EQ(dispersion_coefficients(p, 1.3, Nc).C0, cplx(1.0));
    }
}

TEST(Dispersion, UnitRootAtZeroWavenumber) {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 20; ++k) {
        auto p = params(0.1 + 0.9 * u(rng), u(rng), u(rng), 0.0);
        const double Nc = u(rng);
        const auto co = dispersion_coefficients(p, 0.0, Nc);
        EXPECT_LT(std::abs(poly_eval(co.poly, 1.0)), 1e-10);
        const auto rs = amplification_roots(p, 0.0, Nc);
        EXPECT_LT(std::abs(rs.selected - 1.0), 1e-10);
    }
}

TEST(Dispersion, VietaProduct) {
    auto p = params(0.9, 0.5, 0.001, 0.01);
    for (double kh : {0.3, 1.0, 2.5}) {
        const auto rs = amplification_roots(p, kh, 0.05);
        cplx prod = 1.0;
        for (auto z : rs.roots) prod *= z;
        const auto co = dispersion_coefficients(p, kh, 0.05);
        const double n = static_cast<double>(p.n_poly);
        const cplx expect = std::pow(-1.0, n) * co.poly.back() / co.C0;
        EXPECT_LT(std::abs(prod - expect), 1e-8);
    }
    // numpy oracle at kh = 0.3
    const auto rs = amplification_roots(p, 0.3, 0.05);
    cplx prod = 1.0;
    for (auto z : rs.roots) prod *= z;
    EXPECT_NEAR(prod.real(), 0.002065601197578069, 1e-12);
}

TEST(Dispersion, GoldenPoints) {
    // numpy.roots + continuation oracle
    auto a = amplification_roots(params(0.9, 0.5, 0.01, 0.0), 0.5, 0.1);
    EXPECT_NEAR(a.selected.real(), 0.9908097386713475, 1e-10);
    EXPECT_NEAR(a.selected.imag(), -0.03194390278256687, 1e-10);
    EXPECT_LT(std::abs(a.selected), 1.0);

    const auto p = params(0.9, 0.5, 0.001, 0.01);
    const auto d = evaluate_point(p, 0.3, 0.05);
    EXPECT_NEAR(d.G_num.real(), 0.9996662173762183, 1e-10);
    EXPECT_NEAR(d.G_num.imag(), -0.009331392776394831, 1e-10);
    EXPECT_NEAR(d.beta, -0.009334237372571351, 1e-10);
    EXPECT_NEAR(d.c_ratio.real(), 0.9816005302533853, 1e-8);
    EXPECT_NEAR(d.c_ratio.imag(), 0.14250616319503953, 1e-8);
    EXPECT_NEAR(d.delta_c, 0.14368906372973494, 1e-8);
    EXPECT_NEAR(d.Vg_ratio, 0.9138827653204308, 1e-6);
}

TEST(Dispersion, PhaseSpeedBasics) {
    const auto p = params(0.7, 0.5, 0.01, 0.0);
    const auto ps = phase_speed_ratio(p, 0.4, 0.2, cplx(0.8, 0.0));
    EXPECT_EQ(ps.beta, 0.0);
    EXPECT_EQ(ps.c_ratio, cplx(0.0));
    EXPECT_TRUE(phase_speed_ratio(p, 0.0, 0.2, cplx(1.0)).singular);
}

TEST(Dispersion, AlphaOneReducesToClassicalPhaseRatio) {
    // α = 1, Pe = Da = 0: single root G = −C1/C0; exact ω = c k
    const auto p = params(1.0, 0.5, 0.0, 0.0);
    for (double kh : {0.2, 0.8, 1.7}) {
        const double Nc = 0.3;
        const auto d = evaluate_point(p, kh, Nc);
        const cplx G = 1.0 - Nc * cplx(0.5 * (1 - 4.0 / 3 * std::cos(kh) + std::cos(2 * kh) / 3),
                                       std::sin(kh) + std::sin(kh) / 3 - std::sin(2 * kh) / 6);
        EXPECT_LT(std::abs(d.G_num - G), 1e-13);
        EXPECT_NEAR(d.c_ratio.real(), -std::arg(G) / (kh * Nc), 1e-12);
        EXPECT_NEAR(d.c_ratio.imag(), 0.0, 1e-12);
    }
}

TEST(Dispersion, LongWaveGroupVelocityAtAlphaOne) {
    const auto p = params(1.0, 0.5, 0.0, 0.0);
    for (double Nc : {0.1, 0.5, 1.0}) EXPECT_NEAR(evaluate_point(p, 1e-3, Nc).Vg_ratio, 1.0, 0.05);
}

TEST(Dispersion, PeriodicInWavenumber) {
    const auto p = params(0.9, 0.5, 0.01, -0.01);
    for (double kh : {0.4, 1.2, -0.7}) {
        const auto a = evaluate_point(p, kh, 0.2);
        const auto b = evaluate_point(p, kh + 2 * pi, 0.2);
        EXPECT_NEAR(a.delta_c, b.delta_c, 1e-9);
        EXPECT_NEAR(a.Vg_ratio, b.Vg_ratio, 1e-6);
    }
}

TEST(Dispersion, PolynomialOrderStability) {
    auto p75 = params(0.9, 0.5, 0.01, 0.0), p76 = p75;
    p76.n_poly = 76;
    for (double kh : {0.2, 0.9, 1.6}) {
        const cplx a = amplification_roots(p75, kh, 0.1).selected, b = amplification_roots(p76, kh, 0.1).selected;
        EXPECT_LT(std::abs(a - b) / std::abs(a), 1e-3);
    }
}

TEST(Dispersion, FavorableSignInsideRegion) {
    // small kh, small Nc, α = 0.9, θ = 0.5, Pe = 0.001: inside the favorable region
    const auto d = evaluate_point(params(0.9, 0.5, 0.001, 0.0), 0.6, 0.2);
    EXPECT_GT(d.Vg_ratio, 0.0);
}

TEST(Dispersion, ContourScanAndCsv) {
    auto p = params(0.9, 0.5, 0.01, 0.0);
    p.kh_range = {0.0, pi, 9};
    p.Nc_range = {0.1, 0.5, 3};
    const auto pts = contour_scan(p);
    ASSERT_EQ(pts.size(), 27u);
    EXPECT_TRUE(pts[0].singular);
    EXPECT_FALSE(pts[0].favorable);
    for (const auto& d : pts) {
        if (!d.failed) EXPECT_LE(std::abs(d.beta), pi);
        if (!d.singular && !d.failed) EXPECT_GE(d.delta_c, 0.0);
        EXPECT_EQ(d.favorable, is_favorable(d));
    }
    // scan agrees with standalone evaluation
    const auto one = evaluate_point(p, pts[13].kh, pts[13].Nc);
    EXPECT_LT(std::abs(one.G_num - pts[13].G_num), 1e-12);

    DispersionPoint bad = pts[13];
    bad.delta_c = 0.2;
    bad.Vg_ratio = 1.0;
    EXPECT_FALSE(is_favorable(bad));

    p.kh_range.count = 0;
    EXPECT_TRUE(contour_scan(p).empty());

    std::ostringstream os;
    p.kh_range.count = 2;
    p.Nc_range.count = 1;
    write_dispersion_csv(os, p, contour_scan(p));
    const std::string s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "alpha,theta,Pe,Da,Nc,kh,ReG,ImG,beta,delta_c,Vg_ratio,favorable");
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
}

TEST(Xi, TrivialParametersStayConstant) {
    const auto p = params(0.6, 0.5, 0.0, 0.0);
    const auto xi = xi_recursion(p, 1.0, 0.0, 100);
    for (double v : xi) EXPECT_NEAR(v, 1.0, 1e-14);
}

TEST(Xi, MonotoneUnderHypotheses) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    int checked = 0;
    for (double alpha : {0.5, 0.9}) {
        for (double theta : {0.5, 1.0}) {
            for (int s = 0; s < 6; ++s) {
                const auto p = params(alpha, theta, std::pow(10.0, -3 + 2 * u(rng)), -0.05 * u(rng));
                const double Nc = std::pow(10.0, -3 + 2 * u(rng));
                for (int k = 1; k <= 6; ++k) {
                    const double kh = pi * k / 6;
                    if (!stability_hypotheses_hold(p, kh, Nc)) continue;
                    ++checked;
                    const auto xi = xi_recursion(p, kh, Nc, 200);
                    for (std::size_t n = 1; n < xi.size(); ++n) ASSERT_LE(xi[n], xi[n - 1] + 1e-13) << alpha << " " << kh;
                }
            }
        }
    }
    EXPECT_GT(checked, 20);
}

TEST(Xi, UnstableWitnessGrows) {
    const auto p = params(0.9, 0.5, 0.01, 0.0);
    const auto xi = xi_recursion(p, pi / 2, 0.4440892098500626, 500);
    EXPECT_GT(*std::max_element(xi.begin(), xi.end()), 1.0);
    EXPECT_NEAR(*std::max_element(xi.begin(), xi.end()), 24.65, 0.1);
}
