#include "fadr/ml_special.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace fadr;

namespace {

// mpmath, 50 digits: Σ z^k/Γ(αk+1).
struct MLRef {
    double alpha, z, value;
};
constexpr MLRef kReference[] = {
    {0.5, -1.0, 0.4275835761558070044107503},
    {0.5, -0.5, 0.6156903441929258748708},
    {0.5, -1.5, 0.3215854164543175023543},
    {0.5, -2.4, 0.2184987345370333318669},
    {0.67, -0.5, 0.6062291532441434577111},
    {0.67, -1.5, 0.2897526797735442746504},
    {0.67, -2.4, 0.1832255038930916673988},
    {0.67, -4.9, 0.08491353000157564054856},
    {0.9, -0.5, 0.6034054986958609679978},
    {0.9, -1.5, 0.2430926784792172556027},
    {0.9, -2.4, 0.1227166643115343851605},
    {0.9, -4.9, 0.03560143992823280039546},
};

}  // namespace

TEST(Gamma, KnownValues) {
    EXPECT_DOUBLE_EQ(gamma_fn(1.0), 1.0);
    EXPECT_NEAR(gamma_fn(0.5), std::sqrt(std::numbers::pi), 1e-12);
    EXPECT_NEAR(gamma_fn(1.5), 0.88622692545275801365, 1e-12);
    EXPECT_NEAR(gamma_fn(1.33), 0.89337805346301305102, 1e-12);
    EXPECT_NEAR(gamma_two_minus(0.9), 0.95135076986687319258, 1e-12);
}

TEST(Gamma, RejectsNonPositive) {
    EXPECT_THROW(gamma_fn(0.0), DomainError);
    EXPECT_THROW(gamma_fn(-1.5), DomainError);
    EXPECT_THROW(gamma_fn(std::nan("")), DomainError);
}

TEST(MittagLeffler, ZeroArgument) {
    for (double a : {0.3, 0.5, 1.0}) EXPECT_EQ(mittag_leffler(0.0, {.alpha = a}), 1.0);
}

TEST(MittagLeffler, AlphaOneIsExp) {
    for (int k = -50; k <= 50; ++k) {
        const double z = 0.1 * k;
        EXPECT_NEAR(mittag_leffler(z, {.alpha = 1.0}), std::exp(z), 1e-10) << "z=" << z;
    }
}

TEST(MittagLeffler, HighPrecisionReference) {
    for (const auto& r : kReference) {
        EXPECT_NEAR(mittag_leffler(r.z, {.alpha = r.alpha}), r.value, 1e-11)
            << "alpha=" << r.alpha << " z=" << r.z;
    }
}

TEST(MittagLeffler, CancellationIsReportedNotHidden) {
    // mpmath: E_{1/2}(−4.9) = 0.1128790905597587473189; the largest series term
    // is ~e^{24}, so double/long double sums cannot reach 1e-12 absolute.
    EXPECT_THROW(mittag_leffler(-4.9, {.alpha = 0.5}), NumericalError);
}

TEST(MittagLeffler, HalfOrderClosedForm) {
    // E_{1/2}(−x) = exp(x²) erfc(x)
    for (double x : {0.1, 0.7, 1.0, 1.9}) {
        EXPECT_NEAR(mittag_leffler(-x, {.alpha = 0.5}), std::exp(x * x) * std::erfc(x), 1e-11);
    }
}

TEST(MittagLeffler, MonotoneOnNegativeAxis) {
    // successive samples differ by > 1e-3; 1e-7 accuracy is ample and
    // reachable at α = 0.5, z = −5 where 1e-12 is not
    const MLParams base{.tol = 1e-7};
    for (double a : {0.5, 0.67, 0.9}) {
        MLParams p = base;
        p.alpha = a;
        double prev = mittag_leffler(-5.0, p);
        for (int k = 49; k >= 0; --k) {
            const double v = mittag_leffler(-0.1 * k, p);
            EXPECT_GT(v, prev) << "alpha=" << a << " z=" << -0.1 * k;
            prev = v;
        }
    }
}

TEST(MittagLeffler, ToleranceRefinementIsConsistent) {
    for (double a : {0.5, 0.67, 0.9, 1.0}) {
        for (double z : {-4.5, -2.0, -0.3, 0.8, 3.0}) {
            for (double tol : {1e-6, 1e-9, 1e-12}) {
                if (a == 0.5 && z < -4.0 && tol < 1e-9) {
                    // cancellation floor ~1e-10 here
                    EXPECT_THROW(mittag_leffler(z, {.alpha = a, .tol = tol / 10}), NumericalError);
                    continue;
                }
                const double coarse = mittag_leffler(z, {.alpha = a, .tol = tol});
                const double fine = mittag_leffler(z, {.alpha = a, .tol = tol / 10});
                EXPECT_LT(std::abs(coarse - fine), tol) << a << " " << z << " " << tol;
            }
        }
    }
}

TEST(MittagLeffler, Errors) {
    EXPECT_THROW(mittag_leffler(10.5, {.alpha = 0.5}), DomainError);
    EXPECT_THROW(mittag_leffler(-1.0, {.alpha = 0.0}), DomainError);
    EXPECT_THROW(mittag_leffler(-1.0, {.alpha = 0.5, .tol = 0.0}), DomainError);
    EXPECT_THROW(mittag_leffler(-9.0, {.alpha = 0.5, .tol = 1e-12, .max_terms = 5}), ConvergenceError);
}
