#pragma once

/// @file ml_special.hpp
/// @brief Gamma function helpers and the one-parameter Mittag-Leffler function
///
///     E_α(z) = Σ_{k≥0} z^k / Γ(αk + 1)
///
/// Evaluated by its power series only, which is adequate for |z| ≤ 10 at the
/// orders used here. Terms are formed in log space so Γ(αk+1) never overflows,
/// and everything is accumulated in long double with Neumaier compensation
/// because the series alternates for negative z.

#include "fadr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

namespace fadr {

/// Γ(x) for x > 0.
inline double gamma_fn(double x) {
    if (!(x > 0.0)) {
        throw DomainError("gamma_fn: argument must be positive, got " + std::to_string(x));
    }
    return std::tgamma(x);
}

/// Γ(2 − α), the normalisation constant of the L1 scheme.
inline double gamma_two_minus(double alpha) { return gamma_fn(2.0 - alpha); }

struct MLParams {
    double alpha = 1.0;
    double tol = 1e-12;
    std::size_t max_terms = 200;

    void validate() const {
        if (!(alpha > 0.0)) throw DomainError("MLParams: alpha must be > 0");
        if (!(tol > 0.0)) throw DomainError("MLParams: tol must be > 0");
        if (max_terms < 1) throw DomainError("MLParams: max_terms must be >= 1");
    }
};

/// Largest |z| for which the series evaluation is considered reliable.
inline constexpr double kMittagLefflerSeriesLimit = 10.0;

namespace detail {

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(long double term) noexcept {
        const long double t = sum_ + term;
        if (std::abs(sum_) >= std::abs(term)) {
            comp_ += (sum_ - t) + term;
        } else {
            comp_ += (term - t) + sum_;
        }
        sum_ = t;
    }
    long double value() const noexcept { return sum_ + comp_; }

private:
    long double sum_ = 0.0L;
    long double comp_ = 0.0L;
};

}  // namespace detail

/// E_α(z) by truncated power series.
///
/// log|term_k| is concave in k, so once the terms decrease the ratio
/// ρ = |term_k/term_{k−1}| bounds every later ratio and the tail is at most
/// |term_k|/(1 − ρ). Summation stops when that bound drops below tol/2.
///
/// For negative z the partial sums cancel; the rounding error grows like
/// ε·max_k|term_k|. When that estimate exceeds tol the requested accuracy
/// cannot be met and a NumericalError is thrown instead of a wrong value.
inline double mittag_leffler(double z, const MLParams& p = {}) {
    p.validate();
    if (!(std::abs(z) <= kMittagLefflerSeriesLimit)) {
        throw DomainError("mittag_leffler: |z| = " + std::to_string(std::abs(z)) +
                          " outside the series regime |z| <= 10");
    }
    if (z == 0.0) return 1.0;

    using ld = long double;
    const ld log_abs_z = std::log(static_cast<ld>(std::abs(z)));
    const ld alpha = p.alpha;
    const bool negative = z < 0.0;

    detail::CompensatedSum sum;
    sum.add(1.0L);  // k = 0
    ld prev_mag = 1.0L;
    ld max_mag = 1.0L;
    for (std::size_t k = 1; k <= p.max_terms; ++k) {
        const ld kd = static_cast<ld>(k);
        const ld mag = std::exp(kd * log_abs_z - std::lgamma(alpha * kd + 1.0L));
        const ld ratio = mag / prev_mag;
        if (ratio < 1.0L && mag / (1.0L - ratio) < 0.5L * static_cast<ld>(p.tol)) {
            const ld rounding = 4.0L * std::numeric_limits<ld>::epsilon() * max_mag;
            if (negative && rounding > static_cast<ld>(p.tol)) {
                throw NumericalError("mittag_leffler: cancellation error estimate " +
                                         std::to_string(static_cast<double>(rounding)) +
                                         " exceeds tol at z = " + std::to_string(z),
                                     k);
            }
            return static_cast<double>(sum.value());
        }
        sum.add((negative && (k % 2 == 1)) ? -mag : mag);
        prev_mag = mag;
        max_mag = std::max(max_mag, mag);
    }
    throw ConvergenceError("mittag_leffler: series did not converge within max_terms", p.max_terms,
                           static_cast<double>(prev_mag));
}

}  // namespace fadr
