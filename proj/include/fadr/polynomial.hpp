#pragma once

/// @file polynomial.hpp
/// @brief All roots of a complex polynomial by Aberth–Ehrlich iteration.
///
/// Coefficients are ordered highest degree first: a_0 z^n + a_1 z^{n−1} + … + a_n.

#include "fadr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace fadr {

using cplx = std::complex<double>;

struct RootOptions {
    /// Relative step size below which a root is considered converged.
    double tol = 1e-13;
    std::size_t max_iters = 1000;
    /// Accepted |p(z)| relative to max|a_k|·max(1, |z|)^n.
    double residual_tol = 1e-8;
};

/// Horner evaluation of p at z.
inline cplx poly_eval(std::span<const cplx> a, cplx z) {
    cplx v = 0.0;
    for (const cplx& c : a) v = v * z + c;
    return v;
}

namespace detail {

/// Newton ratio p(z)/p'(z). Outside the unit disc the reversed polynomial is
/// used so that Horner never sees z^n overflow.
inline cplx newton_ratio(std::span<const cplx> a, cplx z) {
    const std::size_t n = a.size() - 1;
    if (std::abs(z) <= 1.0) {
        cplx p = 0.0, dp = 0.0;
        for (const cplx& c : a) {
            dp = dp * z + p;
            p = p * z + c;
        }
        return p / dp;
    }
    // p(z) = z^n q(w), w = 1/z, q has the coefficients reversed
    const cplx w = 1.0 / z;
    cplx q = 0.0, dq = 0.0;
    for (std::size_t k = a.size(); k-- > 0;) {
        dq = dq * w + q;
        q = q * w + a[k];
    }
    // p'/p = w (n − w q'/q)
    const cplx inv = w * (static_cast<double>(n) - w * dq / q);
    return 1.0 / inv;
}

}  // namespace detail

/// Scaled residual |p(z)| / (max|a_k| · max(1, |z|)^n).
inline double poly_relative_residual(std::span<const cplx> a, cplx z) {
    double amax = 0.0;
    for (const cplx& c : a) amax = std::max(amax, std::abs(c));
    if (std::abs(z) <= 1.0) return std::abs(poly_eval(a, z)) / amax;
    // evaluate z^{−n} p(z) through the reversed coefficients
    const cplx w = 1.0 / z;
    cplx q = 0.0;
    for (std::size_t k = a.size(); k-- > 0;) q = q * w + a[k];
    return std::abs(q) / amax;
}

/// All roots of the polynomial with coefficients `coeffs`.
///
/// Leading zero coefficients are dropped; trailing zeros become roots at 0.
/// The first n entries of `initial` (n = degree after stripping) seed the
/// iteration when present, which makes tracking roots along a parameter cheap.
inline std::vector<cplx> polynomial_roots(std::span<const cplx> coeffs, const RootOptions& opt = {},
                                          std::span<const cplx> initial = {}) {
    std::size_t lead = 0;
    while (lead < coeffs.size() && coeffs[lead] == cplx(0.0)) ++lead;
    if (lead == coeffs.size()) {
        throw RootFindingError("polynomial_roots: all coefficients are zero",
                               std::vector<cplx>(coeffs.begin(), coeffs.end()));
    }
    std::size_t end = coeffs.size();
    std::size_t zeros = 0;
    while (end > lead + 1 && coeffs[end - 1] == cplx(0.0)) {
        --end;
        ++zeros;
    }
    const std::vector<cplx> a(coeffs.begin() + static_cast<std::ptrdiff_t>(lead),
                              coeffs.begin() + static_cast<std::ptrdiff_t>(end));
    for (const cplx& c : a) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
            throw RootFindingError("polynomial_roots: non-finite coefficient",
                                   std::vector<cplx>(coeffs.begin(), coeffs.end()));
        }
    }
    const std::size_t n = a.size() - 1;

    std::vector<cplx> z;
    if (n == 1) {
        z.push_back(-a[1] / a[0]);
    } else if (n > 1) {
        if (initial.size() >= n) {
            z.assign(initial.begin(), initial.begin() + static_cast<std::ptrdiff_t>(n));
        } else {
            // circle whose radius is the geometric mean of the root moduli
            const double radius = std::pow(std::abs(a[n] / a[0]), 1.0 / static_cast<double>(n));
            const double r = radius > 0.0 && std::isfinite(radius) ? radius : 1.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n) + 0.4;
                z.push_back(std::polar(r, ang));
            }
        }
        std::vector<bool> done(n, false);
        std::size_t remaining = n;
        std::size_t it = 0;
        for (; it < opt.max_iters && remaining > 0; ++it) {
            for (std::size_t i = 0; i < n; ++i) {
                if (done[i]) continue;
                const cplx ratio = detail::newton_ratio(a, z[i]);
                if (!std::isfinite(ratio.real()) || !std::isfinite(ratio.imag())) {
                    // z[i] sits exactly on a root (p = 0, p' ≠ 0 gives ratio 0;
                    // 0/0 means a repeated root at z[i])
                    done[i] = true;
                    --remaining;
                    continue;
                }
                cplx s = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                    if (j != i) s += 1.0 / (z[i] - z[j]);
                const cplx w = ratio / (1.0 - ratio * s);
                z[i] -= w;
                if (std::abs(w) <= opt.tol * std::max(std::abs(z[i]), 1e-300)) {
                    done[i] = true;
                    --remaining;
                }
            }
        }
        if (remaining > 0) {
            // a final residual check decides whether the stalled roots are usable
            for (std::size_t i = 0; i < n; ++i) {
                if (!done[i] && poly_relative_residual(a, z[i]) > opt.residual_tol) {
                    throw RootFindingError("polynomial_roots: Aberth iteration did not converge in " +
                                               std::to_string(opt.max_iters) + " iterations",
                                           std::vector<cplx>(coeffs.begin(), coeffs.end()));
                }
            }
        }
        for (const cplx& root : z) {
            if (poly_relative_residual(a, root) > opt.residual_tol) {
                throw RootFindingError("polynomial_roots: residual contract violated",
                                       std::vector<cplx>(coeffs.begin(), coeffs.end()));
            }
        }
    }
    z.insert(z.end(), zeros, cplx(0.0));
    return z;
}

}  // namespace fadr
