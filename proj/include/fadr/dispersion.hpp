#pragma once

/// @file dispersion.hpp
/// @brief Fourier analysis of the 1D linear θ-L1 scheme with UD3 advection.
///
/// Substituting u_j^n = G^n e^{I j kh} into the discrete equation gives the
/// degree-n amplification polynomial
///
///     C0 G^n + C1 G^{n−1} + Σ_{j=2}^{n} r_j (G^{n−j+1} − G^{n−j}) = 0
///
/// with r_j = j^{1−α} − (j−1)^{1−α}. The physical root is the one connected
/// to G = 1 at kh = 0, followed by nearest-root continuation in kh. Phase
/// speed and group velocity of that root are compared against the exact
/// dispersion relation −Iω Δt = (Da N_c − kh² Pe − I kh N_c)^{1/α}.

#include "fadr/errors.hpp"
#include "fadr/ml_special.hpp"
#include "fadr/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fadr {

struct SampleRange {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;

    std::vector<double> values() const {
        std::vector<double> v;
        if (count == 0) return v;
        if (count == 1) return {lo};
        for (std::size_t k = 0; k < count; ++k)
            v.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1));
        return v;
    }
};

struct SpectralParams {
    double alpha = 0.9;
    double theta = 0.5;
    double Pe = 0.0;
    double Da = 0.0;
    double q = 0.5;
    std::size_t n_poly = 75;
    SampleRange kh_range{0.0, std::numbers::pi, 0};
    SampleRange Nc_range{0.0, 1.0, 0};
    /// Largest kh increment of the root continuation.
    double continuation_step = 0.01;
    /// Half-width of the central difference for dβ/d(kh).
    double dkh = 1e-4;
    RootOptions roots;

    void validate() const {
        if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("SpectralParams: alpha must be in (0, 1]");
        if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("SpectralParams: theta must be in [0, 1]");
        if (n_poly < 2) throw DomainError("SpectralParams: n_poly must be >= 2");
        if (q != 0.0 && q != 0.5) throw DomainError("SpectralParams: q must be 0 or 0.5");
        if (!(Pe >= 0.0)) throw DomainError("SpectralParams: Pe must be >= 0");
        if (!(continuation_step > 0.0) || !(dkh > 0.0)) throw DomainError("SpectralParams: steps must be > 0");
    }
};

/// Reduces kh to (−π, π].
inline double canonical_kh(double kh) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double k = std::remainder(kh, two_pi);
    if (k <= -std::numbers::pi) k += two_pi;
    return k;
}

/// r_j = j^{1−α} − (j−1)^{1−α} for j = 1 … n (index j−1).
inline std::vector<double> memory_weights(double alpha, std::size_t n) {
    std::vector<double> r(n);
    const double p = 1.0 - alpha;
    for (std::size_t j = 1; j <= n; ++j) {
        const double jd = static_cast<double>(j);
        r[j - 1] = j == 1 ? 1.0 : std::pow(jd - 1.0, p) * std::expm1(p * std::log1p(1.0 / (jd - 1.0)));
    }
    return r;
}

struct DispersionCoefficients {
    cplx C0, C1;
    /// Polynomial coefficients, highest power first.
    std::vector<cplx> poly;
};

inline DispersionCoefficients dispersion_coefficients(const SpectralParams& p, double kh, double Nc) {
    const double g = gamma_two_minus(p.alpha);
    const double c = std::cos(kh), c2 = std::cos(2.0 * kh);
    const double s = std::sin(kh), s2 = std::sin(2.0 * kh);
    DispersionCoefficients d;
    d.C0 = 1.0 + 2.0 * p.Pe * p.theta * g * (1.0 - c);
    const double re = -1.0 + p.q * Nc * g * (1.0 - 4.0 / 3.0 * c + c2 / 3.0) +
                      2.0 * p.Pe * (1.0 - p.theta) * g * (1.0 - c) - p.Da * Nc * g;
    const double im = Nc * g * (s + 2.0 * p.q / 3.0 * s - p.q / 3.0 * s2);
    d.C1 = cplx(re, im);

    const std::size_t n = p.n_poly;
    const auto r = memory_weights(p.alpha, n);
    d.poly.assign(n + 1, cplx(0.0));
    d.poly[0] = d.C0;
    d.poly[1] = d.C1 + r[1];
    for (std::size_t m = 2; m < n; ++m) d.poly[m] = r[m] - r[m - 1];
    d.poly[n] = -r[n - 1];
    return d;
}

/// Stability multipliers of the round-off recursion μ1 ξ_n = μ2 ξ_{n−1} − Σ…
/// (μ1 = C0, μ2 = −C1).
struct Multipliers {
    cplx mu1, mu2;
};

inline Multipliers stability_multipliers(const SpectralParams& p, double kh, double Nc) {
    const auto d = dispersion_coefficients(p, kh, Nc);
    return {d.C0, -d.C1};
}

struct RootSet {
    std::vector<cplx> roots;
    cplx selected;
    double kh = 0.0;
};

namespace detail {

inline std::size_t nearest(const std::vector<cplx>& roots, cplx target) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < roots.size(); ++k)
        if (std::abs(roots[k] - target) < std::abs(roots[best] - target)) best = k;
    return best;
}

inline RootSet solve_near(const SpectralParams& p, double kh, double Nc, cplx target,
                          const std::vector<cplx>& seed) {
    const auto d = dispersion_coefficients(p, kh, Nc);
    RootSet rs;
    rs.kh = kh;
    rs.roots = polynomial_roots(d.poly, p.roots, seed);
    rs.selected = rs.roots[nearest(rs.roots, target)];
    return rs;
}

}  // namespace detail

/// Follows the physical root from kh = 0 to a target kh in small steps.
class RootTracker {
public:
    RootTracker(const SpectralParams& p, double Nc) : p_(p), Nc_(Nc) { reset(); }

    void reset() { state_ = detail::solve_near(p_, 0.0, Nc_, cplx(1.0), {}); }

    const RootSet& state() const noexcept { return state_; }

    /// Moves to kh (canonical). Restarts from 0 when the target lies on the
    /// other side of 0 or behind the current position.
    const RootSet& advance(double kh) {
        kh = canonical_kh(kh);
        const double cur = state_.kh;
        const bool same_side = (kh >= 0.0 && cur >= 0.0) || (kh <= 0.0 && cur <= 0.0);
        if (!same_side || std::abs(kh) < std::abs(cur)) reset();
        const double start = state_.kh;
        const double span = kh - start;
        const auto steps = static_cast<std::size_t>(std::ceil(std::abs(span) / p_.continuation_step));
        for (std::size_t s = 1; s <= steps; ++s) {
            const double k = start + span * static_cast<double>(s) / static_cast<double>(steps);
            state_ = detail::solve_near(p_, k, Nc_, state_.selected, state_.roots);
        }
        return state_;
    }

private:
    SpectralParams p_;
    double Nc_;
    RootSet state_;
};

/// All n_poly roots at (kh, Nc) and the continuation-selected G_num.
inline RootSet amplification_roots(const SpectralParams& p, double kh, double Nc) {
    p.validate();
    RootTracker t(p, Nc);
    return t.advance(kh);
}

/// (Da N_c − kh² Pe − I kh N_c)^{1/α}, principal branch; equals −Iω_exact Δt.
inline cplx exact_dispersion(const SpectralParams& p, double kh, double Nc) {
    const cplx y(p.Da * Nc - kh * kh * p.Pe, -kh * Nc);
    return std::pow(y, 1.0 / p.alpha);
}

struct PhaseSpeed {
    double beta = 0.0;
    cplx c_ratio;
    double delta_c = std::numeric_limits<double>::quiet_NaN();
    bool singular = false;
};

/// β = arg G and c_num/c_exact = Iβ / (Da N_c − kh² Pe − I kh N_c)^{1/α}.
inline PhaseSpeed phase_speed_ratio(const SpectralParams& p, double kh, double Nc, cplx G) {
    PhaseSpeed ps;
    ps.beta = std::atan2(G.imag(), G.real());
    kh = canonical_kh(kh);
    const cplx w = exact_dispersion(p, kh, Nc);
    if (kh == 0.0 || std::abs(w) == 0.0) {
        ps.singular = true;
        ps.c_ratio = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
        return ps;
    }
    ps.c_ratio = cplx(0.0, ps.beta) / w;
    ps.delta_c = std::abs(1.0 - ps.c_ratio);
    return ps;
}

struct GroupVelocity {
    double ratio = std::numeric_limits<double>::quiet_NaN();
    double dbeta_dkh = 0.0;
    /// β jumped across the ±π branch cut inside the difference stencil.
    bool branch_crossing = false;
};

/// Numerical over exact group velocity,
///
///     −α dβ/d(kh) / ( |w|^{1−α} [N_c cos((1−α)φ) + 2 kh Pe sin((1−α)φ)] ),  w = r e^{Iφ}
///
/// where w is the exact −IωΔt and dβ/d(kh) is a central difference of the
/// tracked root's phase.
inline GroupVelocity group_velocity_ratio(const SpectralParams& p, double kh, double Nc, const RootSet& at) {
    kh = canonical_kh(kh);
    const double beta0 = std::arg(at.selected);
    const RootSet plus = detail::solve_near(p, kh + p.dkh, Nc, at.selected, at.roots);
    const RootSet minus = detail::solve_near(p, kh - p.dkh, Nc, at.selected, at.roots);
    double bp = std::arg(plus.selected), bm = std::arg(minus.selected);
    GroupVelocity gv;
    const double pi = std::numbers::pi;
    auto unwrap = [&](double b) {
        const double d = b - beta0;
        if (d > pi) {
            gv.branch_crossing = true;
            return b - 2.0 * pi;
        }
        if (d < -pi) {
            gv.branch_crossing = true;
            return b + 2.0 * pi;
        }
        return b;
    };
    bp = unwrap(bp);
    bm = unwrap(bm);
    gv.dbeta_dkh = (bp - bm) / (2.0 * p.dkh);

    const cplx w = exact_dispersion(p, kh, Nc);
    const double r = std::abs(w);
    const double phi = std::arg(w);
    const double a = p.alpha;
    const double denom = std::pow(r, 1.0 - a) * (Nc * std::cos((1.0 - a) * phi) + 2.0 * kh * p.Pe * std::sin((1.0 - a) * phi));
    gv.ratio = -a * gv.dbeta_dkh / denom;
    return gv;
}

struct DispersionPoint {
    double kh = 0.0;
    double Nc = 0.0;
    cplx G_num;
    double beta = 0.0;
    cplx c_ratio;
    double delta_c = 0.0;
    double Vg_ratio = 0.0;
    cplx C0, C1;
    cplx mu1, mu2;
    bool singular = false;
    bool branch_crossing = false;
    bool failed = false;
    std::string failure;
    bool favorable = false;
};

/// Favorable spectral behaviour: V_g > 0 and Δc ≤ 0.1, on regular points only.
inline bool is_favorable(const DispersionPoint& d) {
    return !d.failed && !d.singular && !d.branch_crossing && d.Vg_ratio > 0.0 && d.delta_c <= 0.1;
}

inline DispersionPoint evaluate_point(const SpectralParams& p, double kh, double Nc, const RootSet& at) {
    DispersionPoint d;
    d.kh = kh;
    d.Nc = Nc;
    const auto co = dispersion_coefficients(p, canonical_kh(kh), Nc);
    d.C0 = co.C0;
    d.C1 = co.C1;
    d.mu1 = co.C0;
    d.mu2 = -co.C1;
    d.G_num = at.selected;
    const auto ps = phase_speed_ratio(p, kh, Nc, at.selected);
    d.beta = ps.beta;
    d.c_ratio = ps.c_ratio;
    d.delta_c = ps.delta_c;
    d.singular = ps.singular;
    if (!d.singular) {
        const auto gv = group_velocity_ratio(p, kh, Nc, at);
        d.Vg_ratio = gv.ratio;
        d.branch_crossing = gv.branch_crossing;
    } else {
        d.Vg_ratio = std::numeric_limits<double>::quiet_NaN();
    }
    d.favorable = is_favorable(d);
    return d;
}

inline DispersionPoint evaluate_point(const SpectralParams& p, double kh, double Nc) {
    return evaluate_point(p, kh, Nc, amplification_roots(p, kh, Nc));
}

/// Dense (N_c, kh) table. Each N_c row is swept in increasing |kh| so the
/// root continuation is shared along the row; failed points are kept with
/// their error message and never marked favorable.
inline std::vector<DispersionPoint> contour_scan(const SpectralParams& p) {
    p.validate();
    std::vector<DispersionPoint> out;
    const auto khs = p.kh_range.values();
    const auto ncs = p.Nc_range.values();
    for (double Nc : ncs) {
        std::vector<DispersionPoint> row(khs.size());
        std::vector<std::size_t> order(khs.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return std::abs(canonical_kh(khs[a])) < std::abs(canonical_kh(khs[b]));
        });
        std::optional<RootTracker> tracker;
        for (std::size_t k : order) {
            try {
                if (!tracker) tracker.emplace(p, Nc);
                const RootSet& rs = tracker->advance(khs[k]);
                row[k] = evaluate_point(p, khs[k], Nc, rs);
            } catch (const RootFindingError& e) {
                row[k] = DispersionPoint{};
                row[k].kh = khs[k];
                row[k].Nc = Nc;
                row[k].failed = true;
                row[k].failure = e.what();
                tracker.reset();
            }
        }
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

inline void write_dispersion_csv(std::ostream& os, const SpectralParams& p, const std::vector<DispersionPoint>& pts) {
    os << "alpha,theta,Pe,Da,Nc,kh,ReG,ImG,beta,delta_c,Vg_ratio,favorable\n";
    os << std::setprecision(17);
    for (const auto& d : pts) {
        os << p.alpha << ',' << p.theta << ',' << p.Pe << ',' << p.Da << ',' << d.Nc << ',' << d.kh << ','
           << d.G_num.real() << ',' << d.G_num.imag() << ',' << d.beta << ',' << d.delta_c << ','
           << d.Vg_ratio << ',' << (d.favorable ? 1 : 0) << '\n';
    }
}

enum class XiFraming { magnitude, complex };

/// Round-off amplitudes of μ1 ξ_n = μ2 ξ_{n−1} − Σ_{j=2}^{n} r_j (ξ_{n−j+1} − ξ_{n−j}),
/// ξ_0 = 1. The magnitude framing uses |μ1|, |μ2| on real amplitudes; the
/// complex framing runs the Fourier recurrence and reports |ξ_n|.
inline std::vector<double> xi_recursion(const SpectralParams& p, double kh, double Nc, std::size_t n_steps,
                                        XiFraming framing = XiFraming::magnitude) {
    p.validate();
    const auto m = stability_multipliers(p, canonical_kh(kh), Nc);
    const auto r = memory_weights(p.alpha, n_steps + 1);
    const bool mag = framing == XiFraming::magnitude;
    const cplx mu1 = mag ? cplx(std::abs(m.mu1)) : m.mu1;
    const cplx mu2 = mag ? cplx(std::abs(m.mu2)) : m.mu2;

    std::vector<cplx> xi(n_steps + 1), diff(n_steps + 1);
    xi[0] = 1.0;
    for (std::size_t n = 1; n <= n_steps; ++n) {
        cplx s = 0.0;
        for (std::size_t j = 2; j <= n; ++j) s += r[j - 1] * diff[n - j + 1];
        xi[n] = (mu2 * xi[n - 1] - s) / mu1;
        diff[n] = xi[n] - xi[n - 1];
    }
    std::vector<double> out(n_steps + 1);
    for (std::size_t n = 0; n <= n_steps; ++n) out[n] = mag ? xi[n].real() : std::abs(xi[n]);
    return out;
}

/// |μ1| ≥ 1 and |μ2| ≤ 1.
inline bool stability_hypotheses_hold(const SpectralParams& p, double kh, double Nc) {
    const auto m = stability_multipliers(p, canonical_kh(kh), Nc);
    return std::abs(m.mu1) >= 1.0 && std::abs(m.mu2) <= 1.0;
}

}  // namespace fadr
