#pragma once

/// @file channel.hpp
/// @brief Fractional viscoelastic channel flow in streamfunction–vorticity form:
///
///     Re[∂^αΩ/∂t^α + v·∇Ω] = ν∇²Ω + (1−ν)∇×∇·(A + F)
///     ∇²Ψ = −Ω,  (u, v) = (∂Ψ/∂y, −∂Ψ/∂x)
///     ∂^αA/∂t^α + v·∇A − LᵀA − AL = (D − A)/We
///
/// on [0, L]×[0, 1], periodic in x, walls at y = 0 and y = 1. L_ij = ∂v_i/∂x_j,
/// D = L + Lᵀ and F = μ/(1−ν)·Re(E Eᵀ), E = exp(t L^{1/α}).

#include "fadr/caputo.hpp"
#include "fadr/errors.hpp"
#include "fadr/grid.hpp"
#include "fadr/linsolve.hpp"
#include "fadr/stencil.hpp"
#include "fadr/theta_fadr.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace fadr {

struct ChannelParams {
    double Re = 70.0;
    double We = 10.0;
    double nu = 0.3;
    double mu = 1e-2;
    double alpha = 0.5;

    void validate() const {
        if (!(Re > 0.0)) throw DomainError("ChannelParams: Re must be > 0");
        if (!(We > 0.0)) throw DomainError("ChannelParams: We must be > 0");
        if (!(nu > 0.0 && nu < 1.0)) throw DomainError("ChannelParams: nu must be in (0, 1)");
        if (!(mu >= 0.0)) throw DomainError("ChannelParams: mu must be >= 0");
        if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("ChannelParams: alpha must be in (0, 1]");
    }

    /// Rouse chain melt, α = 1/2.
    static ChannelParams rouse(double Re, double nu) { return {Re, 10.0, nu, 1e-2, 0.5}; }
    /// Zimm chain solution, α = 2/3.
    static ChannelParams zimm(double Re, double nu) { return {Re, 10.0, nu, 1e-2, 2.0 / 3.0}; }
};

enum class WallVorticity {
    /// Ω_w = −(8Ψ₁ − Ψ₂ − 7Ψ_w)/(2Δy²), exact for cubic Ψ.
    jensen,
    /// Ω_w = −2(Ψ₁ − Ψ_w)/Δy², first order on curved profiles.
    thom
};

struct ChannelBCs {
    double psi_lower = 0.0;
    double psi_upper = 1.0 / 6.0;
    WallVorticity wall_vorticity = WallVorticity::jensen;

    void validate() const {
        if (!std::isfinite(psi_lower) || !std::isfinite(psi_upper)) {
            throw DomainError("ChannelBCs: wall streamfunction values must be finite");
        }
    }
};

/// 76×51 points on [0, 5]×[0, 1], periodic in x, walls in y.
inline Grid2D channel_grid(std::size_t nx = 76, std::size_t ny = 51, double length = 5.0) {
    return Grid2D::make(nx, ny, 0.0, length, 0.0, 1.0,
                        {BoundaryKind::periodic, BoundaryKind::periodic, BoundaryKind::dirichlet,
                         BoundaryKind::dirichlet});
}

/// Velocity gradient L_ij = ∂v_i/∂x_j per point.
struct VelocityGradient {
    Field ux, uy, vx, vy;
};

struct FieldState {
    double t = 0.0;
    Field omega, psi, u, v;
    /// A12 doubles as A21.
    Field A11, A12, A22;
    /// Finger tensor of the last finger_force call (symmetric).
    Field F11, F12, F22;
    VelocityGradient grad;
};

// ----------------------------------------------------------------------------
// Finger tensor

struct Mat2c {
    std::complex<double> a, b, c, d;  ///< [[a, b], [c, d]]
};

struct FingerTensor {
    double F11 = 0.0, F12 = 0.0, F22 = 0.0;
    /// Largest |Im| discarded when taking the real part of E Eᵀ.
    double imag_residue = 0.0;
    /// G had a (numerically) repeated eigenvalue and the Jordan-form power was used.
    bool defective = false;
};

namespace detail {

inline Mat2c mat_mul(const Mat2c& x, const Mat2c& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

/// Principal power G^p for p ≥ 1 through the divided-difference form of the
/// eigendecomposition: G^p = λ₂^p I + f[λ₁, λ₂](G − λ₂ I). When the eigenvalues
/// coincide the divided difference becomes the derivative p λ^{p−1}.
inline Mat2c matrix_power(double g11, double g12, double g21, double g22, double p, bool& defective) {
    using C = std::complex<double>;
    const C half_tr = 0.5 * (g11 + g22);
    const C det = g11 * g22 - g12 * g21;
    const C root = std::sqrt(half_tr * half_tr - det);
    const C l1 = half_tr + root, l2 = half_tr - root;
    const double scale = std::max({std::abs(g11), std::abs(g12), std::abs(g21), std::abs(g22)});
    auto f = [p](C z) { return z == C(0.0) ? C(0.0) : std::pow(z, p); };

    C dd;
    defective = std::abs(l1 - l2) <= 1e-7 * scale;
    if (defective) {
        const C lam = 0.5 * (l1 + l2);
        dd = lam == C(0.0) ? C(p == 1.0 ? 1.0 : 0.0) : p * std::pow(lam, p - 1.0);
    } else {
        dd = (f(l1) - f(l2)) / (l1 - l2);
    }
    const C f2 = f(l2);
    return {f2 + dd * (g11 - l2), dd * g12, dd * g21, f2 + dd * (g22 - l2)};
}

/// exp(P) = e^s [cosh(q) I + sinh(q)/q (P − sI)], s = tr/2, q² = s² − det.
inline Mat2c matrix_exp(const Mat2c& P) {
    using C = std::complex<double>;
    const C s = 0.5 * (P.a + P.d);
    const C q = std::sqrt(s * s - (P.a * P.d - P.b * P.c));
    const C ch = std::cosh(q);
    const C sh = std::abs(q) < 1e-5 ? C(1.0) + q * q / 6.0 : std::sinh(q) / q;
    const C es = std::exp(s);
    return {es * (ch + sh * (P.a - s)), es * sh * P.b, es * sh * P.c, es * (ch + sh * (P.d - s))};
}

}  // namespace detail

/// F = μ/(1−ν)·Re(E Eᵀ) with E = exp(t G^{1/α}) for one velocity gradient G.
inline FingerTensor finger_tensor(double g11, double g12, double g21, double g22, double alpha, double mu,
                                  double nu, double t) {
    FingerTensor out;
    const double k = mu / (1.0 - nu);
    if (t == 0.0 || (g11 == 0.0 && g12 == 0.0 && g21 == 0.0 && g22 == 0.0)) {
        out.F11 = out.F22 = k;
        return out;
    }
    Mat2c P = detail::matrix_power(g11, g12, g21, g22, 1.0 / alpha, out.defective);
    P = {t * P.a, t * P.b, t * P.c, t * P.d};
    const Mat2c E = detail::matrix_exp(P);
    const Mat2c Et{E.a, E.c, E.b, E.d};
    const Mat2c EEt = detail::mat_mul(E, Et);
    out.F11 = k * EEt.a.real();
    out.F12 = k * 0.5 * (EEt.b.real() + EEt.c.real());
    out.F22 = k * EEt.d.real();
    out.imag_residue = k * std::max({std::abs(EEt.a.imag()), std::abs(EEt.b.imag()), std::abs(EEt.d.imag())});
    return out;
}

// ----------------------------------------------------------------------------
// Discrete operators on the channel grid

namespace detail {

/// Central differences with periodic x (column nx−1 duplicates column 0).
struct ChannelStencil {
    const Grid2D& g;

    std::size_t period() const noexcept { return g.nx - 1; }
    std::size_t ip(std::size_t i) const noexcept { return (i + 1) % period(); }
    std::size_t im(std::size_t i) const noexcept { return (i + period() - 1) % period(); }

    double dx(const Field& f, std::size_t i, std::size_t j) const {
        return (f(ip(i), j) - f(im(i), j)) / (2.0 * g.dx);
    }
    double dy(const Field& f, std::size_t i, std::size_t j) const {
        return (f(i, j + 1) - f(i, j - 1)) / (2.0 * g.dy);
    }
    double dxx(const Field& f, std::size_t i, std::size_t j) const {
        return (f(ip(i), j) - 2.0 * f(i, j) + f(im(i), j)) / (g.dx * g.dx);
    }
    double dyy(const Field& f, std::size_t i, std::size_t j) const {
        return (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) / (g.dy * g.dy);
    }
    double dxy(const Field& f, std::size_t i, std::size_t j) const {
        return (f(ip(i), j + 1) - f(im(i), j + 1) - f(ip(i), j - 1) + f(im(i), j - 1)) / (4.0 * g.dx * g.dy);
    }
};

inline void copy_periodic_column(const Grid2D& g, Field& f) {
    for (std::size_t j = 0; j < g.ny; ++j) f(g.nx - 1, j) = f(0, j);
}

}  // namespace detail

/// Discrete ∇×∇·S for a symmetric tensor S: ∂xx S12 − ∂yy S12 + ∂xy (S22 − S11).
/// Zero on wall rows, where vorticity comes from the wall condition.
inline Field curl_div(const Grid2D& g, const Field& S11, const Field& S12, const Field& S22) {
    const detail::ChannelStencil st{g};
    Field out(g);
    Field diff = S22 - S11;
    for (std::size_t j = 1; j + 1 < g.ny; ++j) {
        for (std::size_t i = 0; i + 1 < g.nx; ++i)
            out(i, j) = st.dxx(S12, i, j) - st.dyy(S12, i, j) + st.dxy(diff, i, j);
    }
    detail::copy_periodic_column(g, out);
    return out;
}

/// Ω = 2y − 1 of the Poiseuille base state.
inline Field base_vorticity(const Grid2D& g) {
    return Field::from_function(g, [](double, double y) { return 2.0 * y - 1.0; });
}

/// max|Ω − Ω_base| over all points.
inline double structure_intensity(const Grid2D& g, const Field& omega) {
    require_shape(g, omega, "structure_intensity");
    double m = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j)
        for (std::size_t i = 0; i < g.nx; ++i) m = std::max(m, std::abs(omega(i, j) - (2.0 * g.y(j) - 1.0)));
    return m;
}

/// Wall vorticity from the near-wall streamfunction (no-slip walls).
inline void update_wall_vorticity(const Grid2D& g, const ChannelBCs& bcs, const Field& psi, Field& omega) {
    const double h2 = g.dy * g.dy;
    const std::size_t N = g.ny - 1;
    for (std::size_t i = 0; i < g.nx; ++i) {
        if (bcs.wall_vorticity == WallVorticity::jensen) {
            omega(i, 0) = -(8.0 * psi(i, 1) - psi(i, 2) - 7.0 * psi(i, 0)) / (2.0 * h2);
            omega(i, N) = -(8.0 * psi(i, N - 1) - psi(i, N - 2) - 7.0 * psi(i, N)) / (2.0 * h2);
        } else {
            omega(i, 0) = -2.0 * (psi(i, 1) - psi(i, 0)) / h2;
            omega(i, N) = -2.0 * (psi(i, N - 1) - psi(i, N)) / h2;
        }
    }
}

/// Velocities by central differences of Ψ and the velocity gradient by second
/// differences of Ψ (so ∂u/∂x + ∂v/∂y = 0 exactly). Walls: u = v = 0, only
/// ∂u/∂y = −Ω_wall survives.
inline void update_kinematics(const Grid2D& g, FieldState& s) {
    const detail::ChannelStencil st{g};
    const std::size_t N = g.ny - 1;
    s.u = Field(g);
    s.v = Field(g);
    s.grad = {Field(g), Field(g), Field(g), Field(g)};
    for (std::size_t j = 1; j < N; ++j) {
        for (std::size_t i = 0; i + 1 < g.nx; ++i) {
            s.u(i, j) = st.dy(s.psi, i, j);
            s.v(i, j) = -st.dx(s.psi, i, j);
            const double pxy = st.dxy(s.psi, i, j);
            s.grad.ux(i, j) = pxy;
            s.grad.uy(i, j) = st.dyy(s.psi, i, j);
            s.grad.vx(i, j) = -st.dxx(s.psi, i, j);
            s.grad.vy(i, j) = -pxy;
        }
    }
    for (std::size_t i = 0; i + 1 < g.nx; ++i) {
        s.grad.uy(i, 0) = -s.omega(i, 0);
        s.grad.uy(i, N) = -s.omega(i, N);
    }
    for (Field* f : {&s.u, &s.v, &s.grad.ux, &s.grad.uy, &s.grad.vx, &s.grad.vy}) detail::copy_periodic_column(g, *f);
}

struct PoissonReport {
    std::size_t iterations = 0;
    double residual = 0.0;
};

/// Solves ∇²Ψ = −Ω with the wall constants as Dirichlet data (Ψ warm-starts
/// from its current values), then refreshes wall vorticity and kinematics.
inline PoissonReport solve_streamfunction(const Grid2D& g, const ChannelBCs& bcs, FieldState& s,
                                          const GSConfig& gs = {1e-10, 0}) {
    Field guess = s.psi;
    for (std::size_t i = 0; i < g.nx; ++i) {
        guess(i, 0) = bcs.psi_lower;
        guess(i, g.ny - 1) = bcs.psi_upper;
    }
    Field rhs = -1.0 * s.omega;
    GSResult r = gauss_seidel(BlockDiagSpec::poisson(g), rhs, guess, gs);
    s.psi = std::move(r.x);
    update_wall_vorticity(g, bcs, s.psi, s.omega);
    update_kinematics(g, s);
    return {r.iterations, r.residual};
}

/// Optimal SOR factor for the channel Poisson operator (periodic x, Dirichlet
/// y) from the Jacobi spectral radius of its slowest mode.
inline double poisson_sor_factor(const Grid2D& g) {
    const double cx = 1.0 / (g.dx * g.dx), cy = 1.0 / (g.dy * g.dy);
    const double rho = (cx + cy * std::cos(std::numbers::pi / static_cast<double>(g.ny - 1))) / (cx + cy);
    return 2.0 / (1.0 + std::sqrt(1.0 - rho * rho));
}

/// Poiseuille base state: u = y − y², Ψ = y²/2 − y³/3 + Ψ_lower, Ω = 2y − 1,
/// A11 = 0, A12 = 1 − 2y, A22 = 2We(1 − 2y)².
inline FieldState init_state(const Grid2D& g, const ChannelParams& p, const ChannelBCs& bcs = {}) {
    p.validate();
    bcs.validate();
    if (g.periodic(Axis::y) || !g.periodic(Axis::x) || g.is_line()) {
        throw StructuralError("init_state: channel grid must be periodic in x with walls in y");
    }
    FieldState s;
    const double flux = bcs.psi_upper - bcs.psi_lower;
    s.psi = Field::from_function(g, [&](double, double y) {
        return bcs.psi_lower + 6.0 * flux * (y * y / 2.0 - y * y * y / 3.0);
    });
    s.omega = Field::from_function(g, [&](double, double y) { return 6.0 * flux * (2.0 * y - 1.0); });
    s.A11 = Field(g);
    s.A12 = Field::from_function(g, [](double, double y) { return 1.0 - 2.0 * y; });
    s.A22 = Field::from_function(g, [&](double, double y) { return 2.0 * p.We * (1.0 - 2.0 * y) * (1.0 - 2.0 * y); });
    const double k = p.mu / (1.0 - p.nu);
    s.F11 = Field(g, k);
    s.F12 = Field(g);
    s.F22 = Field(g, k);
    update_kinematics(g, s);
    // analytic base-state velocity, which the central difference reproduces to O(Δy²)
    for (std::size_t j = 1; j + 1 < g.ny; ++j)
        for (std::size_t i = 0; i < g.nx; ++i) s.u(i, j) = 6.0 * flux * (g.y(j) - g.y(j) * g.y(j));
    return s;
}

/// Adds Ω' = a·sin(πy)·Σ_{k=1}^{4} c_k cos(2πk x/L + φ_k) with (c_k, φ_k) drawn
/// from a seeded mt19937_64, then re-solves Ψ.
inline void perturb_vorticity(const Grid2D& g, const ChannelBCs& bcs, FieldState& s, double amplitude,
                              std::uint64_t seed, const GSConfig& gs = {1e-10, 0}) {
    if (amplitude == 0.0) return;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0), phase(0.0, 2.0 * std::numbers::pi);
    double c[4], ph[4];
    for (int k = 0; k < 4; ++k) {
        c[k] = coef(rng);
        ph[k] = phase(rng);
    }
    const double L = g.x_hi - g.x_lo;
    for (std::size_t j = 1; j + 1 < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            double sum = 0.0;
            for (int k = 0; k < 4; ++k)
                sum += c[k] * std::cos(2.0 * std::numbers::pi * (k + 1) * (g.x(i) - g.x_lo) / L + ph[k]);
            s.omega(i, j) += amplitude * std::sin(std::numbers::pi * g.y(j)) * sum;
        }
    }
    detail::copy_periodic_column(g, s.omega);
    solve_streamfunction(g, bcs, s, gs);
}

struct FingerReport {
    std::size_t defective_points = 0;
    double max_imag_residue = 0.0;
};

/// Finger tensor at every point from the current velocity gradient and time s.t.
inline FingerReport finger_force(const Grid2D& g, const ChannelParams& p, FieldState& s) {
    FingerReport rep;
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i + 1 < g.nx; ++i) {
            const auto F = finger_tensor(s.grad.ux(i, j), s.grad.uy(i, j), s.grad.vx(i, j), s.grad.vy(i, j),
                                         p.alpha, p.mu, p.nu, s.t);
            s.F11(i, j) = F.F11;
            s.F12(i, j) = F.F12;
            s.F22(i, j) = F.F22;
            rep.defective_points += F.defective;
            rep.max_imag_residue = std::max(rep.max_imag_residue, F.imag_residue);
        }
    }
    for (Field* f : {&s.F11, &s.F12, &s.F22}) detail::copy_periodic_column(g, *f);
    return rep;
}

/// Histories of the time-fractional unknowns.
struct ChannelHistory {
    L1History omega, A11, A12, A22;

    void push(const FieldState& s) {
        omega.push(s.t, s.omega.vector());
        A11.push(s.t, s.A11.vector());
        A12.push(s.t, s.A12.vector());
        A22.push(s.t, s.A22.vector());
    }
};

/// θ-IMEX vorticity update to t + dt. Uses A, F and (u, v) of the current
/// state; wall rows keep their current values as Dirichlet data.
/// `guess` (default s.omega) seeds the solve; its wall rows are the Dirichlet data.
inline GSResult step_vorticity(const Grid2D& g, const ChannelParams& p, ThetaScheme scheme, const FieldState& s,
                               const L1History& history, double dt, const GSConfig& gs = {1e-10, 0},
                               const Field* guess = nullptr) {
    const double theta = scheme.theta;
    const L1StepTerms l1 = l1_step_terms(history, p.alpha, s.t + dt);

    Field rhs = s.omega;
    rhs *= p.Re * l1.lead;
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] -= p.Re * l1.memory[k];
    Field adv = advect_uds(g, s.omega, s.u, Axis::x);
    adv += advect_uds(g, s.omega, s.v, Axis::y);
    rhs -= p.Re * adv;
    if (theta != 1.0) rhs += ((1.0 - theta) * p.nu) * laplacian_cds(g, s.omega);
    rhs += (1.0 - p.nu) * curl_div(g, s.A11 + s.F11, s.A12 + s.F12, s.A22 + s.F22);

    const auto spec = BlockDiagSpec::implicit_diffusion(g, theta * p.nu, p.Re * l1.lead);
    return gauss_seidel(spec, rhs, guess ? *guess : s.omega, gs);
}

/// Wall vorticity coupling within a step. max_iters = 0 lags the wall values
/// one step (taken from the previous Ψ). Otherwise Ω, Ψ and the wall formula
/// are iterated to a fixed point with Aitken-relaxed wall updates; the lagged
/// form is unstable once ν Δt^α / (Re Δy²) is of order one.
struct WallCoupling {
    std::size_t max_iters = 60;
    /// Converged when max|Ω_wall(Ψ) − Ω_wall| ≤ rel_tol · max(1, max|Ω_wall|).
    double rel_tol = 1e-8;
    /// Relaxation of the first wall update; later ones are Aitken estimates.
    double relaxation = 0.5;

    void validate() const {
        if (!(rel_tol > 0.0)) throw DomainError("WallCoupling: rel_tol must be > 0");
        if (!(relaxation > 0.0 && relaxation <= 1.0)) throw DomainError("WallCoupling: relaxation must be in (0, 1]");
    }
};

struct VorticityUpdate {
    Field omega;
    Field psi;
    std::size_t wall_iterations = 0;
    std::size_t gs_vorticity = 0;
    std::size_t gs_poisson = 0;
    double poisson_residual = 0.0;
};

namespace detail {

inline double interior_norm(const Grid2D& g, const Field& f) {
    double sum = 0.0;
    for (std::size_t j = 1; j + 1 < g.ny; ++j)
        for (std::size_t i = 0; i + 1 < g.nx; ++i) sum += f(i, j) * f(i, j);
    return std::sqrt(sum);
}

}  // namespace detail

/// Ω at t + dt and the matching Ψ, leaving `s` untouched. The returned Ω
/// carries the wall values used as Dirichlet data in the last solve.
inline VorticityUpdate coupled_vorticity_step(const Grid2D& g, const ChannelParams& p, ThetaScheme scheme,
                                              const ChannelBCs& bcs, const FieldState& s, const L1History& history,
                                              double dt, const GSConfig& gs = {1e-10, 0},
                                              const GSConfig& poisson_gs = {1e-10, 0}, const WallCoupling& wc = {}) {
    wc.validate();
    VorticityUpdate out;
    GSResult w = step_vorticity(g, p, scheme, s, history, dt, gs);
    out.gs_vorticity = w.iterations;
    out.omega = std::move(w.x);

    Field guess = s.psi;
    for (std::size_t i = 0; i < g.nx; ++i) {
        guess(i, 0) = bcs.psi_lower;
        guess(i, g.ny - 1) = bcs.psi_upper;
    }
    const auto poisson = BlockDiagSpec::poisson(g);
    GSResult ps = gauss_seidel(poisson, -1.0 * out.omega, guess, poisson_gs);
    out.gs_poisson = ps.iterations;
    out.poisson_residual = ps.residual;
    out.psi = std::move(ps.x);
    if (wc.max_iters == 0) return out;

    const std::size_t N = g.ny - 1;
    const double full_norm = detail::interior_norm(g, out.omega);
    std::vector<double> r(2 * g.nx), r_prev;
    double omega_relax = wc.relaxation;
    for (std::size_t k = 0;; ++k) {
        Field target = out.omega;
        update_wall_vorticity(g, bcs, out.psi, target);
        double mismatch = 0.0, scale = 1.0;
        for (std::size_t i = 0; i < g.nx; ++i) {
            r[2 * i] = target(i, 0) - out.omega(i, 0);
            r[2 * i + 1] = target(i, N) - out.omega(i, N);
            mismatch = std::max({mismatch, std::abs(r[2 * i]), std::abs(r[2 * i + 1])});
            scale = std::max({scale, std::abs(target(i, 0)), std::abs(target(i, N))});
        }
        out.wall_iterations = k;
        if (mismatch <= wc.rel_tol * scale) return out;
        if (k == wc.max_iters) {
            throw ConvergenceError("wall vorticity coupling: no convergence after " + std::to_string(k) + " iterations",
                                   k, mismatch / scale);
        }
        if (!r_prev.empty()) {
            double num = 0.0, den = 0.0;
            for (std::size_t m = 0; m < r.size(); ++m) {
                const double d = r[m] - r_prev[m];
                num += r_prev[m] * d;
                den += d * d;
            }
            if (den > 0.0) omega_relax = std::clamp(-omega_relax * num / den, 1e-2, 1.0);
        }
        r_prev = r;

        Field seed = out.omega;
        for (std::size_t i = 0; i < g.nx; ++i) {
            seed(i, 0) += omega_relax * r[2 * i];
            seed(i, N) += omega_relax * r[2 * i + 1];
        }
        GSResult wk = step_vorticity(g, p, scheme, s, history, dt, gs, &seed);
        out.gs_vorticity += wk.iterations;
        Field delta = wk.x - out.omega;
        out.omega = std::move(wk.x);

        // Ψ is affine in Ω: correct it with a homogeneous solve held to the
        // same absolute accuracy as the full solve.
        const double delta_norm = detail::interior_norm(g, delta);
        if (!std::isfinite(delta_norm)) {
            throw ConvergenceError("wall vorticity coupling: non-finite vorticity", k + 1, delta_norm);
        }
        if (delta_norm == 0.0) continue;
        GSConfig cg = poisson_gs;
        cg.rel_tol = std::clamp(poisson_gs.rel_tol * full_norm / delta_norm, poisson_gs.rel_tol, 1e-3);
        GSResult dp = gauss_seidel(poisson, -1.0 * delta, Field(g), cg);
        out.gs_poisson += dp.iterations;
        out.psi += dp.x;
    }
}

struct ConformationReport {
    /// Most negative A22 after the update (positivity diagnostic).
    double min_A22 = 0.0;
};

/// θ-IMEX update of A11, A12, A22 to t + dt with the current velocity and
/// gradient; s.t is left unchanged. Interior: explicit UD3 advection, stretching LᵀA + AL and D/We;
/// −A/We θ-blended. Walls: A11 = 0 and the L1-discretised relaxation ODEs
///   A12 + We ∂^αA12 = ∂u/∂y,  A22 + We(∂^αA22 − 2 ∂u/∂y A12) = 0.
inline ConformationReport step_conformation(const Grid2D& g, const ChannelParams& p, ThetaScheme scheme,
                                            FieldState& s, const ChannelHistory& h, double dt) {
    const double theta = scheme.theta;
    const double t_next = s.t + dt;
    const L1StepTerms m11 = l1_step_terms(h.A11, p.alpha, t_next);
    const L1StepTerms m12 = l1_step_terms(h.A12, p.alpha, t_next);
    const L1StepTerms m22 = l1_step_terms(h.A22, p.alpha, t_next);
    const double lead = m11.lead;
    const double inv_we = 1.0 / p.We;

    auto advect = [&](const Field& f) {
        Field a = advect_uds(g, f, s.u, Axis::x);
        a += advect_uds(g, f, s.v, Axis::y);
        return a;
    };
    const Field adv11 = advect(s.A11), adv12 = advect(s.A12), adv22 = advect(s.A22);
    Field n11(g), n12(g), n22(g);
    const double denom = lead + theta * inv_we;
    const double explicit_relax = (1.0 - theta) * inv_we;
    const VelocityGradient& L = s.grad;

    for (std::size_t j = 1; j + 1 < g.ny; ++j) {
        for (std::size_t i = 0; i + 1 < g.nx; ++i) {
            const std::size_t k = g.index(i, j);
            const double a11 = s.A11[k], a12 = s.A12[k], a22 = s.A22[k];
            const double ux = L.ux[k], uy = L.uy[k], vx = L.vx[k], vy = L.vy[k];
            const double s11 = 2.0 * (ux * a11 + vx * a12);
            const double s12 = ux * a12 + vx * a22 + uy * a11 + vy * a12;
            const double s22 = 2.0 * (uy * a12 + vy * a22);
            const double d11 = 2.0 * ux, d12 = uy + vx, d22 = 2.0 * vy;
            n11[k] = (lead * a11 - m11.memory[k] - adv11[k] + s11 + d11 * inv_we - explicit_relax * a11) / denom;
            n12[k] = (lead * a12 - m12.memory[k] - adv12[k] + s12 + d12 * inv_we - explicit_relax * a12) / denom;
            n22[k] = (lead * a22 - m22.memory[k] - adv22[k] + s22 + d22 * inv_we - explicit_relax * a22) / denom;
        }
    }
    for (std::size_t j : {std::size_t{0}, g.ny - 1}) {
        for (std::size_t i = 0; i + 1 < g.nx; ++i) {
            const std::size_t k = g.index(i, j);
            const double uy = L.uy[k];
            n11[k] = 0.0;
            n12[k] = (uy + p.We * (lead * s.A12[k] - m12.memory[k])) / (1.0 + p.We * lead);
            n22[k] = p.We * (lead * s.A22[k] - m22.memory[k] + 2.0 * uy * n12[k]) / (1.0 + p.We * lead);
        }
    }
    for (Field* f : {&n11, &n12, &n22}) detail::copy_periodic_column(g, *f);
    s.A11 = std::move(n11);
    s.A12 = std::move(n12);
    s.A22 = std::move(n22);
    ConformationReport rep;
    for (double a : s.A22.values()) rep.min_A22 = std::min(rep.min_A22, a);
    return rep;
}

// ----------------------------------------------------------------------------
// Time integration

struct ChannelSchedule {
    /// Stop after this many steps (0: no limit).
    std::size_t max_steps = 0;
    /// Stop once t reaches this time (0: no limit).
    double t_end = 0.0;
    double dt0 = 1e-3;
    bool adaptive = true;
    AdaptiveConfig adapt;
    /// Snapshot every k steps (0: only the final state).
    std::size_t snapshot_every = 0;
    /// Amplitude of the seeded initial vorticity perturbation.
    double perturbation = 0.0;
    std::uint64_t seed = 0;
    GSConfig gs{1e-10, 0};
    WallCoupling wall;
    bool poisson_sor = true;
    /// A22 below −tolerance raises a positivity warning.
    double positivity_tol = 1e-8;

    void validate() const {
        if (max_steps == 0 && !(t_end > 0.0)) throw DomainError("ChannelSchedule: need max_steps or t_end");
        if (!(dt0 > 0.0)) throw DomainError("ChannelSchedule: dt0 must be > 0");
        if (!(perturbation >= 0.0)) throw DomainError("ChannelSchedule: perturbation must be >= 0");
        if (adaptive) adapt.validate();
        wall.validate();
    }
};

struct ChannelDiagnostic {
    std::size_t step = 0;
    double t = 0.0;
    double dt = 0.0;
    double intensity = 0.0;
    std::size_t gs_vorticity = 0;
    std::size_t gs_poisson = 0;
    double poisson_residual = 0.0;
    std::size_t wall_iterations = 0;
    std::size_t defective_points = 0;
    double imag_residue = 0.0;
    double min_A22 = 0.0;
};

struct ChannelSnapshot {
    std::size_t step = 0;
    FieldState state;
};

struct ChannelResult {
    FieldState state;
    std::vector<ChannelDiagnostic> diagnostics;
    std::vector<ChannelSnapshot> snapshots;
    bool failed = false;
    std::string failure;
};

/// Owns one simulation's state and histories.
class ChannelSimulation {
public:
    ChannelSimulation(Grid2D g, ChannelParams p, ThetaScheme scheme, ChannelBCs bcs = {}, GSConfig gs = {1e-10, 0})
        : g_(std::move(g)), p_(p), scheme_(scheme), bcs_(bcs), gs_(gs) {
        p_.validate();
        scheme_.validate();
        s_ = init_state(g_, p_, bcs_);
        h_.push(s_);
    }

    /// Seeded perturbation of the initial state (before the first step only).
    void perturb(double amplitude, std::uint64_t seed) {
        if (h_.omega.size() != 1) throw StructuralError("ChannelSimulation::perturb: already stepping");
        perturb_vorticity(g_, bcs_, s_, amplitude, seed, poisson_gs());
        h_ = {};
        h_.push(s_);
    }

    const FieldState& state() const noexcept { return s_; }
    const Grid2D& grid() const noexcept { return g_; }
    std::size_t steps() const noexcept { return h_.omega.size() - 1; }
    std::function<void(const std::string&)> warn;

    /// finger_force → vorticity → streamfunction → conformation.
    ChannelDiagnostic step(double dt) {
        if (!(dt > 0.0)) throw DomainError("ChannelSimulation::step: dt must be > 0");
        const std::size_t index = steps() + 1;
        ChannelDiagnostic d;
        d.step = index;
        d.dt = dt;

        const FingerReport fr = finger_force(g_, p_, s_);
        d.defective_points = fr.defective_points;
        d.imag_residue = fr.max_imag_residue;

        // Ω and A both advance with the velocity of the start of the step
        VorticityUpdate vu = coupled_vorticity_step(g_, p_, scheme_, bcs_, s_, h_.omega, dt, gs_, poisson_gs(), wall);
        d.gs_vorticity = vu.gs_vorticity;
        d.gs_poisson = vu.gs_poisson;
        d.poisson_residual = vu.poisson_residual;
        d.wall_iterations = vu.wall_iterations;
        const ConformationReport cr = step_conformation(g_, p_, scheme_, s_, h_, dt);
        d.min_A22 = cr.min_A22;
        s_.omega = std::move(vu.omega);
        s_.psi = std::move(vu.psi);
        s_.t += dt;
        update_wall_vorticity(g_, bcs_, s_.psi, s_.omega);
        update_kinematics(g_, s_);

        for (const Field* f : {&s_.omega, &s_.psi, &s_.A11, &s_.A12, &s_.A22}) {
            if (!all_finite(f->values())) throw NumericalError("ChannelSimulation: non-finite field", index);
        }
        if (cr.min_A22 < -positivity_tol && warn) {
            warn("step " + std::to_string(index) + ": A22 = " + std::to_string(cr.min_A22) + " < 0");
        }
        h_.push(s_);
        d.t = s_.t;
        d.intensity = structure_intensity(g_, s_.omega);
        return d;
    }

    double positivity_tol = 1e-8;
    WallCoupling wall;
    /// Over-relax the Poisson solves with poisson_sor_factor(grid).
    bool poisson_sor = true;

private:
    GSConfig poisson_gs() const {
        GSConfig c = gs_;
        if (poisson_sor) c.relaxation = poisson_sor_factor(g_);
        return c;
    }

    Grid2D g_;
    ChannelParams p_;
    ThetaScheme scheme_;
    ChannelBCs bcs_;
    GSConfig gs_;
    FieldState s_;
    ChannelHistory h_;
};

/// Runs the schedule; dt starts at dt0 and doubles per adapt_step on Ω. A
/// failing step stops the run and leaves the last good state in the result.
inline ChannelResult run_channel(const ChannelParams& p, ThetaScheme scheme, const Grid2D& g,
                                 const ChannelSchedule& sched, const ChannelBCs& bcs = {},
                                 std::function<void(const std::string&)> warn = {}) {
    sched.validate();
    ChannelSimulation sim(g, p, scheme, bcs, sched.gs);
    sim.warn = std::move(warn);
    sim.positivity_tol = sched.positivity_tol;
    sim.wall = sched.wall;
    sim.poisson_sor = sched.poisson_sor;
    sim.perturb(sched.perturbation, sched.seed);

    ChannelResult out;
    double dt = sched.adaptive ? std::clamp(sched.dt0, sched.adapt.dt_min, sched.adapt.dt_max) : sched.dt0;
    auto done = [&] {
        if (sched.max_steps > 0 && sim.steps() >= sched.max_steps) return true;
        return sched.t_end > 0.0 && sim.state().t >= sched.t_end * (1.0 - 1e-12);
    };
    try {
        while (!done()) {
            const double h = sched.t_end > 0.0 ? std::min(dt, sched.t_end - sim.state().t) : dt;
            const std::vector<double> before = sim.state().omega.vector();
            out.diagnostics.push_back(sim.step(h));
            if (sched.adaptive) dt = adapt_step(sim.state().omega.values(), before, sched.adapt, dt).dt;
            if (sched.snapshot_every > 0 && sim.steps() % sched.snapshot_every == 0) {
                out.snapshots.push_back({sim.steps(), sim.state()});
            }
        }
    } catch (const std::exception& e) {
        out.failed = true;
        out.failure = e.what();
    }
    out.state = sim.state();
    if (out.snapshots.empty() || out.snapshots.back().step != sim.steps()) {
        out.snapshots.push_back({sim.steps(), sim.state()});
    }
    return out;
}

inline void write_snapshot_csv(std::ostream& os, const Grid2D& g, const FieldState& s) {
    os << "x,y,omega,psi,u,v,A11,A12,A22\n" << std::setprecision(17);
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            os << g.x(i) << ',' << g.y(j) << ',' << s.omega(i, j) << ',' << s.psi(i, j) << ',' << s.u(i, j) << ','
               << s.v(i, j) << ',' << s.A11(i, j) << ',' << s.A12(i, j) << ',' << s.A22(i, j) << '\n';
        }
    }
}

inline void write_channel_diagnostics_csv(std::ostream& os, const std::vector<ChannelDiagnostic>& ds) {
    os << "step,t,dt,intensity,gs_vorticity,gs_poisson,wall_iterations,defective_points,min_A22\n"
       << std::setprecision(17);
    for (const auto& d : ds) {
        os << d.step << ',' << d.t << ',' << d.dt << ',' << d.intensity << ',' << d.gs_vorticity << ','
           << d.gs_poisson << ',' << d.wall_iterations << ',' << d.defective_points << ',' << d.min_A22 << '\n';
    }
}

}  // namespace fadr
