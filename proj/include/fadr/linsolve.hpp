#pragma once

/// @file linsolve.hpp
/// @brief Matrix-free Gauss-Seidel for the block-tridiagonal systems
///
///     R x_{i,j} + r1 (x_{i−1,j} + x_{i+1,j}) + r2 (x_{i,j−1} + x_{i,j+1}) = b_{i,j}
///
/// that come from implicit diffusion and from the streamfunction Poisson
/// equation. Only interior points (plus the independent columns of a periodic
/// axis) are unknowns. Dirichlet boundary values are data taken from the
/// initial guess; Neumann boundary values are eliminated with the one-sided
/// relation u_b = (4u_1 − u_2 + 2h g)/3.

#include "fadr/errors.hpp"
#include "fadr/grid.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace fadr {

struct BlockDiagSpec {
    double r1 = 0.0;  ///< x-neighbour coefficient
    double r2 = 0.0;  ///< y-neighbour coefficient
    double R = 0.0;   ///< diagonal
    Grid2D grid;
    /// Outward normal derivative on Neumann edges.
    std::array<double, 4> neumann_flux{0.0, 0.0, 0.0, 0.0};

    /// Poisson: r1 = dx⁻², r2 = dy⁻², R = −2(r1 + r2).
    static BlockDiagSpec poisson(const Grid2D& g) {
        BlockDiagSpec s;
        s.grid = g;
        s.r1 = 1.0 / (g.dx * g.dx);
        s.r2 = g.is_line() ? 0.0 : 1.0 / (g.dy * g.dy);
        s.R = -2.0 * (s.r1 + s.r2);
        return s;
    }

    /// Implicit diffusion: r1 = −κθ dx⁻², r2 = −κθ dy⁻², R = −2(r1 + r2) + mass.
    /// For the vorticity equation κ = ν and mass = Re·(Δt)^{−α}/Γ(2−α).
    static BlockDiagSpec implicit_diffusion(const Grid2D& g, double kappa_theta, double mass) {
        BlockDiagSpec s;
        s.grid = g;
        s.r1 = -kappa_theta / (g.dx * g.dx);
        s.r2 = g.is_line() ? 0.0 : -kappa_theta / (g.dy * g.dy);
        s.R = -2.0 * (s.r1 + s.r2) + mass;
        return s;
    }

    std::size_t nx() const noexcept { return grid.nx; }
    std::size_t ny() const noexcept { return grid.ny; }

    void validate() const {
        grid.validate();
        const double off = std::abs(2.0 * r1 + 2.0 * r2);
        if (std::abs(R) < off - 1e-12 * std::max(1.0, off)) {
            throw DomainError("BlockDiagSpec: matrix is not row diagonally dominant");
        }
        if (R == 0.0) throw DomainError("BlockDiagSpec: zero diagonal");
    }
};

struct GSConfig {
    double rel_tol = 1e-8;
    /// 0 selects the default 10·nx·ny.
    std::size_t max_iters = 0;
    /// Successive over-relaxation factor in (0, 2); 1 is plain Gauss-Seidel.
    double relaxation = 1.0;

    std::size_t iteration_cap(const BlockDiagSpec& s) const noexcept {
        return max_iters > 0 ? max_iters : 10 * s.nx() * s.ny();
    }
};

struct GSResult {
    Field x;
    std::size_t iterations = 0;
    double residual = 0.0;
    /// Relative residual after each sweep.
    std::vector<double> history;
};

namespace detail {

/// Index ranges and neighbour resolution for the unknowns of a spec.
class StencilTopology {
public:
    explicit StencilTopology(const BlockDiagSpec& s) : s_(s), g_(s.grid) {
        i_begin_ = g_.bc[0] == BoundaryKind::periodic ? 0 : 1;
        i_end_ = g_.nx - 1;  // periodic: last column is the duplicate
        if (g_.is_line()) {
            j_begin_ = 0;
            j_end_ = 1;
        } else {
            j_begin_ = g_.bc[2] == BoundaryKind::periodic ? 0 : 1;
            j_end_ = g_.ny - 1;
        }
    }

    std::size_t i_begin() const noexcept { return i_begin_; }
    std::size_t i_end() const noexcept { return i_end_; }
    std::size_t j_begin() const noexcept { return j_begin_; }
    std::size_t j_end() const noexcept { return j_end_; }

    /// Value of the x-neighbour at i + di (di = ±1) as seen from unknown (i, j).
    double x_neighbour(const Field& x, std::size_t i, std::size_t j, int di) const noexcept {
        const std::size_t nx = g_.nx;
        if (g_.bc[0] == BoundaryKind::periodic) {
            const std::size_t period = nx - 1;
            const std::size_t k = (i + period + static_cast<std::size_t>(di + static_cast<int>(period))) % period;
            return x(k, j);
        }
        if (di < 0 && i == 1) return boundary_value(x, 0, /*axis_x=*/true, j, 0);
        if (di > 0 && i == nx - 2) return boundary_value(x, 1, true, j, nx - 1);
        return x(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + di), j);
    }

    double y_neighbour(const Field& x, std::size_t i, std::size_t j, int dj) const noexcept {
        const std::size_t ny = g_.ny;
        if (g_.bc[2] == BoundaryKind::periodic) {
            const std::size_t period = ny - 1;
            const std::size_t k = (j + period + static_cast<std::size_t>(dj + static_cast<int>(period))) % period;
            return x(i, k);
        }
        if (dj < 0 && j == 1) return boundary_value(x, 2, false, i, 0);
        if (dj > 0 && j == ny - 2) return boundary_value(x, 3, false, i, ny - 1);
        return x(i, static_cast<std::size_t>(static_cast<std::ptrdiff_t>(j) + dj));
    }

    /// Coefficient that multiplies x_{i,j} itself once Neumann boundary
    /// values are expressed through interior unknowns.
    double effective_diagonal(std::size_t i, std::size_t j) const noexcept {
        double d = s_.R;
        if (g_.bc[0] == BoundaryKind::neumann && i == 1) d += s_.r1 * 4.0 / 3.0;
        if (g_.bc[1] == BoundaryKind::neumann && i == g_.nx - 2) d += s_.r1 * 4.0 / 3.0;
        if (!g_.is_line()) {
            if (g_.bc[2] == BoundaryKind::neumann && j == 1) d += s_.r2 * 4.0 / 3.0;
            if (g_.bc[3] == BoundaryKind::neumann && j == g_.ny - 2) d += s_.r2 * 4.0 / 3.0;
        }
        return d;
    }

    double apply_at(const Field& x, std::size_t i, std::size_t j) const noexcept {
        double v = s_.R * x(i, j) + s_.r1 * (x_neighbour(x, i, j, -1) + x_neighbour(x, i, j, +1));
        if (!g_.is_line()) v += s_.r2 * (y_neighbour(x, i, j, -1) + y_neighbour(x, i, j, +1));
        return v;
    }

    /// Fills Neumann edges, periodic duplicates; Dirichlet values are left as is.
    void complete_boundaries(Field& x) const {
        const std::size_t nx = g_.nx, ny = g_.ny;
        for (std::size_t j = 0; j < ny; ++j) {
            if (g_.bc[0] == BoundaryKind::neumann) x(0, j) = boundary_value(x, 0, true, j, 0);
            if (g_.bc[1] == BoundaryKind::neumann) x(nx - 1, j) = boundary_value(x, 1, true, j, nx - 1);
        }
        if (!g_.is_line()) {
            for (std::size_t i = 0; i < nx; ++i) {
                if (g_.bc[2] == BoundaryKind::neumann) x(i, 0) = boundary_value(x, 2, false, i, 0);
                if (g_.bc[3] == BoundaryKind::neumann) x(i, ny - 1) = boundary_value(x, 3, false, i, ny - 1);
            }
        }
        if (g_.bc[0] == BoundaryKind::periodic)
            for (std::size_t j = 0; j < ny; ++j) x(nx - 1, j) = x(0, j);
        if (!g_.is_line() && g_.bc[2] == BoundaryKind::periodic)
            for (std::size_t i = 0; i < nx; ++i) x(i, ny - 1) = x(i, 0);
    }

private:
    /// Boundary value on `edge` at line position `along`; `at` is the
    /// boundary index on the normal axis.
    double boundary_value(const Field& x, std::size_t edge, bool axis_x, std::size_t along,
                          std::size_t at) const noexcept {
        const BoundaryKind k = g_.bc[edge];
        auto get = [&](std::size_t normal) { return axis_x ? x(normal, along) : x(along, normal); };
        if (k == BoundaryKind::neumann) {
            const double h = axis_x ? g_.dx : g_.dy;
            const bool lo = edge % 2 == 0;
            const std::size_t a1 = lo ? at + 1 : at - 1;
            const std::size_t a2 = lo ? at + 2 : at - 2;
            return (4.0 * get(a1) - get(a2) + 2.0 * h * s_.neumann_flux[edge]) / 3.0;
        }
        return get(at);
    }

    const BlockDiagSpec& s_;
    const Grid2D& g_;
    std::size_t i_begin_ = 0, i_end_ = 0, j_begin_ = 0, j_end_ = 0;
};

// Sums of squares are accumulated in long double so large-but-finite fields
// do not overflow to inf.
inline double norm_over_unknowns(const StencilTopology& t, const Field& f) {
    long double s = 0.0L;
    for (std::size_t j = t.j_begin(); j < t.j_end(); ++j)
        for (std::size_t i = t.i_begin(); i < t.i_end(); ++i) s += static_cast<long double>(f(i, j)) * f(i, j);
    return static_cast<double>(std::sqrt(s));
}

/// rhs minus the contribution of boundary data: the right-hand side of the
/// system restricted to the unknowns.
inline Field effective_rhs(const StencilTopology& t, const Field& x, const Field& rhs) {
    Field data_only = x;
    for (std::size_t j = t.j_begin(); j < t.j_end(); ++j)
        for (std::size_t i = t.i_begin(); i < t.i_end(); ++i) data_only(i, j) = 0.0;
    Field b(rhs.nx(), rhs.ny());
    for (std::size_t j = t.j_begin(); j < t.j_end(); ++j)
        for (std::size_t i = t.i_begin(); i < t.i_end(); ++i)
            b(i, j) = rhs(i, j) - t.apply_at(data_only, i, j);
    return b;
}

inline double absolute_residual(const StencilTopology& t, const Field& x, const Field& rhs) {
    long double s = 0.0L;
    for (std::size_t j = t.j_begin(); j < t.j_end(); ++j) {
        for (std::size_t i = t.i_begin(); i < t.i_end(); ++i) {
            const long double r = static_cast<long double>(t.apply_at(x, i, j)) - rhs(i, j);
            s += r * r;
        }
    }
    return static_cast<double>(std::sqrt(s));
}

inline void check_shapes(const BlockDiagSpec& spec, const Field& a, const char* what) {
    if (!a.matches(spec.grid)) {
        throw StructuralError(std::string("gauss_seidel: ") + what + " shape does not match spec");
    }
}

}  // namespace detail

/// A·x at every unknown (zero elsewhere); boundary values of x act as data.
inline Field apply_operator(const BlockDiagSpec& spec, const Field& x) {
    detail::check_shapes(spec, x, "x");
    detail::StencilTopology t(spec);
    Field out(x.nx(), x.ny());
    for (std::size_t j = t.j_begin(); j < t.j_end(); ++j)
        for (std::size_t i = t.i_begin(); i < t.i_end(); ++i) out(i, j) = t.apply_at(x, i, j);
    return out;
}

/// ‖A·x − rhs‖₂ / ‖b‖₂ over the unknowns, where b is rhs with boundary data
/// moved across. Falls back to the absolute residual when b = 0.
inline double residual(const BlockDiagSpec& spec, const Field& x, const Field& rhs) {
    detail::check_shapes(spec, x, "x");
    detail::check_shapes(spec, rhs, "rhs");
    detail::StencilTopology t(spec);
    const double abs_res = detail::absolute_residual(t, x, rhs);
    const double b_norm = detail::norm_over_unknowns(t, detail::effective_rhs(t, x, rhs));
    return b_norm > 0.0 ? abs_res / b_norm : abs_res;
}

/// Lexicographic forward Gauss-Seidel sweeps until the relative residual
/// drops to cfg.rel_tol. Throws ConvergenceError past the iteration cap.
inline GSResult gauss_seidel(const BlockDiagSpec& spec, const Field& rhs, const Field& initial_guess,
                             const GSConfig& cfg = {}) {
    spec.validate();
    detail::check_shapes(spec, rhs, "rhs");
    detail::check_shapes(spec, initial_guess, "initial guess");
    if (!(cfg.rel_tol > 0.0)) throw DomainError("GSConfig: rel_tol must be > 0");
    if (!(cfg.relaxation > 0.0 && cfg.relaxation < 2.0)) throw DomainError("GSConfig: relaxation must be in (0, 2)");
    const double w = cfg.relaxation;

    detail::StencilTopology t(spec);
    GSResult out;
    out.x = initial_guess;
    Field& x = out.x;

    const Field b = detail::effective_rhs(t, x, rhs);
    const double b_norm = detail::norm_over_unknowns(t, b);
    if (b_norm == 0.0) {
        for (std::size_t j = t.j_begin(); j < t.j_end(); ++j)
            for (std::size_t i = t.i_begin(); i < t.i_end(); ++i) x(i, j) = 0.0;
        t.complete_boundaries(x);
        return out;
    }

    auto rel_residual = [&] { return detail::absolute_residual(t, x, rhs) / b_norm; };
    t.complete_boundaries(x);
    out.residual = rel_residual();
    if (out.residual <= cfg.rel_tol) return out;

    const std::size_t cap = cfg.iteration_cap(spec);
    for (std::size_t it = 1; it <= cap; ++it) {
        for (std::size_t j = t.j_begin(); j < t.j_end(); ++j) {
            for (std::size_t i = t.i_begin(); i < t.i_end(); ++i) {
                const double diag = t.effective_diagonal(i, j);
                const double rest = t.apply_at(x, i, j) - diag * x(i, j);
                const double gs_value = (rhs(i, j) - rest) / diag;
                x(i, j) = w == 1.0 ? gs_value : x(i, j) + w * (gs_value - x(i, j));
            }
        }
        t.complete_boundaries(x);
        out.iterations = it;
        out.residual = rel_residual();
        out.history.push_back(out.residual);
        if (out.residual <= cfg.rel_tol) return out;
        if (!std::isfinite(out.residual)) break;
    }
    const std::string why = std::isfinite(out.residual) ? "no convergence" : "non-finite residual";
    throw ConvergenceError("gauss_seidel: " + why + " after " + std::to_string(out.iterations) + " sweeps",
                           out.iterations, out.residual);
}

}  // namespace fadr
