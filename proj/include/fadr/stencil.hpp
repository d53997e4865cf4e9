#pragma once

/// @file stencil.hpp
/// @brief Finite-difference operators on Grid2D: UD3/UD2 upwind advection,
///        the 5-point Laplacian, and boundary-condition application.

#include "fadr/errors.hpp"
#include "fadr/grid.hpp"

#include <algorithm>
#include <array>
#include <cstddef>

namespace fadr {

struct UpwindParams {
    /// 0.5 gives UD3 in the interior; 0 drops the upwind correction (UD2).
    double q = 0.5;
};

namespace detail {

/// Walks one grid line along an axis, resolving periodic wrap-around.
struct LineView {
    const Field* f;
    std::size_t n;        // points on the line
    std::size_t fixed;    // index along the other axis
    bool along_x;
    bool periodic;

    double at(std::ptrdiff_t i) const noexcept {
        if (periodic) {
            const auto period = static_cast<std::ptrdiff_t>(n - 1);
            i = ((i % period) + period) % period;
        }
        const auto k = static_cast<std::size_t>(i);
        return along_x ? (*f)(k, fixed) : (*f)(fixed, k);
    }
};

inline LineView line_of(const Grid2D& g, const Field& f, Axis axis, std::size_t fixed) {
    return {&f, g.extent(axis), fixed, axis == Axis::x, g.periodic(axis)};
}

}  // namespace detail

/// K·∂u/∂axis by the UD3 formula
///
///     K (u_{i+1} − u_{i−1})/(2h) + q (K⁺ u⁻ + K⁻ u⁺)
///     u⁻ = (u_{i−2} − 3u_{i−1} + 3u_i − u_{i+1})/(3h)
///     u⁺ = (u_{i−1} − 3u_i + 3u_{i+1} − u_{i+2})/(3h)
///
/// with K⁺ = max(K, 0), K⁻ = min(K, 0). Within two points of a non-periodic
/// edge the correction is dropped (q = 0) so the stencil never leaves the
/// grid; boundary points themselves get a one-sided second-order difference.
inline Field advect_uds(const Grid2D& g, const Field& u, const Field& speed, Axis axis,
                        UpwindParams p = {}) {
    require_shape(g, u, "advect_uds");
    require_shape(g, speed, "advect_uds(speed)");
    if (axis == Axis::y && g.is_line()) throw StructuralError("advect_uds: no y axis on a line grid");
    const std::size_t n = g.extent(axis);
    if (n < 5) throw StructuralError("advect_uds: axis needs at least 5 points");

    const double h = g.spacing(axis);
    const bool periodic = g.periodic(axis);
    const std::size_t other = axis == Axis::x ? g.ny : g.nx;
    Field out(g);

    for (std::size_t line = 0; line < other; ++line) {
        const auto L = detail::line_of(g, u, axis, line);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t ix = axis == Axis::x ? i : line;
            const std::size_t iy = axis == Axis::x ? line : i;
            const double k = speed(ix, iy);
            const auto ii = static_cast<std::ptrdiff_t>(i);

            double value;
            if (!periodic && i == 0) {
                value = k * (-3.0 * L.at(0) + 4.0 * L.at(1) - L.at(2)) / (2.0 * h);
            } else if (!periodic && i == n - 1) {
                value = k * (3.0 * L.at(ii) - 4.0 * L.at(ii - 1) + L.at(ii - 2)) / (2.0 * h);
            } else {
                value = k * (L.at(ii + 1) - L.at(ii - 1)) / (2.0 * h);
                const bool near_edge = !periodic && (i <= 2 || i + 3 >= n);
                if (!near_edge && p.q != 0.0) {
                    const double kp = std::max(k, 0.0);
                    const double km = std::min(k, 0.0);
                    double corr = 0.0;
                    if (kp != 0.0) {
                        corr += kp * (L.at(ii - 2) - 3.0 * L.at(ii - 1) + 3.0 * L.at(ii) - L.at(ii + 1)) /
                                (3.0 * h);
                    }
                    if (km != 0.0) {
                        corr += km * (L.at(ii - 1) - 3.0 * L.at(ii) + 3.0 * L.at(ii + 1) - L.at(ii + 2)) /
                                (3.0 * h);
                    }
                    value += p.q * corr;
                }
            }
            out(ix, iy) = value;
        }
    }
    return out;
}

/// Same operator with a constant speed.
inline Field advect_uds(const Grid2D& g, const Field& u, double speed, Axis axis, UpwindParams p = {}) {
    return advect_uds(g, u, Field(g, speed), axis, p);
}

namespace detail {

/// Second difference along one axis at point i; 0 on Dirichlet edges,
/// mirror-ghost (zero normal gradient) on Neumann edges.
inline double second_difference(const LineView& L, std::size_t i, double h, BoundaryKind lo,
                                BoundaryKind hi, bool& on_dirichlet) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    if (!L.periodic && i == 0) {
        if (lo == BoundaryKind::dirichlet) {
            on_dirichlet = true;
            return 0.0;
        }
        return 2.0 * (L.at(1) - L.at(0)) / (h * h);
    }
    if (!L.periodic && i == L.n - 1) {
        if (hi == BoundaryKind::dirichlet) {
            on_dirichlet = true;
            return 0.0;
        }
        return 2.0 * (L.at(ii - 1) - L.at(ii)) / (h * h);
    }
    return (L.at(ii + 1) - 2.0 * L.at(ii) + L.at(ii - 1)) / (h * h);
}

}  // namespace detail

/// Second-order central 5-point Laplacian (3-point on line grids).
///
/// Periodic axes wrap. Points on Dirichlet edges return 0 since their values
/// are prescribed. Neumann edges eliminate the ghost point with the
/// zero-normal-gradient mirror u_{−1} = u_{1}.
inline Field laplacian_cds(const Grid2D& g, const Field& u) {
    require_shape(g, u, "laplacian_cds");
    Field out(g);
    for (std::size_t j = 0; j < g.ny; ++j) {
        const auto row = detail::line_of(g, u, Axis::x, j);
        for (std::size_t i = 0; i < g.nx; ++i) {
            bool dirichlet = false;
            double v = detail::second_difference(row, i, g.dx, g.bc[0], g.bc[1], dirichlet);
            if (!g.is_line()) {
                const auto col = detail::line_of(g, u, Axis::y, i);
                v += detail::second_difference(col, j, g.dy, g.bc[2], g.bc[3], dirichlet);
            }
            out(i, j) = dirichlet ? 0.0 : v;
        }
    }
    return out;
}

/// Boundary data per edge: the Dirichlet value or the outward normal derivative.
struct BoundarySpec {
    std::array<BoundaryKind, 4> kind{BoundaryKind::dirichlet, BoundaryKind::dirichlet,
                                     BoundaryKind::dirichlet, BoundaryKind::dirichlet};
    std::array<double, 4> value{0.0, 0.0, 0.0, 0.0};

    static BoundarySpec homogeneous(const Grid2D& g) {
        BoundarySpec s;
        s.kind = g.bc;
        return s;
    }
};

namespace detail {

inline void check_corners(const Grid2D& g, const BoundarySpec& s) {
    if (g.is_line()) return;
    for (Edge ex : {Edge::x_lo, Edge::x_hi}) {
        for (Edge ey : {Edge::y_lo, Edge::y_hi}) {
            const auto a = edge_index(ex), b = edge_index(ey);
            if (s.kind[a] == BoundaryKind::dirichlet && s.kind[b] == BoundaryKind::dirichlet &&
                s.value[a] != s.value[b]) {
                throw StructuralError("apply_bc: Dirichlet edges disagree at a corner");
            }
        }
    }
}

}  // namespace detail

/// Enforces the boundary conditions in place of the boundary values.
///
/// Neumann edges use the one-sided 3-point derivative solved for the edge
/// value; Dirichlet edges overwrite; periodic axes copy the first line onto
/// the duplicate last line. Neumann is applied first so Dirichlet wins at
/// mixed corners.
inline Field apply_bc(const Grid2D& g, Field u, const BoundarySpec& s) {
    require_shape(g, u, "apply_bc");
    for (std::size_t e = 0; e < 4; ++e) {
        if (g.is_line() && e >= 2) break;
        if (s.kind[e] != g.bc[e]) throw StructuralError("apply_bc: boundary kinds do not match grid");
    }
    detail::check_corners(g, s);

    const std::size_t nx = g.nx, ny = g.ny;
    // Neumann
    if (g.bc[0] == BoundaryKind::neumann)
        for (std::size_t j = 0; j < ny; ++j) u(0, j) = (4.0 * u(1, j) - u(2, j) + 2.0 * g.dx * s.value[0]) / 3.0;
    if (g.bc[1] == BoundaryKind::neumann)
        for (std::size_t j = 0; j < ny; ++j)
            u(nx - 1, j) = (4.0 * u(nx - 2, j) - u(nx - 3, j) + 2.0 * g.dx * s.value[1]) / 3.0;
    if (!g.is_line()) {
        if (g.bc[2] == BoundaryKind::neumann)
            for (std::size_t i = 0; i < nx; ++i) u(i, 0) = (4.0 * u(i, 1) - u(i, 2) + 2.0 * g.dy * s.value[2]) / 3.0;
        if (g.bc[3] == BoundaryKind::neumann)
            for (std::size_t i = 0; i < nx; ++i)
                u(i, ny - 1) = (4.0 * u(i, ny - 2) - u(i, ny - 3) + 2.0 * g.dy * s.value[3]) / 3.0;
    }
    // Dirichlet
    if (g.bc[0] == BoundaryKind::dirichlet)
        for (std::size_t j = 0; j < ny; ++j) u(0, j) = s.value[0];
    if (g.bc[1] == BoundaryKind::dirichlet)
        for (std::size_t j = 0; j < ny; ++j) u(nx - 1, j) = s.value[1];
    if (!g.is_line()) {
        if (g.bc[2] == BoundaryKind::dirichlet)
            for (std::size_t i = 0; i < nx; ++i) u(i, 0) = s.value[2];
        if (g.bc[3] == BoundaryKind::dirichlet)
            for (std::size_t i = 0; i < nx; ++i) u(i, ny - 1) = s.value[3];
    }
    // Periodic duplicates
    if (g.bc[0] == BoundaryKind::periodic)
        for (std::size_t j = 0; j < ny; ++j) u(nx - 1, j) = u(0, j);
    if (!g.is_line() && g.bc[2] == BoundaryKind::periodic)
        for (std::size_t i = 0; i < nx; ++i) u(i, ny - 1) = u(i, 0);
    return u;
}

}  // namespace fadr
