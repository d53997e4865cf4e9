#pragma once

/// @file grid.hpp
/// @brief Structured 2D (or 1D) vertex-centred grids and fields on them.
///
/// Points include both boundaries: x_i = x_lo + i·dx, i = 0 … nx−1. A periodic
/// axis stores its wrap-around duplicate, so column nx−1 mirrors column 0 and
/// only nx−1 columns are independent. A grid with ny == 1 is a 1D line in x.

#include "fadr/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fadr {

enum class BoundaryKind { periodic, dirichlet, neumann };
enum class Axis { x, y };
enum class Edge : std::size_t { x_lo = 0, x_hi = 1, y_lo = 2, y_hi = 3 };

inline constexpr std::size_t edge_index(Edge e) noexcept { return static_cast<std::size_t>(e); }

struct Grid2D {
    std::size_t nx = 0;
    std::size_t ny = 0;
    double x_lo = 0.0, x_hi = 1.0;
    double y_lo = 0.0, y_hi = 1.0;
    double dx = 1.0, dy = 1.0;
    std::array<BoundaryKind, 4> bc{BoundaryKind::dirichlet, BoundaryKind::dirichlet,
                                   BoundaryKind::dirichlet, BoundaryKind::dirichlet};

    static Grid2D make(std::size_t nx, std::size_t ny, double x_lo, double x_hi, double y_lo,
                       double y_hi, std::array<BoundaryKind, 4> bc) {
        Grid2D g;
        g.nx = nx;
        g.ny = ny;
        g.x_lo = x_lo;
        g.x_hi = x_hi;
        g.y_lo = y_lo;
        g.y_hi = y_hi;
        g.bc = bc;
        g.validate();
        g.dx = (x_hi - x_lo) / static_cast<double>(nx - 1);
        g.dy = ny > 1 ? (y_hi - y_lo) / static_cast<double>(ny - 1) : 1.0;
        return g;
    }

    /// 1D grid along x.
    static Grid2D line(std::size_t nx, double x_lo, double x_hi, BoundaryKind lo,
                       BoundaryKind hi) {
        return make(nx, 1, x_lo, x_hi, 0.0, 0.0, {lo, hi, BoundaryKind::dirichlet,
                                                  BoundaryKind::dirichlet});
    }

    void validate() const {
        if (nx < 5) throw StructuralError("Grid2D: nx must be >= 5, got " + std::to_string(nx));
        if (ny != 1 && ny < 5) {
            throw StructuralError("Grid2D: ny must be 1 (line) or >= 5, got " + std::to_string(ny));
        }
        if (!(x_hi > x_lo)) throw StructuralError("Grid2D: empty x extent");
        if (ny > 1 && !(y_hi > y_lo)) throw StructuralError("Grid2D: empty y extent");
        auto paired = [](BoundaryKind a, BoundaryKind b) {
            return (a == BoundaryKind::periodic) == (b == BoundaryKind::periodic);
        };
        if (!paired(bc[0], bc[1]) || !paired(bc[2], bc[3])) {
            throw StructuralError("Grid2D: periodic boundaries must be set on both ends of an axis");
        }
    }

    bool is_line() const noexcept { return ny == 1; }
    std::size_t size() const noexcept { return nx * ny; }
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nx + i; }
    double x(std::size_t i) const noexcept { return x_lo + static_cast<double>(i) * dx; }
    double y(std::size_t j) const noexcept {
        return is_line() ? 0.0 : y_lo + static_cast<double>(j) * dy;
    }

    BoundaryKind kind(Edge e) const noexcept { return bc[edge_index(e)]; }
    bool periodic(Axis a) const noexcept {
        return a == Axis::x ? bc[0] == BoundaryKind::periodic : bc[2] == BoundaryKind::periodic;
    }
    std::size_t extent(Axis a) const noexcept { return a == Axis::x ? nx : ny; }
    double spacing(Axis a) const noexcept { return a == Axis::x ? dx : dy; }
};

/// Values aligned to the points of a Grid2D, stored row-major (x fastest).
class Field {
public:
    Field() = default;
    Field(std::size_t nx, std::size_t ny, double fill = 0.0)
        : nx_(nx), ny_(ny), values_(nx * ny, fill) {}
    explicit Field(const Grid2D& g, double fill = 0.0) : Field(g.nx, g.ny, fill) {}
    Field(const Grid2D& g, std::vector<double> values) : nx_(g.nx), ny_(g.ny), values_(std::move(values)) {
        if (values_.size() != nx_ * ny_) throw StructuralError("Field: value count does not match grid");
    }

    template <class Fn>
    static Field from_function(const Grid2D& g, Fn&& fn) {
        Field f(g);
        for (std::size_t j = 0; j < g.ny; ++j)
            for (std::size_t i = 0; i < g.nx; ++i) f(i, j) = fn(g.x(i), g.y(j));
        return f;
    }

    std::size_t nx() const noexcept { return nx_; }
    std::size_t ny() const noexcept { return ny_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return values_[j * nx_ + i]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[j * nx_ + i]; }
    double& operator[](std::size_t k) noexcept { return values_[k]; }
    double operator[](std::size_t k) const noexcept { return values_[k]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    const std::vector<double>& vector() const noexcept { return values_; }
    std::vector<double>& vector() noexcept { return values_; }

    bool matches(const Grid2D& g) const noexcept { return nx_ == g.nx && ny_ == g.ny; }

    Field& operator+=(const Field& o) {
        check_same(o);
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
        return *this;
    }
    Field& operator-=(const Field& o) {
        check_same(o);
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
        return *this;
    }
    Field& operator*=(double a) noexcept {
        for (double& v : values_) v *= a;
        return *this;
    }

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double s, Field a) { return a *= s; }

private:
    void check_same(const Field& o) const {
        if (o.nx_ != nx_ || o.ny_ != ny_) throw StructuralError("Field: shape mismatch");
    }

    std::size_t nx_ = 0;
    std::size_t ny_ = 0;
    std::vector<double> values_;
};

inline void require_shape(const Grid2D& g, const Field& f, const char* where) {
    if (!f.matches(g)) {
        throw StructuralError(std::string(where) + ": field shape " + std::to_string(f.nx()) + "x" +
                              std::to_string(f.ny()) + " does not match grid " +
                              std::to_string(g.nx) + "x" + std::to_string(g.ny));
    }
}

inline double max_abs(std::span<const double> v) noexcept {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline bool all_finite(std::span<const double> v) noexcept {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace fadr
