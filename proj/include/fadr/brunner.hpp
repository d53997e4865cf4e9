#pragma once

/// @file brunner.hpp
/// @brief 2D fractional diffusion benchmark on [−1,1]² with K1 = f = 0, K2 = 1.
///
/// Both initial conditions are Laplacian eigenfunctions with eigenvalue
/// −π²/2, so the exact solution is E_α(−(π²/2) t^α)·u₀(x, y):
///   dirichlet: u₀ = cos(πx/2) cos(πy/2), zero Dirichlet data
///   neumann:   u₀ = sin(πx/2) sin(πy/2), zero Neumann data

#include "fadr/errors.hpp"
#include "fadr/grid.hpp"
#include "fadr/ml_special.hpp"
#include "fadr/theta_fadr.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>

namespace fadr {

enum class BrunnerKind { dirichlet, neumann };

inline std::string to_string(BrunnerKind k) { return k == BrunnerKind::dirichlet ? "dirichlet" : "neumann"; }

struct BrunnerResult {
    double relative_l2_error = 0.0;
    Field solution;
    Field exact;
    Grid2D grid;
    std::size_t steps = 0;
};

inline constexpr double kBrunnerDecay = std::numbers::pi * std::numbers::pi / 2.0;

inline FADRProblem brunner_problem(BrunnerKind kind, double alpha, std::size_t n_points) {
    const auto bk = kind == BrunnerKind::dirichlet ? BoundaryKind::dirichlet : BoundaryKind::neumann;
    FADRProblem p;
    p.grid = Grid2D::make(n_points, n_points, -1.0, 1.0, -1.0, 1.0, {bk, bk, bk, bk});
    p.alpha = alpha;
    p.K2 = 1.0;
    p.bc = BoundarySpec::homogeneous(p.grid);
    const double h = std::numbers::pi / 2.0;
    if (kind == BrunnerKind::dirichlet) {
        p.u0 = Field::from_function(p.grid, [h](double x, double y) { return std::cos(h * x) * std::cos(h * y); });
    } else {
        p.u0 = Field::from_function(p.grid, [h](double x, double y) { return std::sin(h * x) * std::sin(h * y); });
    }
    return p;
}

inline Field brunner_exact(const FADRProblem& p, double t) {
    const double decay = t == 0.0 ? 1.0 : mittag_leffler(-kBrunnerDecay * std::pow(t, p.alpha), {.alpha = p.alpha});
    return decay * p.u0;
}

inline double relative_l2(const Field& approx, const Field& exact) {
    const Field diff = approx - exact;
    return l2_norm(diff.values()) / l2_norm(exact.values());
}

/// Integrates to T with uniform dt and compares against the exact solution.
inline BrunnerResult run_brunner_case(BrunnerKind kind, double alpha, double theta, double dt,
                                      std::size_t n_points, double T, GSConfig gs = {}) {
    if (!(T >= 0.0)) throw DomainError("run_brunner_case: T must be >= 0");
    FADRProblem p = brunner_problem(kind, alpha, n_points);
    StepperOptions opt;
    opt.gs = gs;
    opt.box.Pe_max = std::numeric_limits<double>::infinity();
    ThetaStepper stepper(p, ThetaScheme{theta}, opt);
    if (T > 0.0) stepper.run_uniform(T, dt);

    BrunnerResult r;
    r.grid = p.grid;
    r.solution = stepper.solution();
    r.exact = brunner_exact(p, T);
    r.steps = stepper.steps();
    r.relative_l2_error = relative_l2(r.solution, r.exact);
    return r;
}

}  // namespace fadr
