#pragma once

/// @file theta_fadr.hpp
/// @brief θ-IMEX stepper for scalar fractional advection–diffusion–reaction
///
///     ∂^α u/∂t^α + K1·∇u = K2 ∇²u + f(x, t, u)
///
/// in 1D (line grids) and 2D. Each step solves
///
///     s w_0 uⁿ − θ K2 ∇²uⁿ = s w_0 u^{n−1} − M − K1·∇u^{n−1} + (1−θ) K2 ∇²u^{n−1} + f^{n−1}
///
/// where s w_0 and M are the newest-lag coefficient and the memory sum of the
/// L1 scheme. Advection (UD3) and reaction are explicit at t_{n−1}.

#include "fadr/caputo.hpp"
#include "fadr/errors.hpp"
#include "fadr/grid.hpp"
#include "fadr/linsolve.hpp"
#include "fadr/stencil.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fadr {

/// A constant or a per-point coefficient.
struct Coefficient {
    double constant = 0.0;
    std::optional<Field> field;

    Coefficient() = default;
    Coefficient(double c) : constant(c) {}  // NOLINT: implicit by design
    Coefficient(Field f) : field(std::move(f)) {}  // NOLINT

    bool is_zero() const noexcept {
        if (!field) return constant == 0.0;
        return max_abs(field->values()) == 0.0;
    }
    double max_magnitude() const noexcept { return field ? max_abs(field->values()) : std::abs(constant); }
    Field on(const Grid2D& g) const {
        if (!field) return Field(g, constant);
        require_shape(g, *field, "Coefficient");
        return *field;
    }
};

struct FADRProblem {
    Grid2D grid;
    double alpha = 1.0;
    /// Advection speed along x and y.
    Coefficient K1x;
    Coefficient K1y;
    /// Diffusivity γ (constant).
    double K2 = 0.0;
    /// Linear reaction rate λ in f = λu + source.
    double lambda = 0.0;
    /// Extra source f(x, y, t, u); may be empty.
    std::function<double(double, double, double, double)> source;
    BoundarySpec bc;
    Field u0;

    void validate() const {
        grid.validate();
        if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("FADRProblem: alpha must be in (0, 1]");
        if (!(K2 >= 0.0) || !std::isfinite(K2)) throw DomainError("FADRProblem: K2 must be >= 0");
        if (!std::isfinite(lambda)) throw DomainError("FADRProblem: lambda must be finite");
        require_shape(grid, u0, "FADRProblem.u0");
        if (K1x.field) require_shape(grid, *K1x.field, "FADRProblem.K1x");
        if (K1y.field) require_shape(grid, *K1y.field, "FADRProblem.K1y");
        if (grid.is_line() && !K1y.is_zero()) throw StructuralError("FADRProblem: K1y on a line grid");
    }
};

struct ThetaScheme {
    double theta = 1.0;

    void validate() const {
        if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("ThetaScheme: theta must be in [0, 1]");
    }
};

/// N_c = c Δt^α/Δx, Pe = γ Δt^α/Δx², Da = λ Δx/c (absent when c = 0).
struct DimGroups {
    double Nc = 0.0;
    double Pe = 0.0;
    std::optional<double> Da;
    double c = 0.0, gamma = 0.0, lambda = 0.0;
    double dt = 0.0, dx = 0.0, alpha = 1.0;
};

inline DimGroups dim_groups(double c, double gamma, double lambda, double alpha, double dt, double dx) {
    if (!(dt > 0.0) || !(dx > 0.0)) throw DomainError("dim_groups: dt and dx must be > 0");
    DimGroups d;
    d.c = c;
    d.gamma = gamma;
    d.lambda = lambda;
    d.dt = dt;
    d.dx = dx;
    d.alpha = alpha;
    const double ta = std::pow(dt, alpha);
    d.Nc = c * ta / dx;
    d.Pe = gamma * ta / (dx * dx);
    if (c != 0.0) d.Da = lambda * dx / c;
    return d;
}

/// Uses the largest advection speed magnitude as c.
inline DimGroups dim_groups(const FADRProblem& p, double dt, double dx) {
    const double c = std::max(p.K1x.max_magnitude(), p.K1y.max_magnitude());
    return dim_groups(c, p.K2, p.lambda, p.alpha, dt, dx);
}

/// Region of (N_c, Pe) outside which a warning is raised.
struct StabilityBox {
    double Nc_max = 1.0;
    double Pe_max = 1.0;

    bool contains(const DimGroups& d) const noexcept {
        return std::abs(d.Nc) <= Nc_max && std::abs(d.Pe) <= Pe_max;
    }
};

struct StepRecord {
    std::size_t step = 0;
    double t = 0.0;
    double dt = 0.0;
    double l2 = 0.0;
    double Nc = 0.0;
    double Pe = 0.0;
    std::size_t gs_iterations = 0;
    bool outside_box = false;
};

struct StepperOptions {
    bool adaptive = false;
    AdaptiveConfig adapt;
    GSConfig gs;
    StabilityBox box;
    /// Receives stability warnings; std::cerr-free by default.
    std::function<void(const std::string&)> warn;
};

/// Owns the solution history of one problem and advances it in time.
class ThetaStepper {
public:
    ThetaStepper(FADRProblem problem, ThetaScheme scheme, StepperOptions options = {})
        : p_(std::move(problem)), scheme_(scheme), opt_(std::move(options)) {
        p_.validate();
        scheme_.validate();
        if (opt_.adaptive) opt_.adapt.validate();
        u_ = p_.u0;
        history_.push(0.0, u_.vector());
        k1x_ = p_.K1x.on(p_.grid);
        if (!p_.grid.is_line()) k1y_ = p_.K1y.on(p_.grid);
    }

    const Field& solution() const noexcept { return u_; }
    double time() const noexcept { return history_.times().back(); }
    std::size_t steps() const noexcept { return history_.size() - 1; }
    const L1History& history() const noexcept { return history_; }
    const std::vector<StepRecord>& records() const noexcept { return records_; }
    const FADRProblem& problem() const noexcept { return p_; }

    /// One step of size dt; returns the new solution.
    const Field& step(double dt) {
        if (!(dt > 0.0)) throw DomainError("ThetaStepper::step: dt must be > 0");
        const Grid2D& g = p_.grid;
        const double t_prev = time();
        const double t_next = t_prev + dt;
        const double theta = scheme_.theta;
        const double gamma = p_.K2;

        const L1StepTerms l1 = l1_step_terms(history_, p_.alpha, t_next);
        const Field& up = u_;

        Field rhs = up;
        rhs *= l1.lead;
        for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] -= l1.memory[k];
        if (!p_.K1x.is_zero()) rhs -= advect_uds(g, up, k1x_, Axis::x);
        if (!g.is_line() && !p_.K1y.is_zero()) rhs -= advect_uds(g, up, k1y_, Axis::y);
        if (gamma != 0.0 && theta != 1.0) rhs += ((1.0 - theta) * gamma) * laplacian_cds(g, up);
        if (p_.lambda != 0.0 || p_.source) {
            for (std::size_t j = 0; j < g.ny; ++j) {
                for (std::size_t i = 0; i < g.nx; ++i) {
                    const double u = up(i, j);
                    double f = p_.lambda * u;
                    if (p_.source) f += p_.source(g.x(i), g.y(j), t_prev, u);
                    rhs(i, j) += f;
                }
            }
        }

        const std::size_t index = steps() + 1;
        if (!all_finite(rhs.values())) throw NumericalError("ThetaStepper: non-finite right-hand side", index);

        BlockDiagSpec spec = BlockDiagSpec::implicit_diffusion(g, theta * gamma, l1.lead);
        for (std::size_t e = 0; e < 4; ++e)
            if (g.bc[e] == BoundaryKind::neumann) spec.neumann_flux[e] = p_.bc.value[e];
        Field guess = apply_bc(g, up, p_.bc);
        GSResult sol = gauss_seidel(spec, rhs, guess, opt_.gs);
        Field next = apply_bc(g, std::move(sol.x), p_.bc);

        if (!all_finite(next.values())) {
            throw NumericalError("ThetaStepper: non-finite solution", index);
        }

        const DimGroups d = dim_groups(p_, dt, g.dx);
        StepRecord rec;
        rec.step = index;
        rec.t = t_next;
        rec.dt = dt;
        rec.l2 = l2_norm(next.values());
        rec.Nc = d.Nc;
        rec.Pe = d.Pe;
        rec.gs_iterations = sol.iterations;
        rec.outside_box = !opt_.box.contains(d);
        if (rec.outside_box && opt_.warn) {
            opt_.warn("step " + std::to_string(index) + ": (Nc, Pe) = (" + std::to_string(d.Nc) + ", " +
                      std::to_string(d.Pe) + ") outside the stability box");
        }
        records_.push_back(rec);

        history_.push(t_next, next.vector());
        u_ = std::move(next);
        return u_;
    }

    /// Uniform steps of size dt until T (T/dt must be an integer up to rounding).
    const Field& run_uniform(double T, double dt) {
        const double n_real = (T - time()) / dt;
        const auto n = static_cast<std::size_t>(std::llround(n_real));
        if (std::abs(n_real - static_cast<double>(n)) > 1e-8 * std::max(1.0, n_real)) {
            throw DomainError("run_uniform: (T − t)/dt is not an integer");
        }
        const double t0 = time();
        for (std::size_t k = 1; k <= n; ++k) {
            // stamp times as t0 + k·dt so the grid stays uniform to rounding
            const double target = t0 + static_cast<double>(k) * dt;
            step(target - time());
        }
        return u_;
    }

    /// Adaptive run: dt starts at dt0 and doubles per adapt_step. The last
    /// step is shortened to land on T.
    const Field& run_adaptive(double T, double dt0) {
        double dt = dt0;
        while (time() < T * (1.0 - 1e-14)) {
            const double h = std::min(dt, T - time());
            const std::vector<double> old = u_.vector();
            step(h);
            if (opt_.adaptive) dt = adapt_step(u_.values(), old, opt_.adapt, dt).dt;
        }
        return u_;
    }

private:
    FADRProblem p_;
    ThetaScheme scheme_;
    StepperOptions opt_;
    Field u_;
    Field k1x_, k1y_;
    L1History history_;
    std::vector<StepRecord> records_;
};

}  // namespace fadr
