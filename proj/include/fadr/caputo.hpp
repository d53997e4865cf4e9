#pragma once

/// @file caputo.hpp
/// @brief L1 discretisation of the Caputo derivative, solution history, and
///        the step-doubling controller.
///
/// For a time grid t_0 < … < t_n and piecewise-linear u, the Caputo
/// derivative at t_n is
///
///     D^α u(t_n) ≈ scale · Σ_{m=0}^{n-1} w_m (u_{n-m} − u_{n-m-1})
///
/// where lag m = 0 is the newest increment. On a uniform grid of spacing h,
/// w_m = (m+1)^{1−α} − m^{1−α} and scale = h^{−α}/Γ(2−α). On a general grid
/// each w_m comes from integrating (t_n − s)^{−α} exactly over its subinterval.

#include "fadr/errors.hpp"
#include "fadr/ml_special.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fadr {

struct L1Weights {
    double alpha = 0.5;
    /// Indexed by lag: weights[0] multiplies the newest increment.
    std::vector<double> weights;
    /// Time stamps t_0 … t_n; weights.size() == grid.size() − 1.
    std::vector<double> grid;
    /// Prefactor applied to the weighted sum (h^{−α}/Γ(2−α) on uniform grids).
    double scale = 1.0;

    std::size_t size() const noexcept { return weights.size(); }
};

namespace detail {

/// (b + τ)^p − b^p without cancellation for τ ≪ b.
inline double power_increment(double b, double tau, double p) {
    if (b <= 0.0) return std::pow(tau, p);
    return std::pow(b, p) * std::expm1(p * std::log1p(tau / b));
}

inline void check_order(double alpha, bool allow_one, const char* where) {
    const bool ok = allow_one ? (alpha > 0.0 && alpha <= 1.0) : (alpha > 0.0 && alpha < 1.0);
    if (!ok) {
        throw DomainError(std::string(where) + ": alpha = " + std::to_string(alpha) +
                          (allow_one ? " outside (0, 1]" : " outside (0, 1)"));
    }
}

}  // namespace detail

/// Uniform-grid L1 weights r_0 … r_{n-1} for step `dt` (default: unit step).
inline L1Weights l1_weights_uniform(double alpha, std::size_t n, double dt = 1.0) {
    detail::check_order(alpha, false, "l1_weights_uniform");
    if (n < 1) throw DomainError("l1_weights_uniform: n must be >= 1");
    if (!(dt > 0.0)) throw DomainError("l1_weights_uniform: dt must be > 0");

    const double p = 1.0 - alpha;
    L1Weights w;
    w.alpha = alpha;
    w.weights.resize(n);
    w.weights[0] = 1.0;
    for (std::size_t m = 1; m < n; ++m) {
        w.weights[m] = detail::power_increment(static_cast<double>(m), 1.0, p);
    }
    w.grid.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) w.grid[k] = static_cast<double>(k) * dt;
    w.scale = std::pow(dt, -alpha) / gamma_two_minus(alpha);
    return w;
}

/// L1 weights for the newest point of an arbitrary increasing grid.
///
/// Normalised by the last step τ = t_n − t_{n−1} so that a uniform grid
/// reproduces l1_weights_uniform. Accepts α = 1, where only the newest
/// increment survives (backward difference).
inline L1Weights l1_weights_nonuniform(double alpha, std::span<const double> grid) {
    detail::check_order(alpha, true, "l1_weights_nonuniform");
    if (grid.size() < 2) throw DomainError("l1_weights_nonuniform: grid needs at least 2 points");
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (!(grid[k] > grid[k - 1])) {
            throw DomainError("l1_weights_nonuniform: grid not strictly increasing at index " +
                              std::to_string(k));
        }
    }

    const std::size_t n = grid.size() - 1;
    const double p = 1.0 - alpha;
    const double tn = grid[n];
    const double last = tn - grid[n - 1];

    L1Weights w;
    w.alpha = alpha;
    w.grid.assign(grid.begin(), grid.end());
    w.weights.resize(n);
    w.weights[0] = 1.0;
    for (std::size_t m = 1; m < n; ++m) {
        // subinterval [t_{n-1-m}, t_{n-m}]
        const double tau = grid[n - m] - grid[n - 1 - m];
        const double b = tn - grid[n - m];
        w.weights[m] = detail::power_increment(b, tau, p) / tau * std::pow(last, alpha);
    }
    w.scale = std::pow(last, -alpha) / gamma_two_minus(alpha);
    return w;
}

/// Time-stamped snapshots of a field; the memory of the fractional derivative.
class L1History {
public:
    L1History() = default;

    void push(double t, std::vector<double> values) {
        if (!snapshots_.empty()) {
            if (!(t > times_.back())) {
                throw StructuralError("L1History: time stamps must be strictly increasing");
            }
            if (values.size() != snapshots_.front().size()) {
                throw StructuralError("L1History: snapshot size " + std::to_string(values.size()) +
                                      " differs from " +
                                      std::to_string(snapshots_.front().size()));
            }
        }
        times_.push_back(t);
        snapshots_.push_back(std::move(values));
    }

    bool empty() const noexcept { return snapshots_.empty(); }
    std::size_t size() const noexcept { return snapshots_.size(); }
    std::size_t field_size() const noexcept {
        return snapshots_.empty() ? 0 : snapshots_.front().size();
    }
    double time(std::size_t i) const { return times_.at(i); }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<double>& snapshot(std::size_t i) const { return snapshots_.at(i); }
    const std::vector<double>& latest() const { return snapshots_.back(); }

    /// Time stamps of the history followed by `t_next`.
    std::vector<double> grid_with(double t_next) const {
        std::vector<double> g = times_;
        g.push_back(t_next);
        return g;
    }

private:
    std::vector<double> times_;
    std::vector<std::vector<double>> snapshots_;
};

namespace detail {

inline void check_consistent(const L1History& history, const L1Weights& weights) {
    if (history.empty()) throw StructuralError("caputo: empty history");
    if (weights.size() != history.size()) {
        throw StructuralError("caputo: " + std::to_string(weights.size()) + " weights for " +
                              std::to_string(history.size()) + " history snapshots");
    }
}

}  // namespace detail

/// Memory part of the discrete derivative: every lag except the newest one,
/// already multiplied by `weights.scale`.
inline std::vector<double> caputo_memory(const L1History& history, const L1Weights& weights) {
    detail::check_consistent(history, weights);
    const std::size_t n = history.size();
    std::vector<double> acc(history.field_size(), 0.0);
    for (std::size_t m = 1; m < n; ++m) {
        const double w = weights.weights[m];
        const auto& hi = history.snapshot(n - m);
        const auto& lo = history.snapshot(n - m - 1);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * (hi[i] - lo[i]);
    }
    for (double& a : acc) a *= weights.scale;
    return acc;
}

/// Discrete Caputo derivative at the newest grid time, with `current` the
/// field value there and `history` holding all earlier snapshots.
inline std::vector<double> caputo_apply(const L1History& history, const L1Weights& weights,
                                        std::span<const double> current) {
    if (current.size() != history.field_size()) {
        throw StructuralError("caputo_apply: current field size mismatch");
    }
    std::vector<double> out = caputo_memory(history, weights);
    const auto& prev = history.latest();
    const double lead = weights.scale * weights.weights[0];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += lead * (current[i] - prev[i]);
    return out;
}

/// The two pieces an implicit L1 step needs at t_next: the coefficient of
/// the unknown (scale·w_0) and the memory contribution of all older lags.
struct L1StepTerms {
    double lead = 0.0;
    std::vector<double> memory;
};

/// Weights are rebuilt from the stored time stamps so any step-size history
/// is handled; lags whose weight vanishes (α = 1) are skipped.
inline L1StepTerms l1_step_terms(const L1History& history, double alpha, double t_next) {
    if (history.empty()) throw StructuralError("l1_step_terms: empty history");
    const auto grid = history.grid_with(t_next);
    const auto w = l1_weights_nonuniform(alpha, grid);
    L1StepTerms out;
    out.lead = w.scale * w.weights[0];
    out.memory.assign(history.field_size(), 0.0);
    const std::size_t n = history.size();
    for (std::size_t m = 1; m < n; ++m) {
        const double wm = w.weights[m] * w.scale;
        if (wm == 0.0) continue;
        const auto& hi = history.snapshot(n - m);
        const auto& lo = history.snapshot(n - m - 1);
        for (std::size_t i = 0; i < out.memory.size(); ++i) out.memory[i] += wm * (hi[i] - lo[i]);
    }
    return out;
}

struct AdaptiveConfig {
    double delta = 1e-3;
    double dt_min = 1e-3;
    double dt_max = 1.6e-2;
    double growth_factor = 2.0;

    void validate() const {
        if (!(delta > 0.0)) throw DomainError("AdaptiveConfig: delta must be > 0");
        if (!(dt_min > 0.0 && dt_min <= dt_max)) {
            throw DomainError("AdaptiveConfig: need 0 < dt_min <= dt_max");
        }
        if (growth_factor != 2.0) throw DomainError("AdaptiveConfig: growth_factor is fixed at 2");
    }
};

struct AdaptDecision {
    double dt = 0.0;
    /// ‖u_new − u_old‖₂ / ‖u_old‖₂ (0 when the norm is degenerate).
    double relative_change = 0.0;
    bool grew = false;
    bool degenerate_norm = false;
};

inline double l2_norm(std::span<const double> v) {
    long double s = 0.0L;
    for (double x : v) s += static_cast<long double>(x) * x;
    return static_cast<double>(std::sqrt(s));
}

/// Doubles dt when the relative l2 change between consecutive solutions is
/// below δ, as long as the doubled step stays within dt_max.
inline AdaptDecision adapt_step(std::span<const double> u_new, std::span<const double> u_old,
                                const AdaptiveConfig& cfg, double dt) {
    cfg.validate();
    if (u_new.size() != u_old.size()) throw StructuralError("adapt_step: size mismatch");

    AdaptDecision d;
    d.dt = std::clamp(dt, cfg.dt_min, cfg.dt_max);
    const double norm_old = l2_norm(u_old);
    if (norm_old == 0.0) {
        d.degenerate_norm = true;
        return d;
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < u_new.size(); ++i) {
        const double e = u_new[i] - u_old[i];
        diff += e * e;
    }
    d.relative_change = std::sqrt(diff) / norm_old;
    const double grown = cfg.growth_factor * d.dt;
    if (d.relative_change < cfg.delta && grown <= cfg.dt_max * (1.0 + 1e-12)) {
        d.dt = std::min(grown, cfg.dt_max);
        d.grew = true;
    }
    return d;
}

}  // namespace fadr
