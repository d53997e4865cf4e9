#pragma once

/// @file experiments.hpp
/// @brief Experiment runners behind the fadr driver and their file output.

#include "fadr/brunner.hpp"
#include "fadr/channel.hpp"
#include "fadr/cli/config.hpp"
#include "fadr/dispersion.hpp"
#include "fadr/errors.hpp"
#include "fadr/theta_fadr.hpp"
#include "fadr/version.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fadr::cli {

using Warn = std::function<void(const std::string&)>;

/// Least-squares slope of log(error) against log(dt). Non-positive or
/// non-finite errors are dropped with a warning; fewer than 3 usable points
/// is an error.
inline double fit_convergence_slope(const std::vector<std::pair<double, double>>& table, const Warn& warn = {}) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [dt, err] : table) {
        if (!(err > 0.0) || !std::isfinite(err) || !(dt > 0.0)) {
            if (warn) warn("fit_convergence_slope: dropping point dt=" + detail::fmt(dt) + ", error=" + detail::fmt(err));
            continue;
        }
        pts.emplace_back(std::log(dt), std::log(err));
    }
    if (pts.size() < 3) throw DomainError("fit_convergence_slope: need at least 3 points with positive error");
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if (sxx == 0.0) throw DomainError("fit_convergence_slope: all time steps are equal");
    return sxy / sxx;
}

// ----------------------------------------------------------------------------
// Tables

using Cell = std::variant<double, long long, std::string>;

/// One output table; written as <name>.csv and/or embedded in results.json.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

inline void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << t.columns[k];
    os << '\n' << std::setprecision(17);
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) os << ',';
            std::visit([&os](const auto& v) { os << v; }, row[k]);
        }
        os << '\n';
    }
}

inline json to_json(const Table& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::array();
        for (const auto& c : row) std::visit([&r](const auto& v) { r.push_back(v); }, c);
        rows.push_back(std::move(r));
    }
    return {{"columns", t.columns}, {"rows", rows}};
}

struct RunOutput {
    std::vector<Table> tables;
    json summary = json::object();
    bool failed = false;
    std::string failure;
};

// ----------------------------------------------------------------------------
// Runners

inline RunOutput run_brunner(const BrunnerConfig& c, const Warn& warn = {}) {
    RunOutput out;
    Table errors{"brunner_errors", {"kind", "alpha", "theta", "dt", "steps", "relative_l2_error"}, {}};
    Table slopes{"brunner_slopes", {"kind", "alpha", "theta", "slope"}, {}};
    json fits = json::array();
    for (BrunnerKind kind : c.kinds) {
        for (double alpha : c.alphas) {
            for (double theta : c.thetas) {
                std::vector<std::pair<double, double>> ladder;
                for (double dt : c.dts) {
                    const BrunnerResult r = run_brunner_case(kind, alpha, theta, dt, c.n_points, c.T, c.gs);
                    ladder.emplace_back(dt, r.relative_l2_error);
                    errors.rows.push_back({to_string(kind), alpha, theta, dt, static_cast<long long>(r.steps),
                                           r.relative_l2_error});
                }
                json fit = {{"kind", to_string(kind)}, {"alpha", alpha}, {"theta", theta}};
                if (ladder.size() >= 3) {
                    const double slope = fit_convergence_slope(ladder, warn);
                    slopes.rows.push_back({to_string(kind), alpha, theta, slope});
                    fit["slope"] = slope;
                }
                fits.push_back(fit);
            }
        }
    }
    out.tables.push_back(std::move(errors));
    if (!slopes.rows.empty()) out.tables.push_back(std::move(slopes));
    out.summary["convergence"] = fits;
    return out;
}

inline std::string dispersion_cell_name(const DispersionCell& cell) {
    return "dispersion_Pe" + detail::fmt(cell.Pe) + "_Da" + detail::fmt(cell.Da);
}

inline RunOutput run_dispersion(const DispersionConfig& c) {
    RunOutput out;
    json cells = json::array();
    for (const DispersionCell& cell : c.cells) {
        SpectralParams p = c.base;
        p.Pe = cell.Pe;
        p.Da = cell.Da;
        const auto pts = contour_scan(p);
        Table t{dispersion_cell_name(cell),
                {"alpha", "theta", "Pe", "Da", "Nc", "kh", "ReG", "ImG", "beta", "delta_c", "Vg_ratio", "favorable"},
                {}};
        std::size_t favorable = 0, failed = 0;
        for (const auto& d : pts) {
            t.rows.push_back({p.alpha, p.theta, p.Pe, p.Da, d.Nc, d.kh, d.G_num.real(), d.G_num.imag(), d.beta,
                              d.delta_c, d.Vg_ratio, static_cast<long long>(d.favorable)});
            favorable += d.favorable;
            failed += d.failed;
        }
        cells.push_back({{"Pe", p.Pe}, {"Da", p.Da}, {"points", pts.size()}, {"favorable", favorable}, {"failed", failed}});
        out.tables.push_back(std::move(t));
    }
    out.summary["cells"] = cells;
    return out;
}

inline Table channel_state_table(const std::string& name, const Grid2D& g, const FieldState& s) {
    Table t{name, {"x", "y", "omega", "psi", "u", "v", "A11", "A12", "A22"}, {}};
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            t.rows.push_back({g.x(i), g.y(j), s.omega(i, j), s.psi(i, j), s.u(i, j), s.v(i, j), s.A11(i, j),
                              s.A12(i, j), s.A22(i, j)});
        }
    }
    return t;
}

inline RunOutput run_channel_experiment(const ChannelConfig& c, const Warn& warn = {}) {
    RunOutput out;
    const Grid2D g = channel_grid(c.nx, c.ny, c.length);
    const ChannelResult r = run_channel(c.params, ThetaScheme{c.theta}, g, c.schedule, c.bcs, warn);
    Table diag{"channel_diagnostics",
               {"step", "t", "dt", "intensity", "gs_vorticity", "gs_poisson", "wall_iterations", "defective_points",
                "min_A22"},
               {}};
    for (const auto& d : r.diagnostics) {
        diag.rows.push_back({static_cast<long long>(d.step), d.t, d.dt, d.intensity, static_cast<long long>(d.gs_vorticity),
                             static_cast<long long>(d.gs_poisson), static_cast<long long>(d.wall_iterations),
                             static_cast<long long>(d.defective_points), d.min_A22});
    }
    out.tables.push_back(std::move(diag));
    for (const auto& snap : r.snapshots) {
        char name[64];
        std::snprintf(name, sizeof name, "channel_snapshot_%06zu", snap.step);
        out.tables.push_back(channel_state_table(name, g, snap.state));
    }
    out.summary["steps"] = r.diagnostics.size();
    out.summary["t_final"] = r.state.t;
    out.summary["final_intensity"] = structure_intensity(g, r.state.omega);
    if (r.failed) {
        out.failed = true;
        out.failure = r.failure;
        out.tables.push_back(channel_state_table("channel_failure_state", g, r.state));
    }
    return out;
}

inline RunOutput run_fadr1d(const Fadr1dConfig& c, const Warn& warn = {}) {
    RunOutput out;
    FADRProblem p;
    p.grid = Grid2D::line(c.nx, c.x_lo, c.x_hi, c.bc, c.bc);
    p.alpha = c.alpha;
    p.K1x = c.c;
    p.K2 = c.gamma;
    p.lambda = c.lambda;
    p.bc = BoundarySpec::homogeneous(p.grid);
    p.bc.value[0] = c.bc_lo;
    p.bc.value[1] = c.bc_hi;
    const double L = c.x_hi - c.x_lo;
    if (c.u0 == InitialProfile::sine) {
        p.u0 = Field::from_function(p.grid, [&](double x, double) {
            return std::sin(2.0 * std::numbers::pi * c.wavenumber * (x - c.x_lo) / L);
        });
    } else {
        p.u0 = Field::from_function(p.grid, [&](double x, double) {
            return std::exp(-(x - c.center) * (x - c.center) / (2.0 * c.width * c.width));
        });
    }
    StepperOptions opt;
    opt.adaptive = c.adaptive;
    opt.adapt = c.adapt;
    opt.gs = c.gs;
    opt.warn = warn;
    ThetaStepper stepper(p, ThetaScheme{c.theta}, opt);
    try {
        if (c.adaptive) stepper.run_adaptive(c.T, c.dt);
        else stepper.run_uniform(c.T, c.dt);
    } catch (const NumericalError& e) {
        out.failed = true;
        out.failure = e.what();
    }
    Table sol{"fadr1d_solution", {"x", "u0", "u"}, {}};
    for (std::size_t i = 0; i < p.grid.nx; ++i) sol.rows.push_back({p.grid.x(i), p.u0(i, 0), stepper.solution()(i, 0)});
    Table steps{"fadr1d_steps", {"step", "t", "dt", "l2", "Nc", "Pe", "gs_iterations", "outside_box"}, {}};
    std::size_t outside = 0;
    for (const auto& r : stepper.records()) {
        steps.rows.push_back({static_cast<long long>(r.step), r.t, r.dt, r.l2, r.Nc, r.Pe,
                              static_cast<long long>(r.gs_iterations), static_cast<long long>(r.outside_box)});
        outside += r.outside_box;
    }
    out.tables.push_back(std::move(sol));
    out.tables.push_back(std::move(steps));
    out.summary["steps"] = stepper.steps();
    out.summary["t_final"] = stepper.time();
    out.summary["steps_outside_stability_box"] = outside;
    return out;
}

inline RunOutput run_experiment(const RunConfig& c, const Warn& warn = {}) {
    switch (c.mode) {
        case Mode::brunner: return run_brunner(*c.brunner, warn);
        case Mode::dispersion: return run_dispersion(*c.dispersion);
        case Mode::channel: return run_channel_experiment(*c.channel, warn);
        case Mode::fadr1d: return run_fadr1d(*c.fadr1d, warn);
    }
    throw StructuralError("run_experiment: unknown mode");
}

// ----------------------------------------------------------------------------
// Files and manifest

struct WrittenFile {
    std::string name;
    std::uintmax_t bytes = 0;
};

/// Writes the tables of `out` into `dir` (created if needed) in the requested
/// formats and returns the files written.
inline std::vector<WrittenFile> write_outputs(const std::filesystem::path& dir, const RunOutput& out, bool csv,
                                              bool as_json) {
    std::filesystem::create_directories(dir);
    std::vector<WrittenFile> files;
    auto record = [&](const std::string& name) {
        files.push_back({name, std::filesystem::file_size(dir / name)});
    };
    if (csv) {
        for (const Table& t : out.tables) {
            const std::string name = t.name + ".csv";
            std::ofstream f(dir / name, std::ios::binary);
            if (!f) throw StructuralError("cannot write " + (dir / name).string());
            write_csv(f, t);
            f.close();
            record(name);
        }
    }
    if (as_json) {
        json doc = json::object();
        for (const Table& t : out.tables) doc[t.name] = to_json(t);
        std::ofstream f(dir / "results.json", std::ios::binary);
        if (!f) throw StructuralError("cannot write " + (dir / "results.json").string());
        f << std::setprecision(17) << doc.dump(1) << '\n';
        f.close();
        record("results.json");
    }
    return files;
}

inline json make_manifest(const RunConfig& c, const RunOutput& out, const std::vector<WrittenFile>& files,
                          double wall_seconds) {
    json f = json::array();
    for (const auto& w : files) f.push_back({{"name", w.name}, {"bytes", w.bytes}});
    json m = {{"tool", "fadr"},
              {"version", kVersion},
              {"compiler", __VERSION__},
              {"cxx_standard", static_cast<long long>(__cplusplus)},
              {"mode", to_string(c.mode)},
              {"config", c.raw},
              {"wall_time_seconds", wall_seconds},
              {"status", out.failed ? "failed" : "ok"},
              {"summary", out.summary},
              {"files", f}};
    if (out.failed) m["failure"] = out.failure;
    return m;
}

/// Runs a validated config end to end: experiment, output files, manifest.
/// Returns the manifest (also written to <dir>/manifest.json).
inline json run(const RunConfig& c, const std::filesystem::path& dir, const Warn& warn = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    RunOutput out = run_experiment(c, warn);
    auto files = write_outputs(dir, out, c.emit_csv, c.emit_json);
    if (out.failed) {
        json diag = {{"failure", out.failure}, {"mode", to_string(c.mode)}, {"summary", out.summary}};
        std::ofstream f(dir / "failure.json", std::ios::binary);
        f << diag.dump(1) << '\n';
        f.close();
        files.push_back({"failure.json", std::filesystem::file_size(dir / "failure.json")});
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json manifest = make_manifest(c, out, files, wall);
    std::ofstream f(dir / "manifest.json", std::ios::binary);
    f << manifest.dump(1) << '\n';
    return manifest;
}

}  // namespace fadr::cli
