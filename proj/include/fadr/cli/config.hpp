#pragma once

/// @file config.hpp
/// @brief JSON run configurations for the fadr driver.
///
/// Every field is optional unless noted and unknown keys are rejected, so a
/// typo fails loudly. Errors carry the JSON path of the offending field.

#include "fadr/brunner.hpp"
#include "fadr/channel.hpp"
#include "fadr/dispersion.hpp"
#include "fadr/errors.hpp"
#include "fadr/theta_fadr.hpp"

#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fadr::cli {

using json = nlohmann::json;

/// Invalid configuration; `path` names the field (e.g. "brunner.thetas[0]").
class ConfigError : public DomainError {
public:
    ConfigError(std::string path, const std::string& msg)
        : DomainError(path + ": " + msg), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

enum class Mode { brunner, dispersion, channel, fadr1d };

inline std::string to_string(Mode m) {
    switch (m) {
        case Mode::brunner: return "brunner";
        case Mode::dispersion: return "dispersion";
        case Mode::channel: return "channel";
        case Mode::fadr1d: return "fadr1d";
    }
    return "?";
}

inline std::optional<Mode> parse_mode(const std::string& s) {
    for (Mode m : {Mode::brunner, Mode::dispersion, Mode::channel, Mode::fadr1d})
        if (to_string(m) == s) return m;
    return std::nullopt;
}

struct BrunnerConfig {
    std::vector<BrunnerKind> kinds{BrunnerKind::dirichlet};
    std::vector<double> alphas{1.0};
    std::vector<double> thetas{1.0};
    std::size_t n_points = 51;
    double T = 0.35;
    /// Ladder of time steps (from "dts" or "ladder": base/2^k, k = k_min … k_max).
    std::vector<double> dts;
    GSConfig gs;
};

struct DispersionCell {
    double Pe = 0.0;
    double Da = 0.0;
};

struct DispersionConfig {
    /// alpha, theta, q, n_poly and the sampling ranges; Pe and Da come per cell.
    SpectralParams base;
    std::vector<DispersionCell> cells;
};

struct ChannelConfig {
    ChannelParams params;
    double theta = 1.0;
    std::size_t nx = 76;
    std::size_t ny = 51;
    double length = 5.0;
    ChannelSchedule schedule;
    ChannelBCs bcs;
};

enum class InitialProfile { sine, gaussian };

struct Fadr1dConfig {
    double alpha = 1.0;
    double theta = 1.0;
    std::size_t nx = 101;
    double x_lo = 0.0, x_hi = 1.0;
    BoundaryKind bc = BoundaryKind::periodic;
    double bc_lo = 0.0, bc_hi = 0.0;
    double c = 0.0, gamma = 0.0, lambda = 0.0;
    double T = 1.0;
    double dt = 1e-2;
    bool adaptive = false;
    AdaptiveConfig adapt;
    InitialProfile u0 = InitialProfile::sine;
    /// sine: sin(2π·wavenumber·(x − x_lo)/L); gaussian: exp(−(x − center)²/(2 width²)).
    double wavenumber = 1.0;
    double center = 0.5;
    double width = 0.05;
    GSConfig gs;
};

struct RunConfig {
    Mode mode = Mode::brunner;
    std::string output_dir;
    /// Seeds the channel perturbation; no other mode draws random numbers.
    std::uint64_t seed = 0;
    bool emit_csv = true;
    bool emit_json = false;
    std::optional<BrunnerConfig> brunner;
    std::optional<DispersionConfig> dispersion;
    std::optional<ChannelConfig> channel;
    std::optional<Fadr1dConfig> fadr1d;
    /// The parsed document, echoed into the manifest.
    json raw;
};

namespace detail {

inline std::string fmt(double d) {
    std::ostringstream os;
    os << d;
    return os.str();
}

inline std::string range_text(double lo, double hi, bool lo_open) {
    return std::string(lo_open ? "(" : "[") + fmt(lo) + ", " + fmt(hi) + "]";
}

/// Cursor into a JSON object that knows its path and the keys it accepts.
class Node {
public:
    Node(const json& j, std::string path, std::initializer_list<const char*> allowed) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || it.key() == a;
            if (!ok) throw ConfigError(child(it.key()), "unknown field");
        }
    }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const char* key) const { return j_.contains(key); }
    const json& at(const char* key) const { return j_.at(key); }

    double number(const char* key, double def) const {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(child(key), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(child(key), "must be finite");
        return d;
    }
    double number_in(const char* key, double def, double lo, double hi, bool lo_open = false) const {
        const double d = number(key, def);
        if (d > hi || d < lo || (lo_open && d == lo)) {
            throw ConfigError(child(key), "must be in " + range_text(lo, hi, lo_open));
        }
        return d;
    }
    double positive(const char* key, double def) const {
        const double d = number(key, def);
        if (!(d > 0.0)) throw ConfigError(child(key), "must be > 0");
        return d;
    }
    std::size_t count(const char* key, std::size_t def, std::size_t min = 0) const {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(child(key), "expected a non-negative integer");
        const auto n = v.get<std::size_t>();
        if (n < min) throw ConfigError(child(key), "must be >= " + std::to_string(min));
        return n;
    }
    bool boolean(const char* key, bool def) const {
        if (!has(key)) return def;
        if (!j_.at(key).is_boolean()) throw ConfigError(child(key), "expected true or false");
        return j_.at(key).get<bool>();
    }
    std::string string(const char* key, const std::string& def) const {
        if (!has(key)) return def;
        if (!j_.at(key).is_string()) throw ConfigError(child(key), "expected a string");
        return j_.at(key).get<std::string>();
    }
    std::vector<double> numbers(const char* key, std::vector<double> def) const {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_array() || v.empty()) throw ConfigError(child(key), "expected a non-empty array of numbers");
        std::vector<double> out;
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (!v[k].is_number()) throw ConfigError(child(key) + "[" + std::to_string(k) + "]", "expected a number");
            out.push_back(v[k].get<double>());
        }
        return out;
    }

private:
    const json& j_;
    std::string path_;
};

inline std::vector<double> checked_each(const Node& n, const char* key, std::vector<double> def, double lo, double hi,
                                        bool lo_open) {
    auto v = n.numbers(key, std::move(def));
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (v[k] > hi || v[k] < lo || (lo_open && v[k] == lo)) {
            throw ConfigError(n.child(key) + "[" + std::to_string(k) + "]", "must be in " + range_text(lo, hi, lo_open));
        }
    }
    return v;
}

inline GSConfig parse_gs(const Node& parent, const char* key, GSConfig def) {
    if (!parent.has(key)) return def;
    Node n(parent.at(key), parent.child(key), {"rel_tol", "max_iters"});
    def.rel_tol = n.positive("rel_tol", def.rel_tol);
    def.max_iters = n.count("max_iters", def.max_iters);
    return def;
}

inline SampleRange parse_range(const Node& parent, const char* key, SampleRange def) {
    if (!parent.has(key)) return def;
    Node n(parent.at(key), parent.child(key), {"lo", "hi", "count"});
    def.lo = n.number("lo", def.lo);
    def.hi = n.number("hi", def.hi);
    def.count = n.count("count", def.count);
    if (def.hi < def.lo) throw ConfigError(n.child("hi"), "must be >= lo");
    return def;
}

inline AdaptiveConfig parse_adapt(const Node& n, AdaptiveConfig a) {
    a.delta = n.positive("delta", a.delta);
    a.dt_min = n.positive("dt_min", a.dt_min);
    a.dt_max = n.positive("dt_max", a.dt_max);
    if (a.dt_max < a.dt_min) throw ConfigError(n.child("dt_max"), "must be >= dt_min");
    return a;
}

inline BrunnerConfig parse_brunner(const Node& root) {
    Node n(root.at("brunner"), "brunner", {"kinds", "alphas", "thetas", "n_points", "T", "dts", "ladder", "gs"});
    BrunnerConfig c;
    if (n.has("kinds")) {
        const json& v = n.at("kinds");
        if (!v.is_array() || v.empty()) throw ConfigError(n.child("kinds"), "expected a non-empty array");
        c.kinds.clear();
        for (std::size_t k = 0; k < v.size(); ++k) {
            const std::string s = v[k].is_string() ? v[k].get<std::string>() : "";
            if (s == "dirichlet") c.kinds.push_back(BrunnerKind::dirichlet);
            else if (s == "neumann") c.kinds.push_back(BrunnerKind::neumann);
            else throw ConfigError(n.child("kinds") + "[" + std::to_string(k) + "]", "expected \"dirichlet\" or \"neumann\"");
        }
    }
    c.alphas = checked_each(n, "alphas", c.alphas, 0.0, 1.0, true);
    c.thetas = checked_each(n, "thetas", c.thetas, 0.0, 1.0, false);
    c.n_points = n.count("n_points", c.n_points, 5);
    c.T = n.positive("T", c.T);
    if (n.has("dts") && n.has("ladder")) throw ConfigError(n.child("ladder"), "give either dts or ladder");
    if (n.has("ladder")) {
        Node l(n.at("ladder"), n.child("ladder"), {"base", "k_min", "k_max"});
        const double base = l.positive("base", c.T);
        const std::size_t k0 = l.count("k_min", 4), k1 = l.count("k_max", 9);
        if (k1 < k0) throw ConfigError(l.child("k_max"), "must be >= k_min");
        for (std::size_t k = k0; k <= k1; ++k) c.dts.push_back(std::ldexp(base, -static_cast<int>(k)));
    } else {
        c.dts = n.numbers("dts", {});
        for (std::size_t k = 0; k < c.dts.size(); ++k)
            if (!(c.dts[k] > 0.0)) throw ConfigError(n.child("dts") + "[" + std::to_string(k) + "]", "must be > 0");
    }
    if (c.dts.empty()) throw ConfigError(n.child("dts"), "a time-step ladder (dts or ladder) is required");
    c.gs = parse_gs(n, "gs", c.gs);
    return c;
}

inline DispersionConfig parse_dispersion(const Node& root) {
    Node n(root.at("dispersion"), "dispersion",
           {"alpha", "theta", "q", "n_poly", "cells", "kh", "Nc", "continuation_step", "dkh"});
    DispersionConfig c;
    SpectralParams& p = c.base;
    p.alpha = n.number_in("alpha", p.alpha, 0.0, 1.0, true);
    p.theta = n.number_in("theta", p.theta, 0.0, 1.0);
    p.q = n.number("q", p.q);
    if (p.q != 0.0 && p.q != 0.5) throw ConfigError(n.child("q"), "must be 0 or 0.5");
    p.n_poly = n.count("n_poly", p.n_poly, 2);
    p.kh_range = parse_range(n, "kh", {0.0, std::numbers::pi, 41});
    p.Nc_range = parse_range(n, "Nc", {0.0, 1.0, 41});
    p.continuation_step = n.positive("continuation_step", p.continuation_step);
    p.dkh = n.positive("dkh", p.dkh);
    if (!n.has("cells")) throw ConfigError(n.child("cells"), "required");
    const json& cells = n.at("cells");
    if (!cells.is_array() || cells.empty()) throw ConfigError(n.child("cells"), "expected a non-empty array");
    for (std::size_t k = 0; k < cells.size(); ++k) {
        Node cell(cells[k], n.child("cells") + "[" + std::to_string(k) + "]", {"Pe", "Da"});
        DispersionCell d;
        d.Pe = cell.number("Pe", 0.0);
        if (d.Pe < 0.0) throw ConfigError(cell.child("Pe"), "must be >= 0");
        d.Da = cell.number("Da", 0.0);
        c.cells.push_back(d);
    }
    return c;
}

inline ChannelConfig parse_channel(const Node& root) {
    Node n(root.at("channel"), "channel",
           {"Re", "We", "nu", "mu", "alpha", "theta", "grid", "schedule", "wall_vorticity", "psi_lower", "psi_upper"});
    ChannelConfig c;
    ChannelParams& p = c.params;
    p.Re = n.positive("Re", p.Re);
    p.We = n.positive("We", p.We);
    p.nu = n.number_in("nu", p.nu, 0.0, 1.0, true);
    if (p.nu == 1.0) throw ConfigError(n.child("nu"), "must be < 1");
    p.mu = n.number("mu", p.mu);
    if (p.mu < 0.0) throw ConfigError(n.child("mu"), "must be >= 0");
    p.alpha = n.number_in("alpha", p.alpha, 0.0, 1.0, true);
    c.theta = n.number_in("theta", c.theta, 0.0, 1.0);
    if (n.has("grid")) {
        Node g(n.at("grid"), n.child("grid"), {"nx", "ny", "length"});
        c.nx = g.count("nx", c.nx, 5);
        c.ny = g.count("ny", c.ny, 5);
        c.length = g.positive("length", c.length);
    }
    ChannelSchedule& s = c.schedule;
    if (n.has("schedule")) {
        Node sn(n.at("schedule"), n.child("schedule"),
                {"max_steps", "t_end", "dt0", "adaptive", "delta", "dt_min", "dt_max", "snapshot_every", "perturbation",
                 "gs", "poisson_sor", "wall_coupling"});
        s.max_steps = sn.count("max_steps", s.max_steps);
        s.t_end = sn.number("t_end", s.t_end);
        if (s.t_end < 0.0) throw ConfigError(sn.child("t_end"), "must be >= 0");
        s.adaptive = sn.boolean("adaptive", s.adaptive);
        s.adapt = parse_adapt(sn, s.adapt);
        s.dt0 = sn.positive("dt0", s.adapt.dt_min);
        s.snapshot_every = sn.count("snapshot_every", s.snapshot_every);
        s.perturbation = sn.number("perturbation", s.perturbation);
        if (s.perturbation < 0.0) throw ConfigError(sn.child("perturbation"), "must be >= 0");
        s.gs = parse_gs(sn, "gs", s.gs);
        s.poisson_sor = sn.boolean("poisson_sor", s.poisson_sor);
        if (sn.has("wall_coupling")) {
            Node w(sn.at("wall_coupling"), sn.child("wall_coupling"), {"max_iters", "rel_tol", "relaxation"});
            s.wall.max_iters = w.count("max_iters", s.wall.max_iters);
            s.wall.rel_tol = w.positive("rel_tol", s.wall.rel_tol);
            s.wall.relaxation = w.number_in("relaxation", s.wall.relaxation, 0.0, 1.0, true);
        }
        if (s.max_steps == 0 && s.t_end == 0.0) throw ConfigError(sn.child("t_end"), "give t_end or max_steps");
    } else {
        throw ConfigError(n.child("schedule"), "required");
    }
    const std::string wall = n.string("wall_vorticity", "jensen");
    if (wall == "jensen") c.bcs.wall_vorticity = WallVorticity::jensen;
    else if (wall == "thom") c.bcs.wall_vorticity = WallVorticity::thom;
    else throw ConfigError(n.child("wall_vorticity"), "expected \"jensen\" or \"thom\"");
    c.bcs.psi_lower = n.number("psi_lower", c.bcs.psi_lower);
    c.bcs.psi_upper = n.number("psi_upper", c.bcs.psi_upper);
    return c;
}

inline Fadr1dConfig parse_fadr1d(const Node& root) {
    Node n(root.at("fadr1d"), "fadr1d",
           {"alpha", "theta", "nx", "x_lo", "x_hi", "bc", "bc_values", "c", "gamma", "lambda", "T", "dt", "adaptive",
            "delta", "dt_min", "dt_max", "u0", "wavenumber", "center", "width", "gs"});
    Fadr1dConfig c;
    c.alpha = n.number_in("alpha", c.alpha, 0.0, 1.0, true);
    c.theta = n.number_in("theta", c.theta, 0.0, 1.0);
    c.nx = n.count("nx", c.nx, 5);
    c.x_lo = n.number("x_lo", c.x_lo);
    c.x_hi = n.number("x_hi", c.x_hi);
    if (!(c.x_hi > c.x_lo)) throw ConfigError(n.child("x_hi"), "must be > x_lo");
    const std::string bc = n.string("bc", "periodic");
    if (bc == "periodic") c.bc = BoundaryKind::periodic;
    else if (bc == "dirichlet") c.bc = BoundaryKind::dirichlet;
    else if (bc == "neumann") c.bc = BoundaryKind::neumann;
    else throw ConfigError(n.child("bc"), "expected \"periodic\", \"dirichlet\" or \"neumann\"");
    if (n.has("bc_values")) {
        const auto v = n.numbers("bc_values", {});
        if (v.size() != 2) throw ConfigError(n.child("bc_values"), "expected [lower, upper]");
        c.bc_lo = v[0];
        c.bc_hi = v[1];
    }
    c.c = n.number("c", c.c);
    c.gamma = n.number("gamma", c.gamma);
    if (c.gamma < 0.0) throw ConfigError(n.child("gamma"), "must be >= 0");
    c.lambda = n.number("lambda", c.lambda);
    c.T = n.positive("T", c.T);
    c.dt = n.positive("dt", c.dt);
    c.adaptive = n.boolean("adaptive", c.adaptive);
    c.adapt = parse_adapt(n, c.adapt);
    const std::string u0 = n.string("u0", "sine");
    if (u0 == "sine") c.u0 = InitialProfile::sine;
    else if (u0 == "gaussian") c.u0 = InitialProfile::gaussian;
    else throw ConfigError(n.child("u0"), "expected \"sine\" or \"gaussian\"");
    c.wavenumber = n.number("wavenumber", c.wavenumber);
    c.center = n.number("center", 0.5 * (c.x_lo + c.x_hi));
    c.width = n.positive("width", c.width);
    c.gs = parse_gs(n, "gs", c.gs);
    return c;
}

}  // namespace detail

/// Validates and converts a parsed document. `mode_hint` (from the
/// subcommand) fills in a missing "mode" and must agree with a present one.
inline RunConfig parse_config(const json& doc, std::optional<Mode> mode_hint = std::nullopt) {
    detail::Node root(doc, "",
                      {"mode", "output_dir", "seed", "emit", "brunner", "dispersion", "channel", "fadr1d", "description"});
    RunConfig c;
    c.raw = doc;
    if (root.has("mode")) {
        const auto m = parse_mode(root.string("mode", ""));
        if (!m) throw ConfigError("mode", "expected one of brunner, dispersion, channel, fadr1d");
        if (mode_hint && *mode_hint != *m) {
            throw ConfigError("mode", "config is for '" + to_string(*m) + "' but the subcommand is '" +
                                          to_string(*mode_hint) + "'");
        }
        c.mode = *m;
    } else if (mode_hint) {
        c.mode = *mode_hint;
    } else {
        throw ConfigError("mode", "required");
    }
    c.output_dir = root.string("output_dir", "");
    if (root.has("seed")) {
        const json& s = doc.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
            throw ConfigError("seed", "expected a non-negative integer");
        }
        c.seed = s.get<std::uint64_t>();
    }
    if (root.has("emit")) {
        const json& e = doc.at("emit");
        if (!e.is_array() || e.empty()) throw ConfigError("emit", "expected a non-empty array");
        c.emit_csv = c.emit_json = false;
        for (std::size_t k = 0; k < e.size(); ++k) {
            const std::string s = e[k].is_string() ? e[k].get<std::string>() : "";
            if (s == "csv") c.emit_csv = true;
            else if (s == "json") c.emit_json = true;
            else throw ConfigError("emit[" + std::to_string(k) + "]", "expected \"csv\" or \"json\"");
        }
    }
    const std::string key = to_string(c.mode);
    if (!root.has(key.c_str())) throw ConfigError(key, "required for mode '" + key + "'");
    switch (c.mode) {
        case Mode::brunner: c.brunner = detail::parse_brunner(root); break;
        case Mode::dispersion: c.dispersion = detail::parse_dispersion(root); break;
        case Mode::channel:
            c.channel = detail::parse_channel(root);
            c.channel->schedule.seed = c.seed;
            break;
        case Mode::fadr1d: c.fadr1d = detail::parse_fadr1d(root); break;
    }
    return c;
}

/// Reads and validates a config file.
inline RunConfig load_config(const std::string& path, std::optional<Mode> mode_hint = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc, mode_hint);
}

}  // namespace fadr::cli
