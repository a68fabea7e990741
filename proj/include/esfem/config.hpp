#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "core.hpp"
#include "solver.hpp"
#include "timestepping.hpp"

namespace esfem {

enum class MotionMode { ale, lagrangian, both };

/// tau = constant * h0 (kind h), constant * h0^2 (kind h2) or tau = constant (fixed),
/// with h0 the largest edge of the initial mesh.
struct TauCoupling {
    enum class Kind { h, h2, fixed };
    Kind kind = Kind::h;
    double constant = 0.1;

    [[nodiscard]] double tau(double h0) const
    {
        switch (kind) {
        case Kind::h:
            return constant * h0;
        case Kind::h2:
            return constant * h0 * h0;
        case Kind::fixed:
            break;
        }
        return constant;
    }
};

/// One experiment run. Fields left unset take the per-example defaults of
/// `with_defaults`.
struct RunConfig {
    int example = 1;
    MotionMode mode = MotionMode::ale;
    std::vector<int> levels;
    SchemeKind scheme = SchemeKind::bdf2;
    TauCoupling tau_coupling;
    double final_time = 2.0;
    SolverOptions solver;
    int quadrature_degree = 6;
    std::filesystem::path output_dir = "out";
    std::vector<double> snapshots;
    std::vector<int> variants{1, 2, 3, 4};
    int rk4_substeps = 4;
    int macro_cells = 10;
    long record_every = 1;
};

/// Default protocol for each example.
inline RunConfig default_config(int example)
{
    RunConfig c;
    c.example = example;
    switch (example) {
    case 1:
        c.mode = MotionMode::ale;
        c.levels = {2, 3, 4, 5, 6};
        c.scheme = SchemeKind::bdf2;
        c.tau_coupling = {TauCoupling::Kind::h, 0.1};
        c.final_time = 2.0;
        break;
    case 2:
        c.mode = MotionMode::both;
        c.levels = {1};
        c.scheme = SchemeKind::bdf2;
        c.tau_coupling = {TauCoupling::Kind::fixed, 1e-3};
        c.final_time = 1.0;
        c.snapshots = {0.2, 0.4, 0.7, 1.0};
        break;
    case 3:
        c.mode = MotionMode::both;
        c.levels = {4};
        c.scheme = SchemeKind::bdf1;
        c.tau_coupling = {TauCoupling::Kind::fixed, 1e-5};
        c.final_time = 0.25;
        c.snapshots = {0.25};
        c.record_every = 100;
        break;
    case 4:
        c.mode = MotionMode::lagrangian;
        c.levels = {6};
        c.scheme = SchemeKind::bdf1;
        c.tau_coupling = {TauCoupling::Kind::fixed, 1e-4};
        c.final_time = 6.0;
        c.rk4_substeps = 1;
        c.record_every = 100;
        break;
    default:
        throw ConfigError("example must be 1, 2, 3 or 4");
    }
    return c;
}

namespace detail {

template <class T>
T json_get(const nlohmann::json& j, const char* key, const T& fallback)
{
    if (!j.contains(key))
        return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

inline MotionMode parse_mode(const std::string& s)
{
    if (s == "ale")
        return MotionMode::ale;
    if (s == "lagrangian")
        return MotionMode::lagrangian;
    if (s == "both")
        return MotionMode::both;
    throw ConfigError("mode must be ale, lagrangian or both, got '" + s + "'");
}

inline SchemeKind parse_scheme(const std::string& s)
{
    if (s == "bdf1")
        return SchemeKind::bdf1;
    if (s == "bdf2")
        return SchemeKind::bdf2;
    throw ConfigError("scheme must be bdf1 or bdf2, got '" + s + "'");
}

inline SolverKind parse_solver_kind(const std::string& s)
{
    if (s == "auto" || s == "automatic")
        return SolverKind::automatic;
    if (s == "direct")
        return SolverKind::direct;
    if (s == "krylov" || s == "bicgstab")
        return SolverKind::krylov;
    throw ConfigError("solver.kind must be auto, direct or krylov, got '" + s + "'");
}

} // namespace detail

/// Parses the JSON run description
///   {example, mode, levels, scheme, tau_coupling: {kind, constant}, final_time,
///    solver: {kind, tol, max_iter}, quadrature_degree, output_dir, snapshots,
///    variants, rk4_substeps, macro_cells, record_every}
/// Only `example` is required.
inline RunConfig parse_config(const nlohmann::json& j)
{
    using detail::json_get;
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    if (!j.contains("example"))
        throw ConfigError("config needs an 'example' entry");
    RunConfig c = default_config(json_get<int>(j, "example", 0));

    if (j.contains("mode"))
        c.mode = detail::parse_mode(json_get<std::string>(j, "mode", ""));
    if (j.contains("levels")) {
        if (j["levels"].is_number_integer())
            c.levels = {j["levels"].get<int>()};
        else
            c.levels = json_get<std::vector<int>>(j, "levels", {});
    }
    if (j.contains("scheme"))
        c.scheme = detail::parse_scheme(json_get<std::string>(j, "scheme", ""));
    if (j.contains("tau_coupling")) {
        const auto& tc = j["tau_coupling"];
        if (!tc.is_object())
            throw ConfigError("tau_coupling must be an object");
        const std::string kind = json_get<std::string>(tc, "kind", "h");
        if (kind == "h")
            c.tau_coupling.kind = TauCoupling::Kind::h;
        else if (kind == "h2")
            c.tau_coupling.kind = TauCoupling::Kind::h2;
        else if (kind == "fixed")
            c.tau_coupling.kind = TauCoupling::Kind::fixed;
        else
            throw ConfigError("tau_coupling.kind must be h, h2 or fixed, got '" + kind + "'");
        c.tau_coupling.constant = json_get<double>(tc, "constant", c.tau_coupling.constant);
    }
    c.final_time = json_get<double>(j, "final_time", c.final_time);
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        if (!s.is_object())
            throw ConfigError("solver must be an object");
        if (s.contains("kind"))
            c.solver.kind = detail::parse_solver_kind(json_get<std::string>(s, "kind", ""));
        c.solver.tolerance = json_get<double>(s, "tol", c.solver.tolerance);
        c.solver.max_iterations = json_get<int>(s, "max_iter", c.solver.max_iterations);
    }
    c.quadrature_degree = json_get<int>(j, "quadrature_degree", c.quadrature_degree);
    c.output_dir = json_get<std::string>(j, "output_dir", c.output_dir.string());
    c.snapshots = json_get<std::vector<double>>(j, "snapshots", c.snapshots);
    c.variants = json_get<std::vector<int>>(j, "variants", c.variants);
    c.rk4_substeps = json_get<int>(j, "rk4_substeps", c.rk4_substeps);
    c.macro_cells = json_get<int>(j, "macro_cells", c.macro_cells);
    c.record_every = json_get<long>(j, "record_every", c.record_every);

    if (c.levels.empty())
        throw ConfigError("levels must not be empty");
    for (int l : c.levels)
        if (l < 0 || l > 9)
            throw ConfigError("levels must lie in 0..9");
    if (c.example == 1 && c.mode == MotionMode::both)
        throw ConfigError("example 1 runs one motion per config");
    if (c.example == 4 && c.mode != MotionMode::lagrangian)
        throw ConfigError("example 4 uses Lagrangian motion");
    if (!(c.tau_coupling.constant > 0.0))
        throw ConfigError("tau_coupling.constant must be positive");
    if (!(c.final_time > 0.0))
        throw ConfigError("final_time must be positive");
    if (!(c.solver.tolerance > 0.0) || c.solver.max_iterations < 1)
        throw ConfigError("solver tolerance and max_iter must be positive");
    if (c.quadrature_degree < 1 || c.quadrature_degree > 20)
        throw ConfigError("quadrature_degree must lie in 1..20");
    if (c.rk4_substeps < 1 || c.macro_cells < 2 || c.record_every < 1)
        throw ConfigError("rk4_substeps, macro_cells and record_every must be positive");
    for (int v : c.variants)
        if (v < 1 || v > 4)
            throw ConfigError("variants must lie in 1..4");
    if (c.example == 4 && (c.variants.empty() || c.variants.front() != 1))
        throw ConfigError("example 4 variants must start with the constant variant 1");
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

} // namespace esfem
