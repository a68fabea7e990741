#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "diagnostics.hpp"
#include "manufactured.hpp"
#include "mesh.hpp"
#include "norms.hpp"
#include "simulation.hpp"
#include "vtk.hpp"

namespace esfem {

inline std::string mode_name(MotionMode m)
{
    switch (m) {
    case MotionMode::ale:
        return "ale";
    case MotionMode::lagrangian:
        return "lagrangian";
    case MotionMode::both:
        break;
    }
    return "both";
}

inline std::vector<MotionMode> expand_modes(MotionMode m)
{
    if (m == MotionMode::both)
        return {MotionMode::ale, MotionMode::lagrangian};
    return {m};
}

namespace detail {

/// Writes rows of doubles with a header, 17 significant digits.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& header) : out_(path)
    {
        if (!out_)
            throw Error("cannot open " + path.string() + " for writing");
        out_ << std::setprecision(17) << header << '\n';
    }

    template <class... Ts>
    void row(const Ts&... values)
    {
        bool first = true;
        ((out_ << (first ? "" : ",") << values, first = false), ...);
        out_ << '\n';
    }

    void row(const std::vector<double>& values)
    {
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << (i ? "," : "") << values[i];
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

inline constexpr const char* quality_header = "step,time,h,min_angle_deg,max_aspect_ratio,min_area,max_area";

inline void quality_row(CsvWriter& w, long step, const QualityReport& q)
{
    w.row(step, q.time, q.h, q.min_angle_deg, q.max_aspect_ratio, q.min_area, q.max_area);
}

/// Steps at which a requested snapshot time is reached.
inline std::set<long> snapshot_steps(const std::vector<double>& times, const TimeGrid& grid)
{
    std::set<long> steps;
    for (double t : times) {
        if (t < 0.0 || t > grid.final_time + 1e-12)
            continue;
        steps.insert(std::lround(t / grid.tau()));
    }
    return steps;
}

inline std::filesystem::path prepare_dir(const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::vector<double> nodal_error(const StepView& v, const ManufacturedProblem& p)
{
    std::vector<double> e(v.mesh.vertex_count());
    const auto& u = v.states.front().current();
    for (std::size_t j = 0; j < e.size(); ++j)
        e[j] = u[j] - p.exact->value(v.mesh.vertices[j], v.time);
    return e;
}

inline void write_snapshot(const std::filesystem::path& dir, const std::string& run, const StepView& v,
                           const ManufacturedProblem& p)
{
    std::vector<PointScalars> fields{{"u", v.states.front().current()}};
    if (p.exact)
        fields.push_back({"error", nodal_error(v, p)});
    write_vtk(snapshot_path(dir, run, v.step), v.mesh, fields);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Setups

/// Example 1 at one refinement level of the upper octahedron.
inline SimulationSetup example1_setup(MotionMode mode, int level, const RunConfig& c)
{
    SimulationSetup s;
    s.problem = example1_problem();
    s.problem.final_time = c.final_time;
    s.initial_mesh = refine_project(s.problem.surface, MacroKind::upper_octahedron, level);
    if (mode == MotionMode::ale) {
        s.motion = ClosedFormMotion{ale_trajectory_benchmark};
        s.ale = true;
    } else {
        s.motion = NodalOdeMotion{s.problem.material_velocity, level_set_snap(s.problem.surface), c.rk4_substeps};
    }
    s.scheme = c.scheme;
    s.grid = TimeGrid::with_max_step(c.final_time, c.tau_coupling.tau(max_edge_length(s.initial_mesh)));
    s.solver = c.solver;
    s.quadrature_degree = c.quadrature_degree;
    return s;
}

/// Initial mesh of the genus-4 surface: lifted planar macro refined `level` times.
inline SurfaceMesh example2_mesh(int level, int macro_cells)
{
    return refine_project(complex_surface_macro(macro_cells), level, level_set_projector(ComplexSurface{}, 0.0));
}

inline SimulationSetup example2_setup(MotionMode mode, const SurfaceMesh& mesh, const RunConfig& c)
{
    SimulationSetup s;
    s.problem = example2_problem();
    s.problem.final_time = c.final_time;
    s.initial_mesh = mesh;
    if (mode == MotionMode::ale) {
        s.motion = ClosedFormMotion{ale_trajectory_complex};
        s.ale = true;
    } else {
        s.motion = NodalOdeMotion{s.problem.material_velocity, level_set_snap(s.problem.surface), c.rk4_substeps};
    }
    s.scheme = c.scheme;
    s.grid = TimeGrid::with_max_step(c.final_time, c.tau_coupling.tau(max_edge_length(mesh)));
    s.solver = c.solver;
    s.quadrature_degree = c.quadrature_degree;
    return s;
}

/// Vertical trajectory of the graph ALE motion.
inline Vec3 graph_ale_trajectory(const Vec3& x0, double t)
{
    return {x0[0], x0[1], GraphDisc::height(x0.head<2>(), t)};
}

inline SimulationSetup example3_setup(MotionMode mode, int level, const RunConfig& c,
                                      std::vector<RefinementLevel>* history = nullptr)
{
    SimulationSetup s;
    s.problem = example3_problem();
    s.problem.final_time = c.final_time;
    s.initial_mesh = refine_project(macro_mesh(MacroKind::disc_fan), level, disc_projector(0.0), history);
    if (mode == MotionMode::ale) {
        s.motion = ClosedFormMotion{graph_ale_trajectory};
        s.ale = true;
    } else {
        s.motion = NodalOdeMotion{s.problem.material_velocity, graph_snap(), c.rk4_substeps};
    }
    s.scheme = c.scheme;
    s.grid = TimeGrid::with_max_step(c.final_time, c.tau_coupling.tau(max_edge_length(s.initial_mesh)));
    s.solver = c.solver;
    s.quadrature_degree = c.quadrature_degree;
    s.compute_errors = false;
    return s;
}

/// Example 4: one state per variant, mass-matched to the constant data.
inline SimulationSetup example4_setup(int level, const RunConfig& c)
{
    SimulationSetup s;
    s.problem = example4_problem(1, c.final_time);
    s.initial_mesh = refine_project(s.problem.surface, MacroKind::octahedron, level);
    s.motion = NodalOdeMotion{s.problem.material_velocity, level_set_snap(s.problem.surface), c.rk4_substeps};
    s.scheme = c.scheme;
    s.grid = TimeGrid::with_max_step(c.final_time, c.tau_coupling.tau(max_edge_length(s.initial_mesh)));
    s.solver = c.solver;
    s.quadrature_degree = c.quadrature_degree;
    s.compute_errors = false;
    const CsrMatrix m0 = assemble_mass(s.initial_mesh);
    for (int v : c.variants) {
        const auto ic = [v](const Vec3& x, double) { return initial_condition_variant(v, x); };
        s.initial_values.push_back(mass_matched_interpolant(interpolate_nodal(s.initial_mesh, ic, 0.0), m0));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Runners

/// Convergence study over refinement levels; writes errors.csv.
inline ErrorReport run_example1(const RunConfig& c)
{
    const auto dir = detail::prepare_dir(c.output_dir);
    ErrorReport report;
    for (int level : c.levels) {
        const SimulationSetup s = example1_setup(c.mode, level, c);
        const auto snaps = detail::snapshot_steps(c.snapshots, s.grid);
        const std::string run = mode_name(c.mode) + "_level" + std::to_string(level);
        const auto r = run_simulation(s, [&](const StepView& v) {
            if (snaps.contains(v.step))
                detail::write_snapshot(dir, run, v, s.problem);
        });
        report.add_level(r.final_h, r.norms->linf_l2, r.norms->l2_h1);
    }
    write_error_csv(dir / "errors.csv", report);
    return report;
}

struct Example2Run {
    MotionMode mode = MotionMode::ale;
    std::vector<QualityReport> quality; // one entry per recorded step
    std::vector<long> quality_steps;
    ErrorReport errors;
    SimulationResult result;
};

/// Both motions from the same initial mesh; quality.csv, errors.csv, mass.csv
/// and nodal-error snapshots per motion.
inline std::vector<Example2Run> run_example2(const RunConfig& c)
{
    const SurfaceMesh mesh = example2_mesh(c.levels.front(), c.macro_cells);
    std::vector<Example2Run> runs;
    for (MotionMode mode : expand_modes(c.mode)) {
        const auto dir = detail::prepare_dir(c.output_dir / mode_name(mode));
        const SimulationSetup s = example2_setup(mode, mesh, c);
        const auto snaps = detail::snapshot_steps(c.snapshots, s.grid);
        Example2Run out;
        out.mode = mode;
        detail::CsvWriter quality(dir / "quality.csv", detail::quality_header);
        out.result = run_simulation(s, [&](const StepView& v) {
            if (v.step % c.record_every == 0 || v.step == s.grid.steps) {
                const QualityReport q = quality_metrics(v.mesh);
                detail::quality_row(quality, v.step, q);
                out.quality.push_back(q);
                out.quality_steps.push_back(v.step);
            }
            if (snaps.contains(v.step))
                detail::write_snapshot(dir, "example2_" + mode_name(mode), v, s.problem);
        });
        out.errors.add_level(out.result.final_h, out.result.norms->linf_l2, out.result.norms->l2_h1);
        write_error_csv(dir / "errors.csv", out.errors);
        detail::CsvWriter mass(dir / "mass.csv", "step,time,mass");
        for (std::size_t n = 0; n < out.result.masses.front().size(); ++n)
            mass.row(static_cast<long>(n), s.grid.time(static_cast<long>(n)), out.result.masses.front()[n]);
        runs.push_back(std::move(out));
    }
    return runs;
}

struct Example3Run {
    MotionMode mode = MotionMode::ale;
    int level = 0;
    SimulationResult result;
    std::vector<RefinementLevel> history;
    double initial_boundary_drift = 0.0; // max |x_b(T) - x_b(0)| over boundary vertices
};

/// Graph over the disc at the requested levels, both motions.
inline std::vector<Example3Run> run_example3(const RunConfig& c)
{
    std::vector<Example3Run> runs;
    for (MotionMode mode : expand_modes(c.mode)) {
        const auto dir = detail::prepare_dir(c.output_dir / mode_name(mode));
        for (int level : c.levels) {
            Example3Run out;
            out.mode = mode;
            out.level = level;
            const SimulationSetup s = example3_setup(mode, level, c, &out.history);
            const auto snaps = detail::snapshot_steps(c.snapshots, s.grid);
            const std::string tag = "level" + std::to_string(level);
            detail::CsvWriter quality(dir / ("quality_" + tag + ".csv"), detail::quality_header);
            out.result = run_simulation(s, [&](const StepView& v) {
                if (v.step % c.record_every == 0 || v.step == s.grid.steps)
                    detail::quality_row(quality, v.step, quality_metrics(v.mesh));
                if (snaps.contains(v.step))
                    detail::write_snapshot(dir, "example3_" + tag, v, s.problem);
            });
            for (std::size_t j = 0; j < s.initial_mesh.vertex_count(); ++j)
                if (s.initial_mesh.is_boundary(j))
                    out.initial_boundary_drift =
                        std::max(out.initial_boundary_drift,
                                 (out.result.final_mesh.vertices[j] - s.initial_mesh.vertices[j]).norm());
            runs.push_back(std::move(out));
        }
    }
    return runs;
}

/// L2(Gamma_h) distance between the solutions of two consecutive levels,
/// measured on the finer mesh after prolongation of the coarse solution.
inline double level_difference(const Example3Run& coarse, const Example3Run& fine)
{
    if (fine.history.size() != coarse.history.size() + 1)
        throw DomainError("runs are not consecutive levels of one hierarchy");
    const auto up = prolongate(fine.history.back(), coarse.result.final_solutions.front());
    std::vector<double> d = fine.result.final_solutions.front();
    for (std::size_t j = 0; j < d.size(); ++j)
        d[j] -= up[j];
    return l2_norm(d, assemble_mass(fine.result.final_mesh));
}

struct Example4Run {
    std::vector<int> variants;
    std::vector<double> times;
    std::vector<double> reference_norm;           // |U_1|_{L2(Gamma_h(t))}
    std::vector<std::vector<double>> differences; // [variant index][record]
    SimulationResult result;
};

/// Lockstep run of the initial-condition variants; periodic_diff.csv, mass.csv, quality.csv.
inline Example4Run run_example4(const RunConfig& c)
{
    const auto dir = detail::prepare_dir(c.output_dir);
    const SimulationSetup s = example4_setup(c.levels.front(), c);
    Example4Run out;
    out.variants = c.variants;
    out.differences.resize(c.variants.size());

    std::string header = "time,norm_u1";
    for (int v : c.variants)
        header += ",diff_u" + std::to_string(v);
    detail::CsvWriter diff(dir / "periodic_diff.csv", header);
    detail::CsvWriter quality(dir / "quality.csv", detail::quality_header);
    const auto snaps = detail::snapshot_steps(c.snapshots, s.grid);

    out.result = run_simulation(s, [&](const StepView& v) {
        if (v.step % c.record_every != 0 && v.step != s.grid.steps)
            return;
        const auto& ref = v.states.front().current();
        std::vector<double> row{v.time, l2_norm(ref, v.matrices.mass)};
        out.times.push_back(v.time);
        out.reference_norm.push_back(row[1]);
        for (std::size_t i = 0; i < v.states.size(); ++i) {
            std::vector<double> d = v.states[i].current();
            for (std::size_t j = 0; j < d.size(); ++j)
                d[j] -= ref[j];
            const double dn = l2_norm(d, v.matrices.mass);
            out.differences[i].push_back(dn);
            row.push_back(dn);
        }
        diff.row(row);
        detail::quality_row(quality, v.step, quality_metrics(v.mesh));
        if (snaps.contains(v.step)) {
            std::vector<PointScalars> fields;
            for (std::size_t i = 0; i < v.states.size(); ++i)
                fields.push_back({"u" + std::to_string(c.variants[i]), v.states[i].current()});
            write_vtk(snapshot_path(dir, "example4", v.step), v.mesh, fields);
        }
    });

    std::string mheader = "step,time";
    for (int v : c.variants)
        mheader += ",mass_u" + std::to_string(v);
    detail::CsvWriter mass(dir / "mass.csv", mheader);
    for (std::size_t n = 0; n < out.result.masses.front().size(); ++n) {
        std::vector<double> row{static_cast<double>(n), s.grid.time(static_cast<long>(n))};
        for (const auto& m : out.result.masses)
            row.push_back(m[n]);
        mass.row(row);
    }
    return out;
}

/// Dispatches on config.example.
inline void run_config(const RunConfig& c)
{
    switch (c.example) {
    case 1:
        run_example1(c);
        return;
    case 2:
        run_example2(c);
        return;
    case 3:
        run_example3(c);
        return;
    case 4:
        run_example4(c);
        return;
    default:
        throw ConfigError("example must be 1, 2, 3 or 4");
    }
}

// ---------------------------------------------------------------------------
// Diagnostics suite

struct DiagnosticRow {
    std::string check;
    double parameter = 0.0; // h or dt
    double value = 0.0;
    std::optional<double> order;
};

namespace detail {

inline void fill_orders(std::vector<DiagnosticRow>& rows, std::size_t begin)
{
    for (std::size_t i = begin + 1; i < rows.size(); ++i)
        rows[i].order = eoc(rows[i - 1].value, rows[i].value, rows[i - 1].parameter, rows[i].parameter);
}

} // namespace detail

/// Sphere area defect, interpolation errors and transport residuals.
inline std::vector<DiagnosticRow> run_diagnostics(const std::vector<int>& levels = {2, 3, 4, 5, 6})
{
    std::vector<DiagnosticRow> rows;
    const LevelSetSurface sphere = RadialSphere{1.0, 0.0};

    std::size_t begin = rows.size();
    for (const auto& d : verify_surface_measure(sphere, MacroKind::octahedron, levels, 4.0 * pi))
        rows.push_back({"sphere_area_defect", d.h, d.defect, std::nullopt});
    detail::fill_orders(rows, begin);

    const AmbientField u = polynomial_field(Polynomial3::monomial(1, 1, 0));
    const PointProjector project = [sphere](const Vec3& x, double t) { return closest_point(sphere, x, t); };
    const std::size_t l2_begin = rows.size();
    std::vector<DiagnosticRow> h1_rows;
    for (int level : levels) {
        const SurfaceMesh mesh = refine_project(sphere, MacroKind::octahedron, level);
        const auto q = lift_quadrature(mesh, 0.0, project, 6);
        const auto nodal = interpolate_nodal(mesh, [&u](const Vec3& x, double t) { return u.value(x, t); }, 0.0);
        const StepError e = step_errors(nodal, mesh, q, u, sphere);
        const double h = max_edge_length(mesh);
        rows.push_back({"sphere_interpolation_l2", h, e.l2, std::nullopt});
        h1_rows.push_back({"sphere_interpolation_h1", h, e.h1, std::nullopt});
    }
    detail::fill_orders(rows, l2_begin);
    begin = rows.size();
    rows.insert(rows.end(), h1_rows.begin(), h1_rows.end());
    detail::fill_orders(rows, begin);

    struct TransportCase {
        std::string name;
        SurfaceMesh mesh;
        ClosedFormMotion motion;
    };
    const std::vector<TransportCase> cases{
        {"transport_sphere", refine_project(RadialSphere{1.0, 0.2}, MacroKind::icosahedron, 2),
         ClosedFormMotion{[](const Vec3& x0, double t) {
             const RadialSphere s{1.0, 0.2};
             return Vec3(x0 * (s.r(t) / s.r(0.0)));
         }}},
        {"transport_complex_ale", example2_mesh(0, 10), ClosedFormMotion{ale_trajectory_complex}},
    };
    const AmbientField f = separable_field(Polynomial3::monomial(1, 1, 0) + Polynomial3::monomial(0, 0, 2),
                                           [](double t) { return 1.0 + 0.5 * std::sin(t); },
                                           [](double t) { return 0.5 * std::cos(t); });
    for (const auto& tc : cases) {
        begin = rows.size();
        for (double dt : {4e-2, 2e-2, 1e-2})
            rows.push_back({tc.name, dt, verify_scalar_transport(tc.mesh, tc.motion, f, 0.3, dt), std::nullopt});
        detail::fill_orders(rows, begin);
    }
    return rows;
}

inline void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<DiagnosticRow>& rows)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open " + path.string());
    out << std::setprecision(17) << "check,parameter,value,order\n";
    for (const auto& r : rows) {
        out << r.check << ',' << r.parameter << ',' << r.value << ',';
        if (r.order)
            out << *r.order;
        out << '\n';
    }
}

} // namespace esfem
