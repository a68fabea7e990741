#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "assembly.hpp"
#include "core.hpp"
#include "manufactured.hpp"
#include "mesh.hpp"
#include "norms.hpp"
#include "solver.hpp"
#include "timestepping.hpp"

namespace esfem {

/// Everything one run of the fully discrete scheme needs.
struct SimulationSetup {
    ManufacturedProblem problem;
    SurfaceMesh initial_mesh;
    MeshMotion motion;
    bool ale = false; // assemble B with T_h = I_h(v_a - v)
    SchemeKind scheme = SchemeKind::bdf2;
    TimeGrid grid{1.0, 1};
    SolverOptions solver;
    int quadrature_degree = 6;
    bool compute_errors = true;

    /// Initial nodal vectors; one scheme state per entry. Empty means the
    /// nodal interpolant of problem.initial_condition.
    std::vector<std::vector<double>> initial_values;
};

/// Read-only view handed to the observer after every completed level.
struct StepView {
    long step = 0;
    double time = 0.0;
    const SurfaceMesh& mesh;
    const StepMatrices& matrices;
    std::span<const SchemeState> states; // states[i].current() is U^n of run i
    const std::optional<StepError>& error;
};

using StepObserver = std::function<void(const StepView&)>;

struct SimulationResult {
    double tau = 0.0;
    long steps = 0;
    SurfaceMesh final_mesh;
    std::vector<std::vector<double>> final_solutions;
    std::vector<std::vector<double>> masses; // masses[state][n] = 1^T M^n U^n
    std::vector<StepError> errors;           // errors[n], n = 0..N (empty without exact solution)
    std::optional<AccumulatedNorms> norms;
    double final_h = 0.0;
};

namespace detail {

class SimulationDriver {
public:
    explicit SimulationDriver(const SimulationSetup& setup)
        : s_(setup), pattern_(make_pattern(setup.initial_mesh)), solver_(setup.solver)
    {
        if (s_.ale && !s_.problem.ale_velocity)
            throw DomainError(s_.problem.name + " has no ALE velocity");
        if (s_.scheme == SchemeKind::bdf2 && s_.grid.steps < 2)
            throw DomainError("BDF2 needs at least two steps");
        if (s_.problem.surface)
            project_ = [surface = s_.problem.surface](const Vec3& x, double t) { return closest_point(surface, x, t); };
    }

    SimulationResult run(const StepObserver& observer)
    {
        const double tau = s_.grid.tau();
        SurfaceMesh mesh = s_.initial_mesh;
        mesh.time = 0.0;
        StepMatrices mats = assemble(mesh);

        std::vector<std::vector<double>> u0 = s_.initial_values;
        if (u0.empty())
            u0.push_back(interpolate_nodal(mesh, s_.problem.initial_condition, 0.0));
        for (const auto& u : u0)
            if (u.size() != mesh.vertex_count())
                throw DomainError("initial vector length does not match the mesh");

        std::vector<SchemeState> states;
        for (auto& u : u0) {
            states.emplace_back(s_.scheme, tau);
            states.back().initialize(std::move(u), mats.mass);
        }

        SimulationResult result;
        result.tau = tau;
        result.steps = s_.grid.steps;

        record(0, mesh, mats, states, result, observer, lift(mesh, 0.0));

        long n = 0;
        if (s_.scheme == SchemeKind::bdf2) {
            const double t1 = s_.grid.time(1);
            if (s_.problem.exact) {
                mesh = advance_mesh(mesh, 0.0, t1);
                mats = assemble(mesh);
                const auto& ex = *s_.problem.exact;
                const ScalarFunction exact_fn = [&ex](const Vec3& x, double t) { return ex.value(x, t); };
                for (auto& st : states)
                    st.push_start(interpolate_nodal(mesh, exact_fn, t1), mats.mass);
            } else {
                mesh = start_with_bdf1_substeps(states, mesh);
                mats = assemble(mesh);
            }
            n = 1;
            const auto q = lift(mesh, t1);
            record(1, mesh, mats, states, result, observer, q);
        }

        for (; n < s_.grid.steps; ++n) {
            const double t0 = s_.grid.time(n), t1 = s_.grid.time(n + 1);
            mesh = advance_mesh(mesh, t0, t1);
            mats = assemble(mesh);
            const auto q = lift(mesh, t1);
            const std::vector<double> load = assemble_source(mesh, q);
            for (auto& st : states)
                st.advance(mats, load, solver_);
            record(n + 1, mesh, mats, states, result, observer, q);
        }

        for (auto& st : states) {
            result.final_solutions.push_back(st.current());
            result.masses.push_back(st.masses());
        }
        if (!result.errors.empty()) {
            const std::size_t first = s_.scheme == SchemeKind::bdf2 ? 2 : 1;
            result.norms = accumulate_norms(std::span<const StepError>(result.errors).subspan(first), tau);
        }
        result.final_h = max_edge_length(mesh);
        result.final_mesh = std::move(mesh);
        return result;
    }

private:
    [[nodiscard]] bool needs_lift() const
    {
        return static_cast<bool>(s_.problem.source) || (s_.compute_errors && s_.problem.exact);
    }

    std::optional<LiftedQuadrature> lift(const SurfaceMesh& mesh, double t) const
    {
        if (!needs_lift())
            return std::nullopt;
        return lift_quadrature(mesh, t, project_, s_.quadrature_degree);
    }

    std::vector<double> assemble_source(const SurfaceMesh& mesh, const std::optional<LiftedQuadrature>& q) const
    {
        if (!s_.problem.source || !q)
            return {};
        return assemble_load(mesh, *q, s_.problem.source);
    }

    SurfaceMesh advance_mesh(const SurfaceMesh& mesh, double t0, double t1) const
    {
        if (std::holds_alternative<ClosedFormMotion>(s_.motion))
            return move_mesh(s_.initial_mesh, s_.motion, t1);
        return lagrangian_advance(mesh, s_.motion, t0, t1);
    }

    StepMatrices assemble(const SurfaceMesh& mesh) const
    {
        StepMatrices m{assemble_mass(mesh, pattern_), assemble_stiffness(mesh, pattern_), std::nullopt};
        if (s_.ale) {
            const auto& va = *s_.problem.ale_velocity;
            const auto& v = s_.problem.material_velocity;
            std::vector<Vec3> a(mesh.vertex_count());
            for (std::size_t j = 0; j < a.size(); ++j)
                a[j] = va(mesh.vertices[j], mesh.time) - v(mesh.vertices[j], mesh.time);
            m.advection = assemble_advection(mesh, a, pattern_);
        }
        return m;
    }

    // U^1 from BDF1 with step tau^2 (at most 1000 substeps), moving the mesh
    // alongside. Returns the mesh at t^1.
    SurfaceMesh start_with_bdf1_substeps(std::vector<SchemeState>& states, SurfaceMesh mesh)
    {
        const double t1 = s_.grid.time(1);
        const long m = std::clamp(static_cast<long>(std::ceil(1.0 / t1 - 1e-9)), 1L, 1000L);
        const TimeGrid sub(t1, m);
        const CsrMatrix mass0 = assemble_mass(mesh, pattern_);
        std::vector<SchemeState> fine;
        for (const auto& st : states) {
            fine.emplace_back(SchemeKind::bdf1, sub.tau());
            fine.back().initialize(st.current(), mass0);
        }
        StepMatrices mats{mass0, mass0, std::nullopt};
        for (long k = 0; k < m; ++k) {
            const double tk = k + 1 == m ? t1 : sub.time(k + 1);
            mesh = advance_mesh(mesh, sub.time(k), tk);
            mats = assemble(mesh);
            const std::vector<double> load = assemble_source(mesh, lift(mesh, tk));
            for (auto& st : fine)
                st.advance(mats, load, solver_);
        }
        for (std::size_t i = 0; i < states.size(); ++i)
            states[i].push_start(fine[i].current(), mats.mass);
        return mesh;
    }

    void record(long n, const SurfaceMesh& mesh, const StepMatrices& mats, const std::vector<SchemeState>& states,
                SimulationResult& result, const StepObserver& observer,
                const std::optional<LiftedQuadrature>& q) const
    {
        std::optional<StepError> err;
        if (s_.compute_errors && s_.problem.exact && q) {
            err = step_errors(states.front().current(), mesh, *q, *s_.problem.exact, s_.problem.surface);
            result.errors.push_back(*err);
        }
        if (observer)
            observer(StepView{n, s_.grid.time(n), mesh, mats, states, err});
    }

    const SimulationSetup& s_;
    std::shared_ptr<const SparsityPattern> pattern_;
    PointProjector project_;
    LinearSolver solver_;
};

} // namespace detail

/// Advances mesh and scheme jointly over the time grid. Per step: move the
/// mesh (closed form or nodal ODE), reassemble M, S, B and F at the new level,
/// solve. Errors are measured against the exact solution when one exists.
inline SimulationResult run_simulation(const SimulationSetup& setup, const StepObserver& observer = {})
{
    detail::SimulationDriver driver(setup);
    return driver.run(observer);
}

} // namespace esfem
