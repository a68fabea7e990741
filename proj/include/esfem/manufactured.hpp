#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "assembly.hpp"
#include "core.hpp"
#include "fields.hpp"
#include "geometry.hpp"
#include "sparse.hpp"

namespace esfem {

/// One experiment: moving surface, material and mesh velocities, source and
/// (when known) the exact solution.
struct ManufacturedProblem {
    std::string name;
    LevelSetSurface surface;
    std::optional<AmbientField> exact;
    VelocityField material_velocity;
    std::optional<VelocityField> ale_velocity;
    ScalarFunction source;                        // f(x, t); empty means f = 0
    ScalarFunction initial_condition;             // u(x, 0)
    double final_time = 1.0;
    bool has_boundary = false;
};

/// f = d_t u + v . grad u + u div_G v - lap_G u at a surface point.
inline double manufactured_rhs(const LevelSetSurface& surface, const AmbientField& u, const VelocityField& v,
                               const Vec3& x, double t)
{
    return u.time_derivative(x, t) + v(x, t).dot(u.gradient(x, t)) + u.value(x, t) * surface_divergence(v, surface, x, t)
           - laplace_beltrami(u, surface, x, t);
}

inline double manufactured_rhs(const ManufacturedProblem& problem, const Vec3& x, double t)
{
    if (!problem.exact)
        throw NoExactSolution(problem.name + " has no exact solution");
    return manufactured_rhs(problem.surface, *problem.exact, problem.material_velocity, x, t);
}

inline double exact_solution(const ManufacturedProblem& problem, const Vec3& x, double t)
{
    if (!problem.exact)
        throw NoExactSolution(problem.name + " has no exact solution");
    return problem.exact->value(x, t);
}

/// Source built from the exact solution through manufactured_rhs.
inline ScalarFunction manufactured_source(const LevelSetSurface& surface, const AmbientField& u, const VelocityField& v)
{
    return [surface, u, v](const Vec3& x, double t) { return manufactured_rhs(surface, u, v, x, t); };
}

/// Hemiellipsoid benchmark on [0, 2], u = sin(t) x1 x2.
inline ManufacturedProblem example1_problem()
{
    ManufacturedProblem p;
    p.name = "example1";
    p.surface = BenchmarkHemiellipsoid{};
    p.exact = separable_field(Polynomial3::monomial(1, 1, 0), [](double t) { return std::sin(t); },
                              [](double t) { return std::cos(t); });
    p.material_velocity = normal_velocity_field(BenchmarkHemiellipsoid{});
    p.ale_velocity = ale_velocity_benchmark();
    p.source = manufactured_source(p.surface, *p.exact, p.material_velocity);
    p.initial_condition = [u = *p.exact](const Vec3& x, double) { return u.value(x, 0.0); };
    p.final_time = 2.0;
    p.has_boundary = true;
    return p;
}

/// Genus-4 comparison surface on [0, 1], u = cos(pi t) x1 x2 x3.
inline ManufacturedProblem example2_problem()
{
    ManufacturedProblem p;
    p.name = "example2";
    p.surface = ComplexSurface{};
    p.exact = separable_field(Polynomial3::monomial(1, 1, 1), [](double t) { return std::cos(pi * t); },
                              [](double t) { return -pi * std::sin(pi * t); });
    p.material_velocity = normal_velocity_field(ComplexSurface{});
    p.ale_velocity = ale_velocity_complex();
    p.source = manufactured_source(p.surface, *p.exact, p.material_velocity);
    p.initial_condition = [u = *p.exact](const Vec3& x, double) { return u.value(x, 0.0); };
    p.final_time = 1.0;
    return p;
}

/// Graph over the unit disc on [0, 0.25], source 10 sin(2 pi x3^2), zero data.
inline ManufacturedProblem example3_problem()
{
    ManufacturedProblem p;
    p.name = "example3";
    p.surface = GraphDisc{};
    p.material_velocity = graph_normal_velocity();
    p.ale_velocity = graph_vertical_velocity();
    p.source = [](const Vec3& x, double) { return 10.0 * std::sin(2.0 * pi * x[2] * x[2]); };
    p.initial_condition = [](const Vec3&, double) { return 0.0; };
    p.final_time = 0.25;
    p.has_boundary = true;
    return p;
}

/// u_1 ... u_4 on the unit sphere.
inline double initial_condition_variant(int variant, const Vec3& x)
{
    switch (variant) {
    case 1:
        return 1.0;
    case 2:
        return 1.0 + std::sin(2.0 * pi * x[0]);
    case 3:
        return 1.0 + 4.0 * std::sin(8.0 * pi * x[0]) + 3.0 * std::cos(6.0 * pi * x[1]) + 2.0 * std::sin(8.0 * pi * x[2]);
    case 4:
        return 1.0 + 8.0 * std::sin(16.0 * pi * x[0]) + 7.0 * std::cos(14.0 * pi * x[1])
               + 6.0 * std::sin(24.0 * pi * x[2]);
    default:
        throw DomainError("initial-condition variant must be 1..4");
    }
}

/// Periodic ellipsoid on [0, T] with f = 0 and the chosen initial data.
inline ManufacturedProblem example4_problem(int variant, double final_time = 6.0)
{
    if (variant < 1 || variant > 4)
        throw DomainError("initial-condition variant must be 1..4");
    ManufacturedProblem p;
    p.name = "example4_u" + std::to_string(variant);
    p.surface = PeriodicEllipsoid{};
    p.material_velocity = normal_velocity_field(PeriodicEllipsoid{});
    p.initial_condition = [variant](const Vec3& x, double) { return initial_condition_variant(variant, x); };
    p.final_time = final_time;
    return p;
}

/// Nodal interpolant shifted by a constant so that its discrete mass equals
/// the mass of the constant-one function on the same mesh.
inline std::vector<double> mass_matched_interpolant(std::vector<double> nodal, const CsrMatrix& mass)
{
    const std::vector<double> ones(nodal.size(), 1.0);
    const std::vector<double> m1 = mass.multiply(ones);
    const double area = sum(m1);
    const double shift = (area - dot(m1, nodal)) / area;
    for (double& u : nodal)
        u += shift;
    return nodal;
}

} // namespace esfem
