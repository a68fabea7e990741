#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "assembly.hpp"
#include "core.hpp"
#include "fields.hpp"
#include "geometry.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"

namespace esfem {

namespace detail {

inline double integrate_discrete(const SurfaceMesh& mesh, const ScalarFunction& f, double t, const QuadratureRule& rule)
{
    double total = 0.0;
    for (const auto& tri : mesh.triangles) {
        const Vec3& x0 = mesh.vertices[tri[0]];
        const Vec3& x1 = mesh.vertices[tri[1]];
        const Vec3& x2 = mesh.vertices[tri[2]];
        double s = 0.0;
        for (std::size_t k = 0; k < rule.size(); ++k) {
            const auto& l = rule.points[k];
            s += rule.weights[k] * f(l[0] * x0 + l[1] * x1 + l[2] * x2, t);
        }
        total += triangle_area(x0, x1, x2) * s;
    }
    return total;
}

} // namespace detail

/// Residual of the discrete transport formula
///   d/dt int_{Gamma_h} f = int_{Gamma_h} (f_t + V_h . grad f) + f div_h V_h
/// for a mesh moved by a closed-form trajectory. The time derivative on the
/// left is a central difference with step dt; V_h is the P1 interpolant of the
/// nodal velocities, obtained from the trajectory by the same central difference.
inline double verify_scalar_transport(const SurfaceMesh& initial, const ClosedFormMotion& motion,
                                      const AmbientField& f, double t, double dt, int degree = 6)
{
    if (!(dt > 0.0))
        throw DomainError("transport check needs dt > 0");
    const QuadratureRule rule = quadrature_rule(degree);
    const MeshMotion m = motion;
    const SurfaceMesh minus = move_mesh(initial, m, t - dt);
    const SurfaceMesh plus = move_mesh(initial, m, t + dt);
    const SurfaceMesh mesh = move_mesh(initial, m, t);
    const ScalarFunction value = [&f](const Vec3& x, double s) { return f.value(x, s); };
    const double lhs = (detail::integrate_discrete(plus, value, t + dt, rule)
                        - detail::integrate_discrete(minus, value, t - dt, rule))
                       / (2.0 * dt);

    std::vector<Vec3> v(mesh.vertex_count());
    for (std::size_t j = 0; j < v.size(); ++j)
        v[j] = (plus.vertices[j] - minus.vertices[j]) / (2.0 * dt);

    double rhs = 0.0;
    for (std::size_t e = 0; e < mesh.triangle_count(); ++e) {
        const ElementGeometry g(mesh, e);
        const auto& tri = mesh.triangles[e];
        const double div = element_divergence(g, tri, v);
        double s = 0.0;
        for (std::size_t k = 0; k < rule.size(); ++k) {
            const auto& l = rule.points[k];
            const Vec3 x = l[0] * mesh.vertices[tri[0]] + l[1] * mesh.vertices[tri[1]] + l[2] * mesh.vertices[tri[2]];
            const Vec3 vx = l[0] * v[tri[0]] + l[1] * v[tri[1]] + l[2] * v[tri[2]];
            s += rule.weights[k] * (f.time_derivative(x, t) + vx.dot(f.gradient(x, t)) + f.value(x, t) * div);
        }
        rhs += g.area * s;
    }
    return std::abs(lhs - rhs);
}

/// Area of the smooth surface computed through the lift of every element:
/// int_T |d_1 p x d_2 p| with the closest-point map p differentiated by central
/// differences along the element edges.
inline double lifted_area(const SurfaceMesh& mesh, const LevelSetSurface& surface, double t, int degree = 10)
{
    const QuadratureRule rule = quadrature_rule(degree);
    const double eps = 1e-5;
    double total = 0.0;
    for (const auto& tri : mesh.triangles) {
        const Vec3& x0 = mesh.vertices[tri[0]];
        const Vec3 e1 = mesh.vertices[tri[1]] - x0;
        const Vec3 e2 = mesh.vertices[tri[2]] - x0;
        double s = 0.0;
        for (std::size_t k = 0; k < rule.size(); ++k) {
            const auto& l = rule.points[k];
            const Vec3 x = l[0] * x0 + l[1] * mesh.vertices[tri[1]] + l[2] * mesh.vertices[tri[2]];
            const Vec3 d1 = (closest_point(surface, x + eps * e1, t) - closest_point(surface, x - eps * e1, t)) / (2 * eps);
            const Vec3 d2 = (closest_point(surface, x + eps * e2, t) - closest_point(surface, x - eps * e2, t)) / (2 * eps);
            s += rule.weights[k] * d1.cross(d2).norm();
        }
        // the reference triangle has area 1/2
        total += 0.5 * s;
    }
    return total;
}

struct MeasureDefect {
    int level = 0;
    double h = 0.0;
    double area = 0.0;
    double defect = 0.0;
};

/// |area(Gamma_h) - area(Gamma)| on successive refinements of a macro mesh.
/// Without a reference the smooth area is taken from lifted_area on the finest level.
inline std::vector<MeasureDefect> verify_surface_measure(const LevelSetSurface& surface, MacroKind kind,
                                                         const std::vector<int>& levels,
                                                         std::optional<double> reference_area = std::nullopt)
{
    std::vector<MeasureDefect> out;
    std::optional<SurfaceMesh> finest;
    for (int level : levels) {
        SurfaceMesh mesh = refine_project(surface, kind, level);
        out.push_back({level, max_edge_length(mesh), surface_area(mesh), 0.0});
        finest = std::move(mesh);
    }
    if (!reference_area) {
        if (!finest)
            throw EmptySeries("no refinement levels given");
        reference_area = lifted_area(*finest, surface, 0.0);
    }
    for (auto& d : out)
        d.defect = std::abs(d.area - *reference_area);
    return out;
}

} // namespace esfem
