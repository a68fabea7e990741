#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "core.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"
#include "sparse.hpp"

namespace esfem {

using ScalarFunction = std::function<double(const Vec3&, double)>;
using PointProjector = std::function<Vec3(const Vec3&, double)>;

/// Affine P1 element on the discrete surface: area, unit normal from the
/// vertex winding, and the (tangential, constant) gradients of the three
/// barycentric basis functions.
struct ElementGeometry {
    double area = 0.0;
    Vec3 normal = Vec3::Zero();
    std::array<Vec3, 3> grad;

    ElementGeometry(const Vec3& x0, const Vec3& x1, const Vec3& x2)
    {
        const Vec3 n = (x1 - x0).cross(x2 - x0);
        const double twice_area = n.norm();
        if (!(twice_area >= 2e-14))
            throw DegenerateTriangle("triangle area below 1e-14");
        area = 0.5 * twice_area;
        normal = n / twice_area;
        grad[0] = normal.cross(x2 - x1) / twice_area;
        grad[1] = normal.cross(x0 - x2) / twice_area;
        grad[2] = normal.cross(x1 - x0) / twice_area;
    }

    ElementGeometry(const SurfaceMesh& mesh, std::size_t e)
        : ElementGeometry(mesh.vertices[mesh.triangles[e][0]], mesh.vertices[mesh.triangles[e][1]],
                          mesh.vertices[mesh.triangles[e][2]])
    {
    }
};

inline std::shared_ptr<const SparsityPattern> make_pattern(const SurfaceMesh& mesh)
{
    return std::make_shared<const SparsityPattern>(mesh.vertex_count(), mesh.triangles);
}

namespace detail {
inline void check_pattern(const SurfaceMesh& mesh, const std::shared_ptr<const SparsityPattern>& p)
{
    if (!p || p->rows() != mesh.vertex_count())
        throw DomainError("sparsity pattern does not match the mesh");
}
} // namespace detail

/// M_ij = int chi_i chi_j, element-exact (A/12)[[2,1,1],[1,2,1],[1,1,2]].
inline CsrMatrix assemble_mass(const SurfaceMesh& mesh, std::shared_ptr<const SparsityPattern> pattern)
{
    detail::check_pattern(mesh, pattern);
    CsrMatrix m(std::move(pattern));
    for (std::size_t e = 0; e < mesh.triangle_count(); ++e) {
        const ElementGeometry g(mesh, e);
        const double d = g.area / 6.0, o = g.area / 12.0;
        m.add_element(e, {d, o, o, o, d, o, o, o, d});
    }
    return m;
}

inline CsrMatrix assemble_mass(const SurfaceMesh& mesh) { return assemble_mass(mesh, make_pattern(mesh)); }

/// S_ij = int grad chi_i . grad chi_j with elementwise-constant surface gradients.
inline CsrMatrix assemble_stiffness(const SurfaceMesh& mesh, std::shared_ptr<const SparsityPattern> pattern)
{
    detail::check_pattern(mesh, pattern);
    CsrMatrix s(std::move(pattern));
    for (std::size_t e = 0; e < mesh.triangle_count(); ++e) {
        const ElementGeometry g(mesh, e);
        std::array<double, 9> local{};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                local[3 * a + b] = g.area * g.grad[a].dot(g.grad[b]);
        s.add_element(e, local);
    }
    return s;
}

inline CsrMatrix assemble_stiffness(const SurfaceMesh& mesh)
{
    return assemble_stiffness(mesh, make_pattern(mesh));
}

/// B_ij = int chi_i T_h . grad chi_j with T_h the P1 interpolant of the nodal
/// velocities. Integrated exactly: int chi_i chi_k = A(1 + delta_ik)/12.
inline CsrMatrix assemble_advection(const SurfaceMesh& mesh, std::span<const Vec3> nodal_velocity,
                                    std::shared_ptr<const SparsityPattern> pattern)
{
    detail::check_pattern(mesh, pattern);
    if (nodal_velocity.size() != mesh.vertex_count())
        throw DomainError("one velocity per vertex required");
    CsrMatrix b(std::move(pattern));
    for (std::size_t e = 0; e < mesh.triangle_count(); ++e) {
        const ElementGeometry g(mesh, e);
        const auto& tri = mesh.triangles[e];
        std::array<double, 9> local{};
        for (int i = 0; i < 3; ++i) {
            // int chi_i T_h = sum_k T_k A (1 + delta_ik) / 12
            Vec3 weighted = Vec3::Zero();
            for (int k = 0; k < 3; ++k)
                weighted += nodal_velocity[tri[k]] * (g.area * (i == k ? 2.0 : 1.0) / 12.0);
            for (int j = 0; j < 3; ++j)
                local[3 * i + j] = weighted.dot(g.grad[j]);
        }
        b.add_element(e, local);
    }
    return b;
}

inline CsrMatrix assemble_advection(const SurfaceMesh& mesh, std::span<const Vec3> nodal_velocity)
{
    return assemble_advection(mesh, nodal_velocity, make_pattern(mesh));
}

/// Elementwise-constant discrete divergence of the P1 velocity.
inline double element_divergence(const ElementGeometry& g, const Triangle& tri, std::span<const Vec3> w)
{
    return w[tri[0]].dot(g.grad[0]) + w[tri[1]].dot(g.grad[1]) + w[tri[2]].dot(g.grad[2]);
}

/// G_ij = int chi_i chi_j div_h W_h.
inline CsrMatrix assemble_weighted_mass(const SurfaceMesh& mesh, std::span<const Vec3> nodal_velocity,
                                        std::shared_ptr<const SparsityPattern> pattern)
{
    detail::check_pattern(mesh, pattern);
    if (nodal_velocity.size() != mesh.vertex_count())
        throw DomainError("one velocity per vertex required");
    CsrMatrix m(std::move(pattern));
    for (std::size_t e = 0; e < mesh.triangle_count(); ++e) {
        const ElementGeometry g(mesh, e);
        const double div = element_divergence(g, mesh.triangles[e], nodal_velocity);
        const double d = div * g.area / 6.0, o = div * g.area / 12.0;
        m.add_element(e, {d, o, o, o, d, o, o, o, d});
    }
    return m;
}

inline CsrMatrix assemble_weighted_mass(const SurfaceMesh& mesh, std::span<const Vec3> nodal_velocity)
{
    return assemble_weighted_mass(mesh, nodal_velocity, make_pattern(mesh));
}

/// Quadrature points of every element on the discrete surface together with
/// their closest points on the smooth surface (the inverse lift). Shared by
/// load assembly and error evaluation at one time level.
struct LiftedQuadrature {
    QuadratureRule rule;
    double time = 0.0;
    std::vector<double> areas;      // per element
    std::vector<Vec3> points;       // element-major, rule.size() per element
    std::vector<Vec3> lifted;       // projections of `points`

    [[nodiscard]] std::size_t points_per_element() const noexcept { return rule.size(); }
};

/// Without a projector the lifted points equal the discrete ones.
inline LiftedQuadrature lift_quadrature(const SurfaceMesh& mesh, double t, const PointProjector& project,
                                        int degree = 6)
{
    LiftedQuadrature q;
    q.rule = quadrature_rule(degree);
    q.time = t;
    const std::size_t nq = q.rule.size();
    q.areas.resize(mesh.triangle_count());
    q.points.resize(mesh.triangle_count() * nq);
    q.lifted.resize(q.points.size());
    for (std::size_t e = 0; e < mesh.triangle_count(); ++e) {
        const auto& tri = mesh.triangles[e];
        const Vec3& x0 = mesh.vertices[tri[0]];
        const Vec3& x1 = mesh.vertices[tri[1]];
        const Vec3& x2 = mesh.vertices[tri[2]];
        q.areas[e] = triangle_area(x0, x1, x2);
        for (std::size_t k = 0; k < nq; ++k) {
            const auto& l = q.rule.points[k];
            const Vec3 x = l[0] * x0 + l[1] * x1 + l[2] * x2;
            q.points[e * nq + k] = x;
            q.lifted[e * nq + k] = project ? project(x, t) : x;
        }
    }
    return q;
}

/// F_i = int_{Gamma_h} f(p(x), t) chi_i, with f evaluated at the lifted points.
inline std::vector<double> assemble_load(const SurfaceMesh& mesh, const LiftedQuadrature& q, const ScalarFunction& f)
{
    std::vector<double> load(mesh.vertex_count(), 0.0);
    const std::size_t nq = q.points_per_element();
    for (std::size_t e = 0; e < mesh.triangle_count(); ++e) {
        const auto& tri = mesh.triangles[e];
        std::array<double, 3> local{};
        for (std::size_t k = 0; k < nq; ++k) {
            const double fw = q.areas[e] * q.rule.weights[k] * f(q.lifted[e * nq + k], q.time);
            for (int a = 0; a < 3; ++a)
                local[a] += fw * q.rule.points[k][a];
        }
        for (int a = 0; a < 3; ++a)
            load[tri[a]] += local[a];
    }
    return load;
}

inline std::vector<double> assemble_load(const SurfaceMesh& mesh, const ScalarFunction& f, double t,
                                         const PointProjector& project = {}, int degree = 6)
{
    return assemble_load(mesh, lift_quadrature(mesh, t, project, degree), f);
}

/// U_j = field(X_j, t).
inline std::vector<double> interpolate_nodal(const SurfaceMesh& mesh, const ScalarFunction& field, double t)
{
    std::vector<double> u(mesh.vertex_count());
    for (std::size_t j = 0; j < u.size(); ++j)
        u[j] = field(mesh.vertices[j], t);
    return u;
}

/// Nodal samples of a vector field.
inline std::vector<Vec3> interpolate_nodal_vector(const SurfaceMesh& mesh,
                                                  const std::function<Vec3(const Vec3&, double)>& field,
                                                  double t)
{
    std::vector<Vec3> u(mesh.vertex_count());
    for (std::size_t j = 0; j < u.size(); ++j)
        u[j] = field(mesh.vertices[j], t);
    return u;
}

} // namespace esfem
