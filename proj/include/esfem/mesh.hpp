#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "core.hpp"
#include "fields.hpp"
#include "geometry.hpp"

namespace esfem {

using Triangle = std::array<int, 3>;

/// Triangulated surface snapshot: vertex positions, connectivity and boundary flags.
struct SurfaceMesh {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::vector<std::uint8_t> boundary;
    double time = 0.0;

    [[nodiscard]] std::size_t vertex_count() const noexcept { return vertices.size(); }
    [[nodiscard]] std::size_t triangle_count() const noexcept { return triangles.size(); }

    [[nodiscard]] bool is_boundary(std::size_t v) const { return !boundary.empty() && boundary[v] != 0; }

    /// Same connectivity, new positions.
    [[nodiscard]] SurfaceMesh with_vertices(std::vector<Vec3> positions, double t) const
    {
        SurfaceMesh m{std::move(positions), triangles, boundary, t};
        return m;
    }
};

using Edge = std::pair<int, int>;

inline Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

/// Every undirected edge with the number of incident triangles.
inline std::map<Edge, int> edge_valence(const std::vector<Triangle>& tris)
{
    std::map<Edge, int> count;
    for (const auto& t : tris)
        for (int k = 0; k < 3; ++k)
            ++count[make_edge(t[k], t[(k + 1) % 3])];
    return count;
}

/// Flags vertices that lie on an edge with a single incident triangle.
inline std::vector<std::uint8_t> detect_boundary(std::size_t vertex_count, const std::vector<Triangle>& tris)
{
    std::vector<std::uint8_t> flags(vertex_count, 0);
    for (const auto& [e, n] : edge_valence(tris))
        if (n == 1) {
            flags[e.first] = 1;
            flags[e.second] = 1;
        }
    return flags;
}

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c)
{
    return 0.5 * (b - a).cross(c - a).norm();
}

inline double surface_area(const SurfaceMesh& mesh)
{
    double s = 0.0;
    for (const auto& t : mesh.triangles)
        s += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    return s;
}

// ---------------------------------------------------------------------------
// Macro triangulations

enum class MacroKind { octahedron, upper_octahedron, icosahedron, disc_fan };

inline SurfaceMesh make_mesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
{
    SurfaceMesh m;
    m.boundary = detect_boundary(vertices.size(), triangles);
    m.vertices = std::move(vertices);
    m.triangles = std::move(triangles);
    return m;
}

/// Outward-oriented octahedron inscribed in the unit sphere.
inline SurfaceMesh octahedron_macro()
{
    std::vector<Vec3> v{{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    std::vector<Triangle> t{{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4},
                            {1, 0, 5}, {2, 1, 5}, {3, 2, 5}, {0, 3, 5}};
    return make_mesh(std::move(v), std::move(t));
}

/// The four x3 >= 0 faces of the octahedron; boundary is the equator.
inline SurfaceMesh upper_octahedron_macro()
{
    std::vector<Vec3> v{{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}, {0, 0, 1}};
    std::vector<Triangle> t{{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
    return make_mesh(std::move(v), std::move(t));
}

inline SurfaceMesh icosahedron_macro()
{
    const double p = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v{{-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0}, {0, -1, p}, {0, 1, p},
                        {0, -1, -p}, {0, 1, -p}, {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
    for (auto& x : v)
        x.normalize();
    std::vector<Triangle> t{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                            {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                            {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                            {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    return make_mesh(std::move(v), std::move(t));
}

/// Unit disc as a fan of four triangles around the origin (z = 0).
inline SurfaceMesh disc_fan_macro()
{
    std::vector<Vec3> v{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}};
    std::vector<Triangle> t{{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 1}};
    return make_mesh(std::move(v), std::move(t));
}

inline SurfaceMesh macro_mesh(MacroKind kind)
{
    switch (kind) {
    case MacroKind::octahedron:
        return octahedron_macro();
    case MacroKind::upper_octahedron:
        return upper_octahedron_macro();
    case MacroKind::icosahedron:
        return icosahedron_macro();
    case MacroKind::disc_fan:
        return disc_fan_macro();
    }
    return {};
}

// ---------------------------------------------------------------------------
// Uniform refinement

/// Maps an edge midpoint to its final position; the flag marks boundary edges.
using MidpointProjector = std::function<Vec3(const Vec3& midpoint, bool boundary_edge)>;

/// Parent vertices of every vertex added by one red refinement.
struct RefinementLevel {
    std::size_t coarse_vertex_count = 0;
    std::vector<Edge> parents; // parents[i] for fine vertex coarse_vertex_count + i
};

/// One red (1 -> 4) refinement. New vertices are numbered after the old ones in
/// order of first appearance of their edge in the triangle list.
inline SurfaceMesh refine_once(const SurfaceMesh& mesh, const MidpointProjector& project,
                               RefinementLevel* history = nullptr)
{
    const auto valence = edge_valence(mesh.triangles);
    std::map<Edge, int> midpoint_index;
    SurfaceMesh fine;
    fine.time = mesh.time;
    fine.vertices = mesh.vertices;
    fine.boundary = mesh.boundary;
    RefinementLevel level;
    level.coarse_vertex_count = mesh.vertex_count();

    auto midpoint = [&](int a, int b) {
        const Edge e = make_edge(a, b);
        auto it = midpoint_index.find(e);
        if (it != midpoint_index.end())
            return it->second;
        const bool on_boundary = valence.at(e) == 1;
        const Vec3 m = 0.5 * (mesh.vertices[e.first] + mesh.vertices[e.second]);
        const int idx = static_cast<int>(fine.vertices.size());
        fine.vertices.push_back(project ? project(m, on_boundary) : m);
        fine.boundary.push_back(on_boundary ? 1 : 0);
        level.parents.push_back(e);
        midpoint_index.emplace(e, idx);
        return idx;
    };

    fine.triangles.reserve(4 * mesh.triangle_count());
    for (const auto& t : mesh.triangles) {
        const int m01 = midpoint(t[0], t[1]);
        const int m12 = midpoint(t[1], t[2]);
        const int m20 = midpoint(t[2], t[0]);
        fine.triangles.push_back({t[0], m01, m20});
        fine.triangles.push_back({m01, t[1], m12});
        fine.triangles.push_back({m20, m12, t[2]});
        fine.triangles.push_back({m01, m12, m20});
    }
    if (history)
        *history = std::move(level);
    return fine;
}

/// Repeated red refinement, projecting each new midpoint.
inline SurfaceMesh refine_project(SurfaceMesh macro, int levels, const MidpointProjector& project,
                                  std::vector<RefinementLevel>* history = nullptr)
{
    if (levels < 0)
        throw DomainError("refinement level must be non-negative");
    for (int l = 0; l < levels; ++l) {
        RefinementLevel level;
        macro = refine_once(macro, project, &level);
        if (history)
            history->push_back(std::move(level));
    }
    return macro;
}

/// Midpoint projector onto the zero level set of `surface` at time t.
inline MidpointProjector level_set_projector(LevelSetSurface surface, double t)
{
    return [surface = std::move(surface), t](const Vec3& m, bool) { return closest_point(surface, m, t); };
}

/// Boundary midpoints go radially onto the unit circle, interior ones onto the graph.
inline MidpointProjector disc_projector(double t)
{
    return [t](const Vec3& m, bool boundary_edge) -> Vec3 {
        Vec2 th = m.head<2>();
        if (boundary_edge)
            th.normalize();
        return {th[0], th[1], GraphDisc::height(th, t)};
    };
}

/// Macro mesh of the given kind refined `levels` times onto the surface at t = 0.
inline SurfaceMesh refine_project(const LevelSetSurface& surface, MacroKind kind, int levels,
                                  std::vector<RefinementLevel>* history = nullptr)
{
    if (kind == MacroKind::disc_fan)
        return refine_project(macro_mesh(kind), levels, disc_projector(0.0), history);
    return refine_project(macro_mesh(kind), levels, level_set_projector(surface, 0.0), history);
}

/// Prolongs nodal values from the coarse to the fine mesh of one refinement
/// (linear interpolation along the parent edge).
inline std::vector<double> prolongate(const RefinementLevel& level, const std::vector<double>& coarse)
{
    std::vector<double> fine(coarse);
    fine.reserve(level.coarse_vertex_count + level.parents.size());
    for (const auto& [a, b] : level.parents)
        fine.push_back(0.5 * (coarse[a] + coarse[b]));
    return fine;
}

// ---------------------------------------------------------------------------
// Macro mesh for the genus-4 surface of ComplexSurface: a structured planar
// triangulation of the region {G(y^2) + G(z^2) < 1} lifted to the two sheets
// x1 = +-a(0) sqrt(1 - g), glued along the rim g = 1.

namespace detail {

inline double slab_profile(double y, double z)
{
    return ComplexSurface::g(y * y) + ComplexSurface::g(z * z);
}

inline Vec2 slab_profile_gradient(double y, double z)
{
    return {2.0 * y * ComplexSurface::g1(y * y), 2.0 * z * ComplexSurface::g1(z * z)};
}

inline Vec2 snap_to_rim(Vec2 p)
{
    for (int it = 0; it < 60; ++it) {
        const double r = slab_profile(p[0], p[1]) - 1.0;
        if (std::abs(r) < 1e-14)
            return p;
        const Vec2 g = slab_profile_gradient(p[0], p[1]);
        p -= (r / g.squaredNorm()) * g;
    }
    throw NoConvergence("rim snap did not converge");
}

} // namespace detail

/// `cells` grid cells per unit length over [-1.1, 1.1]^2.
inline SurfaceMesh complex_surface_macro(int cells_per_unit = 10)
{
    const double lo = -1.1;
    const int n = static_cast<int>(std::lround(2.2 * cells_per_unit));
    const double h = 2.2 / n;
    auto id = [n](int i, int j) { return i * (n + 1) + j; };

    std::vector<Vec2> grid((n + 1) * (n + 1));
    std::vector<std::uint8_t> inside(grid.size());
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            grid[id(i, j)] = Vec2(lo + i * h, lo + j * h);
            inside[id(i, j)] = detail::slab_profile(grid[id(i, j)][0], grid[id(i, j)][1]) < 1.0;
        }

    // Criss-cross cells with diagonals alternating for symmetry.
    std::vector<Triangle> tris;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            const bool flip = ((i + j) % 2) == 0;
            const std::array<Triangle, 2> cell = flip ? std::array<Triangle, 2>{{{a, b, c}, {a, c, d}}}
                                                      : std::array<Triangle, 2>{{{a, b, d}, {b, c, d}}};
            for (const auto& t : cell)
                if (inside[t[0]] && inside[t[1]] && inside[t[2]])
                    tris.push_back(t);
        }

    // Peel triangles until the planar region is a manifold with boundary:
    // no triangle with two boundary edges, no vertex with more than two
    // boundary edges.
    for (bool changed = true; changed;) {
        changed = false;
        const auto valence = edge_valence(tris);
        std::map<int, int> boundary_degree;
        for (const auto& [e, c] : valence)
            if (c == 1) {
                ++boundary_degree[e.first];
                ++boundary_degree[e.second];
            }
        std::vector<Triangle> kept;
        for (const auto& t : tris) {
            int nb = 0;
            bool pinch = false;
            for (int k = 0; k < 3; ++k) {
                nb += valence.at(make_edge(t[k], t[(k + 1) % 3])) == 1;
                auto it = boundary_degree.find(t[k]);
                pinch = pinch || (it != boundary_degree.end() && it->second > 2);
            }
            if (nb >= 2 || (pinch && nb >= 1)) {
                changed = true;
                continue;
            }
            kept.push_back(t);
        }
        tris.swap(kept);
    }

    const auto valence = edge_valence(tris);
    std::vector<std::uint8_t> rim(grid.size(), 0), used(grid.size(), 0);
    for (const auto& t : tris)
        for (int v : t)
            used[v] = 1;
    for (const auto& [e, c] : valence)
        if (c == 1)
            rim[e.first] = rim[e.second] = 1;

    const double a0 = ComplexSurface::a(0.0);
    std::vector<Vec3> verts;
    std::vector<int> top(grid.size(), -1), bottom(grid.size(), -1);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!used[k])
            continue;
        if (rim[k]) {
            const Vec2 p = detail::snap_to_rim(grid[k]);
            top[k] = bottom[k] = static_cast<int>(verts.size());
            verts.emplace_back(0.0, p[0], p[1]);
        } else {
            const double g = detail::slab_profile(grid[k][0], grid[k][1]);
            const double x1 = a0 * std::sqrt(1.0 - g);
            top[k] = static_cast<int>(verts.size());
            verts.emplace_back(x1, grid[k][0], grid[k][1]);
            bottom[k] = static_cast<int>(verts.size());
            verts.emplace_back(-x1, grid[k][0], grid[k][1]);
        }
    }
    std::vector<Triangle> out;
    out.reserve(2 * tris.size());
    for (const auto& t : tris) {
        out.push_back({top[t[0]], top[t[1]], top[t[2]]});
        out.push_back({bottom[t[0]], bottom[t[2]], bottom[t[1]]});
    }
    return make_mesh(std::move(verts), std::move(out));
}

// ---------------------------------------------------------------------------
// Motion

/// Vertices follow x(t) = trajectory(x(0), t).
struct ClosedFormMotion {
    std::function<Vec3(const Vec3& x0, double t)> trajectory;
};

/// Vertices integrate dX/dt = velocity(X, t) and are projected back onto the surface.
struct NodalOdeMotion {
    VelocityField velocity;
    std::function<Vec3(const Vec3& x, double t)> project;
    int substeps = 1;
};

using MeshMotion = std::variant<ClosedFormMotion, NodalOdeMotion>;

/// Closed-form motion of the initial mesh to time t.
inline SurfaceMesh move_mesh(const SurfaceMesh& initial, const MeshMotion& motion, double t)
{
    const auto* closed = std::get_if<ClosedFormMotion>(&motion);
    if (!closed)
        throw WrongMotionKind("move_mesh needs a closed-form trajectory; use lagrangian_advance");
    std::vector<Vec3> x(initial.vertex_count());
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = closed->trajectory(initial.vertices[i], t);
    return initial.with_vertices(std::move(x), t);
}

/// Classical RK4 for one vertex over [t0, t1] with `substeps` substeps.
inline Vec3 rk4_integrate(const VelocityField& v, Vec3 x, double t0, double t1, int substeps)
{
    const double dt = (t1 - t0) / substeps;
    for (int s = 0; s < substeps; ++s) {
        const double t = t0 + s * dt;
        const Vec3 k1 = v(x, t);
        const Vec3 k2 = v(x + 0.5 * dt * k1, t + 0.5 * dt);
        const Vec3 k3 = v(x + 0.5 * dt * k2, t + 0.5 * dt);
        const Vec3 k4 = v(x + dt * k3, t + dt);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

/// Advances every vertex from t0 to t1 along the nodal ODE, then projects.
inline SurfaceMesh lagrangian_advance(const SurfaceMesh& mesh, const NodalOdeMotion& motion, double t0, double t1)
{
    std::vector<Vec3> x(mesh.vertex_count());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Vec3 moved = rk4_integrate(motion.velocity, mesh.vertices[i], t0, t1, motion.substeps);
        x[i] = motion.project ? motion.project(moved, t1) : moved;
    }
    return mesh.with_vertices(std::move(x), t1);
}

inline SurfaceMesh lagrangian_advance(const SurfaceMesh& mesh, const MeshMotion& motion, double t0, double t1)
{
    const auto* ode = std::get_if<NodalOdeMotion>(&motion);
    if (!ode)
        throw WrongMotionKind("lagrangian_advance needs a nodal ODE motion; use move_mesh");
    return lagrangian_advance(mesh, *ode, t0, t1);
}

/// Projection used after each RK step: closest point for level sets.
inline std::function<Vec3(const Vec3&, double)> level_set_snap(LevelSetSurface surface)
{
    return [surface = std::move(surface)](const Vec3& x, double t) { return closest_point(surface, x, t); };
}

/// Projection for graphs over the disc: x3 <- z(x1, x2, t).
inline std::function<Vec3(const Vec3&, double)> graph_snap()
{
    return [](const Vec3& x, double t) -> Vec3 { return {x[0], x[1], GraphDisc::height(x.head<2>(), t)}; };
}

// ---------------------------------------------------------------------------
// Quality

struct QualityReport {
    double time = 0.0;
    double h = 0.0;               // max edge length
    double min_angle_deg = 0.0;   // smallest interior angle
    double max_aspect_ratio = 0.0; // circumradius / (2 inradius), 1 for equilateral
    double min_area = 0.0;
    double max_area = 0.0;
};

inline double max_edge_length(const SurfaceMesh& mesh)
{
    double h = 0.0;
    for (const auto& t : mesh.triangles)
        for (int k = 0; k < 3; ++k)
            h = std::max(h, (mesh.vertices[t[k]] - mesh.vertices[t[(k + 1) % 3]]).norm());
    return h;
}

inline QualityReport quality_metrics(const SurfaceMesh& mesh)
{
    QualityReport q;
    q.time = mesh.time;
    q.min_angle_deg = 180.0;
    q.min_area = std::numeric_limits<double>::infinity();
    for (const auto& t : mesh.triangles) {
        const Vec3& a = mesh.vertices[t[0]];
        const Vec3& b = mesh.vertices[t[1]];
        const Vec3& c = mesh.vertices[t[2]];
        const double area = triangle_area(a, b, c);
        if (!(area >= 1e-14))
            throw DegenerateTriangle("triangle area below 1e-14");
        const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
        q.h = std::max({q.h, la, lb, lc});
        q.min_area = std::min(q.min_area, area);
        q.max_area = std::max(q.max_area, area);
        const std::array<std::array<Vec3, 3>, 3> corners{{{a, b, c}, {b, c, a}, {c, a, b}}};
        for (const auto& [p, u, w] : corners) {
            const Vec3 e1 = u - p, e2 = w - p;
            const double ang = std::atan2(e1.cross(e2).norm(), e1.dot(e2));
            q.min_angle_deg = std::min(q.min_angle_deg, ang * 180.0 / pi);
        }
        const double s = 0.5 * (la + lb + lc);
        const double inradius = area / s;
        const double circumradius = la * lb * lc / (4.0 * area);
        q.max_aspect_ratio = std::max(q.max_aspect_ratio, circumradius / (2.0 * inradius));
    }
    return q;
}

} // namespace esfem
