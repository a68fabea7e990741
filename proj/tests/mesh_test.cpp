#include <gtest/gtest.h>

#include <map>
#include <set>

#include "support.hpp"

using namespace esfem;

namespace {

const LevelSetSurface unit_sphere = RadialSphere{1.0, 0.0};

std::size_t unique_edges(const SurfaceMesh& m) { return edge_valence(m.triangles).size(); }

// Every interior edge is traversed once in each direction.
bool consistently_oriented(const SurfaceMesh& m)
{
    std::map<std::pair<int, int>, int> directed;
    for (const auto& t : m.triangles)
        for (int k = 0; k < 3; ++k)
            if (++directed[{t[k], t[(k + 1) % 3]}] > 1)
                return false;
    return true;
}

double max_residual(const SurfaceMesh& m, const LevelSetSurface& s, double t)
{
    double r = 0.0;
    for (const auto& x : m.vertices)
        r = std::max(r, std::abs(s.value(x, t)));
    return r;
}

} // namespace

TEST(RefineProject, OctahedronCounts)
{
    const SurfaceMesh m0 = refine_project(unit_sphere, MacroKind::octahedron, 0);
    EXPECT_EQ(m0.vertex_count(), 6u);
    EXPECT_EQ(m0.triangle_count(), 8u);
    SurfaceMesh prev = m0;
    for (int level = 1; level <= 4; ++level) {
        const SurfaceMesh m = refine_project(unit_sphere, MacroKind::octahedron, level);
        EXPECT_EQ(m.triangle_count(), 4 * prev.triangle_count());
        EXPECT_EQ(m.vertex_count(), prev.vertex_count() + unique_edges(prev));
        EXPECT_TRUE(consistently_oriented(m));
        EXPECT_LE(max_residual(m, unit_sphere, 0.0), 1e-12);
        prev = m;
    }
    EXPECT_EQ(refine_project(PeriodicEllipsoid{}, MacroKind::octahedron, 6).vertex_count(), 16386u);
}

TEST(RefineProject, DiscFanVertexCounts)
{
    const std::map<int, std::size_t> expected{{4, 545}, {6, 8321}};
    for (const auto& [level, count] : expected) {
        const SurfaceMesh m = refine_project(GraphDisc{}, MacroKind::disc_fan, level);
        EXPECT_EQ(m.vertex_count(), count);
        EXPECT_TRUE(consistently_oriented(m));
        for (std::size_t j = 0; j < m.vertex_count(); ++j)
            if (m.is_boundary(j))
                EXPECT_NEAR(m.vertices[j].head<2>().norm(), 1.0, 1e-14);
    }
}

TEST(RefineProject, SphereAreaDefectIsSecondOrder)
{
    double prev = 0.0;
    for (int level = 2; level <= 5; ++level) {
        const double defect = std::abs(surface_area(refine_project(unit_sphere, MacroKind::octahedron, level)) - 4 * pi);
        if (level > 2) {
            EXPECT_GT(prev / defect, 3.5);
            EXPECT_LT(prev / defect, 4.5);
        }
        prev = defect;
    }
}

TEST(RefineProject, MeshSizeHalvesPerLevel)
{
    const std::vector<std::pair<LevelSetSurface, MacroKind>> cases{
        {RadialSphere{1.0, 0.0}, MacroKind::octahedron},
        {BenchmarkHemiellipsoid{}, MacroKind::upper_octahedron},
        {GraphDisc{}, MacroKind::disc_fan}};
    for (const auto& [s, kind] : cases) {
        double prev = max_edge_length(refine_project(s, kind, 2));
        for (int level = 3; level <= 4; ++level) {
            const double h = max_edge_length(refine_project(s, kind, level));
            EXPECT_GE(prev / h, 1.8);
            EXPECT_LE(prev / h, 2.2);
            prev = h;
        }
    }
}

TEST(RefineProject, BenchmarkBoundaryStaysInPlane)
{
    const SurfaceMesh m = refine_project(BenchmarkHemiellipsoid{}, MacroKind::upper_octahedron, 3);
    EXPECT_TRUE(consistently_oriented(m));
    std::size_t boundary = 0;
    for (std::size_t j = 0; j < m.vertex_count(); ++j)
        if (m.is_boundary(j)) {
            ++boundary;
            EXPECT_EQ(m.vertices[j][2], 0.0);
        }
    EXPECT_EQ(boundary, 32u);
}

TEST(ComplexMacro, ClosedOrientedGenusFour)
{
    const SurfaceMesh m = example2_mesh(0, 10);
    EXPECT_TRUE(consistently_oriented(m));
    for (const auto& [e, n] : edge_valence(m.triangles))
        EXPECT_EQ(n, 2);
    const long chi = static_cast<long>(m.vertex_count()) - static_cast<long>(unique_edges(m))
                     + static_cast<long>(m.triangle_count());
    EXPECT_EQ(chi, 2 - 2 * 4);
    EXPECT_LE(max_residual(m, ComplexSurface{}, 0.0), 1e-10);
    const QualityReport q = quality_metrics(m);
    EXPECT_GT(q.min_angle_deg, 5.0);
}

TEST(MoveMesh, BenchmarkAleIdentityAndResidual)
{
    const SurfaceMesh m = refine_project(BenchmarkHemiellipsoid{}, MacroKind::upper_octahedron, 3);
    const MeshMotion motion = ClosedFormMotion{ale_trajectory_benchmark};
    const SurfaceMesh same = move_mesh(m, motion, 0.0);
    EXPECT_EQ(same.vertices, m.vertices);
    const SurfaceMesh moved = move_mesh(m, motion, pi / 2);
    EXPECT_LE(max_residual(moved, BenchmarkHemiellipsoid{}, pi / 2), 1e-12);
    EXPECT_EQ(moved.triangles, m.triangles);
}

TEST(MoveMesh, ComplexAlePeriodic)
{
    const SurfaceMesh m = example2_mesh(0, 10);
    const SurfaceMesh moved = move_mesh(m, ClosedFormMotion{ale_trajectory_complex}, 1.0);
    for (std::size_t j = 0; j < m.vertex_count(); ++j)
        EXPECT_LT((moved.vertices[j] - m.vertices[j]).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(MoveMesh, WrongMotionKind)
{
    const SurfaceMesh m = refine_project(unit_sphere, MacroKind::octahedron, 1);
    const MeshMotion ode = NodalOdeMotion{zero_velocity(), {}, 1};
    EXPECT_THROW((void)move_mesh(m, ode, 0.5), WrongMotionKind);
    const MeshMotion closed = ClosedFormMotion{[](const Vec3& x, double) { return x; }};
    EXPECT_THROW((void)lagrangian_advance(m, closed, 0.0, 0.5), WrongMotionKind);
}

TEST(LagrangianAdvance, RadialSphereVertex)
{
    const RadialSphere s{1.0, 0.1};
    SurfaceMesh m = make_mesh({Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)}, {Triangle{0, 1, 2}});
    const NodalOdeMotion motion{normal_velocity_field(s), level_set_snap(s), 4};
    const SurfaceMesh moved = lagrangian_advance(m, motion, 0.0, 0.5);
    EXPECT_LT((moved.vertices[0] - Vec3(s.r(0.5), 0, 0)).norm(), 1e-10);
}

TEST(LagrangianAdvance, ZeroVelocityIsIdentity)
{
    const SurfaceMesh m = refine_project(unit_sphere, MacroKind::octahedron, 2);
    const SurfaceMesh moved = lagrangian_advance(m, NodalOdeMotion{zero_velocity(), {}, 3}, 0.0, 1.0);
    EXPECT_EQ(moved.vertices, m.vertices);
}

TEST(LagrangianAdvance, Rk4IsFourthOrder)
{
    const BenchmarkHemiellipsoid s;
    const VelocityField v = normal_velocity_field(s);
    const Vec3 x0 = Vec3(0.6, 0.3, std::sqrt(1 - 0.36 - 0.09));
    const Vec3 ref = rk4_integrate(v, x0, 0.0, 1.0, 256);
    const double e1 = (rk4_integrate(v, x0, 0.0, 1.0, 4) - ref).norm();
    const double e2 = (rk4_integrate(v, x0, 0.0, 1.0, 8) - ref).norm();
    EXPECT_GT(e1 / e2, 12.0);
    EXPECT_LT(e1 / e2, 20.0);
}

TEST(LagrangianAdvance, KeepsVerticesOnSurface)
{
    const PeriodicEllipsoid s;
    const SurfaceMesh m = refine_project(s, MacroKind::octahedron, 3);
    const NodalOdeMotion motion{normal_velocity_field(s), level_set_snap(s), 1};
    const SurfaceMesh moved = lagrangian_advance(m, motion, 0.0, 0.3);
    EXPECT_LE(max_residual(moved, s, 0.3), 1e-10);
    EXPECT_EQ(moved.triangles, m.triangles);
}

TEST(Quality, ReferenceTriangles)
{
    const SurfaceMesh eq = make_mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0.5, std::sqrt(3.0) / 2, 0)}, {Triangle{0, 1, 2}});
    const QualityReport q = quality_metrics(eq);
    EXPECT_NEAR(q.min_angle_deg, 60.0, 1e-12);
    EXPECT_NEAR(q.max_aspect_ratio, 1.0, 1e-12);
    const SurfaceMesh right = make_mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {Triangle{0, 1, 2}});
    EXPECT_NEAR(quality_metrics(right).min_angle_deg, 45.0, 1e-12);
    const SurfaceMesh sliver = make_mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0.5, 1e-6, 0)}, {Triangle{0, 1, 2}});
    EXPECT_LT(quality_metrics(sliver).min_angle_deg, 0.001);
    const SurfaceMesh flat = make_mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}, {Triangle{0, 1, 2}});
    EXPECT_THROW((void)quality_metrics(flat), DegenerateTriangle);
}

TEST(Vtk, WritesLegacyPolydata)
{
    const SurfaceMesh m = refine_project(unit_sphere, MacroKind::octahedron, 0);
    const auto dir = std::filesystem::temp_directory_path() / "esfem_vtk_test";
    std::filesystem::create_directories(dir);
    const auto path = snapshot_path(dir, "run", 7);
    EXPECT_EQ(path.filename().string(), "run_7.vtk");
    write_vtk(path, m, {{"u", std::vector<double>(6, 1.5)}});
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_NE(text.find("DATASET POLYDATA"), std::string::npos);
    EXPECT_NE(text.find("POINTS 6 double"), std::string::npos);
    EXPECT_NE(text.find("POLYGONS 8 32"), std::string::npos);
    EXPECT_NE(text.find("SCALARS u double 1"), std::string::npos);
    EXPECT_THROW(write_vtk(path, m, {{"bad", std::vector<double>(5)}}), DomainError);
}
