#include <gtest/gtest.h>

#include "support.hpp"

using namespace esfem;
using esfem::testing::random_sphere_points;
using esfem::testing::random_surface_points;

namespace {

const LevelSetSurface unit_sphere = RadialSphere{1.0, 0.0};

std::vector<std::pair<std::string, LevelSetSurface>> shipped_surfaces()
{
    return {{"sphere", RadialSphere{1.0, 0.1}},
            {"benchmark", BenchmarkHemiellipsoid{}},
            {"complex", ComplexSurface{}},
            {"periodic", PeriodicEllipsoid{}},
            {"graph", GraphDisc{}}};
}

} // namespace

TEST(Normal, SphereAndBenchmarkPoles)
{
    EXPECT_NEAR((normal(unit_sphere, Vec3(1, 0, 0), 0.7) - Vec3(1, 0, 0)).norm(), 0.0, 1e-15);
    EXPECT_NEAR((normal(BenchmarkHemiellipsoid{}, Vec3(0, 0, 1), 0.0) - Vec3(0, 0, 1)).norm(), 0.0, 1e-15);
}

TEST(Normal, BenchmarkMatchesFiniteDifferenceGradient)
{
    const BenchmarkHemiellipsoid s;
    const double t = 0.3, e = 1e-6;
    const Vec3 x = closest_point(s, Vec3(0.5, 0.4, 0.6), t);
    Vec3 g;
    for (int k = 0; k < 3; ++k) {
        Vec3 d = Vec3::Zero();
        d[k] = e;
        g[k] = (s.value(x + d, t) - s.value(x - d, t)) / (2 * e);
    }
    EXPECT_LT((normal(s, x, t) - g.normalized()).norm(), 1e-6);
}

TEST(Normal, DegenerateGradientThrows)
{
    EXPECT_THROW((void)normal(unit_sphere, Vec3::Zero(), 0.0), DegenerateGradient);
}

TEST(NormalVelocity, BenchmarkExamples)
{
    const BenchmarkHemiellipsoid s;
    EXPECT_NEAR(normal_velocity(s, Vec3(0, 0, 1), 0.0).norm(), 0.0, 1e-15);
    EXPECT_NEAR((normal_velocity(s, Vec3(1, 0, 0), 0.0) - Vec3(0.125, 0, 0)).norm(), 0.0, 1e-15);
}

TEST(NormalVelocity, SphereMovesWithRadius)
{
    const RadialSphere s{1.0, 0.1};
    const double t = 0.4;
    for (const Vec3& n : random_sphere_points(20, 3)) {
        const Vec3 x = s.r(t) * n;
        EXPECT_LT((normal_velocity(s, x, t) - s.r_dot(t) * n).norm(), 1e-14);
    }
}

TEST(NormalVelocity, ParallelToNormalOnAllSurfaces)
{
    for (const auto& [name, s] : shipped_surfaces()) {
        const auto pts = random_surface_points(s, 0.37, 200, 1.2, 11, [](const Vec3&) { return true; });
        for (const Vec3& x : pts) {
            const Vec3 v = normal_velocity(s, x, 0.37);
            const Vec3 nu = normal(s, x, 0.37);
            EXPECT_LE((v - v.dot(nu) * nu).norm(), 1e-12 * std::max(1.0, v.norm())) << name;
        }
    }
}

TEST(LevelSetJet, ClosedFormsMatchFiniteDifferences)
{
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0), ut(0.0, 1.0);
    const double e = 1e-5;
    for (const auto& [name, s] : shipped_surfaces()) {
        for (int i = 0; i < 1000; ++i) {
            const Vec3 x(u(gen), u(gen), u(gen));
            const double t = ut(gen);
            const LevelSetJet j = s.jet(x, t);
            Vec3 g;
            Mat3 h;
            for (int k = 0; k < 3; ++k) {
                Vec3 d = Vec3::Zero();
                d[k] = e;
                g[k] = (s.value(x + d, t) - s.value(x - d, t)) / (2 * e);
                h.col(k) = (s.jet(x + d, t).gradient - s.jet(x - d, t).gradient) / (2 * e);
            }
            const double dt = (s.value(x, t + e) - s.value(x, t - e)) / (2 * e);
            const double scale = 1.0 + j.gradient.norm() + j.hessian.norm();
            EXPECT_LE((g - j.gradient).norm(), 1e-6 * scale) << name;
            EXPECT_LE((h - j.hessian).norm(), 1e-6 * scale) << name;
            EXPECT_LE(std::abs(dt - j.time_derivative), 1e-6 * (1.0 + std::abs(j.time_derivative))) << name;
        }
    }
}

TEST(ClosestPoint, SphereAndFixedPoint)
{
    EXPECT_LT((closest_point(unit_sphere, Vec3(2, 0, 0), 0.0) - Vec3(1, 0, 0)).norm(), 1e-14);
    const Vec3 on = Vec3(1, 2, 2) / 3.0;
    EXPECT_LT((closest_point(unit_sphere, on, 0.0) - on).norm(), 1e-15);
}

TEST(ClosestPoint, RecoversFootPointOnBenchmark)
{
    const BenchmarkHemiellipsoid s;
    const double t = 0.8;
    const auto pts = random_surface_points(s, t, 50, 1.2, 7, [](const Vec3& p) { return p[2] > 0.05; });
    for (const Vec3& p : pts) {
        const Vec3 x = p + 0.01 * normal(s, p, t);
        EXPECT_LT((closest_point(s, x, t) - p).norm(), 1e-8);
    }
}

TEST(ClosestPoint, IdempotentAndOrthogonal)
{
    std::mt19937 gen(9);
    std::uniform_real_distribution<double> u(-1.1, 1.1);
    for (const auto& [name, s] : shipped_surfaces()) {
        for (int i = 0; i < 100; ++i) {
            const Vec3 x(u(gen), u(gen), u(gen));
            Vec3 p;
            try {
                p = closest_point(s, x, 0.21);
            } catch (const NoConvergence&) {
                continue;
            }
            EXPECT_LE(std::abs(s.value(p, 0.21)), 1e-12) << name;
            EXPECT_LT((closest_point(s, p, 0.21) - p).norm(), 1e-10) << name;
            const Vec3 nu = normal(s, p, 0.21);
            const Vec3 r = x - p;
            EXPECT_LE((r - r.dot(nu) * nu).norm(), 1e-10) << name;
        }
    }
}

TEST(ClosestPoint, NoConvergenceIsReported)
{
    ClosestPointOptions opts;
    opts.max_iterations = 0;
    EXPECT_THROW((void)closest_point(unit_sphere, Vec3(3, 0, 0), 0.0, opts), NoConvergence);
}

TEST(TangentialGradient, SphereExamples)
{
    const Vec3 pole(0, 0, 1);
    EXPECT_LT(tangential_gradient(constant_field(2.0), unit_sphere, pole, 0.0).norm(), 1e-15);
    EXPECT_LT(tangential_gradient(polynomial_field(Polynomial3::monomial(0, 0, 1)), unit_sphere, pole, 0.0).norm(),
              1e-15);
    EXPECT_LT((tangential_gradient(polynomial_field(Polynomial3::monomial(1, 0, 0)), unit_sphere, pole, 0.0)
               - Vec3(1, 0, 0))
                  .norm(),
              1e-15);
}

TEST(LaplaceBeltrami, SphericalHarmonicsOfDegreeTwo)
{
    const std::array<AmbientField, 3> fields{polynomial_field(Polynomial3::monomial(1, 1, 0)),
                                             polynomial_field(Polynomial3::monomial(0, 1, 1)),
                                             polynomial_field(Polynomial3::monomial(1, 0, 1))};
    for (const Vec3& x : random_sphere_points(1000, 1))
        for (const auto& u : fields)
            EXPECT_NEAR(laplace_beltrami(u, unit_sphere, x, 0.0), -6.0 * u.value(x, 0.0), 1e-10);
    EXPECT_NEAR(laplace_beltrami(constant_field(3.0), unit_sphere, Vec3(0, 1, 0), 0.0), 0.0, 1e-15);
}

// Independent route: div_G(grad_G u) via central differences of the tangential
// gradient extended constantly along normals (closest-point extension).
TEST(LaplaceBeltrami, BenchmarkMatchesClosestPointFiniteDifferences)
{
    const BenchmarkHemiellipsoid s;
    const double t = 0.3, e = 1e-4;
    const AmbientField u = polynomial_field(Polynomial3::monomial(1, 1, 0));
    const auto pts = random_surface_points(s, t, 10, 1.2, 21, [](const Vec3& p) { return p[2] > 0.2; });
    for (const Vec3& x : pts) {
        const Vec3 nu = normal(s, x, t);
        const Mat3 p = Mat3::Identity() - nu * nu.transpose();
        double div = 0.0;
        for (int k = 0; k < 3; ++k) {
            Vec3 d = Vec3::Zero();
            d[k] = e;
            const Vec3 gp = tangential_gradient(u, s, closest_point(s, x + d, t), t);
            const Vec3 gm = tangential_gradient(u, s, closest_point(s, x - d, t), t);
            const Vec3 col = (gp - gm) / (2 * e);
            div += (p * col)[k];
        }
        EXPECT_NEAR(laplace_beltrami(u, s, x, t), div, 1e-4);
    }
}

TEST(SurfaceDivergence, ConstantAndIdentityFields)
{
    VelocityField c;
    c.evaluate = [](const Vec3&, double) -> Vec3 { return {1, 2, 3}; };
    VelocityField id;
    id.evaluate = [](const Vec3& x, double) -> Vec3 { return x; };
    const Vec3 x = Vec3(1, 1, 1).normalized();
    EXPECT_NEAR(surface_divergence(c, unit_sphere, x, 0.0), 0.0, 1e-9);
    EXPECT_NEAR(surface_divergence(id, unit_sphere, x, 0.0), 2.0, 1e-9);
}

TEST(SurfaceDivergence, BenchmarkNormalVelocityMatchesCoarserFiniteDifferences)
{
    const BenchmarkHemiellipsoid s;
    const double t = 0.6;
    const VelocityField v = normal_velocity_field(s);
    const auto pts = random_surface_points(s, t, 20, 1.2, 4, [](const Vec3& p) { return p[2] > 0.1; });
    for (const Vec3& x : pts) {
        const Vec3 nu = normal(s, x, t);
        const Mat3 dw = v.spatial_jacobian(x, t, 1e-4);
        EXPECT_NEAR(surface_divergence(v, s, x, t), dw.trace() - nu.dot(dw * nu), 1e-5);
    }
}

TEST(AleTrajectory, BenchmarkExamples)
{
    const Vec3 x0 = Vec3(0.3, 0.4, std::sqrt(0.75));
    EXPECT_EQ(ale_trajectory_benchmark(x0, 0.0), x0);
    EXPECT_LT((ale_trajectory_benchmark(Vec3(1, 0, 0), pi / 2) - Vec3(std::sqrt(1.25), 0, 0)).norm(), 1e-15);
    for (const Vec3& n : random_sphere_points(200, 2))
        for (double t : {0.1, 0.9, 1.7, 2.0})
            EXPECT_LE(std::abs(BenchmarkHemiellipsoid{}.value(ale_trajectory_benchmark(n, t), t)), 1e-14);
}

TEST(AleTrajectory, BenchmarkVelocityIsTimeDerivative)
{
    const VelocityField v = ale_velocity_benchmark();
    const Vec3 x0(0.6, 0.0, 0.8);
    const double t = 0.7, e = 1e-6;
    const Vec3 fd = (ale_trajectory_benchmark(x0, t + e) - ale_trajectory_benchmark(x0, t - e)) / (2 * e);
    EXPECT_LT((fd - v(ale_trajectory_benchmark(x0, t), t)).norm(), 1e-8);
}

TEST(AleTrajectory, ComplexStaysOnSurfaceAndIsPeriodic)
{
    const ComplexSurface s;
    const auto pts = random_surface_points(s, 0.0, 100, 1.1, 8, [](const Vec3&) { return true; });
    for (const Vec3& x0 : pts) {
        EXPECT_EQ(ale_trajectory_complex(x0, 0.0), x0);
        EXPECT_LT((ale_trajectory_complex(x0, 1.0) - x0).norm(), 1e-13);
        for (double t : {0.37, 0.5, 0.83})
            EXPECT_LE(std::abs(s.value(ale_trajectory_complex(x0, t), t)), 1e-12);
    }
}

TEST(GraphVelocities, ApexBoundaryAndVerticalAle)
{
    const GraphDisc g;
    const auto apex = graph_velocities(g, Vec2(0, 0), 0.0);
    EXPECT_LT((apex.lagrangian - Vec3(0, 0, 4 * pi)).norm(), 1e-13);
    EXPECT_LT((apex.ale - Vec3(0, 0, 4 * pi)).norm(), 1e-13);
    for (double phi : {0.0, 1.0, 2.5}) {
        const auto b = graph_velocities(g, Vec2(std::cos(phi), std::sin(phi)), 0.1);
        EXPECT_LT(b.lagrangian.norm(), 1e-14);
        EXPECT_LT(b.ale.norm(), 1e-14);
    }
    std::mt19937 gen(1);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    for (int i = 0; i < 100; ++i) {
        const Vec3 x(u(gen), u(gen), 0.3);
        const Vec3 a = graph_vertical_velocity()(x, 0.05 * i);
        EXPECT_EQ(a[0], 0.0);
        EXPECT_EQ(a[1], 0.0);
    }
}

TEST(AmbientField, DerivativesMatchFiniteDifferences)
{
    const ManufacturedProblem p = example2_problem();
    const AmbientField& u = *p.exact;
    const Vec3 x(0.3, -0.7, 0.5);
    const double t = 0.4, e = 1e-5;
    Vec3 g;
    for (int k = 0; k < 3; ++k) {
        Vec3 d = Vec3::Zero();
        d[k] = e;
        g[k] = (u.value(x + d, t) - u.value(x - d, t)) / (2 * e);
        const Vec3 hcol = (u.gradient(x + d, t) - u.gradient(x - d, t)) / (2 * e);
        EXPECT_LT((hcol - u.hessian(x, t).col(k)).norm(), 1e-6);
    }
    EXPECT_LT((g - u.gradient(x, t)).norm(), 1e-6);
    EXPECT_NEAR((u.value(x, t + e) - u.value(x, t - e)) / (2 * e), u.time_derivative(x, t), 1e-6);
}

TEST(ClosestPoint, ThinSurfaceFromOffsetPoints)
{
    // points displaced along the normal, well inside the reach of the surface
    const LevelSetSurface s = ComplexSurface{};
    const auto feet = random_surface_points(s, 0.3, 50, 1.2, 17, [](const Vec3&) { return true; });
    for (const Vec3& p : feet) {
        const Vec3 nu = normal(s, p, 0.3);
        for (double off : {-2e-3, 2e-3}) {
            const Vec3 q = closest_point(s, p + off * nu, 0.3);
            EXPECT_LE(std::abs(s.value(q, 0.3)), 1e-12);
            EXPECT_LT((q - p).norm(), 1e-8);
        }
    }
}
