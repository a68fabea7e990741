#pragma once

#include <cmath>
#include <concepts>
#include <memory>
#include <optional>
#include <type_traits>
#include <utility>

#include "core.hpp"
#include "fields.hpp"

namespace esfem {

/// Value, gradient, Hessian and time derivative of a level-set function at (x, t).
struct LevelSetJet {
    double value = 0.0;
    Vec3 gradient = Vec3::Zero();
    Mat3 hessian = Mat3::Zero();
    double time_derivative = 0.0;
};

template <class S>
concept LevelSetFunction = requires(const S& s, const Vec3& x, double t) {
    { s.jet(x, t) } -> std::convertible_to<LevelSetJet>;
    { s.value(x, t) } -> std::convertible_to<double>;
};

// ---------------------------------------------------------------------------
// Shipped closed-form surfaces

/// d = |x|^2 - R(t)^2 with R(t) = radius + amplitude * sin(t).
struct RadialSphere {
    double radius = 1.0;
    double amplitude = 0.0;

    [[nodiscard]] double r(double t) const { return radius + amplitude * std::sin(t); }
    [[nodiscard]] double r_dot(double t) const { return amplitude * std::cos(t); }

    [[nodiscard]] double value(const Vec3& x, double t) const { return x.squaredNorm() - r(t) * r(t); }

    [[nodiscard]] LevelSetJet jet(const Vec3& x, double t) const
    {
        return {value(x, t), 2.0 * x, 2.0 * Mat3::Identity(), -2.0 * r(t) * r_dot(t)};
    }
};

/// Ellipsoid with x1-axis sqrt(a(t)), a(t) = 1 + 0.25 sin t, cut to x3 >= 0.
struct BenchmarkHemiellipsoid {
    static double a(double t) { return 1.0 + 0.25 * std::sin(t); }
    static double a_dot(double t) { return 0.25 * std::cos(t); }

    [[nodiscard]] double value(const Vec3& x, double t) const
    {
        return x[0] * x[0] / a(t) + x[1] * x[1] + x[2] * x[2] - 1.0;
    }

    [[nodiscard]] LevelSetJet jet(const Vec3& x, double t) const
    {
        const double at = a(t);
        LevelSetJet j;
        j.value = value(x, t);
        j.gradient = Vec3(2.0 * x[0] / at, 2.0 * x[1], 2.0 * x[2]);
        j.hessian = Vec3(2.0 / at, 2.0, 2.0).asDiagonal();
        j.time_derivative = -x[0] * x[0] * a_dot(t) / (at * at);
        return j;
    }

    [[nodiscard]] static bool in_half_space(const Vec3& x) { return x[2] >= 0.0; }
};

/// Thin genus-4 surface x1^2/a^2 + G(x2^2) + G(x3^2/L^2) = 1.
struct ComplexSurface {
    static double a(double t) { return 0.1 + 0.01 * std::sin(2.0 * pi * t); }
    static double a_dot(double t) { return 0.02 * pi * std::cos(2.0 * pi * t); }
    static double length(double t) { return 1.0 + 0.3 * std::sin(4.0 * pi * t); }
    static double length_dot(double t) { return 1.2 * pi * std::cos(4.0 * pi * t); }

    static double g(double s) { return 31.25 * s * (s - 0.36) * (s - 0.95); }
    static double g1(double s) { return 31.25 * (3.0 * s * s - 2.62 * s + 0.342); }
    static double g2(double s) { return 31.25 * (6.0 * s - 2.62); }

    [[nodiscard]] double value(const Vec3& x, double t) const
    {
        const double at = a(t), lt = length(t);
        return x[0] * x[0] / (at * at) + g(x[1] * x[1]) + g(x[2] * x[2] / (lt * lt)) - 1.0;
    }

    [[nodiscard]] LevelSetJet jet(const Vec3& x, double t) const
    {
        const double at = a(t), lt = length(t), l2 = lt * lt;
        const double s2 = x[1] * x[1];
        const double s3 = x[2] * x[2] / l2;
        LevelSetJet j;
        j.value = x[0] * x[0] / (at * at) + g(s2) + g(s3) - 1.0;
        j.gradient = Vec3(2.0 * x[0] / (at * at), 2.0 * x[1] * g1(s2), 2.0 * x[2] * g1(s3) / l2);
        j.hessian = Vec3(2.0 / (at * at), 4.0 * s2 * g2(s2) + 2.0 * g1(s2),
                         4.0 * x[2] * x[2] * g2(s3) / (l2 * l2) + 2.0 * g1(s3) / l2)
                        .asDiagonal();
        j.time_derivative = -2.0 * x[0] * x[0] * a_dot(t) / (at * at * at)
                            - 2.0 * g1(s3) * x[2] * x[2] * length_dot(t) / (l2 * lt);
        return j;
    }
};

/// Ellipsoid with axes a = 1 - 0.1 sin(pi t), b = 1 - 0.2 sin(pi t), c = 1 + 0.1 sin(pi t).
struct PeriodicEllipsoid {
    static Vec3 axes(double t)
    {
        const double s = std::sin(pi * t);
        return {1.0 - 0.1 * s, 1.0 - 0.2 * s, 1.0 + 0.1 * s};
    }
    static Vec3 axes_dot(double t)
    {
        const double c = pi * std::cos(pi * t);
        return {-0.1 * c, -0.2 * c, 0.1 * c};
    }

    [[nodiscard]] double value(const Vec3& x, double t) const
    {
        const Vec3 ax = axes(t);
        return (x.array() / ax.array()).square().sum() - 1.0;
    }

    [[nodiscard]] LevelSetJet jet(const Vec3& x, double t) const
    {
        const Vec3 ax = axes(t), ad = axes_dot(t);
        const Vec3 inv2 = ax.array().square().inverse();
        LevelSetJet j;
        j.value = (x.array().square() * inv2.array()).sum() - 1.0;
        j.gradient = 2.0 * x.cwiseProduct(inv2);
        j.hessian = (2.0 * inv2).asDiagonal();
        j.time_derivative = (-2.0 * x.array().square() * ad.array() / ax.array().cube()).sum();
        return j;
    }
};

/// Graph x3 = z(theta, t) = 2 sin(2 pi t)(1 - |theta|^2) over the unit disc,
/// also usable as the level set d = x3 - z(x1, x2, t).
struct GraphDisc {
    static double amplitude(double t) { return 2.0 * std::sin(2.0 * pi * t); }
    static double amplitude_dot(double t) { return 4.0 * pi * std::cos(2.0 * pi * t); }

    [[nodiscard]] static double height(const Vec2& theta, double t)
    {
        return amplitude(t) * (1.0 - theta.squaredNorm());
    }
    [[nodiscard]] static Vec2 height_gradient(const Vec2& theta, double t)
    {
        return -2.0 * amplitude(t) * theta;
    }
    [[nodiscard]] static double height_time_derivative(const Vec2& theta, double t)
    {
        return amplitude_dot(t) * (1.0 - theta.squaredNorm());
    }

    [[nodiscard]] double value(const Vec3& x, double t) const
    {
        return x[2] - height(x.head<2>(), t);
    }

    [[nodiscard]] LevelSetJet jet(const Vec3& x, double t) const
    {
        const Vec2 th = x.head<2>();
        const Vec2 gz = height_gradient(th, t);
        LevelSetJet j;
        j.value = value(x, t);
        j.gradient = Vec3(-gz[0], -gz[1], 1.0);
        j.hessian = Vec3(2.0 * amplitude(t), 2.0 * amplitude(t), 0.0).asDiagonal();
        j.time_derivative = -height_time_derivative(th, t);
        return j;
    }
};

// ---------------------------------------------------------------------------
// Type-erased surface used by the runtime drivers.

class LevelSetSurface {
public:
    LevelSetSurface() = default;

    template <LevelSetFunction S>
        requires(!std::same_as<std::remove_cvref_t<S>, LevelSetSurface>)
    LevelSetSurface(S surface) // NOLINT(google-explicit-constructor)
        : impl_(std::make_shared<Model<S>>(std::move(surface)))
    {
    }

    [[nodiscard]] double value(const Vec3& x, double t) const { return impl_->value(x, t); }
    [[nodiscard]] LevelSetJet jet(const Vec3& x, double t) const { return impl_->jet(x, t); }
    [[nodiscard]] explicit operator bool() const noexcept { return static_cast<bool>(impl_); }

private:
    struct Concept {
        virtual ~Concept() = default;
        virtual double value(const Vec3& x, double t) const = 0;
        virtual LevelSetJet jet(const Vec3& x, double t) const = 0;
    };
    template <class S>
    struct Model final : Concept {
        explicit Model(S s) : surface(std::move(s)) {}
        double value(const Vec3& x, double t) const override { return surface.value(x, t); }
        LevelSetJet jet(const Vec3& x, double t) const override { return surface.jet(x, t); }
        S surface;
    };

    std::shared_ptr<const Concept> impl_;
};

// ---------------------------------------------------------------------------
// Surface calculus

namespace detail {
inline constexpr double min_gradient_norm = 1e-14;

inline double checked_norm(const Vec3& g)
{
    const double n = g.norm();
    if (!(n >= min_gradient_norm))
        throw DegenerateGradient("level-set gradient vanishes");
    return n;
}

inline Mat3 tangential_projector(const Vec3& nu) { return Mat3::Identity() - nu * nu.transpose(); }
} // namespace detail

/// Unit normal grad d / |grad d|.
template <LevelSetFunction S>
[[nodiscard]] Vec3 normal(const S& surface, const Vec3& x, double t)
{
    const Vec3 g = surface.jet(x, t).gradient;
    return g / detail::checked_norm(g);
}

/// Normal material velocity -d_t d grad d / |grad d|^2.
template <LevelSetFunction S>
[[nodiscard]] Vec3 normal_velocity(const S& surface, const Vec3& x, double t)
{
    const LevelSetJet j = surface.jet(x, t);
    const double n = detail::checked_norm(j.gradient);
    return (-j.time_derivative / (n * n)) * j.gradient;
}

/// Velocity field object wrapping normal_velocity.
template <LevelSetFunction S>
[[nodiscard]] VelocityField normal_velocity_field(S surface)
{
    VelocityField v;
    v.kind = VelocityKind::normal_from_level_set;
    v.evaluate = [s = std::move(surface)](const Vec3& x, double t) { return normal_velocity(s, x, t); };
    return v;
}

struct ClosestPointOptions {
    double tolerance = 1e-12;
    int max_iterations = 50;
};

/// Foot point p on {d(., t) = 0} with x - p parallel to grad d(p). Normal
/// projection steps p <- p - d grad d / |grad d|^2 bring p onto the zero set,
/// then Newton on the system x = p + lambda grad d(p), d(p) = 0 finishes.
/// Both phases share the iteration budget.
template <LevelSetFunction S>
[[nodiscard]] Vec3 closest_point(const S& surface, const Vec3& x, double t,
                                 const ClosestPointOptions& opts = {})
{
    Vec3 p = x;
    double lambda = 0.0;
    bool newton = false;
    const double scale = 1.0 + x.norm();
    for (int it = 0; it <= opts.max_iterations; ++it) {
        const LevelSetJet j = surface.jet(p, t);
        const double g2 = j.gradient.squaredNorm();
        if (!newton) {
            if (std::abs(j.value) <= 1e-6 * scale * std::sqrt(g2) || it >= opts.max_iterations / 2) {
                newton = true;
                if (g2 > 0.0)
                    lambda = (x - p).dot(j.gradient) / g2;
            } else {
                if (it == opts.max_iterations || !(g2 > 0.0))
                    break;
                p -= (j.value / g2) * j.gradient;
                continue;
            }
        }
        const Vec3 r = p + lambda * j.gradient - x;
        if (std::abs(j.value) <= opts.tolerance && r.norm() <= opts.tolerance * scale)
            return p;
        if (it == opts.max_iterations)
            break;
        Eigen::Matrix4d jac;
        jac.topLeftCorner<3, 3>() = Mat3::Identity() + lambda * j.hessian;
        jac.topRightCorner<3, 1>() = j.gradient;
        jac.bottomLeftCorner<1, 3>() = j.gradient.transpose();
        jac(3, 3) = 0.0;
        Eigen::Vector4d rhs;
        rhs.head<3>() = -r;
        rhs[3] = -j.value;
        const Eigen::Vector4d step = jac.partialPivLu().solve(rhs);
        if (!step.allFinite())
            break;
        p += step.head<3>();
        lambda += step[3];
    }
    throw NoConvergence("closest-point Newton iteration did not converge");
}

template <LevelSetFunction S>
[[nodiscard]] Vec3 tangential_gradient(const AmbientField& u, const S& surface, const Vec3& x, double t)
{
    const Vec3 nu = normal(surface, x, t);
    const Vec3 g = u.gradient(x, t);
    return g - g.dot(nu) * nu;
}

/// Mean curvature trace(P D^2 d)/|grad d| of the level set through x.
template <LevelSetFunction S>
[[nodiscard]] double mean_curvature(const S& surface, const Vec3& x, double t)
{
    const LevelSetJet j = surface.jet(x, t);
    const double n = detail::checked_norm(j.gradient);
    const Vec3 nu = j.gradient / n;
    return (detail::tangential_projector(nu) * j.hessian).trace() / n;
}

/// Laplace-Beltrami via the ambient identity lap u - nu^T D^2u nu - H du/dnu.
template <LevelSetFunction S>
[[nodiscard]] double laplace_beltrami(const AmbientField& u, const S& surface, const Vec3& x, double t)
{
    const LevelSetJet j = surface.jet(x, t);
    const double n = detail::checked_norm(j.gradient);
    const Vec3 nu = j.gradient / n;
    const double h = (detail::tangential_projector(nu) * j.hessian).trace() / n;
    const Mat3 d2u = u.hessian(x, t);
    return d2u.trace() - nu.dot(d2u * nu) - h * u.gradient(x, t).dot(nu);
}

/// Tangential divergence trace(P Dw).
template <LevelSetFunction S>
[[nodiscard]] double surface_divergence(const VelocityField& w, const S& surface, const Vec3& x, double t)
{
    const Vec3 nu = normal(surface, x, t);
    const Mat3 dw = w.spatial_jacobian(x, t);
    return dw.trace() - nu.dot(dw * nu);
}

// ---------------------------------------------------------------------------
// Prescribed mesh trajectories and velocities

/// Exact trajectory of the benchmark ALE velocity: x1 scaled by sqrt(a(t)).
[[nodiscard]] inline Vec3 ale_trajectory_benchmark(const Vec3& x0, double t)
{
    return {x0[0] * std::sqrt(BenchmarkHemiellipsoid::a(t)), x0[1], x0[2]};
}

/// The same velocity written in terms of the current position.
[[nodiscard]] inline VelocityField ale_velocity_benchmark()
{
    VelocityField v;
    v.kind = VelocityKind::closed_form_ale;
    v.evaluate = [](const Vec3& x, double t) -> Vec3 {
        using B = BenchmarkHemiellipsoid;
        return {x[0] * B::a_dot(t) / (2.0 * B::a(t)), 0.0, 0.0};
    };
    return v;
}

/// x1 scaled by a(t)/a(0), x3 by L(t)/L(0).
[[nodiscard]] inline Vec3 ale_trajectory_complex(const Vec3& x0, double t)
{
    using C = ComplexSurface;
    return {x0[0] * (C::a(t) / C::a(0.0)), x0[1], x0[2] * (C::length(t) / C::length(0.0))};
}

[[nodiscard]] inline VelocityField ale_velocity_complex()
{
    VelocityField v;
    v.kind = VelocityKind::closed_form_ale;
    v.evaluate = [](const Vec3& x, double t) -> Vec3 {
        using C = ComplexSurface;
        return {x[0] * C::a_dot(t) / C::a(t), 0.0, x[2] * C::length_dot(t) / C::length(t)};
    };
    return v;
}

struct GraphVelocities {
    Vec3 lagrangian;
    Vec3 ale;
};

/// Normal velocity of the graph and the purely vertical ALE velocity at theta.
[[nodiscard]] inline GraphVelocities graph_velocities(const GraphDisc&, const Vec2& theta, double t)
{
    const double zt = GraphDisc::height_time_derivative(theta, t);
    const Vec2 gz = GraphDisc::height_gradient(theta, t);
    const double denom = 1.0 + gz.squaredNorm();
    GraphVelocities out;
    out.lagrangian = (-zt / denom) * Vec3(gz[0], gz[1], -1.0);
    out.ale = Vec3(0.0, 0.0, zt);
    return out;
}

[[nodiscard]] inline VelocityField graph_normal_velocity()
{
    VelocityField v;
    v.kind = VelocityKind::graph_normal;
    v.evaluate = [](const Vec3& x, double t) {
        return graph_velocities(GraphDisc{}, x.head<2>(), t).lagrangian;
    };
    return v;
}

[[nodiscard]] inline VelocityField graph_vertical_velocity()
{
    VelocityField v;
    v.kind = VelocityKind::graph_vertical;
    v.evaluate = [](const Vec3& x, double t) -> Vec3 {
        return {0.0, 0.0, GraphDisc::height_time_derivative(x.head<2>(), t)};
    };
    return v;
}

} // namespace esfem
