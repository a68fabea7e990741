#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "core.hpp"

namespace esfem {

/// Polynomial in (x1, x2, x3) stored as a list of monomials c * x1^a x2^b x3^c.
class Polynomial3 {
public:
    struct Term {
        double coefficient;
        std::array<int, 3> powers;
    };

    Polynomial3() = default;
    explicit Polynomial3(std::vector<Term> terms) : terms_(std::move(terms)) {}

    static Polynomial3 constant(double c) { return Polynomial3(std::vector<Term>{Term{c, {0, 0, 0}}}); }
    static Polynomial3 monomial(int a, int b, int c, double coefficient = 1.0)
    {
        return Polynomial3(std::vector<Term>{Term{coefficient, {a, b, c}}});
    }

    [[nodiscard]] const std::vector<Term>& terms() const noexcept { return terms_; }

    friend Polynomial3 operator+(Polynomial3 a, const Polynomial3& b)
    {
        a.terms_.insert(a.terms_.end(), b.terms_.begin(), b.terms_.end());
        return a;
    }

    [[nodiscard]] double value(const Vec3& x) const
    {
        double s = 0.0;
        for (const auto& t : terms_)
            s += t.coefficient * ipow(x[0], t.powers[0]) * ipow(x[1], t.powers[1])
                 * ipow(x[2], t.powers[2]);
        return s;
    }

    [[nodiscard]] Vec3 gradient(const Vec3& x) const
    {
        Vec3 g = Vec3::Zero();
        for (const auto& t : terms_)
            for (int k = 0; k < 3; ++k)
                g[k] += t.coefficient * derivative_factor(t.powers, x, k, -1);
        return g;
    }

    [[nodiscard]] Mat3 hessian(const Vec3& x) const
    {
        Mat3 h = Mat3::Zero();
        for (const auto& t : terms_)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    h(i, j) += t.coefficient * derivative_factor(t.powers, x, i, j);
        return h;
    }

private:
    static double ipow(double v, int p)
    {
        double r = 1.0;
        for (int i = 0; i < p; ++i)
            r *= v;
        return r;
    }

    // d/dx_i (and d/dx_j when j >= 0) of x1^a x2^b x3^c.
    static double derivative_factor(std::array<int, 3> p, const Vec3& x, int i, int j)
    {
        double coeff = 1.0;
        coeff *= p[i];
        p[i] -= 1;
        if (j >= 0) {
            coeff *= p[j];
            p[j] -= 1;
        }
        if (coeff == 0.0)
            return 0.0;
        return coeff * ipow(x[0], p[0]) * ipow(x[1], p[1]) * ipow(x[2], p[2]);
    }

    std::vector<Term> terms_;
};

/// Scalar field u(x, t) on R^3 with closed-form spatial and temporal derivatives.
struct AmbientField {
    std::function<double(const Vec3&, double)> value;
    std::function<Vec3(const Vec3&, double)> gradient;
    std::function<Mat3(const Vec3&, double)> hessian;
    std::function<double(const Vec3&, double)> time_derivative;

    double operator()(const Vec3& x, double t) const { return value(x, t); }
};

/// u(x, t) = g(t) * p(x) with g and g' supplied.
inline AmbientField separable_field(Polynomial3 p, std::function<double(double)> g,
                                    std::function<double(double)> g_dot)
{
    AmbientField f;
    f.value = [p, g](const Vec3& x, double t) { return g(t) * p.value(x); };
    f.gradient = [p, g](const Vec3& x, double t) -> Vec3 { return g(t) * p.gradient(x); };
    f.hessian = [p, g](const Vec3& x, double t) -> Mat3 { return g(t) * p.hessian(x); };
    f.time_derivative = [p, g_dot](const Vec3& x, double t) { return g_dot(t) * p.value(x); };
    return f;
}

/// Time-independent polynomial field.
inline AmbientField polynomial_field(Polynomial3 p)
{
    return separable_field(std::move(p), [](double) { return 1.0; }, [](double) { return 0.0; });
}

inline AmbientField constant_field(double c) { return polynomial_field(Polynomial3::constant(c)); }

enum class VelocityKind { normal_from_level_set, closed_form_ale, graph_normal, graph_vertical, zero };

/// Ambient velocity w(x, t). The Jacobian is optional; consumers fall back to
/// central differences when it is empty.
struct VelocityField {
    VelocityKind kind = VelocityKind::zero;
    std::function<Vec3(const Vec3&, double)> evaluate;
    std::function<Mat3(const Vec3&, double)> jacobian;

    Vec3 operator()(const Vec3& x, double t) const { return evaluate(x, t); }

    /// Spatial Jacobian Dw (rows: components). Central differences with step
    /// `fd_step` when no closed form is attached.
    [[nodiscard]] Mat3 spatial_jacobian(const Vec3& x, double t, double fd_step = 1e-6) const
    {
        if (jacobian)
            return jacobian(x, t);
        Mat3 j;
        for (int k = 0; k < 3; ++k) {
            Vec3 e = Vec3::Zero();
            e[k] = fd_step;
            j.col(k) = (evaluate(x + e, t) - evaluate(x - e, t)) / (2.0 * fd_step);
        }
        return j;
    }
};

inline VelocityField zero_velocity()
{
    VelocityField v;
    v.kind = VelocityKind::zero;
    v.evaluate = [](const Vec3&, double) -> Vec3 { return Vec3::Zero(); };
    v.jacobian = [](const Vec3&, double) -> Mat3 { return Mat3::Zero(); };
    return v;
}

} // namespace esfem
