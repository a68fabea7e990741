#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "core.hpp"

namespace esfem {

/// Quadrature on the reference triangle. Points are barycentric triples,
/// weights are normalized to sum to one (multiply by the element area).
struct QuadratureRule {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
    int degree = 0;

    [[nodiscard]] std::size_t size() const noexcept { return weights.size(); }
};

namespace detail {

inline void add_orbit3(QuadratureRule& q, double w, double a)
{
    const double b = 1.0 - 2.0 * a;
    q.points.push_back({a, a, b});
    q.points.push_back({a, b, a});
    q.points.push_back({b, a, a});
    q.weights.insert(q.weights.end(), 3, w);
}

inline void add_orbit6(QuadratureRule& q, double w, double a, double b)
{
    const double c = 1.0 - a - b;
    for (const auto& p : {std::array{a, b, c}, std::array{a, c, b}, std::array{b, a, c},
                          std::array{b, c, a}, std::array{c, a, b}, std::array{c, b, a}}) {
        q.points.push_back(p);
        q.weights.push_back(w);
    }
}

/// Gauss-Legendre nodes and weights on [0, 1] (weights sum to one).
inline void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
}

} // namespace detail

inline QuadratureRule centroid_rule()
{
    return {{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}, {1.0}, 1};
}

inline QuadratureRule three_point_rule()
{
    QuadratureRule q;
    q.degree = 2;
    detail::add_orbit3(q, 1.0 / 3.0, 1.0 / 6.0);
    return q;
}

/// Dunavant's 12-point rule, exact for degree 6.
inline QuadratureRule dunavant6_rule()
{
    QuadratureRule q;
    q.degree = 6;
    detail::add_orbit3(q, 0.116786275726379, 0.249286745170910);
    detail::add_orbit3(q, 0.050844906370207, 0.063089014491502);
    detail::add_orbit6(q, 0.082851075618374, 0.053145049844817, 0.310352451033784);
    return q;
}

/// Conical-product (collapsed Gauss-Legendre) rule exact for the given degree.
inline QuadratureRule collapsed_gauss_rule(int degree)
{
    const int n = std::max(1, (degree + 3) / 2);
    std::vector<double> x, w;
    detail::gauss_legendre_unit(n, x, w);
    QuadratureRule q;
    q.degree = 2 * n - 2;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double l1 = x[i];
            const double l2 = x[j] * (1.0 - x[i]);
            q.points.push_back({1.0 - l1 - l2, l1, l2});
            q.weights.push_back(2.0 * w[i] * w[j] * (1.0 - x[i]));
        }
    return q;
}

/// Cheapest shipped rule that integrates polynomials of `degree` exactly.
inline QuadratureRule quadrature_rule(int degree)
{
    if (degree <= 1)
        return centroid_rule();
    if (degree == 2)
        return three_point_rule();
    if (degree <= 6)
        return dunavant6_rule();
    return collapsed_gauss_rule(degree);
}

} // namespace esfem
