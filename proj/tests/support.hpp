#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "esfem/esfem.hpp"

namespace esfem::testing {

/// Points on the zero level set at time t, obtained by projecting random
/// points of the box [-r, r]^3.
template <class Accept>
std::vector<Vec3> random_surface_points(const LevelSetSurface& s, double t, int count, double r, unsigned seed,
                                        Accept accept)
{
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(-r, r);
    std::vector<Vec3> out;
    while (static_cast<int>(out.size()) < count) {
        const Vec3 x(u(gen), u(gen), u(gen));
        try {
            const Vec3 p = closest_point(s, x, t);
            if (accept(p))
                out.push_back(p);
        } catch (const Error&) {
        }
    }
    return out;
}

inline std::vector<Vec3> random_sphere_points(int count, unsigned seed)
{
    std::mt19937 gen(seed);
    std::normal_distribution<double> n;
    std::vector<Vec3> out;
    while (static_cast<int>(out.size()) < count) {
        const Vec3 x(n(gen), n(gen), n(gen));
        if (x.norm() > 1e-3)
            out.push_back(x.normalized());
    }
    return out;
}

/// Dense Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b)
{
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[p][k]))
                p = i;
        std::swap(a[k], a[p]);
        std::swap(b[k], b[p]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j)
                a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j)
            s -= a[k][j] * x[j];
        x[k] = s / a[k][k];
    }
    return x;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace esfem::testing
