#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "core.hpp"
#include "solver.hpp"
#include "sparse.hpp"

namespace esfem {

/// Uniform grid t^n = n tau on [0, T], tau = T / N.
struct TimeGrid {
    double final_time = 1.0;
    long steps = 1;

    TimeGrid(double t_final, long n) : final_time(t_final), steps(n)
    {
        if (!(t_final > 0.0) || n < 1)
            throw DomainError("time grid needs T > 0 and N >= 1");
    }

    /// Smallest N with T/N <= tau_max.
    static TimeGrid with_max_step(double t_final, double tau_max)
    {
        if (!(tau_max > 0.0))
            throw DomainError("time step must be positive");
        return {t_final, std::max(1L, static_cast<long>(std::ceil(t_final / tau_max - 1e-9)))};
    }

    [[nodiscard]] double tau() const noexcept { return final_time / static_cast<double>(steps); }
    [[nodiscard]] double time(long n) const noexcept
    {
        return n == steps ? final_time : static_cast<double>(n) * tau();
    }
};

enum class SchemeKind { bdf1, bdf2 };

/// M, S and the advection matrix B at one time level (B empty when a_T = 0).
struct StepMatrices {
    CsrMatrix mass;
    CsrMatrix stiffness;
    std::optional<CsrMatrix> advection;
};

namespace detail {

// mass_coefficient * M + tau (S + B^T); B^T because row j of the scheme tests
// with chi_j: sum_i U_i int chi_i T . grad chi_j.
inline CsrMatrix step_system(const StepMatrices& m, double mass_coefficient, double tau)
{
    CsrMatrix a = m.mass;
    a.scale(mass_coefficient).add_scaled(tau, m.stiffness);
    if (m.advection)
        a.add_scaled(tau, m.advection->transposed());
    return a;
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] += alpha * x[i];
}

} // namespace detail

/// Implicit Euler: (M^{n+1} + tau(S^{n+1} + B^{n+1,T})) U^{n+1} = M^n U^n + tau F^{n+1}.
/// `mass_times_u` is M^n U^n; `load` may be empty for f = 0.
inline std::vector<double> bdf1_step(const StepMatrices& next, std::span<const double> mass_times_u, double tau,
                                     std::span<const double> load, LinearSolver& solver,
                                     std::span<const double> guess = {})
{
    std::vector<double> rhs(mass_times_u.begin(), mass_times_u.end());
    if (!load.empty())
        detail::axpy(tau, load, rhs);
    return solver.solve(detail::step_system(next, 1.0, tau), rhs, guess);
}

/// BDF2: (3/2 M^{n+1} + tau(S + B^T)^{n+1}) U^{n+1} = 2 M^n U^n - 1/2 M^{n-1} U^{n-1} + tau F^{n+1}.
inline std::vector<double> bdf2_step(const StepMatrices& next, std::span<const double> mass_times_u,
                                     std::span<const double> mass_times_u_prev, double tau,
                                     std::span<const double> load, LinearSolver& solver,
                                     std::span<const double> guess = {})
{
    std::vector<double> rhs(mass_times_u.size());
    for (std::size_t i = 0; i < rhs.size(); ++i)
        rhs[i] = 2.0 * mass_times_u[i] - 0.5 * mass_times_u_prev[i];
    if (!load.empty())
        detail::axpy(tau, load, rhs);
    return solver.solve(detail::step_system(next, 1.5, tau), rhs, guess);
}

/// Coefficient history of a BDF1/BDF2 run. Stores M^n U^n alongside U^n so a
/// step never needs the matrices of earlier levels.
class SchemeState {
public:
    SchemeState(SchemeKind kind, double tau) : kind_(kind), tau_(tau) {}

    [[nodiscard]] SchemeKind kind() const noexcept { return kind_; }
    [[nodiscard]] long step() const noexcept { return step_; }
    [[nodiscard]] double tau() const noexcept { return tau_; }
    [[nodiscard]] const std::vector<double>& current() const noexcept { return u_; }
    [[nodiscard]] const std::vector<double>& previous() const noexcept { return u_prev_; }
    [[nodiscard]] const std::vector<double>& masses() const noexcept { return mass_history_; }

    /// Level-0 data (and level-1 data for BDF2 via `push_start`).
    void initialize(std::vector<double> u0, const CsrMatrix& mass0)
    {
        step_ = 0;
        mass_history_.clear();
        record(std::move(u0), mass0);
    }

    /// Supplies a precomputed starting value for the next level (BDF2 U^1).
    void push_start(std::vector<double> u, const CsrMatrix& mass)
    {
        ++step_;
        record(std::move(u), mass);
    }

    [[nodiscard]] bool needs_start_value() const noexcept { return kind_ == SchemeKind::bdf2 && step_ == 0; }

    /// Advances one step with the matrices of the new level.
    const std::vector<double>& advance(const StepMatrices& next, std::span<const double> load, LinearSolver& solver)
    {
        if (u_.size() != next.mass.rows())
            throw DomainError("state length does not match the mesh");
        std::vector<double> u;
        if (kind_ == SchemeKind::bdf1 || step_ == 0)
            u = bdf1_step(next, mu_, tau_, load, solver, u_);
        else
            u = bdf2_step(next, mu_, mu_prev_, tau_, load, solver, u_);
        ++step_;
        record(std::move(u), next.mass);
        return u_;
    }

private:
    void record(std::vector<double> u, const CsrMatrix& mass)
    {
        u_prev_ = std::move(u_);
        mu_prev_ = std::move(mu_);
        u_ = std::move(u);
        mu_ = mass.multiply(u_);
        mass_history_.push_back(sum(mu_));
    }

    SchemeKind kind_;
    double tau_;
    long step_ = 0;
    std::vector<double> u_, u_prev_, mu_, mu_prev_;
    std::vector<double> mass_history_;
};

} // namespace esfem
