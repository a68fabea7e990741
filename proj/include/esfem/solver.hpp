#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "core.hpp"
#include "sparse.hpp"

namespace esfem {

enum class SolverKind { automatic, direct, krylov };

struct SolverOptions {
    SolverKind kind = SolverKind::automatic;
    double tolerance = 1e-10;   // relative residual
    int max_iterations = 1000;  // Krylov only
    std::size_t direct_limit = 50000;
};

/// Linear solver for the (nonsymmetric) step matrices. The direct backend is a
/// sparse LU whose symbolic analysis is reused while the sparsity pattern is
/// unchanged; the Krylov backend is Jacobi-preconditioned BiCGSTAB warm-started
/// from the supplied guess. Either way the returned x satisfies
/// |Ax - b| <= tol |b| or SolverDiverged is thrown.
class LinearSolver {
public:
    explicit LinearSolver(SolverOptions options = {}) : options_(options) {}

    [[nodiscard]] const SolverOptions& options() const noexcept { return options_; }

    [[nodiscard]] SolverKind resolved_kind(std::size_t n) const
    {
        if (options_.kind != SolverKind::automatic)
            return options_.kind;
        return n <= options_.direct_limit ? SolverKind::direct : SolverKind::krylov;
    }

    std::vector<double> solve(const CsrMatrix& a, std::span<const double> b, std::span<const double> guess = {})
    {
        const std::size_t n = a.rows();
        if (b.size() != n)
            throw DomainError("right-hand side length does not match the matrix");
        const SparseType mat = to_eigen(a);
        const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(n));
        Eigen::VectorXd x;

        if (resolved_kind(n) == SolverKind::direct) {
            if (analyzed_for_ != a.shared_pattern()) {
                lu_ = std::make_unique<Eigen::SparseLU<SparseType>>();
                lu_->analyzePattern(mat);
                analyzed_for_ = a.shared_pattern();
            }
            lu_->factorize(mat);
            if (lu_->info() != Eigen::Success)
                throw SolverDiverged("sparse LU factorization failed: " + lu_->lastErrorMessage());
            x = lu_->solve(rhs);
        } else {
            Eigen::BiCGSTAB<SparseType, Eigen::DiagonalPreconditioner<double>> it;
            it.setTolerance(options_.tolerance);
            it.setMaxIterations(options_.max_iterations);
            it.compute(mat);
            if (guess.size() == n)
                x = it.solveWithGuess(rhs, Eigen::Map<const Eigen::VectorXd>(guess.data(), n));
            else
                x = it.solve(rhs);
            if (it.info() != Eigen::Success)
                throw SolverDiverged("BiCGSTAB did not reach the tolerance in "
                                     + std::to_string(options_.max_iterations) + " iterations");
        }

        const double bnorm = rhs.norm();
        const double rnorm = (mat * x - rhs).norm();
        if (!x.allFinite() || rnorm > options_.tolerance * std::max(bnorm, 1e-300) * residual_slack(n))
            throw SolverDiverged("linear solve residual " + std::to_string(rnorm) + " exceeds tolerance");
        return {x.data(), x.data() + x.size()};
    }

private:
    using SparseType = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

    static SparseType to_eigen(const CsrMatrix& a)
    {
        const auto& p = a.pattern();
        const Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, int>> row_major(
            static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.rows()),
            static_cast<Eigen::Index>(p.nonzeros()), p.row_offsets().data(), p.columns().data(),
            a.values().data());
        return SparseType(row_major);
    }

    // BiCGSTAB checks its own (preconditioned) residual; allow a small margin
    // when re-measuring the true residual.
    [[nodiscard]] double residual_slack(std::size_t n) const
    {
        return resolved_kind(n) == SolverKind::krylov ? 10.0 : 1.0;
    }

    SolverOptions options_;
    std::unique_ptr<Eigen::SparseLU<SparseType>> lu_;
    std::shared_ptr<const SparsityPattern> analyzed_for_;
};

/// One-shot solve.
inline std::vector<double> solve_linear(const CsrMatrix& a, std::span<const double> b, const SolverOptions& options = {})
{
    LinearSolver s(options);
    return s.solve(a, b);
}

} // namespace esfem
