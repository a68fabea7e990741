#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <span>
#include <vector>

#include "core.hpp"
#include "mesh.hpp"

namespace esfem {

/// Vertex-adjacency sparsity of a triangulation in CSR form plus, for each
/// triangle, the nine value slots of its local 3x3 block. Built once per
/// connectivity; every matrix on that connectivity shares it.
class SparsityPattern {
public:
    explicit SparsityPattern(std::size_t vertex_count, const std::vector<Triangle>& triangles)
    {
        std::vector<std::vector<int>> rows(vertex_count);
        for (std::size_t i = 0; i < vertex_count; ++i)
            rows[i].push_back(static_cast<int>(i));
        for (const auto& t : triangles)
            for (int a : t)
                for (int b : t)
                    if (a != b)
                        rows[a].push_back(b);
        row_offsets_.assign(vertex_count + 1, 0);
        for (std::size_t i = 0; i < vertex_count; ++i) {
            auto& r = rows[i];
            std::sort(r.begin(), r.end());
            r.erase(std::unique(r.begin(), r.end()), r.end());
            row_offsets_[i + 1] = row_offsets_[i] + static_cast<int>(r.size());
        }
        columns_.reserve(row_offsets_.back());
        for (const auto& r : rows)
            columns_.insert(columns_.end(), r.begin(), r.end());

        element_slots_.resize(triangles.size());
        for (std::size_t e = 0; e < triangles.size(); ++e)
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    element_slots_[e][3 * a + b] = slot(triangles[e][a], triangles[e][b]);

        transpose_slot_.resize(columns_.size());
        for (std::size_t i = 0; i < vertex_count; ++i)
            for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
                transpose_slot_[k] = slot(columns_[k], static_cast<int>(i));
    }

    [[nodiscard]] std::size_t rows() const noexcept { return row_offsets_.size() - 1; }
    [[nodiscard]] std::size_t nonzeros() const noexcept { return columns_.size(); }
    [[nodiscard]] const std::vector<int>& row_offsets() const noexcept { return row_offsets_; }
    [[nodiscard]] const std::vector<int>& columns() const noexcept { return columns_; }
    [[nodiscard]] const std::array<int, 9>& element_slots(std::size_t e) const { return element_slots_[e]; }
    [[nodiscard]] int transpose_slot(int k) const { return transpose_slot_[k]; }

    /// Value index of entry (i, j); -1 when outside the pattern.
    [[nodiscard]] int slot(int i, int j) const
    {
        const auto first = columns_.begin() + row_offsets_[i];
        const auto last = columns_.begin() + row_offsets_[i + 1];
        const auto it = std::lower_bound(first, last, j);
        return (it != last && *it == j) ? static_cast<int>(it - columns_.begin()) : -1;
    }

private:
    std::vector<int> row_offsets_;
    std::vector<int> columns_;
    std::vector<std::array<int, 9>> element_slots_;
    std::vector<int> transpose_slot_;
};

/// Square CSR matrix over a shared SparsityPattern.
class CsrMatrix {
public:
    CsrMatrix() = default;
    explicit CsrMatrix(std::shared_ptr<const SparsityPattern> pattern)
        : pattern_(std::move(pattern)), values_(pattern_->nonzeros(), 0.0)
    {
    }

    [[nodiscard]] std::size_t rows() const noexcept { return pattern_ ? pattern_->rows() : 0; }
    [[nodiscard]] const SparsityPattern& pattern() const { return *pattern_; }
    [[nodiscard]] const std::shared_ptr<const SparsityPattern>& shared_pattern() const { return pattern_; }
    [[nodiscard]] std::vector<double>& values() noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    void set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

    /// Entry (i, j); zero outside the pattern.
    [[nodiscard]] double operator()(int i, int j) const
    {
        const int k = pattern_->slot(i, j);
        return k < 0 ? 0.0 : values_[k];
    }

    void add_element(std::size_t element, const std::array<double, 9>& local)
    {
        const auto& slots = pattern_->element_slots(element);
        for (int k = 0; k < 9; ++k)
            values_[slots[k]] += local[k];
    }

    [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const
    {
        std::vector<double> y(rows(), 0.0);
        multiply(x, y);
        return y;
    }

    void multiply(std::span<const double> x, std::span<double> y) const
    {
        const auto& off = pattern_->row_offsets();
        const auto& col = pattern_->columns();
        for (std::size_t i = 0; i < rows(); ++i) {
            double s = 0.0;
            for (int k = off[i]; k < off[i + 1]; ++k)
                s += values_[k] * x[col[k]];
            y[i] = s;
        }
    }

    [[nodiscard]] CsrMatrix transposed() const
    {
        CsrMatrix t(pattern_);
        for (std::size_t k = 0; k < values_.size(); ++k)
            t.values_[pattern_->transpose_slot(static_cast<int>(k))] = values_[k];
        return t;
    }

    /// this += alpha * other (same pattern).
    CsrMatrix& add_scaled(double alpha, const CsrMatrix& other)
    {
        if (other.pattern_ != pattern_)
            throw DomainError("add_scaled needs a shared sparsity pattern");
        for (std::size_t k = 0; k < values_.size(); ++k)
            values_[k] += alpha * other.values_[k];
        return *this;
    }

    CsrMatrix& scale(double alpha)
    {
        for (double& v : values_)
            v *= alpha;
        return *this;
    }

    [[nodiscard]] double max_abs() const
    {
        double m = 0.0;
        for (double v : values_)
            m = std::max(m, std::abs(v));
        return m;
    }

    /// Infinity norm of A - A^T.
    [[nodiscard]] double asymmetry() const
    {
        const auto& off = pattern_->row_offsets();
        double worst = 0.0;
        for (std::size_t i = 0; i < rows(); ++i) {
            double s = 0.0;
            for (int k = off[i]; k < off[i + 1]; ++k)
                s += std::abs(values_[k] - values_[pattern_->transpose_slot(k)]);
            worst = std::max(worst, s);
        }
        return worst;
    }

    [[nodiscard]] double infinity_norm() const
    {
        const auto& off = pattern_->row_offsets();
        double worst = 0.0;
        for (std::size_t i = 0; i < rows(); ++i) {
            double s = 0.0;
            for (int k = off[i]; k < off[i + 1]; ++k)
                s += std::abs(values_[k]);
            worst = std::max(worst, s);
        }
        return worst;
    }

    [[nodiscard]] Eigen::MatrixXd to_dense() const
    {
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows(), rows());
        const auto& off = pattern_->row_offsets();
        const auto& col = pattern_->columns();
        for (std::size_t i = 0; i < rows(); ++i)
            for (int k = off[i]; k < off[i + 1]; ++k)
                d(i, col[k]) = values_[k];
        return d;
    }

private:
    std::shared_ptr<const SparsityPattern> pattern_;
    std::vector<double> values_;
};

/// Matrix Market coordinate dump (1-based indices).
inline void write_matrix_market(const std::filesystem::path& path, const CsrMatrix& a)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open " + path.string());
    const auto& off = a.pattern().row_offsets();
    const auto& col = a.pattern().columns();
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << ' ' << a.rows() << ' ' << a.values().size() << '\n';
    out << std::setprecision(17);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (int k = off[i]; k < off[i + 1]; ++k)
            out << i + 1 << ' ' << col[k] + 1 << ' ' << a.values()[k] << '\n';
}

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double sum(std::span<const double> a)
{
    double s = 0.0;
    for (double v : a)
        s += v;
    return s;
}

} // namespace esfem
