#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "assembly.hpp"
#include "core.hpp"
#include "fields.hpp"
#include "geometry.hpp"

namespace esfem {

/// u^{-l}(x_q) = u(p(x_q, t), t) at every lifted quadrature point.
inline std::vector<double> inverse_lift_field(const ScalarFunction& u, const LiftedQuadrature& q)
{
    std::vector<double> out(q.lifted.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = u(q.lifted[k], q.time);
    return out;
}

struct StepError {
    double l2 = 0.0;
    double h1 = 0.0; // seminorm
};

/// L2 error and H1 seminorm error of the P1 function U against the inverse
/// lift of u. The exact tangential gradient is taken at the lifted point and
/// compared with the elementwise-constant discrete gradient.
inline StepError step_errors(std::span<const double> nodal, const SurfaceMesh& mesh, const LiftedQuadrature& q,
                             const AmbientField& u, const LevelSetSurface& surface)
{
    const std::size_t nq = q.points_per_element();
    double l2 = 0.0, h1 = 0.0;
    for (std::size_t e = 0; e < mesh.triangle_count(); ++e) {
        const ElementGeometry g(mesh, e);
        const auto& tri = mesh.triangles[e];
        const Vec3 grad_h = nodal[tri[0]] * g.grad[0] + nodal[tri[1]] * g.grad[1] + nodal[tri[2]] * g.grad[2];
        double le = 0.0, he = 0.0;
        for (std::size_t k = 0; k < nq; ++k) {
            const auto& lam = q.rule.points[k];
            const Vec3& p = q.lifted[e * nq + k];
            const double uh = lam[0] * nodal[tri[0]] + lam[1] * nodal[tri[1]] + lam[2] * nodal[tri[2]];
            const double diff = u.value(p, q.time) - uh;
            le += q.rule.weights[k] * diff * diff;
            const Vec3 dg = tangential_gradient(u, surface, p, q.time) - grad_h;
            he += q.rule.weights[k] * dg.squaredNorm();
        }
        l2 += q.areas[e] * le;
        h1 += q.areas[e] * he;
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

/// L2 norm of a P1 function, integrated exactly through the mass matrix.
inline double l2_norm(std::span<const double> nodal, const CsrMatrix& mass)
{
    return std::sqrt(std::max(0.0, dot(nodal, mass.multiply(nodal))));
}

struct AccumulatedNorms {
    double linf_l2 = 0.0;
    double l2_h1 = 0.0;
};

/// max_n e_L2^n and (sum_n tau (e_H1^n)^2)^{1/2} over the given series.
inline AccumulatedNorms accumulate_norms(std::span<const StepError> series, double tau)
{
    if (series.empty())
        throw EmptySeries("error series is empty");
    AccumulatedNorms out;
    double s = 0.0;
    for (const auto& e : series) {
        out.linf_l2 = std::max(out.linf_l2, e.l2);
        s += tau * e.h1 * e.h1;
    }
    out.l2_h1 = std::sqrt(s);
    return out;
}

/// Experimental order of convergence ln(e_f/e_c)/ln(h_f/h_c).
inline double eoc(double e_coarse, double e_fine, double h_coarse, double h_fine)
{
    if (!(e_coarse > 0.0 && e_fine > 0.0 && h_coarse > 0.0 && h_fine > 0.0))
        throw DomainError("eoc needs positive errors and mesh sizes");
    if (!(h_fine < h_coarse))
        throw DomainError("eoc needs h_fine < h_coarse");
    return std::log(e_fine / e_coarse) / std::log(h_fine / h_coarse);
}

/// Per-level error rows with EOC columns, as in a convergence table.
struct ErrorReport {
    struct Row {
        double h = 0.0;
        double linf_l2 = 0.0;
        double l2_h1 = 0.0;
        std::optional<double> eoc_linf_l2;
        std::optional<double> eoc_l2_h1;
    };
    std::vector<Row> rows;

    void add_level(double h, double linf_l2, double l2_h1)
    {
        Row r{h, linf_l2, l2_h1, std::nullopt, std::nullopt};
        rows.push_back(r);
        recompute_eoc();
    }

    void recompute_eoc()
    {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            rows[i].eoc_linf_l2.reset();
            rows[i].eoc_l2_h1.reset();
            if (i == 0 || !(rows[i].h < rows[i - 1].h))
                continue;
            const auto& c = rows[i - 1];
            auto& f = rows[i];
            if (c.linf_l2 > 0 && f.linf_l2 > 0)
                f.eoc_linf_l2 = eoc(c.linf_l2, f.linf_l2, c.h, f.h);
            if (c.l2_h1 > 0 && f.l2_h1 > 0)
                f.eoc_l2_h1 = eoc(c.l2_h1, f.l2_h1, c.h, f.h);
        }
    }
};

inline constexpr const char* error_csv_header = "h,linf_l2,eoc_linf_l2,l2_h1,eoc_l2_h1";

inline std::string format_error_csv(const ErrorReport& report)
{
    std::ostringstream out;
    out << std::setprecision(17);
    out << error_csv_header << '\n';
    auto opt = [&](const std::optional<double>& v) {
        if (v)
            out << *v;
    };
    for (const auto& r : report.rows) {
        out << r.h << ',' << r.linf_l2 << ',';
        opt(r.eoc_linf_l2);
        out << ',' << r.l2_h1 << ',';
        opt(r.eoc_l2_h1);
        out << '\n';
    }
    return out.str();
}

inline void write_error_csv(const std::filesystem::path& path, const ErrorReport& report)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open " + path.string());
    out << format_error_csv(report);
}

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

/// Reads h/linf_l2/l2_h1 from an errors.csv and recomputes the EOC columns.
inline ErrorReport read_error_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw DomainError(path.string() + " is empty");
    const auto header = split_csv_line(line);
    auto column = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw DomainError(path.string() + ": missing column " + name);
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t ch = column("h"), cl = column("linf_l2"), cg = column("l2_h1");
    ErrorReport report;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto cells = split_csv_line(line);
        if (cells.size() <= std::max({ch, cl, cg}))
            throw DomainError(path.string() + ": short row");
        report.rows.push_back({std::stod(cells[ch]), std::stod(cells[cl]), std::stod(cells[cg]), {}, {}});
    }
    report.recompute_eoc();
    return report;
}

} // namespace esfem
