#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <string>
#include <utility>
#include <vector>

#include "mesh.hpp"

namespace esfem {

/// Named nodal scalar field for VTK output.
struct PointScalars {
    std::string name;
    std::vector<double> values;
};

/// Legacy ASCII POLYDATA with POINTS, POLYGONS and POINT_DATA scalars.
inline void write_vtk(const std::filesystem::path& path, const SurfaceMesh& mesh,
                      const std::vector<PointScalars>& fields = {})
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    out << std::setprecision(17);
    out << "# vtk DataFile Version 3.0\n";
    out << "esfem surface t=" << mesh.time << "\n";
    out << "ASCII\nDATASET POLYDATA\n";
    out << "POINTS " << mesh.vertex_count() << " double\n";
    for (const auto& x : mesh.vertices)
        out << x[0] << ' ' << x[1] << ' ' << x[2] << '\n';
    out << "POLYGONS " << mesh.triangle_count() << ' ' << 4 * mesh.triangle_count() << '\n';
    for (const auto& t : mesh.triangles)
        out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    if (fields.empty())
        return;
    out << "POINT_DATA " << mesh.vertex_count() << '\n';
    for (const auto& f : fields) {
        if (f.values.size() != mesh.vertex_count())
            throw DomainError("field '" + f.name + "' has wrong length");
        out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
        for (double v : f.values)
            out << v << '\n';
    }
}

/// `<run>_<step>.vtk` inside `dir`.
inline std::filesystem::path snapshot_path(const std::filesystem::path& dir, const std::string& run, long step)
{
    return dir / (run + "_" + std::to_string(step) + ".vtk");
}

} // namespace esfem
