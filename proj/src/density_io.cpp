#include "steklov/density.hpp"
#include "steklov/mesh_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace steklov {

void write_density_csv(std::ostream& out, const SurfaceMesh& mesh, const BoundaryDensity& rho)
{
    check_compatible(mesh, rho);
    out << "loop,edge,value\n" << std::setprecision(17);
    for (std::size_t e = 0; e < rho.size(); ++e) {
        const BoundaryEdge& edge = mesh.boundary_edges()[e];
        out << edge.loop << ',' << edge.position << ',' << rho[e] << '\n';
    }
}

BoundaryDensity read_density_csv(std::istream& in, const SurfaceMesh& mesh)
{
    std::string line;
    int number = 0;
    auto fail = [&](const std::string& message) -> void {
        throw FormatError("line " + std::to_string(number) + ": " + message);
    };
    auto trim = [](std::string s) {
        if (!s.empty() && s.back() == '\r') s.pop_back();
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };

    if (!std::getline(in, line)) throw FormatError("line 1: empty density file");
    ++number;
    if (trim(line) != "loop,edge,value") fail("expected header 'loop,edge,value'");

    const int loops = static_cast<int>(mesh.boundary_loops().size());
    std::vector<double> values(mesh.boundary_edge_count(), 0.0);
    std::vector<bool> seen(values.size(), false);
    while (std::getline(in, line)) {
        ++number;
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream is(line);
        long long loop = -1, edge = -1;
        double value = 0;
        char c1 = 0, c2 = 0;
        std::string rest;
        if (!(is >> loop >> c1 >> edge >> c2 >> value) || c1 != ',' || c2 != ',' || (is >> rest)) {
            fail("expected 'loop,edge,value', got '" + line + "'");
        }
        if (loop < 0 || loop >= loops) fail("loop " + std::to_string(loop) + " out of range");
        const long long n = static_cast<long long>(mesh.boundary_loops()[loop].size());
        if (edge < 0 || edge >= n) fail("edge " + std::to_string(edge) + " out of range for loop " + std::to_string(loop));
        const int e = mesh.loop_edge_offset(static_cast<int>(loop)) + static_cast<int>(edge);
        if (seen[e]) fail("duplicate entry for loop " + std::to_string(loop) + " edge " + std::to_string(edge));
        if (!std::isfinite(value) || value < 0) fail("density values must be finite and >= 0");
        seen[e] = true;
        values[e] = value;
    }
    for (std::size_t e = 0; e < seen.size(); ++e) {
        if (!seen[e]) {
            const BoundaryEdge& edge = mesh.boundary_edges()[e];
            throw FormatError("line " + std::to_string(number) + ": missing value for loop " + std::to_string(edge.loop) +
                              " edge " + std::to_string(edge.position));
        }
    }
    try {
        return BoundaryDensity(std::move(values));
    } catch (const DensityError& e) {
        throw FormatError("line " + std::to_string(number) + ": " + e.what());
    }
}

void save_density(const std::filesystem::path& path, const SurfaceMesh& mesh, const BoundaryDensity& rho)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_density_csv(out, mesh, rho);
}

BoundaryDensity load_density(const std::filesystem::path& path, const SurfaceMesh& mesh)
{
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    return read_density_csv(in, mesh);
}

}  // namespace steklov
