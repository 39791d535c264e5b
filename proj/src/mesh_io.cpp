#include "steklov/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace steklov {

namespace {

class LineReader
{
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    /// Next non-empty line; false at end of input.
    bool next(std::string& line)
    {
        while (std::getline(in_, line)) {
            ++number_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") != std::string::npos) return true;
        }
        return false;
    }

    std::string require(const char* what)
    {
        std::string line;
        if (!next(line)) fail(std::string("unexpected end of file, expected ") + what);
        return line;
    }

    [[noreturn]] void fail(const std::string& message) const
    {
        throw FormatError("line " + std::to_string(number_) + ": " + message);
    }

    int line_number() const { return number_; }

private:
    std::istream& in_;
    int number_ = 0;
};

int read_count(LineReader& reader, char tag)
{
    const std::string line = reader.require((std::string("section ") + tag).c_str());
    std::istringstream is(line);
    std::string key;
    long long count = -1;
    std::string extra;
    if (!(is >> key >> count) || key != std::string(1, tag) || count < 0 || (is >> extra)) {
        reader.fail(std::string("expected '") + tag + " <count>', got '" + line + "'");
    }
    if (count > std::numeric_limits<int>::max()) reader.fail("count too large");
    return static_cast<int>(count);
}

template <typename T>
std::vector<T> read_numbers(LineReader& reader, const std::string& line)
{
    std::istringstream is(line);
    std::vector<T> values;
    std::string token;
    while (is >> token) {
        std::istringstream ts(token);
        T value{};
        char rest;
        if (!(ts >> value) || (ts >> rest)) reader.fail("malformed number '" + token + "'");
        values.push_back(value);
    }
    return values;
}

}  // namespace

void write_mesh(std::ostream& out, const SurfaceMesh& mesh)
{
    out << "steklov-mesh v1\n";
    out << std::setprecision(17);
    out << "V " << mesh.vertex_count() << '\n';
    for (const Point& p : mesh.vertices()) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    out << "F " << mesh.triangle_count() << '\n';
    for (const Triangle& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "B " << mesh.boundary_loops().size() << '\n';
    for (const auto& loop : mesh.boundary_loops()) {
        for (std::size_t i = 0; i < loop.size(); ++i) out << (i ? " " : "") << loop[i];
        out << '\n';
    }
    if (mesh.has_intrinsic_metric()) {
        out << "L " << mesh.triangle_count() << '\n';
        for (const auto& l : mesh.lengths()) out << l[0] << ' ' << l[1] << ' ' << l[2] << '\n';
    }
}

SurfaceMesh read_mesh(std::istream& in)
{
    LineReader reader(in);
    std::string line = reader.require("header");
    if (line.rfind("steklov-mesh v1", 0) != 0 || line.find_first_not_of(" \t", 15) != std::string::npos) {
        reader.fail("expected header 'steklov-mesh v1'");
    }

    const int nv = read_count(reader, 'V');
    std::vector<Point> vertices;
    vertices.reserve(nv);
    for (int i = 0; i < nv; ++i) {
        const auto xyz = read_numbers<double>(reader, reader.require("vertex coordinates"));
        if (xyz.size() != 2 && xyz.size() != 3) reader.fail("vertex line needs 2 or 3 coordinates");
        vertices.emplace_back(xyz[0], xyz[1], xyz.size() == 3 ? xyz[2] : 0.0);
    }

    const int nf = read_count(reader, 'F');
    std::vector<Triangle> triangles;
    triangles.reserve(nf);
    for (int i = 0; i < nf; ++i) {
        const auto idx = read_numbers<long long>(reader, reader.require("triangle indices"));
        if (idx.size() != 3) reader.fail("triangle line needs 3 vertex indices");
        Triangle t{};
        for (int k = 0; k < 3; ++k) {
            if (idx[k] < 0 || idx[k] >= nv) reader.fail("vertex index " + std::to_string(idx[k]) + " out of range");
            t[k] = static_cast<int>(idx[k]);
        }
        triangles.push_back(t);
    }

    const int nb = read_count(reader, 'B');
    std::vector<std::vector<int>> loops;
    for (int i = 0; i < nb; ++i) {
        const auto idx = read_numbers<long long>(reader, reader.require("boundary loop"));
        std::vector<int> loop;
        for (long long v : idx) {
            if (v < 0 || v >= nv) reader.fail("vertex index " + std::to_string(v) + " out of range");
            loop.push_back(static_cast<int>(v));
        }
        loops.push_back(std::move(loop));
    }

    std::vector<TriangleLengths> lengths;
    if (reader.next(line)) {
        std::istringstream is(line);
        std::string key;
        long long count = -1;
        if (!(is >> key >> count) || key != "L" || count != nf) reader.fail("expected 'L " + std::to_string(nf) + "' or end of file");
        for (int i = 0; i < nf; ++i) {
            const auto l = read_numbers<double>(reader, reader.require("triangle lengths"));
            if (l.size() != 3) reader.fail("length line needs 3 values");
            lengths.push_back({l[0], l[1], l[2]});
        }
        if (reader.next(line)) reader.fail("unexpected trailing content");
    }

    try {
        return SurfaceMesh(std::move(vertices), std::move(triangles), std::move(loops), std::move(lengths));
    } catch (const MeshError& e) {
        throw FormatError("line " + std::to_string(reader.line_number()) + ": invalid mesh: " + e.what());
    }
}

void save_mesh(const std::filesystem::path& path, const SurfaceMesh& mesh)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_mesh(out, mesh);
}

SurfaceMesh load_mesh(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    return read_mesh(in);
}

}  // namespace steklov
