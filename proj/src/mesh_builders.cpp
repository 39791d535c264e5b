#include "steklov/mesh.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <string>

namespace steklov {

SurfaceMesh build_disk(int n_rings, int n_sectors, double radius)
{
    if (n_rings < 1) throw std::invalid_argument("build_disk: n_rings must be >= 1");
    if (n_sectors < 3) throw std::invalid_argument("build_disk: n_sectors must be >= 3");
    if (!(radius > 0) || !std::isfinite(radius)) throw std::invalid_argument("build_disk: radius must be positive");

    std::vector<Point> vertices{Point::Zero()};
    for (int i = 1; i <= n_rings; ++i) {
        const double r = radius * i / n_rings;
        for (int j = 0; j < n_sectors; ++j) {
            const double theta = 2 * std::numbers::pi * j / n_sectors;
            vertices.emplace_back(r * std::cos(theta), r * std::sin(theta), 0.0);
        }
    }
    auto ring = [&](int i, int j) { return 1 + (i - 1) * n_sectors + (j % n_sectors); };

    std::vector<Triangle> triangles;
    for (int j = 0; j < n_sectors; ++j) triangles.push_back({0, ring(1, j), ring(1, j + 1)});
    for (int i = 1; i < n_rings; ++i) {
        for (int j = 0; j < n_sectors; ++j) {
            triangles.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
            triangles.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
        }
    }

    std::vector<int> loop;
    for (int j = 0; j < n_sectors; ++j) loop.push_back(ring(n_rings, j));
    return SurfaceMesh(std::move(vertices), std::move(triangles), {std::move(loop)});
}

SurfaceMesh build_cylinder(double half_height, int n_axial, int n_circ)
{
    if (!(half_height > 0) || !std::isfinite(half_height)) {
        throw std::invalid_argument("build_cylinder: half height must be positive");
    }
    if (n_axial < 1) throw std::invalid_argument("build_cylinder: n_axial must be >= 1");
    if (n_circ < 3) throw std::invalid_argument("build_cylinder: n_circ must be >= 3");

    std::vector<Point> vertices;
    for (int i = 0; i <= n_axial; ++i) {
        const double t = -half_height + 2 * half_height * i / n_axial;
        for (int j = 0; j < n_circ; ++j) {
            const double theta = 2 * std::numbers::pi * j / n_circ;
            vertices.emplace_back(std::cos(theta), std::sin(theta), t);
        }
    }
    auto id = [&](int i, int j) { return i * n_circ + (j % n_circ); };

    // Outward normals: (theta, t) is a positively oriented frame.
    std::vector<Triangle> triangles;
    for (int i = 0; i < n_axial; ++i) {
        for (int j = 0; j < n_circ; ++j) {
            triangles.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
            triangles.push_back({id(i, j), id(i + 1, j + 1), id(i + 1, j)});
        }
    }

    std::vector<int> bottom, top;
    for (int j = 0; j < n_circ; ++j) {
        bottom.push_back(id(0, j));
        top.push_back(id(n_axial, n_circ - 1 - j));
    }
    return SurfaceMesh(std::move(vertices), std::move(triangles), {std::move(bottom), std::move(top)});
}

Projector disk_projector(double radius)
{
    return [radius](const Point& p, bool on_boundary) -> Point {
        if (!on_boundary) return p;
        return p * (radius / p.norm());
    };
}

Projector cylinder_projector(double radius)
{
    return [radius](const Point& p, bool) -> Point {
        const double r = std::hypot(p.x(), p.y());
        return {p.x() * radius / r, p.y() * radius / r, p.z()};
    };
}

SurfaceMesh refine(const SurfaceMesh& mesh, const Projector& projector)
{
    const bool intrinsic = mesh.has_intrinsic_metric();
    std::vector<Point> vertices = mesh.vertices();
    std::map<std::pair<int, int>, int> midpoints;

    auto midpoint = [&](int a, int b) {
        const auto key = std::minmax(a, b);
        auto it = midpoints.find(key);
        if (it != midpoints.end()) return it->second;
        Point p = 0.5 * (vertices[a] + vertices[b]);
        if (projector && !intrinsic) {
            const auto [la, ia] = mesh.boundary_position(a);
            const auto [lb, ib] = mesh.boundary_position(b);
            bool on_boundary = false;
            if (la >= 0 && la == lb) {
                const int n = static_cast<int>(mesh.boundary_loops()[la].size());
                on_boundary = (ib == (ia + 1) % n) || (ia == (ib + 1) % n);
            }
            p = projector(p, on_boundary);
        }
        const int id = static_cast<int>(vertices.size());
        vertices.push_back(p);
        midpoints.emplace(key, id);
        return id;
    };

    std::vector<Triangle> triangles;
    std::vector<TriangleLengths> lengths;
    triangles.reserve(4 * mesh.triangle_count());
    for (int f = 0; f < mesh.triangle_count(); ++f) {
        const auto [a, b, c] = mesh.triangles()[f];
        const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
        triangles.push_back({a, ab, ca});
        triangles.push_back({ab, b, bc});
        triangles.push_back({ca, bc, c});
        triangles.push_back({ab, bc, ca});
        if (intrinsic) {
            const auto& l = mesh.lengths()[f];
            const double hab = 0.5 * l[0], hbc = 0.5 * l[1], hca = 0.5 * l[2];
            lengths.push_back({hab, hbc, hca});
            lengths.push_back({hab, hbc, hca});
            lengths.push_back({hab, hbc, hca});
            lengths.push_back({hca, hab, hbc});
        }
    }

    std::vector<std::vector<int>> loops;
    for (const auto& loop : mesh.boundary_loops()) {
        std::vector<int> refined;
        for (std::size_t i = 0; i < loop.size(); ++i) {
            refined.push_back(loop[i]);
            refined.push_back(midpoint(loop[i], loop[(i + 1) % loop.size()]));
        }
        loops.push_back(std::move(refined));
    }
    return SurfaceMesh(std::move(vertices), std::move(triangles), std::move(loops), std::move(lengths));
}

SurfaceMesh refined_disk(int level, double radius)
{
    if (level < 0) throw std::invalid_argument("refined_disk: level must be >= 0");
    SurfaceMesh mesh = build_disk(2, 8, radius);
    const Projector project = disk_projector(radius);
    for (int i = 0; i < level; ++i) mesh = refine(mesh, project);
    return mesh;
}

}  // namespace steklov
