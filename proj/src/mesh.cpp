#include "steklov/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>

namespace steklov {

namespace {

class UnionFind
{
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t i)
    {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }

    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

std::int64_t edge_key(int a, int b, int n)
{
    return static_cast<std::int64_t>(a) * n + b;
}

template <typename... Args>
[[noreturn]] void fail(Args&&... args)
{
    std::ostringstream os;
    (os << ... << args);
    throw MeshError(os.str());
}

bool lengths_agree(double a, double b)
{
    return std::abs(a - b) <= 1e-9 * std::max(a, b);
}

}  // namespace

double area_from_lengths(const TriangleLengths& l)
{
    // Kahan's stable ordering of Heron's formula.
    std::array<double, 3> s = l;
    std::sort(s.begin(), s.end(), std::greater<>());
    const double a = s[0], b = s[1], c = s[2];
    const double p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    return p > 0.0 ? 0.25 * std::sqrt(p) : 0.0;
}

SurfaceMesh::SurfaceMesh(std::vector<Point> vertices,
                         std::vector<Triangle> triangles,
                         std::vector<std::vector<int>> boundary_loops,
                         std::vector<TriangleLengths> lengths)
    : vertices_(std::move(vertices))
    , triangles_(std::move(triangles))
    , loops_(std::move(boundary_loops))
    , lengths_(std::move(lengths))
{
    const int nv = vertex_count();
    const int nf = triangle_count();
    if (nv == 0 || nf == 0) fail("mesh has no vertices or no triangles");

    for (int v = 0; v < nv; ++v) {
        if (!vertices_[v].allFinite()) fail("vertex ", v, " has non-finite coordinates");
    }
    for (int f = 0; f < nf; ++f) {
        const Triangle& t = triangles_[f];
        for (int k = 0; k < 3; ++k) {
            if (t[k] < 0 || t[k] >= nv) fail("triangle ", f, " references vertex ", t[k], " out of range");
        }
        if (t[0] == t[1] || t[1] == t[2] || t[2] == t[0]) fail("triangle ", f, " repeats a vertex");
    }

    if (lengths_.empty()) {
        lengths_.resize(nf);
        for (int f = 0; f < nf; ++f) {
            const Triangle& t = triangles_[f];
            for (int k = 0; k < 3; ++k) {
                lengths_[f][k] = (vertices_[t[(k + 1) % 3]] - vertices_[t[k]]).norm();
            }
        }
    } else {
        intrinsic_ = true;
        if (static_cast<int>(lengths_.size()) != nf) {
            fail("expected ", nf, " triangle length triples, got ", lengths_.size());
        }
    }

    for (int f = 0; f < nf; ++f) {
        const TriangleLengths& l = lengths_[f];
        const double lmax = std::max({l[0], l[1], l[2]});
        if (!(l[0] > 0 && l[1] > 0 && l[2] > 0) || !std::isfinite(lmax)) {
            fail("triangle ", f, " has a non-positive edge length");
        }
        if (!(area_from_lengths(l) > 1e-14 * lmax * lmax)) fail("triangle ", f, " is degenerate (zero area)");
    }

    // Directed half-edges; a repeated directed edge means either inconsistent
    // orientation or an edge with more than two triangles.
    std::unordered_map<std::int64_t, int> half_edges;
    half_edges.reserve(3 * nf);
    for (int f = 0; f < nf; ++f) {
        const Triangle& t = triangles_[f];
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            if (!half_edges.emplace(edge_key(a, b, nv), 3 * f + k).second) {
                fail("edge (", a, ", ", b, ") is non-manifold or inconsistently oriented");
            }
        }
    }

    UnionFind faces(nf);
    UnionFind corners(3 * static_cast<std::size_t>(nf));
    auto corner_of = [&](int f, int v) {
        const Triangle& t = triangles_[f];
        const int k = t[0] == v ? 0 : (t[1] == v ? 1 : 2);
        return static_cast<std::size_t>(3 * f + k);
    };

    std::unordered_map<std::int64_t, int> boundary_half_edges;
    int interior_edges = 0;
    for (const auto& [key, he] : half_edges) {
        const int f = he / 3, k = he % 3;
        const int a = triangles_[f][k], b = triangles_[f][(k + 1) % 3];
        auto twin = half_edges.find(edge_key(b, a, nv));
        if (twin == half_edges.end()) {
            boundary_half_edges.emplace(key, he);
            continue;
        }
        const int g = twin->second / 3;
        if (a < b) {
            ++interior_edges;
            if (!lengths_agree(lengths_[f][k], lengths_[g][twin->second % 3])) {
                fail("edge (", a, ", ", b, ") has different lengths in triangles ", f, " and ", g);
            }
        }
        faces.unite(f, g);
        corners.unite(corner_of(f, a), corner_of(g, a));
        corners.unite(corner_of(f, b), corner_of(g, b));
    }
    edge_count_ = interior_edges + static_cast<int>(boundary_half_edges.size());

    for (int f = 1; f < nf; ++f) {
        if (faces.find(f) != faces.find(0)) fail("mesh is not connected (triangle ", f, ")");
    }

    // Each vertex must be used and its corners must form a single fan.
    std::vector<int> fan_root(nv, -1);
    for (int f = 0; f < nf; ++f) {
        for (int k = 0; k < 3; ++k) {
            const int v = triangles_[f][k];
            const int root = static_cast<int>(corners.find(3 * f + k));
            if (fan_root[v] == -1) {
                fan_root[v] = root;
            } else if (fan_root[v] != root) {
                fail("vertex ", v, " is non-manifold (its triangles form more than one fan)");
            }
        }
    }
    for (int v = 0; v < nv; ++v) {
        if (fan_root[v] == -1) fail("vertex ", v, " is not used by any triangle");
    }

    if (loops_.empty()) fail("mesh has no boundary loop");
    boundary_flag_.assign(nv, false);
    boundary_pos_.assign(nv, {-1, -1});
    std::size_t used = 0;
    for (int l = 0; l < static_cast<int>(loops_.size()); ++l) {
        const auto& loop = loops_[l];
        if (loop.size() < 3) fail("boundary loop ", l, " has fewer than 3 vertices");
        loop_offsets_.push_back(static_cast<int>(boundary_edges_.size()));
        for (int i = 0; i < static_cast<int>(loop.size()); ++i) {
            const int a = loop[i];
            const int b = loop[(i + 1) % loop.size()];
            if (a < 0 || a >= nv) fail("boundary loop ", l, " references vertex ", a, " out of range");
            if (boundary_flag_[a]) fail("vertex ", a, " appears more than once on the boundary");
            boundary_flag_[a] = true;
            boundary_pos_[a] = {l, i};
            auto it = boundary_half_edges.find(edge_key(a, b, nv));
            if (it == boundary_half_edges.end()) {
                fail("boundary loop ", l, " edge (", a, ", ", b, ") is not a boundary edge with the surface on its left");
            }
            const int he = it->second;
            boundary_edges_.push_back({l, i, a, b, lengths_[he / 3][he % 3]});
            ++used;
        }
    }
    if (used != boundary_half_edges.size()) {
        fail("boundary loops cover ", used, " of ", boundary_half_edges.size(), " boundary edges");
    }

    const int euler = nv - edge_count_ + nf;
    const int k = static_cast<int>(loops_.size());
    const int twice_genus = 2 - euler - k;
    if (twice_genus < 0 || twice_genus % 2 != 0) {
        fail("Euler characteristic ", euler, " with ", k, " boundary loops gives non-integer genus");
    }
    topology_ = {twice_genus / 2, k, euler};
}

double SurfaceMesh::triangle_area(int f) const
{
    return area_from_lengths(lengths_.at(f));
}

double SurfaceMesh::loop_length(int loop) const
{
    const int begin = loop_offsets_.at(loop);
    const int end = begin + static_cast<int>(loops_[loop].size());
    double sum = 0.0;
    for (int e = begin; e < end; ++e) sum += boundary_edges_[e].length;
    return sum;
}

double SurfaceMesh::boundary_length() const
{
    double sum = 0.0;
    for (const auto& e : boundary_edges_) sum += e.length;
    return sum;
}

double SurfaceMesh::mesh_size() const
{
    double h = 0.0;
    for (const auto& l : lengths_) h = std::max({h, l[0], l[1], l[2]});
    return h;
}

Topology topology(const SurfaceMesh& mesh)
{
    return mesh.topology();
}

double angle_sum(const SurfaceMesh& mesh, int v)
{
    double sum = 0.0;
    const auto& tris = mesh.triangles();
    for (int f = 0; f < mesh.triangle_count(); ++f) {
        for (int k = 0; k < 3; ++k) {
            if (tris[f][k] != v) continue;
            const TriangleLengths& l = mesh.lengths()[f];
            // Edges at corner k: l[k] and l[(k+2)%3]; opposite edge: l[(k+1)%3].
            const double a = l[k], b = l[(k + 2) % 3], c = l[(k + 1) % 3];
            const double cosine = std::clamp((a * a + b * b - c * c) / (2 * a * b), -1.0, 1.0);
            sum += std::acos(cosine);
        }
    }
    return sum;
}

}  // namespace steklov
