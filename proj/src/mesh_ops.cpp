#include "steklov/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace steklov {

namespace {

int wrap(int i, int n)
{
    return ((i % n) + n) % n;
}

void check_arc(const SurfaceMesh& mesh, const BoundaryArc& arc, const char* name)
{
    const int loops = static_cast<int>(mesh.boundary_loops().size());
    if (arc.loop < 0 || arc.loop >= loops) {
        throw MeshError(std::string(name) + " refers to loop " + std::to_string(arc.loop) + " out of range");
    }
    const auto& loop = mesh.boundary_loops()[arc.loop];
    const int n = static_cast<int>(loop.size());
    const int m = arc.edge_count();
    if (m < 2) throw MeshError(std::string(name) + " must contain at least 2 edges");
    if (m >= n) throw MeshError(std::string(name) + " covers its whole boundary loop");
    for (int i = 0; i <= m; ++i) {
        const int v = arc.vertices[i];
        if (v < 0 || v >= mesh.vertex_count()) throw MeshError(std::string(name) + " vertex out of range");
        const auto [l, p] = mesh.boundary_position(v);
        if (l != arc.loop) {
            throw MeshError(std::string(name) + " vertex " + std::to_string(v) + " is not on loop " +
                            std::to_string(arc.loop));
        }
        if (i > 0 && loop[wrap(mesh.boundary_position(arc.vertices[i - 1]).second + 1, n)] != v) {
            throw MeshError(std::string(name) + " vertices are not consecutive in loop order");
        }
    }
}

}  // namespace

BoundaryArc make_arc(const SurfaceMesh& mesh, int loop, int start, int edges)
{
    const auto& loops = mesh.boundary_loops();
    if (loop < 0 || loop >= static_cast<int>(loops.size())) throw MeshError("make_arc: loop out of range");
    const int n = static_cast<int>(loops[loop].size());
    if (edges < 1 || edges >= n) throw MeshError("make_arc: arc must have between 1 and loop size - 1 edges");
    BoundaryArc arc{loop, {}};
    for (int i = 0; i <= edges; ++i) arc.vertices.push_back(loops[loop][wrap(start + i, n)]);
    return arc;
}

std::vector<int> arc_edges(const SurfaceMesh& mesh, const BoundaryArc& arc)
{
    std::vector<int> edges;
    for (int i = 0; i < arc.edge_count(); ++i) {
        const auto [l, p] = mesh.boundary_position(arc.vertices[i]);
        if (l != arc.loop) throw MeshError("arc vertex is not on the arc's loop");
        const int e = mesh.loop_edge_offset(l) + p;
        if (mesh.boundary_edges()[e].to != arc.vertices[i + 1]) {
            throw MeshError("arc vertices are not consecutive in loop order");
        }
        edges.push_back(e);
    }
    return edges;
}

double arc_length(const SurfaceMesh& mesh, const BoundaryArc& arc)
{
    double sum = 0.0;
    for (int e : arc_edges(mesh, arc)) sum += mesh.boundary_edges()[e].length;
    return sum;
}

GluingSpec centered_gluing(const SurfaceMesh& mesh, int loop1, int center1, int loop2, int center2, int edges)
{
    GluingSpec spec;
    spec.arc1 = make_arc(mesh, loop1, center1 - edges / 2, edges);
    spec.arc2 = make_arc(mesh, loop2, center2 - (edges - edges / 2), edges);
    spec.half_length = 0.5 * arc_length(mesh, spec.arc1);
    validate_gluing(mesh, spec);
    return spec;
}

void validate_gluing(const SurfaceMesh& mesh, const GluingSpec& spec)
{
    check_arc(mesh, spec.arc1, "arc1");
    check_arc(mesh, spec.arc2, "arc2");
    if (spec.arc1.loop == spec.arc2.loop) throw MeshError("gluing arcs must lie on distinct boundary loops");
    const int m = spec.arc1.edge_count();
    if (spec.arc2.edge_count() != m) throw MeshError("gluing arcs have different edge counts");
    if (!(spec.half_length > 0)) throw MeshError("gluing half length must be positive");

    const auto e1 = arc_edges(mesh, spec.arc1);
    const auto e2 = arc_edges(mesh, spec.arc2);
    const auto& edges = mesh.boundary_edges();
    double total1 = 0.0, total2 = 0.0;
    for (int i = 0; i < m; ++i) {
        const double l1 = edges[e1[i]].length;
        const double l2 = edges[e2[m - 1 - i]].length;
        if (std::abs(l1 - l2) > kArcLengthTolerance * std::max(l1, l2)) {
            throw MeshError("gluing arcs are not isometric: edge " + std::to_string(i) + " has lengths " +
                            std::to_string(l1) + " and " + std::to_string(l2));
        }
        total1 += l1;
        total2 += l2;
    }
    const double target = 2 * spec.half_length;
    for (double total : {total1, total2}) {
        if (std::abs(total - target) > kArcLengthTolerance * target) {
            throw MeshError("gluing arc length " + std::to_string(total) + " differs from 2*eps = " +
                            std::to_string(target));
        }
    }
}

GluedMesh glue_segments_with_map(const SurfaceMesh& mesh, const GluingSpec& spec)
{
    validate_gluing(mesh, spec);
    const int m = spec.arc1.edge_count();
    const int nv = mesh.vertex_count();

    std::vector<int> partner(nv, -1);
    for (int i = 0; i <= m; ++i) partner[spec.arc2.vertices[m - i]] = spec.arc1.vertices[i];

    std::vector<int> vertex_map(nv, -1);
    std::vector<Point> vertices;
    for (int v = 0; v < nv; ++v) {
        if (partner[v] != -1) continue;
        vertex_map[v] = static_cast<int>(vertices.size());
        vertices.push_back(mesh.vertices()[v]);
    }
    for (int v = 0; v < nv; ++v) {
        if (partner[v] != -1) vertex_map[v] = vertex_map[partner[v]];
    }

    std::vector<Triangle> triangles;
    for (int f = 0; f < mesh.triangle_count(); ++f) {
        Triangle t = mesh.triangles()[f];
        for (int& v : t) v = vertex_map[v];
        if (t[0] == t[1] || t[1] == t[2] || t[2] == t[0]) {
            throw MeshError("identification collapses triangle " + std::to_string(f) +
                            " (would create a non-manifold edge)");
        }
        triangles.push_back(t);
    }

    // The merged loop runs a_m -> ... -> a_0 = b_m -> ... -> b_0 = a_m.
    const auto& loops = mesh.boundary_loops();
    const int la = spec.arc1.loop, lb = spec.arc2.loop;
    const int na = static_cast<int>(loops[la].size()), nb = static_cast<int>(loops[lb].size());
    const int pa = mesh.boundary_position(spec.arc1.vertices[m]).second;
    const int pb = mesh.boundary_position(spec.arc2.vertices[m]).second;
    std::vector<int> merged, merged_origin;
    for (int j = 0; j < na - m; ++j) {
        merged.push_back(vertex_map[loops[la][wrap(pa + j, na)]]);
        merged_origin.push_back(mesh.loop_edge_offset(la) + wrap(pa + j, na));
    }
    for (int j = 0; j < nb - m; ++j) {
        merged.push_back(vertex_map[loops[lb][wrap(pb + j, nb)]]);
        merged_origin.push_back(mesh.loop_edge_offset(lb) + wrap(pb + j, nb));
    }

    std::vector<std::vector<int>> new_loops;
    std::vector<int> origin;
    for (int l = 0; l < static_cast<int>(loops.size()); ++l) {
        if (l == std::min(la, lb)) {
            new_loops.push_back(merged);
            origin.insert(origin.end(), merged_origin.begin(), merged_origin.end());
        } else if (l != std::max(la, lb)) {
            std::vector<int> loop;
            for (int v : loops[l]) loop.push_back(vertex_map[v]);
            new_loops.push_back(std::move(loop));
            for (int j = 0; j < static_cast<int>(loops[l].size()); ++j) origin.push_back(mesh.loop_edge_offset(l) + j);
        }
    }

    try {
        SurfaceMesh glued(std::move(vertices), std::move(triangles), std::move(new_loops), mesh.lengths());
        return {std::move(glued), std::move(vertex_map), std::move(origin)};
    } catch (const MeshError& e) {
        throw MeshError(std::string("glue_segments: identification produces an invalid surface: ") + e.what());
    }
}

SurfaceMesh glue_segments(const SurfaceMesh& mesh, const GluingSpec& spec)
{
    return glue_segments_with_map(mesh, spec).mesh;
}

namespace {

// Link of an interior vertex as a cycle (v, a, b) -> next[a] = b, or empty if
// the star is not a simple disk.
std::vector<int> vertex_link(const SurfaceMesh& mesh, int vertex, std::vector<int>* star)
{
    std::vector<std::pair<int, int>> link_edges;
    for (int f = 0; f < mesh.triangle_count(); ++f) {
        const Triangle& t = mesh.triangles()[f];
        for (int k = 0; k < 3; ++k) {
            if (t[k] != vertex) continue;
            link_edges.emplace_back(t[(k + 1) % 3], t[(k + 2) % 3]);
            if (star) star->push_back(f);
        }
    }
    std::vector<int> cycle;
    if (link_edges.empty()) return cycle;
    int current = link_edges.front().first;
    for (std::size_t step = 0; step < link_edges.size(); ++step) {
        cycle.push_back(current);
        auto it = std::find_if(link_edges.begin(), link_edges.end(),
                               [current](const auto& e) { return e.first == current; });
        if (it == link_edges.end()) return {};
        current = it->second;
    }
    if (current != cycle.front()) return {};
    auto sorted = cycle;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return {};
    return cycle;
}

}  // namespace

std::vector<int> puncturable_vertices(const SurfaceMesh& mesh)
{
    std::vector<int> result;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        if (mesh.is_boundary_vertex(v)) continue;
        const auto link = vertex_link(mesh, v, nullptr);
        if (link.size() < 3) continue;
        if (std::any_of(link.begin(), link.end(), [&](int u) { return mesh.is_boundary_vertex(u); })) continue;
        result.push_back(v);
    }
    return result;
}

SurfaceMesh puncture(const SurfaceMesh& mesh, int vertex)
{
    if (vertex < 0 || vertex >= mesh.vertex_count()) throw MeshError("puncture: vertex out of range");
    if (mesh.is_boundary_vertex(vertex)) throw MeshError("puncture: vertex " + std::to_string(vertex) + " is on the boundary");

    std::vector<int> star;
    const auto link = vertex_link(mesh, vertex, &star);
    if (star.size() < 3) throw MeshError("puncture: vertex needs at least 3 incident triangles");
    if (link.size() != star.size()) throw MeshError("puncture: vertex star is not a simple disk");
    for (int u : link) {
        if (mesh.is_boundary_vertex(u)) {
            throw MeshError("puncture: removal would pinch the boundary at vertex " + std::to_string(u));
        }
    }

    auto reindex = [vertex](int v) { return v > vertex ? v - 1 : v; };
    std::vector<Point> vertices = mesh.vertices();
    vertices.erase(vertices.begin() + vertex);

    std::vector<bool> removed(mesh.triangle_count(), false);
    for (int f : star) removed[f] = true;
    std::vector<Triangle> triangles;
    std::vector<TriangleLengths> lengths;
    for (int f = 0; f < mesh.triangle_count(); ++f) {
        if (removed[f]) continue;
        Triangle t = mesh.triangles()[f];
        for (int& v : t) v = reindex(v);
        triangles.push_back(t);
        if (mesh.has_intrinsic_metric()) lengths.push_back(mesh.lengths()[f]);
    }

    std::vector<std::vector<int>> loops;
    for (const auto& loop : mesh.boundary_loops()) {
        std::vector<int> l;
        for (int v : loop) l.push_back(reindex(v));
        loops.push_back(std::move(l));
    }
    // Remaining triangles traverse the link backwards.
    std::vector<int> hole(link.rbegin(), link.rend());
    for (int& v : hole) v = reindex(v);
    loops.push_back(std::move(hole));

    try {
        return SurfaceMesh(std::move(vertices), std::move(triangles), std::move(loops), std::move(lengths));
    } catch (const MeshError& e) {
        throw MeshError(std::string("puncture: removal would disconnect or break the mesh: ") + e.what());
    }
}

}  // namespace steklov
