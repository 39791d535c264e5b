#include "oracles.hpp"
#include "surgery.hpp"

#include "steklov/mesh.hpp"
#include "steklov/mesh_io.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

using namespace steklov;

namespace {

constexpr double kPi = std::numbers::pi;

SurfaceMesh unit_square()
{
    return SurfaceMesh({Point(0, 0, 0), Point(1, 0, 0), Point(1, 1, 0), Point(0, 1, 0)}, {{0, 1, 2}, {0, 2, 3}},
                       {{0, 1, 2, 3}});
}

int boundary_edges_of(const SurfaceMesh& m) { return m.boundary_edge_count(); }

}  // namespace

TEST_CASE("disk builder: single fan")
{
    const SurfaceMesh m = build_disk(1, 3, 1.0);
    CHECK(m.vertex_count() == 4);
    CHECK(m.triangle_count() == 3);
    CHECK(m.topology() == Topology{0, 1, 1});
}

TEST_CASE("disk builder: polar grid topology and boundary")
{
    const SurfaceMesh m = build_disk(3, 12, 1.0);
    CHECK(m.topology() == Topology{0, 1, 1});
    REQUIRE(m.boundary_loops().size() == 1);
    CHECK(m.boundary_loops()[0].size() == 12);
    CHECK(m.boundary_length() == doctest::Approx(oracle::inscribed_perimeter(12, 1.0)).epsilon(1e-14));
}

TEST_CASE("disk builder: doubling the radius doubles the boundary length")
{
    const SurfaceMesh a = build_disk(2, 7, 0.8);
    const SurfaceMesh b = build_disk(2, 7, 1.6);
    CHECK(b.boundary_length() == doctest::Approx(2 * a.boundary_length()).epsilon(1e-14));
}

TEST_CASE("disk builder: parameter range")
{
    CHECK_THROWS_AS(build_disk(0, 8, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_disk(1, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_disk(1, 8, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_disk(1, 8, -1.0), std::invalid_argument);
}

TEST_CASE("cylinder builder: topology and boundary length")
{
    const SurfaceMesh m = build_cylinder(1.0, 4, 16);
    CHECK(m.topology() == Topology{0, 2, 0});
    CHECK(m.boundary_length() == doctest::Approx(2 * oracle::inscribed_perimeter(16, 1.0)).epsilon(1e-14));
    CHECK(std::abs(m.boundary_length() - 4 * kPi) < 4 * kPi * 0.01);

    // Independent of the half height.
    const SurfaceMesh tall = build_cylinder(3.0, 4, 16);
    CHECK(tall.boundary_length() == doctest::Approx(m.boundary_length()).epsilon(1e-14));

    CHECK_THROWS_AS(build_cylinder(0.0, 4, 16), std::invalid_argument);
    CHECK_THROWS_AS(build_cylinder(1.0, 0, 16), std::invalid_argument);
    CHECK_THROWS_AS(build_cylinder(1.0, 4, 2), std::invalid_argument);
}

TEST_CASE("boundary edges are numbered loop by loop")
{
    const SurfaceMesh m = build_cylinder(1.0, 2, 6);
    REQUIRE(m.boundary_edge_count() == 12);
    CHECK(m.loop_edge_offset(0) == 0);
    CHECK(m.loop_edge_offset(1) == 6);
    for (int e = 0; e < m.boundary_edge_count(); ++e) {
        const auto& edge = m.boundary_edges()[e];
        const auto& loop = m.boundary_loops()[edge.loop];
        CHECK(edge.from == loop[edge.position]);
        CHECK(edge.to == loop[(edge.position + 1) % loop.size()]);
        CHECK(m.is_boundary_vertex(edge.from));
    }
}

TEST_CASE("mesh validation rejects broken inputs")
{
    const std::vector<Point> sq{Point(0, 0, 0), Point(1, 0, 0), Point(1, 1, 0), Point(0, 1, 0)};

    SUBCASE("index out of range")
    {
        CHECK_THROWS_AS(SurfaceMesh(sq, {{0, 1, 4}}, {{0, 1, 4}}), MeshError);
    }
    SUBCASE("degenerate triangle")
    {
        const std::vector<Point> line{Point(0, 0, 0), Point(1, 0, 0), Point(2, 0, 0)};
        CHECK_THROWS_AS(SurfaceMesh(line, {{0, 1, 2}}, {{0, 1, 2}}), MeshError);
    }
    SUBCASE("repeated vertex in a triangle")
    {
        CHECK_THROWS_AS(SurfaceMesh(sq, {{0, 1, 1}}, {{0, 1}}), MeshError);
    }
    SUBCASE("inconsistent orientation")
    {
        CHECK_THROWS_AS(SurfaceMesh(sq, {{0, 1, 2}, {0, 3, 2}}, {{0, 1, 2, 3}}), MeshError);
    }
    SUBCASE("boundary loop that does not follow boundary edges")
    {
        CHECK_THROWS_AS(SurfaceMesh(sq, {{0, 1, 2}, {0, 2, 3}}, {{0, 3, 2, 1}}), MeshError);
    }
    SUBCASE("missing boundary loop")
    {
        CHECK_THROWS_AS(SurfaceMesh(sq, {{0, 1, 2}, {0, 2, 3}}, {}), MeshError);
    }
    SUBCASE("unused vertex")
    {
        auto pts = sq;
        pts.emplace_back(5, 5, 0);
        CHECK_THROWS_AS(SurfaceMesh(pts, {{0, 1, 2}, {0, 2, 3}}, {{0, 1, 2, 3}}), MeshError);
    }
    SUBCASE("disconnected")
    {
        std::vector<Point> pts{Point(0, 0, 0), Point(1, 0, 0), Point(0, 1, 0),
                               Point(3, 0, 0), Point(4, 0, 0), Point(3, 1, 0)};
        CHECK_THROWS_AS(SurfaceMesh(pts, {{0, 1, 2}, {3, 4, 5}}, {{0, 1, 2}, {3, 4, 5}}), MeshError);
    }
    SUBCASE("non-manifold vertex (two fans)")
    {
        std::vector<Point> pts{Point(0, 0, 0), Point(1, 0, 0), Point(0, 1, 0), Point(-1, 0, 0), Point(0, -1, 0)};
        CHECK_THROWS_AS(SurfaceMesh(pts, {{0, 1, 2}, {0, 3, 4}}, {{0, 1, 2}, {0, 3, 4}}), MeshError);
    }
    SUBCASE("edge shared by three triangles")
    {
        std::vector<Point> pts{Point(0, 0, 0), Point(1, 0, 0), Point(0, 1, 0), Point(0, -1, 0), Point(0, 0, 1)};
        CHECK_THROWS_AS(SurfaceMesh(pts, {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}}, {{0, 1, 2}}), MeshError);
    }
    SUBCASE("a valid square is accepted")
    {
        CHECK_NOTHROW(unit_square());
        CHECK(unit_square().topology() == Topology{0, 1, 1});
    }
}

TEST_CASE("topology: disk, cylinder, glued cylinder")
{
    CHECK(topology(build_disk(2, 8, 1.0)) == Topology{0, 1, 1});
    const SurfaceMesh cyl = build_cylinder(1.0, 4, 16);
    CHECK(topology(cyl) == Topology{0, 2, 0});
    CHECK(topology(glue_segments(cyl, centered_gluing(cyl, 0, 0, 1, 0, 4))) == Topology{1, 1, -1});
}

TEST_CASE("puncture: Euler arithmetic")
{
    SUBCASE("disk")
    {
        const SurfaceMesh disk = build_disk(3, 8, 1.0);
        const SurfaceMesh p = puncture(disk, 0);
        CHECK(p.topology() == Topology{0, 2, 0});
        CHECK(p.boundary_loops().back().size() == 8);
    }
    SUBCASE("cylinder")
    {
        const SurfaceMesh cyl = build_cylinder(1.0, 4, 16);
        const auto candidates = puncturable_vertices(cyl);
        REQUIRE_FALSE(candidates.empty());
        CHECK(puncture(cyl, candidates.front()).topology() == Topology{0, 3, -1});
    }
    SUBCASE("twice at distant vertices")
    {
        const SurfaceMesh cyl = build_cylinder(1.0, 6, 16);
        const SurfaceMesh once = puncture(cyl, 2 * 16 + 0);
        const SurfaceMesh twice = puncture(once, 4 * 16 + 8 - 0);
        CHECK(twice.topology() == Topology{0, 4, -2});
    }
    SUBCASE("boundary vertex is rejected")
    {
        const SurfaceMesh disk = build_disk(2, 8, 1.0);
        CHECK_THROWS_AS(puncture(disk, disk.boundary_loops()[0][0]), MeshError);
        CHECK_THROWS_AS(puncture(disk, -1), MeshError);
    }
    SUBCASE("removal that would disconnect the mesh is rejected")
    {
        // The center of a single fan has no interior neighbours: removing its star leaves nothing.
        const SurfaceMesh fan = build_disk(1, 6, 1.0);
        CHECK_THROWS_AS(puncture(fan, 0), MeshError);
        CHECK(puncturable_vertices(fan).empty());
    }
}

TEST_CASE("glue_segments: cylinder to a one-holed torus")
{
    const SurfaceMesh cyl = build_cylinder(1.0, 4, 16);
    const GluingSpec spec = centered_gluing(cyl, 0, 3, 1, 5, 4);
    CHECK(spec.arc1.edge_count() == 4);
    CHECK(spec.half_length == doctest::Approx(arc_length(cyl, spec.arc1) / 2));

    const GluedMesh g = glue_segments_with_map(cyl, spec);
    CHECK(g.mesh.topology() == Topology{1, 1, -1});
    CHECK(g.mesh.vertex_count() == cyl.vertex_count() - 5);
    CHECK(g.mesh.edge_count() == cyl.edge_count() - 4);
    CHECK(g.mesh.triangle_count() == cyl.triangle_count());
    CHECK(g.mesh.has_intrinsic_metric());

    // Each arc vertex is paired with exactly one vertex of the other arc, reversed.
    const int m = spec.arc1.edge_count();
    std::set<int> images;
    for (int i = 0; i <= m; ++i) {
        CHECK(g.vertex_map[spec.arc1.vertices[i]] == g.vertex_map[spec.arc2.vertices[m - i]]);
        images.insert(g.vertex_map[spec.arc1.vertices[i]]);
    }
    CHECK(images.size() == static_cast<std::size_t>(m + 1));

    // The arcs leave the boundary; the rest of the boundary is preserved.
    CHECK(g.mesh.boundary_length() ==
          doctest::Approx(cyl.boundary_length() - 4 * spec.half_length).epsilon(1e-13));
    for (int e = 0; e < g.mesh.boundary_edge_count(); ++e) {
        CHECK(g.mesh.boundary_edges()[e].length ==
              doctest::Approx(cyl.boundary_edges()[g.boundary_edge_origin[e]].length).epsilon(1e-15));
    }
}

TEST_CASE("glue_segments: three-holed sphere to genus one with two boundaries")
{
    const SurfaceMesh cyl = build_cylinder(1.0, 6, 16);
    const SurfaceMesh pants = puncture(cyl, 3 * 16 + 4);
    REQUIRE(pants.topology() == Topology{0, 3, -1});
    const SurfaceMesh g = glue_segments(pants, centered_gluing(pants, 0, 0, 1, 0, 2));
    CHECK(g.topology() == Topology{1, 2, -2});
}

TEST_CASE("glued endpoints carry twice the boundary angle")
{
    const SurfaceMesh cyl = build_cylinder(1.0, 4, 16);
    const GluingSpec spec = centered_gluing(cyl, 0, 0, 1, 0, 4);
    const GluedMesh g = glue_segments_with_map(cyl, spec);
    const int m = spec.arc1.edge_count();
    for (int end : {0, m}) {
        const int v = g.vertex_map[spec.arc1.vertices[end]];
        CHECK(g.mesh.is_boundary_vertex(v));
        // Each cylinder boundary vertex has angle pi in the flat strip metric.
        CHECK(angle_sum(g.mesh, v) == doctest::Approx(2 * kPi).epsilon(1e-12));
    }
    for (int i = 1; i < m; ++i) {
        const int v = g.vertex_map[spec.arc1.vertices[i]];
        CHECK_FALSE(g.mesh.is_boundary_vertex(v));
        CHECK(angle_sum(g.mesh, v) == doctest::Approx(2 * kPi).epsilon(1e-12));
    }
}

TEST_CASE("glue_segments: invalid specifications")
{
    const SurfaceMesh cyl = build_cylinder(1.0, 4, 16);
    SUBCASE("same loop")
    {
        GluingSpec spec{make_arc(cyl, 0, 0, 2), make_arc(cyl, 0, 8, 2), 0.0};
        spec.half_length = arc_length(cyl, spec.arc1) / 2;
        CHECK_THROWS_AS(validate_gluing(cyl, spec), MeshError);
    }
    SUBCASE("single edge arcs")
    {
        CHECK_THROWS_AS(centered_gluing(cyl, 0, 0, 1, 0, 1), MeshError);
    }
    SUBCASE("full overlap")
    {
        CHECK_THROWS_AS(centered_gluing(cyl, 0, 0, 1, 0, 16), MeshError);
    }
    SUBCASE("mismatched edge counts")
    {
        GluingSpec spec{make_arc(cyl, 0, 0, 2), make_arc(cyl, 1, 0, 3), 0.0};
        spec.half_length = arc_length(cyl, spec.arc1) / 2;
        CHECK_THROWS_AS(validate_gluing(cyl, spec), MeshError);
    }
    SUBCASE("mismatched lengths")
    {
        const SurfaceMesh other = build_cylinder(1.0, 4, 16);
        const SurfaceMesh p = puncture(other, 2 * 16 + 3);
        // Link edges of the puncture are diagonals and axial edges, not circle chords.
        CHECK_THROWS_AS(centered_gluing(p, 0, 0, 2, 0, 2), MeshError);
    }
    SUBCASE("wrong half length")
    {
        GluingSpec spec = centered_gluing(cyl, 0, 0, 1, 0, 2);
        spec.half_length *= 1.01;
        CHECK_THROWS_AS(validate_gluing(cyl, spec), MeshError);
    }
}

TEST_CASE("refinement keeps topology and places boundary midpoints on the circle")
{
    const SurfaceMesh coarse = build_disk(2, 8, 1.0);
    const SurfaceMesh fine = refine(coarse, disk_projector(1.0));
    CHECK(fine.topology() == coarse.topology());
    CHECK(fine.triangle_count() == 4 * coarse.triangle_count());
    for (int v : fine.boundary_loops()[0]) CHECK(fine.vertices()[v].norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(boundary_edges_of(fine) == 2 * boundary_edges_of(coarse));

    const SurfaceMesh d3 = refined_disk(3);
    CHECK(d3.boundary_loops()[0].size() == 64);
    CHECK(d3.boundary_length() == doctest::Approx(oracle::inscribed_perimeter(64, 1.0)).epsilon(1e-13));
}

TEST_CASE("refinement of an intrinsic mesh halves lengths")
{
    const SurfaceMesh cyl = build_cylinder(1.0, 2, 8);
    const SurfaceMesh g = glue_segments(cyl, centered_gluing(cyl, 0, 0, 1, 0, 2));
    const SurfaceMesh fine = refine(g);
    CHECK(fine.topology() == g.topology());
    CHECK(fine.boundary_length() == doctest::Approx(g.boundary_length()).epsilon(1e-14));
}

TEST_CASE("mesh file round trip")
{
    SUBCASE("embedded")
    {
        const SurfaceMesh m = build_cylinder(0.7, 3, 9);
        std::stringstream ss;
        write_mesh(ss, m);
        const SurfaceMesh r = read_mesh(ss);
        CHECK(r.triangles() == m.triangles());
        CHECK(r.boundary_loops() == m.boundary_loops());
        for (int v = 0; v < m.vertex_count(); ++v) CHECK((r.vertices()[v] - m.vertices()[v]).norm() == 0.0);
        CHECK_FALSE(r.has_intrinsic_metric());
    }
    SUBCASE("intrinsic lengths survive")
    {
        const SurfaceMesh cyl = build_cylinder(1.0, 3, 12);
        const SurfaceMesh g = glue_segments(cyl, centered_gluing(cyl, 0, 0, 1, 0, 4));
        std::stringstream ss;
        write_mesh(ss, g);
        const SurfaceMesh r = read_mesh(ss);
        CHECK(r.has_intrinsic_metric());
        CHECK(r.lengths() == g.lengths());
        CHECK(r.topology() == g.topology());
    }
    SUBCASE("2D coordinates")
    {
        std::stringstream ss("steklov-mesh v1\nV 3\n0 0\n1 0\n0 1\nF 1\n0 1 2\nB 1\n0 1 2\n");
        const SurfaceMesh r = read_mesh(ss);
        CHECK(r.vertex_count() == 3);
        CHECK(r.triangle_area(0) == doctest::Approx(0.5));
    }
}

TEST_CASE("mesh file errors carry line numbers")
{
    auto message = [](const std::string& text) {
        std::stringstream ss(text);
        try {
            read_mesh(ss);
        } catch (const FormatError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message("nonsense\n").find("line 1") != std::string::npos);
    CHECK(message("steklov-mesh v1\nV 3\n0 0\n1 x\n0 1\n").find("line 4") != std::string::npos);
    CHECK(message("steklov-mesh v1\nV 3\n0 0\n1 0\n0 1\nF 1\n0 1\n").find("line 7") != std::string::npos);
    CHECK(message("steklov-mesh v1\nV 3\n0 0\n1 0\n0 1\nF 1\n0 1 2\nB 1\n0 2 1\n").find("line") != std::string::npos);
    CHECK(message("steklov-mesh v1\nV 3\n0 0\n1 0\n").find("line") != std::string::npos);
}

TEST_CASE("random glue and puncture sequences keep Euler arithmetic")
{
    std::mt19937 rng(7);
    int glues = 0, punctures = 0;
    for (int trial = 0; trial < 20; ++trial) {
        SurfaceMesh m = build_cylinder(1.0, 6, 16);
        for (int step = 0; step < 3; ++step) {
            const Topology before = m.topology();
            switch (surgery::random_move(m, rng)) {
            case surgery::Move::glue:
                ++glues;
                CHECK(m.topology() == Topology{before.genus + 1, before.boundary_count - 1, before.euler - 1});
                break;
            case surgery::Move::puncture:
                ++punctures;
                CHECK(m.topology() == Topology{before.genus, before.boundary_count + 1, before.euler - 1});
                break;
            case surgery::Move::none: break;
            }
            const Topology t = m.topology();
            CHECK(t.euler == 2 - 2 * t.genus - t.boundary_count);
            CHECK(t.euler == m.vertex_count() - m.edge_count() + m.triangle_count());
        }
    }
    CHECK(glues > 5);
    CHECK(punctures > 5);
}
