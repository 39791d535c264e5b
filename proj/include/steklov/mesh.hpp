#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace steklov {

class MeshError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

using Point = Eigen::Vector3d;
using Triangle = std::array<int, 3>;

/// Lengths of the edges (t[0],t[1]), (t[1],t[2]), (t[2],t[0]) of one triangle.
using TriangleLengths = std::array<double, 3>;

struct Topology
{
    int genus = 0;
    int boundary_count = 0;
    int euler = 0;

    friend bool operator==(const Topology&, const Topology&) = default;
};

/// One directed boundary edge. Boundary edges are numbered globally by
/// concatenating the loops in order; edge `position` of a loop runs from
/// loop[position] to loop[position + 1] (cyclically).
struct BoundaryEdge
{
    int loop = 0;
    int position = 0;
    int from = 0;
    int to = 0;
    double length = 0.0;
};

///
/// Triangulated connected orientable surface with nonempty boundary.
///
/// The metric is piecewise flat and is given by per-triangle edge lengths. By
/// default the lengths are measured from the vertex coordinates; meshes that
/// come out of gluing keep the lengths of their source triangles instead, since
/// the quotient surface has no isometric placement of its glued vertices.
///
/// The constructor checks every structural invariant and throws MeshError on
/// the first violation, so a SurfaceMesh value is always valid.
///
class SurfaceMesh
{
public:
    SurfaceMesh(std::vector<Point> vertices,
                std::vector<Triangle> triangles,
                std::vector<std::vector<int>> boundary_loops,
                std::vector<TriangleLengths> lengths = {});

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const std::vector<std::vector<int>>& boundary_loops() const { return loops_; }
    const std::vector<TriangleLengths>& lengths() const { return lengths_; }
    bool has_intrinsic_metric() const { return intrinsic_; }

    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    int triangle_count() const { return static_cast<int>(triangles_.size()); }
    int edge_count() const { return edge_count_; }

    const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }
    int boundary_edge_count() const { return static_cast<int>(boundary_edges_.size()); }
    /// Global index of the first boundary edge of `loop`.
    int loop_edge_offset(int loop) const { return loop_offsets_.at(loop); }
    bool is_boundary_vertex(int v) const { return boundary_flag_.at(v); }
    /// Loop index and position of a boundary vertex, or {-1, -1}.
    std::pair<int, int> boundary_position(int v) const { return boundary_pos_.at(v); }

    double triangle_area(int f) const;
    double loop_length(int loop) const;
    double boundary_length() const;
    /// Longest edge length.
    double mesh_size() const;

    Topology topology() const { return topology_; }

private:
    std::vector<Point> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<std::vector<int>> loops_;
    std::vector<TriangleLengths> lengths_;
    bool intrinsic_ = false;

    int edge_count_ = 0;
    std::vector<BoundaryEdge> boundary_edges_;
    std::vector<int> loop_offsets_;
    std::vector<bool> boundary_flag_;
    std::vector<std::pair<int, int>> boundary_pos_;
    Topology topology_;
};

Topology topology(const SurfaceMesh& mesh);

/// Heron's formula; returns 0 for lengths that violate the triangle inequality.
double area_from_lengths(const TriangleLengths& l);

/// Sum of the interior angles of all triangles incident to `v`.
double angle_sum(const SurfaceMesh& mesh, int v);

// ---------------------------------------------------------------------------
// Builders

/// Polar-grid disk: a center vertex, `n_rings` concentric rings of `n_sectors`
/// vertices each. The boundary is the regular n_sectors-gon of the given radius.
SurfaceMesh build_disk(int n_rings, int n_sectors, double radius);

/// Flat cylinder [-T, T] x S^1 of circumference 2*pi placed on the right
/// circular cylinder of radius 1 in R^3. Loop 0 is t = -T, loop 1 is t = +T.
SurfaceMesh build_cylinder(double half_height, int n_axial, int n_circ);

/// Maps a newly created edge midpoint onto the analytic surface or curve.
using Projector = std::function<Point(const Point& midpoint, bool on_boundary)>;

/// Pushes boundary midpoints radially onto the circle of `radius`.
Projector disk_projector(double radius);
/// Pushes every midpoint radially onto the cylinder of `radius` around the z axis.
Projector cylinder_projector(double radius);

/// Uniform 1-to-4 subdivision. Meshes with an intrinsic metric are split
/// with halved lengths and the projector is ignored.
SurfaceMesh refine(const SurfaceMesh& mesh, const Projector& projector = {});

/// Unit disk build_disk(2, 8, 1) refined `level` times onto the circle.
SurfaceMesh refined_disk(int level, double radius = 1.0);

// ---------------------------------------------------------------------------
// Topological modifiers

/// Consecutive boundary vertices of one loop, in loop order.
struct BoundaryArc
{
    int loop = 0;
    std::vector<int> vertices;

    int edge_count() const { return static_cast<int>(vertices.size()) - 1; }
};

/// Two arcs identified by the orientation-reversing map arc1[i] <-> arc2[m - i].
struct GluingSpec
{
    BoundaryArc arc1;
    BoundaryArc arc2;
    double half_length = 0.0;
};

struct GluedMesh
{
    SurfaceMesh mesh;
    /// Source vertex -> quotient vertex.
    std::vector<int> vertex_map;
    /// Quotient boundary edge (global order) -> source boundary edge.
    std::vector<int> boundary_edge_origin;
};

/// Relative tolerance for matching arc edge lengths and the 2*eps arc length.
inline constexpr double kArcLengthTolerance = 1e-9;

/// Arc of `edges` edges on `loop` starting at loop position `start`.
BoundaryArc make_arc(const SurfaceMesh& mesh, int loop, int start, int edges);

double arc_length(const SurfaceMesh& mesh, const BoundaryArc& arc);

/// Global boundary edge indices covered by an arc.
std::vector<int> arc_edges(const SurfaceMesh& mesh, const BoundaryArc& arc);

/// Builds a GluingSpec whose arcs of `edges` edges are centered at loop
/// positions `center1` on `loop1` and `center2` on `loop2`; half_length is
/// half the measured arc length. The result is checked by validate_gluing.
GluingSpec centered_gluing(const SurfaceMesh& mesh, int loop1, int center1, int loop2, int center2,
                           int edges);

/// Throws MeshError if the spec is not a simplicial isometry between
/// disjoint arcs on distinct loops.
void validate_gluing(const SurfaceMesh& mesh, const GluingSpec& spec);

GluedMesh glue_segments_with_map(const SurfaceMesh& mesh, const GluingSpec& spec);
SurfaceMesh glue_segments(const SurfaceMesh& mesh, const GluingSpec& spec);

/// Removes the open star of an interior vertex, adding its link as a new loop.
SurfaceMesh puncture(const SurfaceMesh& mesh, int vertex);

/// Interior vertices that puncture() accepts.
std::vector<int> puncturable_vertices(const SurfaceMesh& mesh);

}  // namespace steklov
