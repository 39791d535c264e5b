#pragma once

#include "steklov/mesh.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

namespace steklov {

class DensityError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Nonnegative weight per boundary edge (global boundary edge order),
/// multiplying the arclength measure. Never identically zero.
class BoundaryDensity
{
public:
    explicit BoundaryDensity(std::vector<double> values);

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t e) const { return values_[e]; }

    BoundaryDensity scaled(double factor) const;

private:
    std::vector<double> values_;
};

/// Nonnegative per-vertex factor f of a conformal metric f^2 g. Zeros must be
/// isolated: no edge of the mesh joins two zeros.
class ConformalFactor
{
public:
    ConformalFactor(const SurfaceMesh& mesh, std::vector<double> values);

    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t v) const { return values_[v]; }

private:
    std::vector<double> values_;
};

BoundaryDensity uniform_density(const SurfaceMesh& mesh);

/// Throws DensityError unless the density has one value per boundary edge.
void check_compatible(const SurfaceMesh& mesh, const BoundaryDensity& rho);

/// Integral of rho over the boundary.
double weighted_length(const SurfaceMesh& mesh, const BoundaryDensity& rho);

/// Integral of rho over one boundary loop.
double loop_mass(const SurfaceMesh& mesh, const BoundaryDensity& rho, int loop);

struct HeatSmoothResult
{
    BoundaryDensity density;
    /// Loops that carried no mass; they stay identically zero.
    std::vector<int> massless_loops;
};

/// Convolves rho along each boundary loop with the wrapped Gaussian of
/// variance 2t in arclength. Edge values are exact averages of the smoothed
/// function over each edge, so the mass of every loop is preserved.
HeatSmoothResult heat_smooth(const SurfaceMesh& mesh, const BoundaryDensity& rho, double t);

/// Sets rho to zero on the edges of the given arcs.
BoundaryDensity zero_on_arcs(const SurfaceMesh& mesh, const BoundaryDensity& rho,
                             std::span<const BoundaryArc> arcs);

/// rho_e * (f(a) + f(b)) / 2 for each boundary edge (a, b).
BoundaryDensity push_conformal(const SurfaceMesh& mesh, const ConformalFactor& f, const BoundaryDensity& rho);

double l1_distance(const SurfaceMesh& mesh, const BoundaryDensity& a, const BoundaryDensity& b);

/// Rescales rho so that its weighted length is `length`.
BoundaryDensity normalize_length(const SurfaceMesh& mesh, const BoundaryDensity& rho, double length = 1.0);

// Density CSV: header "loop,edge,value", one row per boundary edge, edge
// index counted along the loop orientation. Rows may come in any order but
// every edge must appear exactly once.
void write_density_csv(std::ostream& out, const SurfaceMesh& mesh, const BoundaryDensity& rho);
BoundaryDensity read_density_csv(std::istream& in, const SurfaceMesh& mesh);
void save_density(const std::filesystem::path& path, const SurfaceMesh& mesh, const BoundaryDensity& rho);
BoundaryDensity load_density(const std::filesystem::path& path, const SurfaceMesh& mesh);

}  // namespace steklov
