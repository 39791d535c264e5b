#pragma once

#include "steklov/density.hpp"
#include "steklov/mesh.hpp"
#include "steklov/optimize.hpp"
#include "steklov/records.hpp"

#include <functional>
#include <string>
#include <vector>

namespace steklov {

struct StudyResult
{
    std::vector<ExperimentRecord> records;

    bool pass() const { return all_pass(records); }
};

/// Concurrency cap for schedule evaluation from STEKLOV_THREADS (0 or unset: sequential).
int study_threads();

/// Runs fn(0..count-1), on up to `threads` worker threads when threads > 1.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

/// A one-parameter family of densities rho_p with rho_p -> rho as p -> 0.
struct DensityFamily
{
    std::string parameter;
    std::function<BoundaryDensity(double)> make;
};

/// rho_t = heat_smooth(rho, t).
DensityFamily heat_family(const SurfaceMesh& mesh, const BoundaryDensity& rho);

/// Boundary location used to center arcs: loop index and vertex position in the loop.
struct LoopPoint
{
    int loop = 0;
    int position = 0;
};

/// Arc of total length 2*eps centered at `center` (within relative
/// tolerance `snap`); throws MeshError when no whole number of edges matches.
BoundaryArc realizable_arc(const SurfaceMesh& mesh, LoopPoint center, double eps, double snap = 1e-3);

/// rho_eps = zero_on_arcs(rho, arcs of length 2*eps around each center).
DensityFamily arc_family(const SurfaceMesh& mesh, const BoundaryDensity& rho, std::vector<LoopPoint> centers);

/// Lemma probe: for each schedule value p (strictly decreasing) records
/// |sigma_1(rho_p) - sigma_1(rho)| and ||rho_p - rho||_1. Each record passes if
/// its error does not exceed the previous one; the last must also satisfy
/// error <= tolerance * sigma_1(rho).
StudyResult convergence_study(const SurfaceMesh& mesh, const BoundaryDensity& rho, const std::vector<double>& schedule,
                              const DensityFamily& family, double tolerance = 1e-3, int threads = 0);

struct GluingPlacement
{
    LoopPoint first{0, 0};
    LoopPoint second{1, 0};
};

struct GluingStudyConfig
{
    GluingPlacement placement;
    /// Closeness threshold delta(eps) = delta_factor * (eps + h).
    double delta_factor = 10.0;
    /// Relative slack of the bracketing inequality.
    double bracket_tolerance = 1e-9;
    double snap = 1e-3;
    int threads = 0;
};

/// Glues arcs of length 2*eps for each eps and records the bracketing triple
/// sigma_1(M, rho~_eps) <= sigma_1(M_eps, rho_eps) and sigma_1(M, rho).
StudyResult gluing_study(const SurfaceMesh& base, const BoundaryDensity& rho, const std::vector<double>& eps_schedule,
                         const GluingStudyConfig& cfg = {});

/// eps values for arcs of 16, 8, 4, 2 edges on the first loop of `mesh`.
std::vector<double> default_eps_schedule(const SurfaceMesh& mesh, LoopPoint center = {0, 0});

/// Disk levels max(0, refinements-2)..refinements: sigma_bar_1 -> 2*pi with
/// observed order >= 1.7 and final relative error <= 0.5%.
StudyResult weinstock_check(int refinements);

/// Root of T tanh T = 1 by bisection on [1, 2].
double critical_half_height(double tol = 1e-12);

/// Gap tolerance for the sigma_1 cluster on the critical cylinder; the exact
/// linear mode and the O(h^2) cosh mode differ by discretization error.
inline constexpr double kCatenoidGapTolerance = 1e-2;

/// Flat cylinder at T* with 2^refinements axial and 2^(refinements+1)
/// circumferential cells: sigma_bar_1 within 1% of 4*pi*tanh(T*) and cluster size 3.
StudyResult catenoid_check(int refinements);

/// Least-squares slope of log(error) against log(h).
double observed_order(const std::vector<double>& h, const std::vector<double>& error);

}  // namespace steklov
