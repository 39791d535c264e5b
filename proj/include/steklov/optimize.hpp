#pragma once

#include "steklov/density.hpp"
#include "steklov/mesh.hpp"
#include "steklov/spectral.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace steklov {

struct OptimizerConfig
{
    int max_iters = 300;
    /// Initial trial step, as the largest per-edge move relative to the mean density.
    double step = 0.5;
    /// Stop when the length-weighted L2 norm of the projected ascent direction falls below this.
    double tol_grad = 1e-6;
    /// Relative gap under which sigma_1 is treated as a multiple eigenvalue.
    double gap_tol = 1e-3;
    double floor = 0.0;
    /// Eigenpairs computed per iteration; must exceed the largest expected cluster.
    int eigen_count = 8;
    double min_step = 1e-10;
    bool keep_history = false;
};

enum class OptimizationStatus { converged, stalled, max_iterations };

std::string to_string(OptimizationStatus status);

struct IterationRecord
{
    int iteration = 0;
    double sigma_bar1 = 0.0;
    double grad_norm = 0.0;
    double step = 0.0;
    int multiplicity = 1;
};

struct OptimizationTrace
{
    std::vector<IterationRecord> iterations;
    BoundaryDensity final_density;
    double final_sigma_bar1 = 0.0;
    int final_multiplicity = 1;
    /// (sigma_2 - sigma_1) / sigma_1 at the final density.
    double final_relative_gap = 0.0;
    OptimizationStatus status = OptimizationStatus::max_iterations;
    /// Densities of accepted iterates (only with keep_history).
    std::vector<BoundaryDensity> history;
};

/// Ascent direction on {sum len_e d_e = 0} in the length-weighted L2 metric:
/// the projected gradient when sigma_1 is simple, otherwise the minimum-norm
/// element of the convex hull of the cluster's generalized gradients.
struct AscentDirection
{
    std::vector<double> direction;
    double norm = 0.0;
    int multiplicity = 1;
};

AscentDirection ascent_direction(const SurfaceMesh& mesh, const BoundaryDensity& rho,
                                 const SteklovSpectrum& spectrum, double gap_tol, double floor);

/// Projected ascent on sigma_bar_1 over {rho >= floor, weighted_length(rho) = 1}
/// with Armijo backtracking (shrink 0.5, acceptance 1e-4).
OptimizationTrace maximize_density(const SurfaceMesh& mesh, const BoundaryDensity& rho0,
                                   const OptimizerConfig& cfg = {});

/// Clamps to floor and rescales to unit weighted length.
BoundaryDensity project_density(const SurfaceMesh& mesh, std::vector<double> values, double floor);

struct MultiplicityReport
{
    int multiplicity = 0;
    /// 4*genus + 2*k, tightened to 2*genus + 3 for genus >= 2.
    int bound = 0;
    bool within_bound = false;
};

int multiplicity_report(const SteklovSpectrum& spectrum, double gap_tol = kDefaultGapTolerance);
MultiplicityReport multiplicity_against_bound(const SteklovSpectrum& spectrum, const Topology& topology,
                                              double gap_tol = kDefaultGapTolerance);

struct ImmersionReport
{
    /// False when sigma_1 is simple: no map into a ball of dimension >= 2.
    bool candidate = false;
    int dimension = 0;
    /// Max over active boundary vertices of | |Phi|_A - 1 |.
    double max_deviation = 0.0;
    /// Fitted quadratic form A with Phi^T A Phi ~ 1 on the boundary.
    Eigen::MatrixXd form;
    bool form_positive = false;
    std::string message;
};

/// Tests whether the first eigenfunctions can serve as coordinates of a
/// free-boundary map: fits a quadratic form A with Phi(x)^T A Phi(x) = 1 on the
/// active boundary vertices and reports the worst deviation.
ImmersionReport candidate_immersion(const SurfaceMesh& mesh, const BoundaryDensity& rho,
                                    double gap_tol = kDefaultGapTolerance, int eigen_count = 8);

}  // namespace steklov
