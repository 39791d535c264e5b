#pragma once

#include "steklov/density.hpp"
#include "steklov/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <span>
#include <stdexcept>
#include <vector>

namespace steklov {

class SolverError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Cotangent stiffness matrix of the piecewise-linear Dirichlet energy.
struct StiffnessMatrix
{
    Eigen::SparseMatrix<double> matrix;
};

enum class MassQuadrature { consistent, lumped };

/// Boundary mass of rho * ds, indexed by mesh vertex (zero off the boundary).
struct BoundaryMass
{
    Eigen::SparseMatrix<double> matrix;
};

StiffnessMatrix assemble_stiffness(const SurfaceMesh& mesh);

BoundaryMass assemble_boundary_mass(const SurfaceMesh& mesh, const BoundaryDensity& rho,
                                    MassQuadrature quadrature = MassQuadrature::consistent);

/// Boundary vertices incident to at least one edge with positive density,
/// in increasing vertex order. The other boundary vertices carry a natural
/// (Neumann) condition and are eliminated together with the interior.
std::vector<int> active_vertices(const SurfaceMesh& mesh, const BoundaryDensity& rho);

enum class InteriorSolver { cholesky, conjugate_gradient };

/// Discrete Dirichlet-to-Neumann map on an active vertex set.
struct DtnOperator
{
    /// Schur complement K_aa - K_ac K_cc^{-1} K_ca.
    Eigen::MatrixXd matrix;
    std::vector<int> active;
    /// Harmonic-extension rows for the requested vertices: the value at
    /// extension_vertices[r] is extension.row(r) * (values on active).
    std::vector<int> extension_vertices;
    Eigen::MatrixXd extension;
    /// Relative residual of the interior solve.
    double interior_residual = 0.0;
};

/// Eliminates every vertex outside `active`. Throws SolverError when the
/// interior solve fails.
DtnOperator dtn_reduce(const StiffnessMatrix& stiffness, std::span<const int> active,
                       std::span<const int> extension_vertices = {},
                       InteriorSolver solver = InteriorSolver::cholesky);

struct SpectrumOptions
{
    MassQuadrature quadrature = MassQuadrature::consistent;
    InteriorSolver solver = InteriorSolver::cholesky;
};

struct SteklovSpectrum
{
    /// Ascending, with multiplicity.
    Eigen::VectorXd eigenvalues;
    std::vector<int> active;
    /// Columns are eigenvectors on the active set, orthonormal in the boundary mass.
    Eigen::MatrixXd eigenvectors;
    /// All boundary vertices in loop order and the eigenvector traces on them;
    /// rows for inactive vertices hold the harmonic (Neumann) extension.
    std::vector<int> boundary_vertices;
    Eigen::MatrixXd traces;
    /// ||DtN u - sigma M u|| per pair.
    Eigen::VectorXd residuals;
    MassQuadrature quadrature = MassQuadrature::consistent;

    int count() const { return static_cast<int>(eigenvalues.size()); }
    double sigma(int k) const { return eigenvalues(k); }
};

/// Solves DtN u = sigma M_b u on the active set and returns the `count`
/// smallest pairs. Eigenvector signs make the first entry with magnitude
/// above 1e-8 positive.
SteklovSpectrum steklov_spectrum(const SurfaceMesh& mesh, const BoundaryDensity& rho, int count,
                                 const SpectrumOptions& options = {});

/// sigma_k * weighted_length.
std::vector<double> normalized_eigenvalues(const SteklovSpectrum& spectrum, const SurfaceMesh& mesh,
                                           const BoundaryDensity& rho);

/// Default relative gap below which eigenvalues are reported as one cluster.
inline constexpr double kDefaultGapTolerance = 1e-6;

/// Number of eigenvalues sigma_j (j >= 1) with sigma_j - sigma_1 <= gap_tol * sigma_1.
int cluster_size(const SteklovSpectrum& spectrum, double gap_tol = kDefaultGapTolerance);

struct EigenGradient
{
    /// d sigma_bar_1 / d rho_e per boundary edge; empty when degenerate.
    std::vector<double> values;
    bool degenerate = false;
    double sigma1 = 0.0;
    double sigma_bar1 = 0.0;
};

/// Per-edge mass of u_i u_j per unit density: int_e u_i u_j ds / len(e).
double edge_mass_density(const SteklovSpectrum& spectrum, const SurfaceMesh& mesh, int edge, int i, int j);

/// First-order derivative of sigma_bar_1 = sigma_1 * L with respect to each
/// edge density. Refuses (degenerate = true) unless sigma_2 - sigma_1 > gap_tol * sigma_1.
EigenGradient eigenvalue_gradient(const SurfaceMesh& mesh, const BoundaryDensity& rho,
                                  const SteklovSpectrum& spectrum, double gap_tol = kDefaultGapTolerance);

}  // namespace steklov
