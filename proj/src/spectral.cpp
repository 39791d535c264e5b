#include "steklov/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <string>

namespace steklov {

StiffnessMatrix assemble_stiffness(const SurfaceMesh& mesh)
{
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(12 * static_cast<std::size_t>(mesh.triangle_count()));
    for (int f = 0; f < mesh.triangle_count(); ++f) {
        const Triangle& t = mesh.triangles()[f];
        const TriangleLengths& l = mesh.lengths()[f];
        const double area = area_from_lengths(l);
        const double lmax = std::max({l[0], l[1], l[2]});
        if (!(area > 1e-14 * lmax * lmax)) {
            throw SolverError("assemble_stiffness: degenerate triangle " + std::to_string(f));
        }
        const double s0 = l[0] * l[0], s1 = l[1] * l[1], s2 = l[2] * l[2];
        // Half-cotangent of the angle opposite each edge (t[k], t[k+1]).
        const std::array<double, 3> w{(s1 + s2 - s0) / (8 * area), (s0 + s2 - s1) / (8 * area),
                                      (s0 + s1 - s2) / (8 * area)};
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            triplets.emplace_back(a, b, -w[k]);
            triplets.emplace_back(b, a, -w[k]);
            triplets.emplace_back(a, a, w[k]);
            triplets.emplace_back(b, b, w[k]);
        }
    }
    StiffnessMatrix K;
    K.matrix.resize(mesh.vertex_count(), mesh.vertex_count());
    K.matrix.setFromTriplets(triplets.begin(), triplets.end());
    return K;
}

BoundaryMass assemble_boundary_mass(const SurfaceMesh& mesh, const BoundaryDensity& rho, MassQuadrature quadrature)
{
    check_compatible(mesh, rho);
    std::vector<Eigen::Triplet<double>> triplets;
    const auto& edges = mesh.boundary_edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (rho[e] == 0) continue;
        const double m = rho[e] * edges[e].length;
        const int a = edges[e].from, b = edges[e].to;
        if (quadrature == MassQuadrature::consistent) {
            triplets.emplace_back(a, a, m / 3);
            triplets.emplace_back(b, b, m / 3);
            triplets.emplace_back(a, b, m / 6);
            triplets.emplace_back(b, a, m / 6);
        } else {
            triplets.emplace_back(a, a, m / 2);
            triplets.emplace_back(b, b, m / 2);
        }
    }
    BoundaryMass M;
    M.matrix.resize(mesh.vertex_count(), mesh.vertex_count());
    M.matrix.setFromTriplets(triplets.begin(), triplets.end());
    return M;
}

std::vector<int> active_vertices(const SurfaceMesh& mesh, const BoundaryDensity& rho)
{
    check_compatible(mesh, rho);
    std::vector<bool> flag(mesh.vertex_count(), false);
    const auto& edges = mesh.boundary_edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (rho[e] > 0) flag[edges[e].from] = flag[edges[e].to] = true;
    }
    std::vector<int> active;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        if (flag[v]) active.push_back(v);
    }
    return active;
}

DtnOperator dtn_reduce(const StiffnessMatrix& stiffness, std::span<const int> active,
                       std::span<const int> extension_vertices, InteriorSolver solver)
{
    const Eigen::SparseMatrix<double>& K = stiffness.matrix;
    const int n = static_cast<int>(K.rows());
    if (active.empty()) throw SolverError("dtn_reduce: active set is empty");

    // Position of each vertex in the active block (>= 0) or the complement (< 0, encoded as -1 - index).
    std::vector<int> slot(n, 0);
    std::vector<bool> is_active(n, false);
    for (int v : active) {
        if (v < 0 || v >= n || is_active[v]) throw SolverError("dtn_reduce: invalid or repeated active vertex");
        is_active[v] = true;
    }
    const int na = static_cast<int>(active.size());
    for (int i = 0; i < na; ++i) slot[active[i]] = i;
    int nc = 0;
    for (int v = 0; v < n; ++v) {
        if (!is_active[v]) slot[v] = -1 - nc++;
    }

    DtnOperator dtn;
    dtn.active.assign(active.begin(), active.end());
    dtn.matrix = Eigen::MatrixXd::Zero(na, na);
    Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(nc, na);
    std::vector<Eigen::Triplet<double>> interior;
    for (int col = 0; col < K.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it) {
            const int r = slot[it.row()], c = slot[it.col()];
            if (r >= 0 && c >= 0) {
                dtn.matrix(r, c) += it.value();
            } else if (r < 0 && c >= 0) {
                coupling(-1 - r, c) += it.value();
            } else if (r < 0 && c < 0) {
                interior.emplace_back(-1 - r, -1 - c, it.value());
            }
        }
    }

    Eigen::MatrixXd harmonic;  // K_cc^{-1} K_ca
    if (nc > 0) {
        Eigen::SparseMatrix<double> Kcc(nc, nc);
        Kcc.setFromTriplets(interior.begin(), interior.end());
        bool solved = false;
        if (solver == InteriorSolver::cholesky) {
            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(Kcc);
            if (ldlt.info() == Eigen::Success) {
                harmonic = ldlt.solve(coupling);
                solved = ldlt.info() == Eigen::Success && harmonic.allFinite();
            }
        }
        if (!solved) {
            Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg(Kcc);
            cg.setTolerance(1e-12);
            cg.setMaxIterations(std::max(1000, 10 * nc));
            harmonic.resize(nc, na);
            for (int c = 0; c < na; ++c) {
                harmonic.col(c) = cg.solve(coupling.col(c));
                if (cg.info() != Eigen::Success) {
                    throw SolverError("dtn_reduce: interior solve did not converge (relative residual " +
                                      std::to_string(cg.error()) + ")");
                }
            }
        }
        const double scale = std::max(coupling.norm(), 1e-300);
        dtn.interior_residual = (Kcc * harmonic - coupling).norm() / scale;
        if (!(dtn.interior_residual < 1e-8)) {
            throw SolverError("dtn_reduce: interior solve failed (relative residual " +
                              std::to_string(dtn.interior_residual) + ")");
        }
        dtn.matrix.noalias() -= coupling.transpose() * harmonic;
    }
    dtn.matrix = 0.5 * (dtn.matrix + dtn.matrix.transpose()).eval();

    dtn.extension_vertices.assign(extension_vertices.begin(), extension_vertices.end());
    dtn.extension = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(extension_vertices.size()), na);
    for (std::size_t r = 0; r < extension_vertices.size(); ++r) {
        const int v = extension_vertices[r];
        if (v < 0 || v >= n) throw SolverError("dtn_reduce: extension vertex out of range");
        if (slot[v] >= 0) {
            dtn.extension(r, slot[v]) = 1.0;
        } else {
            dtn.extension.row(r) = -harmonic.row(-1 - slot[v]);
        }
    }
    return dtn;
}

SteklovSpectrum steklov_spectrum(const SurfaceMesh& mesh, const BoundaryDensity& rho, int count,
                                 const SpectrumOptions& options)
{
    check_compatible(mesh, rho);
    const std::vector<int> active = active_vertices(mesh, rho);
    if (count < 1 || count > static_cast<int>(active.size())) {
        throw std::invalid_argument("steklov_spectrum: count " + std::to_string(count) + " must be in [1, " +
                                    std::to_string(active.size()) + "]");
    }

    std::vector<int> boundary;
    for (const auto& loop : mesh.boundary_loops()) boundary.insert(boundary.end(), loop.begin(), loop.end());

    const DtnOperator dtn = dtn_reduce(assemble_stiffness(mesh), active, boundary, options.solver);
    const BoundaryMass mass = assemble_boundary_mass(mesh, rho, options.quadrature);

    const int na = static_cast<int>(active.size());
    std::vector<int> slot(mesh.vertex_count(), -1);
    for (int i = 0; i < na; ++i) slot[active[i]] = i;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(na, na);
    for (int col = 0; col < mass.matrix.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(mass.matrix, col); it; ++it) {
            M(slot[it.row()], slot[it.col()]) += it.value();
        }
    }

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(dtn.matrix, M,
                                                                     Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (solver.info() != Eigen::Success) {
        throw SolverError("steklov_spectrum: generalized eigensolve failed (boundary mass not positive definite?)");
    }

    SteklovSpectrum spectrum;
    spectrum.quadrature = options.quadrature;
    spectrum.active = active;
    spectrum.eigenvalues = solver.eigenvalues().head(count);
    spectrum.eigenvectors = solver.eigenvectors().leftCols(count);
    for (int j = 0; j < count; ++j) {
        auto u = spectrum.eigenvectors.col(j);
        for (int i = 0; i < na; ++i) {
            if (std::abs(u(i)) > 1e-8) {
                if (u(i) < 0) u = -u;
                break;
            }
        }
    }
    spectrum.residuals.resize(count);
    for (int j = 0; j < count; ++j) {
        const auto u = spectrum.eigenvectors.col(j);
        spectrum.residuals(j) = (dtn.matrix * u - spectrum.eigenvalues(j) * (M * u)).norm();
    }
    spectrum.boundary_vertices = boundary;
    spectrum.traces = dtn.extension * spectrum.eigenvectors;
    return spectrum;
}

std::vector<double> normalized_eigenvalues(const SteklovSpectrum& spectrum, const SurfaceMesh& mesh,
                                           const BoundaryDensity& rho)
{
    const double L = weighted_length(mesh, rho);
    std::vector<double> out(spectrum.count());
    for (int k = 0; k < spectrum.count(); ++k) out[k] = spectrum.sigma(k) * L;
    return out;
}

int cluster_size(const SteklovSpectrum& spectrum, double gap_tol)
{
    if (spectrum.count() < 2) return 0;
    const double s1 = spectrum.sigma(1);
    int size = 1;
    for (int j = 2; j < spectrum.count(); ++j) {
        if (spectrum.sigma(j) - s1 <= gap_tol * s1) ++size;
    }
    return size;
}

double edge_mass_density(const SteklovSpectrum& spectrum, const SurfaceMesh& mesh, int edge, int i, int j)
{
    const BoundaryEdge& e = mesh.boundary_edges().at(edge);
    const int ra = mesh.loop_edge_offset(e.loop) + e.position;
    const int rb = mesh.loop_edge_offset(e.loop) + mesh.boundary_position(e.to).second;
    const double ai = spectrum.traces(ra, i), bi = spectrum.traces(rb, i);
    const double aj = spectrum.traces(ra, j), bj = spectrum.traces(rb, j);
    if (spectrum.quadrature == MassQuadrature::lumped) return 0.5 * (ai * aj + bi * bj);
    return (2 * ai * aj + ai * bj + bi * aj + 2 * bi * bj) / 6;
}

EigenGradient eigenvalue_gradient(const SurfaceMesh& mesh, const BoundaryDensity& rho,
                                  const SteklovSpectrum& spectrum, double gap_tol)
{
    check_compatible(mesh, rho);
    if (spectrum.count() < 3) throw std::invalid_argument("eigenvalue_gradient: spectrum needs at least 3 pairs");
    EigenGradient grad;
    grad.sigma1 = spectrum.sigma(1);
    grad.sigma_bar1 = grad.sigma1 * weighted_length(mesh, rho);
    if (spectrum.sigma(2) - spectrum.sigma(1) <= gap_tol * spectrum.sigma(1)) {
        grad.degenerate = true;
        return grad;
    }
    const auto& edges = mesh.boundary_edges();
    grad.values.resize(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const double q = edge_mass_density(spectrum, mesh, static_cast<int>(e), 1, 1);
        grad.values[e] = edges[e].length * (grad.sigma1 - grad.sigma_bar1 * q);
    }
    return grad;
}

}  // namespace steklov
