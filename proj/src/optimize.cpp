#include "steklov/optimize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace steklov {

std::string to_string(OptimizationStatus status)
{
    switch (status) {
    case OptimizationStatus::converged: return "converged";
    case OptimizationStatus::stalled: return "stalled";
    case OptimizationStatus::max_iterations: return "max_iterations";
    }
    return "unknown";
}

namespace {

double weighted_dot(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& len)
{
    double s = 0.0;
    for (std::size_t e = 0; e < a.size(); ++e) s += len[e] * a[e] * b[e];
    return s;
}

// Removes the length-weighted mean over the free edges and zeroes the rest.
std::vector<double> project_tangent(const std::vector<double>& v, const std::vector<bool>& free,
                                    const std::vector<double>& len)
{
    double num = 0.0, den = 0.0;
    for (std::size_t e = 0; e < v.size(); ++e) {
        if (!free[e]) continue;
        num += len[e] * v[e];
        den += len[e];
    }
    const double mean = den > 0 ? num / den : 0.0;
    std::vector<double> out(v.size(), 0.0);
    for (std::size_t e = 0; e < v.size(); ++e) {
        if (free[e]) out[e] = v[e] - mean;
    }
    return out;
}

// Minimum-norm point of { sum_ij Z_ij G_ij : Z >= 0, tr Z = 1 } by Frank-Wolfe.
std::vector<double> min_norm_cluster_element(const std::vector<std::vector<std::vector<double>>>& G,
                                             const std::vector<double>& len)
{
    const int m = static_cast<int>(G.size());
    const std::size_t n = len.size();
    auto combine = [&](const Eigen::MatrixXd& Z) {
        std::vector<double> out(n, 0.0);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                if (Z(i, j) == 0) continue;
                for (std::size_t e = 0; e < n; ++e) out[e] += Z(i, j) * G[i][j][e];
            }
        }
        return out;
    };

    Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(m, m) / m;
    std::vector<double> current = combine(Z);
    for (int iter = 0; iter < 2000; ++iter) {
        Eigen::MatrixXd H(m, m);
        for (int i = 0; i < m; ++i) {
            for (int j = i; j < m; ++j) H(i, j) = H(j, i) = weighted_dot(current, G[i][j], len);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        const Eigen::VectorXd v = es.eigenvectors().col(0);
        const Eigen::MatrixXd vertex = v * v.transpose();
        const std::vector<double> target = combine(vertex);

        std::vector<double> diff(n);
        for (std::size_t e = 0; e < n; ++e) diff[e] = current[e] - target[e];
        const double gap = weighted_dot(current, diff, len);
        const double norm2 = weighted_dot(current, current, len);
        if (gap <= 1e-12 * norm2 || gap <= 1e-300) break;
        const double gamma = std::clamp(gap / weighted_dot(diff, diff, len), 0.0, 1.0);
        Z = (1 - gamma) * Z + gamma * vertex;
        for (std::size_t e = 0; e < n; ++e) current[e] -= gamma * diff[e];
    }
    return current;
}

}  // namespace

AscentDirection ascent_direction(const SurfaceMesh& mesh, const BoundaryDensity& rho, const SteklovSpectrum& spectrum,
                                 double gap_tol, double floor)
{
    const auto& edges = mesh.boundary_edges();
    const std::size_t n = edges.size();
    std::vector<double> len(n);
    for (std::size_t e = 0; e < n; ++e) len[e] = edges[e].length;
    const double L = weighted_length(mesh, rho);

    AscentDirection out;
    out.multiplicity = std::max(1, cluster_size(spectrum, gap_tol));
    const int m = out.multiplicity;

    // Riesz representatives of the cluster's generalized gradients.
    std::vector<std::vector<std::vector<double>>> G(m, std::vector<std::vector<double>>(m, std::vector<double>(n)));
    double sigma_mean = 0.0;
    for (int i = 0; i < m; ++i) sigma_mean += spectrum.sigma(1 + i) / m;
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            const double sigma = i == j ? spectrum.sigma(1 + i) : sigma_mean;
            for (std::size_t e = 0; e < n; ++e) {
                const double q = edge_mass_density(spectrum, mesh, static_cast<int>(e), 1 + i, 1 + j);
                G[i][j][e] = (i == j ? sigma : 0.0) - sigma * L * q;
            }
            if (j != i) G[j][i] = G[i][j];
        }
    }

    double mean_rho = L / mesh.boundary_length();
    std::vector<bool> free(n, true);
    std::vector<double> d;
    for (int pass = 0; pass < static_cast<int>(n) + 1; ++pass) {
        auto projected = G;
        for (auto& row : projected) {
            for (auto& g : row) g = project_tangent(g, free, len);
        }
        d = m == 1 ? projected[0][0] : min_norm_cluster_element(projected, len);
        bool changed = false;
        for (std::size_t e = 0; e < n; ++e) {
            if (free[e] && rho[e] <= floor + 1e-14 * mean_rho && d[e] < 0) {
                free[e] = false;
                changed = true;
            }
        }
        if (!changed) break;
    }
    out.direction = std::move(d);
    out.norm = std::sqrt(weighted_dot(out.direction, out.direction, len));
    return out;
}

BoundaryDensity project_density(const SurfaceMesh& mesh, std::vector<double> values, double floor)
{
    if (floor < 0) throw DensityError("project_density: floor must be >= 0");
    if (floor * mesh.boundary_length() >= 1) throw DensityError("project_density: floor leaves no room for unit length");
    for (int pass = 0; pass < 100; ++pass) {
        for (double& v : values) v = std::max(v, floor);
        BoundaryDensity rho = normalize_length(mesh, BoundaryDensity(values), 1.0);
        values = rho.values();
        if (*std::min_element(values.begin(), values.end()) >= floor * (1 - 1e-12)) return rho;
    }
    for (double& v : values) v = std::max(v, floor);
    return BoundaryDensity(std::move(values));
}

OptimizationTrace maximize_density(const SurfaceMesh& mesh, const BoundaryDensity& rho0, const OptimizerConfig& cfg)
{
    if (cfg.max_iters < 1 || !(cfg.step > 0) || !(cfg.tol_grad > 0) || !(cfg.gap_tol > 0) || cfg.floor < 0 ||
        cfg.eigen_count < 3 || !(cfg.min_step > 0)) {
        throw std::invalid_argument("maximize_density: invalid optimizer configuration");
    }
    check_compatible(mesh, rho0);

    auto solve = [&](const BoundaryDensity& rho) {
        const int active = static_cast<int>(active_vertices(mesh, rho).size());
        return steklov_spectrum(mesh, rho, std::min(cfg.eigen_count, active));
    };

    BoundaryDensity rho = project_density(mesh, rho0.values(), cfg.floor);
    SteklovSpectrum spectrum = solve(rho);
    double value = spectrum.sigma(1) * weighted_length(mesh, rho);
    const double mean_rho = 1.0 / mesh.boundary_length();

    OptimizationTrace trace{{}, rho, value, 1, 0.0, OptimizationStatus::max_iterations, {}};
    if (cfg.keep_history) trace.history.push_back(rho);

    double step = cfg.step;
    for (int it = 0; it < cfg.max_iters; ++it) {
        const AscentDirection dir = ascent_direction(mesh, rho, spectrum, cfg.gap_tol, cfg.floor);
        trace.iterations.push_back({it, value, dir.norm, step, dir.multiplicity});
        if (dir.norm < cfg.tol_grad) {
            trace.status = OptimizationStatus::converged;
            break;
        }
        double dmax = 0.0;
        for (double x : dir.direction) dmax = std::max(dmax, std::abs(x));

        bool accepted = false;
        while (step >= cfg.min_step) {
            const double alpha = step * mean_rho / dmax;
            std::vector<double> trial = rho.values();
            for (std::size_t e = 0; e < trial.size(); ++e) trial[e] += alpha * dir.direction[e];
            BoundaryDensity candidate = project_density(mesh, std::move(trial), cfg.floor);
            SteklovSpectrum candidate_spectrum = solve(candidate);
            const double candidate_value = candidate_spectrum.sigma(1) * weighted_length(mesh, candidate);
            if (candidate_value >= value + 1e-4 * alpha * dir.norm * dir.norm) {
                rho = std::move(candidate);
                spectrum = std::move(candidate_spectrum);
                value = candidate_value;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            trace.status = OptimizationStatus::stalled;
            break;
        }
        if (cfg.keep_history) trace.history.push_back(rho);
        step = std::min(2 * step, cfg.step);
    }

    trace.final_density = rho;
    trace.final_sigma_bar1 = value;
    trace.final_multiplicity = std::max(1, cluster_size(spectrum, cfg.gap_tol));
    trace.final_relative_gap =
        spectrum.count() > 2 ? (spectrum.sigma(2) - spectrum.sigma(1)) / spectrum.sigma(1) : 0.0;
    return trace;
}

int multiplicity_report(const SteklovSpectrum& spectrum, double gap_tol)
{
    return cluster_size(spectrum, gap_tol);
}

MultiplicityReport multiplicity_against_bound(const SteklovSpectrum& spectrum, const Topology& topology, double gap_tol)
{
    MultiplicityReport r;
    r.multiplicity = multiplicity_report(spectrum, gap_tol);
    r.bound = 4 * topology.genus + 2 * topology.boundary_count;
    if (topology.genus >= 2) r.bound = std::min(r.bound, 2 * topology.genus + 3);
    r.within_bound = r.multiplicity <= r.bound;
    return r;
}

ImmersionReport candidate_immersion(const SurfaceMesh& mesh, const BoundaryDensity& rho, double gap_tol,
                                    int eigen_count)
{
    const int active = static_cast<int>(active_vertices(mesh, rho).size());
    const SteklovSpectrum spectrum = steklov_spectrum(mesh, rho, std::min(eigen_count, active));
    ImmersionReport report;
    const int n = cluster_size(spectrum, gap_tol);
    report.dimension = n;
    if (n < 2) {
        report.message = "no candidate: sigma_1 is simple";
        return report;
    }
    report.candidate = true;

    // Unknowns: upper triangle of A. Row per active vertex: Phi^T A Phi = 1.
    const int unknowns = n * (n + 1) / 2;
    const int na = static_cast<int>(spectrum.active.size());
    Eigen::MatrixXd system(na, unknowns);
    for (int r = 0; r < na; ++r) {
        const auto phi = spectrum.eigenvectors.row(r);
        int c = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) system(r, c++) = (i == j ? 1.0 : 2.0) * phi(1 + i) * phi(1 + j);
        }
    }
    const Eigen::VectorXd coeffs = system.colPivHouseholderQr().solve(Eigen::VectorXd::Ones(na));
    report.form.resize(n, n);
    int c = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) report.form(i, j) = report.form(j, i) = coeffs(c++);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(report.form);
    report.form_positive = es.eigenvalues().minCoeff() > 0;

    const Eigen::VectorXd fitted = system * coeffs;
    for (int r = 0; r < na; ++r) {
        report.max_deviation = std::max(report.max_deviation, std::abs(std::sqrt(std::max(fitted(r), 0.0)) - 1.0));
    }
    report.message = report.form_positive ? "first eigenfunctions fitted to the unit sphere"
                                          : "fitted form is not positive definite";
    return report;
}

}  // namespace steklov
