#include "steklov/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace steklov {

BoundaryDensity::BoundaryDensity(std::vector<double> values) : values_(std::move(values))
{
    bool positive = false;
    for (std::size_t e = 0; e < values_.size(); ++e) {
        const double v = values_[e];
        if (!std::isfinite(v) || v < 0) {
            throw DensityError("density value " + std::to_string(v) + " on edge " + std::to_string(e) +
                               " is negative or not finite");
        }
        positive = positive || v > 0;
    }
    if (!positive) throw DensityError("density is identically zero");
}

BoundaryDensity BoundaryDensity::scaled(double factor) const
{
    if (!(factor > 0) || !std::isfinite(factor)) throw DensityError("density scale factor must be positive");
    std::vector<double> v = values_;
    for (double& x : v) x *= factor;
    return BoundaryDensity(std::move(v));
}

ConformalFactor::ConformalFactor(const SurfaceMesh& mesh, std::vector<double> values) : values_(std::move(values))
{
    if (static_cast<int>(values_.size()) != mesh.vertex_count()) {
        throw DensityError("conformal factor needs one value per vertex");
    }
    for (double v : values_) {
        if (!std::isfinite(v) || v < 0) throw DensityError("conformal factor values must be finite and >= 0");
    }
    for (const Triangle& t : mesh.triangles()) {
        for (int k = 0; k < 3; ++k) {
            if (values_[t[k]] == 0 && values_[t[(k + 1) % 3]] == 0) {
                throw DensityError("conformal factor vanishes on the whole edge (" + std::to_string(t[k]) + ", " +
                                   std::to_string(t[(k + 1) % 3]) + "); zeros must be isolated");
            }
        }
    }
}

void check_compatible(const SurfaceMesh& mesh, const BoundaryDensity& rho)
{
    if (static_cast<int>(rho.size()) != mesh.boundary_edge_count()) {
        throw DensityError("density has " + std::to_string(rho.size()) + " values but the mesh has " +
                           std::to_string(mesh.boundary_edge_count()) + " boundary edges");
    }
}

BoundaryDensity uniform_density(const SurfaceMesh& mesh)
{
    return BoundaryDensity(std::vector<double>(mesh.boundary_edge_count(), 1.0));
}

double weighted_length(const SurfaceMesh& mesh, const BoundaryDensity& rho)
{
    check_compatible(mesh, rho);
    double sum = 0.0;
    const auto& edges = mesh.boundary_edges();
    for (std::size_t e = 0; e < edges.size(); ++e) sum += rho[e] * edges[e].length;
    return sum;
}

double loop_mass(const SurfaceMesh& mesh, const BoundaryDensity& rho, int loop)
{
    check_compatible(mesh, rho);
    const int begin = mesh.loop_edge_offset(loop);
    const int end = begin + static_cast<int>(mesh.boundary_loops()[loop].size());
    double sum = 0.0;
    for (int e = begin; e < end; ++e) sum += rho[e] * mesh.boundary_edges()[e].length;
    return sum;
}

namespace {

// Tail part of the second antiderivative of the Gaussian of standard
// deviation s: H(z) = z Phi(z/s) + s phi(z/s) = max(z, 0) + tail(z).
double gaussian_tail(double z, double s)
{
    const double w = std::abs(z) / s;
    const double pdf = std::exp(-0.5 * w * w) / std::sqrt(2 * std::numbers::pi);
    const double upper = 0.5 * std::erfc(w / std::numbers::sqrt2);
    return s * (pdf - w * upper);
}

// Integral over x in [a1, b1], y in [a2, b2] of G_s(x - y).
double interval_coupling(double a1, double b1, double a2, double b2, double s)
{
    const double overlap = std::max(0.0, std::min(b1, b2) - std::max(a1, a2));
    const double tails = gaussian_tail(b1 - a2, s) - gaussian_tail(a1 - a2, s) - gaussian_tail(b1 - b2, s) +
                         gaussian_tail(a1 - b2, s);
    return std::max(0.0, overlap + tails);
}

}  // namespace

HeatSmoothResult heat_smooth(const SurfaceMesh& mesh, const BoundaryDensity& rho, double t)
{
    check_compatible(mesh, rho);
    if (!(t > 0) || !std::isfinite(t)) throw DensityError("heat_smooth: t must be positive");

    std::vector<double> out(rho.size(), 0.0);
    std::vector<int> massless;
    const double s = std::sqrt(2 * t);
    const auto& edges = mesh.boundary_edges();

    for (int l = 0; l < static_cast<int>(mesh.boundary_loops().size()); ++l) {
        const int offset = mesh.loop_edge_offset(l);
        const int n = static_cast<int>(mesh.boundary_loops()[l].size());
        const double mass = loop_mass(mesh, rho, l);
        if (mass == 0) {
            massless.push_back(l);
            continue;
        }
        std::vector<double> start(n + 1, 0.0);
        for (int j = 0; j < n; ++j) start[j + 1] = start[j] + edges[offset + j].length;
        const double period = start[n];

        // Beyond this the first Fourier mode of the kernel is below 1e-17.
        if (4 * std::numbers::pi * std::numbers::pi * t / (period * period) > 40) {
            for (int j = 0; j < n; ++j) out[offset + j] = mass / period;
            continue;
        }

        const double reach = s < period / 8 ? 40 * s : 10 * s;
        const int images = static_cast<int>(std::ceil(reach / period)) + 1;
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) {
                const double value = rho[offset + j];
                if (value == 0) continue;
                double w = 0.0;
                for (int k = -images; k <= images; ++k) {
                    w += interval_coupling(start[i], start[i + 1], start[j] + k * period, start[j + 1] + k * period, s);
                }
                acc += value * w;
            }
            out[offset + i] = acc / (start[i + 1] - start[i]);
        }
    }
    return {BoundaryDensity(std::move(out)), std::move(massless)};
}

BoundaryDensity zero_on_arcs(const SurfaceMesh& mesh, const BoundaryDensity& rho, std::span<const BoundaryArc> arcs)
{
    check_compatible(mesh, rho);
    std::vector<double> v = rho.values();
    for (const BoundaryArc& arc : arcs) {
        for (int e : arc_edges(mesh, arc)) v[e] = 0.0;
    }
    if (std::none_of(v.begin(), v.end(), [](double x) { return x > 0; })) {
        throw DensityError("zero_on_arcs: result would be identically zero");
    }
    return BoundaryDensity(std::move(v));
}

BoundaryDensity push_conformal(const SurfaceMesh& mesh, const ConformalFactor& f, const BoundaryDensity& rho)
{
    check_compatible(mesh, rho);
    if (static_cast<int>(f.values().size()) != mesh.vertex_count()) {
        throw DensityError("push_conformal: conformal factor does not match the mesh");
    }
    std::vector<double> v(rho.size());
    const auto& edges = mesh.boundary_edges();
    for (std::size_t e = 0; e < edges.size(); ++e) v[e] = rho[e] * 0.5 * (f[edges[e].from] + f[edges[e].to]);
    if (std::none_of(v.begin(), v.end(), [](double x) { return x > 0; })) {
        throw DensityError("push_conformal: result is identically zero");
    }
    return BoundaryDensity(std::move(v));
}

double l1_distance(const SurfaceMesh& mesh, const BoundaryDensity& a, const BoundaryDensity& b)
{
    check_compatible(mesh, a);
    check_compatible(mesh, b);
    double sum = 0.0;
    const auto& edges = mesh.boundary_edges();
    for (std::size_t e = 0; e < edges.size(); ++e) sum += std::abs(a[e] - b[e]) * edges[e].length;
    return sum;
}

BoundaryDensity normalize_length(const SurfaceMesh& mesh, const BoundaryDensity& rho, double length)
{
    return rho.scaled(length / weighted_length(mesh, rho));
}

}  // namespace steklov
