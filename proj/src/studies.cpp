#include "steklov/studies.hpp"
#include "steklov/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

namespace steklov {

int study_threads()
{
    const char* env = std::getenv("STEKLOV_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 0) throw std::invalid_argument("STEKLOV_THREADS must be a nonnegative integer");
    return static_cast<int>(std::min<long>(n, 256));
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn)
{
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min(threads, count); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

namespace {

double first_sigma(const SurfaceMesh& mesh, const BoundaryDensity& rho)
{
    const int active = static_cast<int>(active_vertices(mesh, rho).size());
    return steklov_spectrum(mesh, rho, std::min(3, active)).sigma(1);
}

void sort_records(std::vector<ExperimentRecord>& records)
{
    std::stable_sort(records.begin(), records.end(), [](const ExperimentRecord& a, const ExperimentRecord& b) {
        if (a.experiment != b.experiment) return a.experiment < b.experiment;
        return a.parameters < b.parameters;
    });
}

void require_decreasing(const std::vector<double>& schedule, const char* what)
{
    if (schedule.empty()) throw std::invalid_argument(std::string(what) + ": empty schedule");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] > 0) || !std::isfinite(schedule[i])) {
            throw std::invalid_argument(std::string(what) + ": schedule values must be positive");
        }
        if (i > 0 && !(schedule[i] < schedule[i - 1])) {
            throw std::invalid_argument(std::string(what) + ": schedule must be strictly decreasing");
        }
    }
}

}  // namespace

DensityFamily heat_family(const SurfaceMesh& mesh, const BoundaryDensity& rho)
{
    return {"t", [&mesh, rho](double t) { return heat_smooth(mesh, rho, t).density; }};
}

BoundaryArc realizable_arc(const SurfaceMesh& mesh, LoopPoint center, double eps, double snap)
{
    const auto& loops = mesh.boundary_loops();
    if (center.loop < 0 || center.loop >= static_cast<int>(loops.size())) throw MeshError("arc: loop out of range");
    const int n = static_cast<int>(loops[center.loop].size());
    if (center.position < 0 || center.position >= n) throw MeshError("arc: center position out of range");
    if (!(eps > 0)) throw MeshError("arc: eps must be positive");
    if (2 * eps >= mesh.loop_length(center.loop) * (1 - snap)) {
        throw MeshError("arc: length 2*eps covers the whole boundary loop");
    }
    int best = -1;
    double best_error = 0.0;
    for (int m = 1; m < n; ++m) {
        const int start = ((center.position - m / 2) % n + n) % n;
        const BoundaryArc arc = make_arc(mesh, center.loop, start, m);
        const double error = std::abs(arc_length(mesh, arc) - 2 * eps) / (2 * eps);
        if (best < 0 || error < best_error) {
            best = m;
            best_error = error;
        }
    }
    if (best < 0 || best_error > snap) {
        throw MeshError("arc: no whole number of edges has length 2*eps = " + format_double(2 * eps));
    }
    return make_arc(mesh, center.loop, ((center.position - best / 2) % n + n) % n, best);
}

DensityFamily arc_family(const SurfaceMesh& mesh, const BoundaryDensity& rho, std::vector<LoopPoint> centers)
{
    return {"eps", [&mesh, rho, centers = std::move(centers)](double eps) {
                std::vector<BoundaryArc> arcs;
                for (const auto& c : centers) arcs.push_back(realizable_arc(mesh, c, eps));
                return zero_on_arcs(mesh, rho, arcs);
            }};
}

StudyResult convergence_study(const SurfaceMesh& mesh, const BoundaryDensity& rho, const std::vector<double>& schedule,
                              const DensityFamily& family, double tolerance, int threads)
{
    require_decreasing(schedule, "convergence_study");
    check_compatible(mesh, rho);
    const double sigma = first_sigma(mesh, rho);

    const int n = static_cast<int>(schedule.size());
    std::vector<double> sigma_p(n), l1(n);
    parallel_for(n, threads, [&](int i) {
        const BoundaryDensity rho_p = family.make(schedule[i]);
        l1[i] = l1_distance(mesh, rho_p, rho);
        sigma_p[i] = first_sigma(mesh, rho_p);
    });

    StudyResult result;
    double previous = 0.0;
    for (int i = 0; i < n; ++i) {
        const double error = std::abs(sigma_p[i] - sigma);
        ExperimentRecord r;
        r.experiment = "convergence_" + family.parameter;
        r.parameters[family.parameter] = schedule[i];
        r.parameters["step"] = i;
        r.observables["sigma1"] = sigma_p[i];
        r.observables["sigma1_limit"] = sigma;
        r.observables["error"] = error;
        r.observables["l1_distance"] = l1[i];
        r.observables["error_increase"] = i == 0 ? 0.0 : error - previous;
        bool pass = i == 0 || error <= previous + 1e-12 * sigma;
        if (i == n - 1) pass = pass && error <= tolerance * sigma;
        r.tolerance = tolerance;
        r.pass = pass;
        result.records.push_back(std::move(r));
        previous = error;
    }
    sort_records(result.records);
    return result;
}

std::vector<double> default_eps_schedule(const SurfaceMesh& mesh, LoopPoint center)
{
    std::vector<double> out;
    const int n = static_cast<int>(mesh.boundary_loops().at(center.loop).size());
    for (int m : {16, 8, 4, 2}) {
        if (m >= n) continue;
        const int start = ((center.position - m / 2) % n + n) % n;
        out.push_back(arc_length(mesh, make_arc(mesh, center.loop, start, m)) / 2);
    }
    return out;
}

StudyResult gluing_study(const SurfaceMesh& base, const BoundaryDensity& rho, const std::vector<double>& eps_schedule,
                         const GluingStudyConfig& cfg)
{
    require_decreasing(eps_schedule, "gluing_study");
    check_compatible(base, rho);
    if (base.boundary_loops().size() < 2) throw MeshError("gluing_study: base needs at least two boundary loops");
    const auto& p = cfg.placement;
    if (p.first.loop == p.second.loop) throw MeshError("gluing_study: arcs must lie on distinct loops");

    const double sigma = first_sigma(base, rho);
    const double sigma_bar = sigma * weighted_length(base, rho);
    const double h = base.mesh_size();
    const Topology top = base.topology();

    struct Sample
    {
        double eps_actual, sigma_tilde, sigma_eps, sigma_bar_eps;
        Topology top;
    };
    const int n = static_cast<int>(eps_schedule.size());
    std::vector<Sample> points(n);

    // Validate every eps before solving anything.
    std::vector<GluingSpec> specs;
    for (double eps : eps_schedule) {
        const BoundaryArc arc = realizable_arc(base, p.first, eps, cfg.snap);
        GluingSpec spec = centered_gluing(base, p.first.loop, p.first.position, p.second.loop, p.second.position,
                                          arc.edge_count());
        if (std::abs(spec.half_length - eps) > cfg.snap * eps) {
            throw MeshError("gluing_study: arcs for eps = " + format_double(eps) + " do not match on both loops");
        }
        specs.push_back(std::move(spec));
    }

    parallel_for(n, cfg.threads, [&](int i) {
        const GluingSpec& spec = specs[i];
        const std::vector<BoundaryArc> arcs{spec.arc1, spec.arc2};
        const BoundaryDensity rho_tilde = zero_on_arcs(base, rho, arcs);
        const GluedMesh glued = glue_segments_with_map(base, spec);
        std::vector<double> values(glued.boundary_edge_origin.size());
        for (std::size_t e = 0; e < values.size(); ++e) values[e] = rho[glued.boundary_edge_origin[e]];
        const BoundaryDensity rho_eps(std::move(values));
        const double s_eps = first_sigma(glued.mesh, rho_eps);
        points[i] = {spec.half_length, first_sigma(base, rho_tilde), s_eps,
                     s_eps * weighted_length(glued.mesh, rho_eps), glued.mesh.topology()};
    });

    StudyResult result;
    for (int i = 0; i < n; ++i) {
        const Sample& q = points[i];
        ExperimentRecord bracket;
        bracket.experiment = "gluing_bracket";
        bracket.parameters["eps"] = q.eps_actual;
        bracket.observables["sigma1_zeroed"] = q.sigma_tilde;
        bracket.observables["sigma1_glued"] = q.sigma_eps;
        bracket.observables["sigma1_base"] = sigma;
        bracket.observables["residual"] = q.sigma_tilde - q.sigma_eps;
        bracket.observables["genus"] = q.top.genus;
        bracket.observables["boundary_count"] = q.top.boundary_count;
        bracket.tolerance = cfg.bracket_tolerance;
        bracket.pass = q.sigma_tilde <= q.sigma_eps + cfg.bracket_tolerance * std::abs(q.sigma_eps) &&
                       q.top.genus == top.genus + 1 && q.top.boundary_count == top.boundary_count - 1;
        result.records.push_back(std::move(bracket));

        const double delta = cfg.delta_factor * (q.eps_actual + h);
        ExperimentRecord close;
        close.experiment = "gluing_closeness";
        close.parameters["eps"] = q.eps_actual;
        close.parameters["h"] = h;
        close.observables["sigma_bar1_glued"] = q.sigma_bar_eps;
        close.observables["sigma_bar1_base"] = sigma_bar;
        close.observables["difference"] = q.sigma_bar_eps - sigma_bar;
        close.observables["delta"] = delta;
        close.tolerance = delta;
        close.pass = q.sigma_bar_eps >= sigma_bar - delta;
        result.records.push_back(std::move(close));
    }
    sort_records(result.records);
    return result;
}

double observed_order(const std::vector<double>& h, const std::vector<double>& error)
{
    if (h.size() != error.size() || h.size() < 2) throw std::invalid_argument("observed_order: need >= 2 samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double x = std::log(h[i]);
        const double y = std::log(std::max(error[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

StudyResult weinstock_check(int refinements)
{
    if (refinements < 0 || refinements > 8) throw std::invalid_argument("weinstock_check: refinements must be in [0, 8]");
    const double target = 2 * std::numbers::pi;
    const int first = std::max(0, refinements - 2);

    StudyResult result;
    std::vector<double> hs, errors;
    for (int level = first; level <= refinements; ++level) {
        const SurfaceMesh disk = refined_disk(level);
        const BoundaryDensity rho = uniform_density(disk);
        const double sigma_bar = first_sigma(disk, rho) * weighted_length(disk, rho);
        const double error = std::abs(sigma_bar - target) / target;
        hs.push_back(disk.mesh_size());
        errors.push_back(error);

        ExperimentRecord r;
        r.experiment = "weinstock_level";
        r.parameters["level"] = level;
        r.parameters["h"] = disk.mesh_size();
        r.observables["sigma_bar1"] = sigma_bar;
        r.observables["target"] = target;
        r.observables["relative_error"] = error;
        r.observables["vertices"] = disk.vertex_count();
        r.tolerance = 0.02;
        r.pass = error <= r.tolerance;
        result.records.push_back(std::move(r));
    }

    ExperimentRecord summary;
    summary.experiment = "weinstock_summary";
    summary.parameters["level"] = refinements;
    summary.observables["relative_error"] = errors.back();
    summary.tolerance = 0.005;
    bool pass = errors.back() <= summary.tolerance;
    if (hs.size() >= 2) {
        const double order = observed_order(hs, errors);
        summary.observables["order"] = order;
        pass = pass && order >= 1.7;
    }
    summary.pass = pass;
    result.records.push_back(std::move(summary));

    const SurfaceMesh unit = refined_disk(first);
    const SurfaceMesh scaled = refined_disk(first, 2.5);
    const double a = first_sigma(unit, uniform_density(unit)) * unit.boundary_length();
    const double b = first_sigma(scaled, uniform_density(scaled)) * scaled.boundary_length();
    ExperimentRecord scale;
    scale.experiment = "weinstock_scaled";
    scale.parameters["level"] = first;
    scale.parameters["radius"] = 2.5;
    scale.observables["sigma_bar1_unit"] = a;
    scale.observables["sigma_bar1_scaled"] = b;
    scale.observables["relative_difference"] = std::abs(a - b) / a;
    scale.tolerance = 1e-10;
    scale.pass = std::abs(a - b) <= scale.tolerance * a;
    result.records.push_back(std::move(scale));

    sort_records(result.records);
    return result;
}

double critical_half_height(double tol)
{
    double lo = 1.0, hi = 2.0;
    auto f = [](double t) { return t * std::tanh(t) - 1.0; };
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

StudyResult catenoid_check(int refinements)
{
    if (refinements < 1 || refinements > 7) throw std::invalid_argument("catenoid_check: refinements must be in [1, 7]");
    const double t_star = critical_half_height();
    const double target = 4 * std::numbers::pi * std::tanh(t_star);

    const SurfaceMesh cylinder = build_cylinder(t_star, 1 << refinements, 1 << (refinements + 1));
    const BoundaryDensity rho = uniform_density(cylinder);
    const SteklovSpectrum spectrum = steklov_spectrum(cylinder, rho, 8);
    const double sigma_bar = spectrum.sigma(1) * weighted_length(cylinder, rho);

    StudyResult result;
    ExperimentRecord root;
    root.experiment = "catenoid_root";
    root.observables["half_height"] = t_star;
    root.observables["residual"] = t_star * std::tanh(t_star) - 1.0;
    root.tolerance = 1e-12;
    root.pass = std::abs(root.observables["residual"]) <= 1e-11;
    result.records.push_back(std::move(root));

    ExperimentRecord match;
    match.experiment = "catenoid_sigma_bar";
    match.parameters["level"] = refinements;
    match.parameters["h"] = cylinder.mesh_size();
    match.observables["sigma_bar1"] = sigma_bar;
    match.observables["target"] = target;
    match.observables["relative_error"] = std::abs(sigma_bar - target) / target;
    match.tolerance = 0.01;
    match.pass = match.observables["relative_error"] <= match.tolerance;
    result.records.push_back(std::move(match));

    ExperimentRecord cluster;
    cluster.experiment = "catenoid_cluster";
    cluster.parameters["level"] = refinements;
    cluster.parameters["gap_tol"] = kCatenoidGapTolerance;
    cluster.observables["multiplicity"] = cluster_size(spectrum, kCatenoidGapTolerance);
    cluster.observables["relative_spread"] = (spectrum.sigma(3) - spectrum.sigma(1)) / spectrum.sigma(1);
    cluster.tolerance = kCatenoidGapTolerance;
    cluster.pass = cluster.observables["multiplicity"] == 3;
    result.records.push_back(std::move(cluster));

    const MultiplicityReport bound = multiplicity_against_bound(spectrum, cylinder.topology(), kCatenoidGapTolerance);
    ExperimentRecord b;
    b.experiment = "catenoid_multiplicity_bound";
    b.parameters["level"] = refinements;
    b.observables["multiplicity"] = bound.multiplicity;
    b.observables["bound"] = bound.bound;
    b.tolerance = kCatenoidGapTolerance;
    b.pass = bound.within_bound;
    result.records.push_back(std::move(b));

    sort_records(result.records);
    return result;
}

}  // namespace steklov
