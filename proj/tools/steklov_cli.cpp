#include "steklov/density.hpp"
#include "steklov/mesh.hpp"
#include "steklov/mesh_io.hpp"
#include "steklov/optimize.hpp"
#include "steklov/records.hpp"
#include "steklov/spectral.hpp"
#include "steklov/studies.hpp"
#include "steklov/svg_plot.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace steklov;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

class UsageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct Common
{
    std::string mesh;
    std::string density;
    std::string out;
    std::string format;
    int refine = -1;
    std::string eps_schedule;
    std::uint64_t seed = 0;
    bool seeded = false;
};

void emit(const std::string& out, const std::string& text)
{
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream file(out);
    if (!file) throw UsageError("cannot write " + out);
    file << text;
}

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("malformed number '" + item + "' in list '" + text + "'");
        }
    }
    if (out.empty()) throw UsageError("empty list");
    return out;
}

SurfaceMesh require_mesh(const Common& c)
{
    if (c.mesh.empty()) throw UsageError("--mesh is required");
    return load_mesh(c.mesh);
}

BoundaryDensity density_or_uniform(const Common& c, const SurfaceMesh& mesh)
{
    return c.density.empty() ? uniform_density(mesh) : load_density(c.density, mesh);
}

std::string render_records(const std::vector<ExperimentRecord>& records, const std::string& format)
{
    std::ostringstream os;
    if (format == "json") {
        os << records_to_json(records).dump(2) << '\n';
    } else {
        write_records_csv(os, records);
    }
    return os.str();
}

int finish_study(const StudyResult& result, const Common& c)
{
    emit(c.out, render_records(result.records, c.format));
    return result.pass() ? kPass : kFail;
}

std::string mesh_text(const SurfaceMesh& mesh)
{
    std::ostringstream os;
    write_mesh(os, mesh);
    return os.str();
}

nlohmann::json topology_json(const Topology& t)
{
    return {{"genus", t.genus}, {"boundary_count", t.boundary_count}, {"euler", t.euler}};
}

// Density with the half of every loop before its midpoint at 1 and the rest at `low`.
BoundaryDensity half_loop_density(const SurfaceMesh& mesh, double low)
{
    std::vector<double> v(mesh.boundary_edge_count());
    for (std::size_t l = 0; l < mesh.boundary_loops().size(); ++l) {
        const int n = static_cast<int>(mesh.boundary_loops()[l].size());
        const int offset = mesh.loop_edge_offset(static_cast<int>(l));
        for (int i = 0; i < n; ++i) v[offset + i] = 2 * i < n ? 1.0 : low;
    }
    return BoundaryDensity(std::move(v));
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Steklov eigenvalue optimization lab"};
    app.require_subcommand(1);
    Common c;
    std::function<int()> action;

    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--out", c.out, "Output path (default: stdout)");
        sub->add_option("--format", c.format, "Output format (studies: csv, solves: json)")->check(CLI::IsMember({"json", "csv"}));
    };

    // mesh
    auto* mesh_cmd = app.add_subcommand("mesh", "Build, modify and validate mesh files");
    mesh_cmd->require_subcommand(1);

    std::string shape = "disk";
    double radius = 1.0, half_height = 1.0;
    auto* build = mesh_cmd->add_subcommand("build", "Write a disk or cylinder mesh");
    build->add_option("--shape", shape)->check(CLI::IsMember({"disk", "cylinder"}));
    build->add_option("--refine", c.refine, "Refinement level")->check(CLI::Range(0, 8));
    build->add_option("--radius", radius, "Disk radius")->check(CLI::PositiveNumber);
    build->add_option("--half-height", half_height, "Cylinder half-height")->check(CLI::PositiveNumber);
    build->add_option("--out", c.out, "Output mesh path (default: stdout)");
    build->callback([&] {
        action = [&] {
            const int level = c.refine < 0 ? 3 : c.refine;
            const SurfaceMesh mesh = shape == "disk" ? refined_disk(level, radius)
                                                     : build_cylinder(half_height, 1 << level, 1 << (level + 2));
            emit(c.out, mesh_text(mesh));
            return kPass;
        };
    });

    std::vector<int> loops{0, 1}, centers{0, 0};
    int edges = 2;
    auto* glue = mesh_cmd->add_subcommand("glue", "Glue two boundary arcs on distinct loops");
    glue->add_option("--mesh", c.mesh, "Input mesh")->required();
    glue->add_option("--loops", loops, "Two loop indices")->expected(2)->delimiter(',');
    glue->add_option("--centers", centers, "Arc center positions on each loop")->expected(2)->delimiter(',');
    glue->add_option("--edges", edges, "Edges per arc")->check(CLI::PositiveNumber);
    glue->add_option("--out", c.out, "Output mesh path (default: stdout)");
    glue->callback([&] {
        action = [&] {
            const SurfaceMesh mesh = require_mesh(c);
            const GluingSpec spec = centered_gluing(mesh, loops[0], centers[0], loops[1], centers[1], edges);
            emit(c.out, mesh_text(glue_segments(mesh, spec)));
            return kPass;
        };
    });

    int vertex = -1;
    auto* punct = mesh_cmd->add_subcommand("puncture", "Remove the star of an interior vertex");
    punct->add_option("--mesh", c.mesh, "Input mesh")->required();
    punct->add_option("--vertex", vertex, "Interior vertex (default: first puncturable)");
    punct->add_option("--out", c.out, "Output mesh path (default: stdout)");
    punct->callback([&] {
        action = [&] {
            const SurfaceMesh mesh = require_mesh(c);
            int v = vertex;
            if (v < 0) {
                const auto candidates = puncturable_vertices(mesh);
                if (candidates.empty()) throw MeshError("mesh has no puncturable vertex");
                v = candidates.front();
            }
            emit(c.out, mesh_text(puncture(mesh, v)));
            return kPass;
        };
    });

    auto* validate = mesh_cmd->add_subcommand("validate", "Check a mesh file and print its topology");
    validate->add_option("--mesh", c.mesh, "Input mesh")->required();
    validate->add_option("--out", c.out, "Output path (default: stdout)");
    validate->callback([&] {
        action = [&] {
            const SurfaceMesh mesh = require_mesh(c);
            nlohmann::json j = topology_json(mesh.topology());
            j["vertices"] = mesh.vertex_count();
            j["triangles"] = mesh.triangle_count();
            j["boundary_edges"] = mesh.boundary_edge_count();
            j["boundary_length"] = mesh.boundary_length();
            j["mesh_size"] = mesh.mesh_size();
            emit(c.out, j.dump(2) + "\n");
            return kPass;
        };
    });

    // spectrum
    int count = 8;
    bool lumped = false;
    auto* spectrum_cmd = app.add_subcommand("spectrum", "Steklov eigenvalues of a mesh and density");
    spectrum_cmd->add_option("--mesh", c.mesh, "Input mesh")->required();
    spectrum_cmd->add_option("--density", c.density, "Density CSV (default: uniform)");
    spectrum_cmd->add_option("--count", count, "Number of eigenvalues")->check(CLI::PositiveNumber);
    spectrum_cmd->add_flag("--lumped", lumped, "Lumped boundary mass");
    add_output(spectrum_cmd);
    spectrum_cmd->callback([&] {
        action = [&] {
            const SurfaceMesh mesh = require_mesh(c);
            const BoundaryDensity rho = density_or_uniform(c, mesh);
            const int active = static_cast<int>(active_vertices(mesh, rho).size());
            SpectrumOptions opts;
            if (lumped) opts.quadrature = MassQuadrature::lumped;
            const SteklovSpectrum s = steklov_spectrum(mesh, rho, std::min(count, active), opts);
            const std::vector<double> bar = normalized_eigenvalues(s, mesh, rho);
            std::ostringstream os;
            if (c.format == "csv") {
                os << "k,sigma,sigma_bar,residual\n";
                for (int k = 0; k < s.count(); ++k) {
                    os << k << ',' << format_double(s.sigma(k)) << ',' << format_double(bar[k]) << ','
                       << format_double(s.residuals[k]) << '\n';
                }
            } else {
                nlohmann::json j;
                j["sigma"] = std::vector<double>(s.eigenvalues.data(), s.eigenvalues.data() + s.count());
                j["sigma_bar"] = bar;
                j["residuals"] = std::vector<double>(s.residuals.data(), s.residuals.data() + s.residuals.size());
                j["weighted_length"] = weighted_length(mesh, rho);
                j["multiplicity"] = multiplicity_report(s);
                j["active_vertices"] = s.active.size();
                j["topology"] = topology_json(mesh.topology());
                os << j.dump(2) << '\n';
            }
            emit(c.out, os.str());
            return kPass;
        };
    });

    // optimize
    OptimizerConfig opt;
    std::string final_density_path;
    auto* optimize_cmd = app.add_subcommand("optimize", "Maximize sigma_bar_1 over boundary densities");
    optimize_cmd->add_option("--mesh", c.mesh, "Input mesh")->required();
    optimize_cmd->add_option("--density", c.density, "Initial density CSV (default: uniform or random)");
    optimize_cmd->add_option("--seed", c.seed, "Random initial density in [0.5, 1.5] per edge");
    optimize_cmd->add_option("--max-iters", opt.max_iters)->check(CLI::PositiveNumber);
    optimize_cmd->add_option("--step", opt.step)->check(CLI::PositiveNumber);
    optimize_cmd->add_option("--gap-tol", opt.gap_tol)->check(CLI::PositiveNumber);
    optimize_cmd->add_option("--floor", opt.floor)->check(CLI::NonNegativeNumber);
    optimize_cmd->add_option("--save-density", final_density_path, "Write the final density CSV");
    add_output(optimize_cmd);
    optimize_cmd->callback([&] {
        c.seeded = optimize_cmd->count("--seed") > 0;
        action = [&] {
            const SurfaceMesh mesh = require_mesh(c);
            BoundaryDensity rho0 = uniform_density(mesh);
            if (!c.density.empty()) {
                rho0 = load_density(c.density, mesh);
            } else if (c.seeded) {
                std::mt19937_64 rng(c.seed);
                std::uniform_real_distribution<double> dist(0.5, 1.5);
                std::vector<double> v(mesh.boundary_edge_count());
                for (double& x : v) x = dist(rng);
                rho0 = BoundaryDensity(std::move(v));
            }
            const double initial = steklov_spectrum(mesh, rho0, 3).sigma(1) * weighted_length(mesh, rho0);
            const OptimizationTrace trace = maximize_density(mesh, rho0, opt);
            if (!final_density_path.empty()) save_density(final_density_path, mesh, trace.final_density);

            std::ostringstream os;
            if (c.format == "csv") {
                os << "iteration,sigma_bar1,grad_norm,step,multiplicity\n";
                for (const auto& it : trace.iterations) {
                    os << it.iteration << ',' << format_double(it.sigma_bar1) << ',' << format_double(it.grad_norm)
                       << ',' << format_double(it.step) << ',' << it.multiplicity << '\n';
                }
            } else {
                nlohmann::json j;
                j["initial_sigma_bar1"] = initial;
                j["final_sigma_bar1"] = trace.final_sigma_bar1;
                j["final_multiplicity"] = trace.final_multiplicity;
                j["final_relative_gap"] = trace.final_relative_gap;
                j["status"] = to_string(trace.status);
                j["iterations"] = trace.iterations.size();
                j["final_density"] = trace.final_density.values();
                os << j.dump(2) << '\n';
            }
            emit(c.out, os.str());
            return trace.final_sigma_bar1 >= initial * (1 - 1e-9) ? kPass : kFail;
        };
    });

    // study
    auto* study = app.add_subcommand("study", "Run a study and emit its records");
    study->require_subcommand(1);

    std::string family = "arcs";
    auto* conv = study->add_subcommand("convergence", "sigma_1 along a density family converging in L1");
    conv->add_option("--mesh", c.mesh, "Input mesh (default: refined disk)");
    conv->add_option("--density", c.density, "Limit density CSV");
    conv->add_option("--refine", c.refine, "Disk refinement level when no mesh is given")->check(CLI::Range(0, 7));
    conv->add_option("--family", family)->check(CLI::IsMember({"arcs", "heat"}));
    conv->add_option("--eps-schedule", c.eps_schedule, "Decreasing parameter values a,b,c");
    add_output(conv);
    conv->callback([&] {
        action = [&] {
            const SurfaceMesh mesh = c.mesh.empty() ? refined_disk(c.refine < 0 ? 3 : c.refine) : load_mesh(c.mesh);
            BoundaryDensity rho = c.density.empty() ? (family == "heat" ? half_loop_density(mesh, 0.05)
                                                                        : uniform_density(mesh))
                                                    : load_density(c.density, mesh);
            if (family == "heat") {
                const auto schedule = c.eps_schedule.empty()
                                          ? std::vector<double>{0.4, 0.2, 0.1, 0.05, 0.01, 1e-3, 1e-4, 1e-5, 1e-6}
                                          : parse_list(c.eps_schedule);
                return finish_study(
                    convergence_study(mesh, rho, schedule, heat_family(mesh, rho), 1e-3, study_threads()), c);
            }
            const int n = static_cast<int>(mesh.boundary_loops()[0].size());
            const auto schedule =
                c.eps_schedule.empty() ? default_eps_schedule(mesh) : parse_list(c.eps_schedule);
            const DensityFamily fam = arc_family(mesh, rho, {{0, 0}, {0, n / 2}});
            return finish_study(convergence_study(mesh, rho, schedule, fam, 1e-3, study_threads()), c);
        };
    });

    GluingStudyConfig gcfg;
    auto* gl = study->add_subcommand("gluing", "Bracketing and closeness under boundary gluing");
    gl->add_option("--mesh", c.mesh, "Base mesh with at least two loops (default: cylinder)");
    gl->add_option("--density", c.density, "Density CSV (default: uniform)");
    gl->add_option("--refine", c.refine, "Cylinder refinement level when no mesh is given")->check(CLI::Range(1, 6));
    gl->add_option("--eps-schedule", c.eps_schedule, "Decreasing half-lengths a,b,c");
    gl->add_option("--delta-factor", gcfg.delta_factor, "delta(eps) = factor * (eps + h)");
    add_output(gl);
    gl->callback([&] {
        action = [&] {
            const int level = c.refine < 0 ? 3 : c.refine;
            const SurfaceMesh mesh =
                c.mesh.empty() ? build_cylinder(1.0, 1 << level, 1 << (level + 2)) : load_mesh(c.mesh);
            const BoundaryDensity rho = density_or_uniform(c, mesh);
            const auto schedule = c.eps_schedule.empty() ? default_eps_schedule(mesh) : parse_list(c.eps_schedule);
            gcfg.threads = study_threads();
            return finish_study(gluing_study(mesh, rho, schedule, gcfg), c);
        };
    });

    auto* wein = study->add_subcommand("weinstock", "Disk sigma_bar_1 against 2*pi");
    wein->add_option("--refine", c.refine, "Finest disk level")->check(CLI::Range(0, 8));
    add_output(wein);
    wein->callback([&] { action = [&] { return finish_study(weinstock_check(c.refine < 0 ? 5 : c.refine), c); }; });

    auto* cat = study->add_subcommand("catenoid", "Critical cylinder against 4*pi*tanh(T*)");
    cat->add_option("--refine", c.refine, "Cylinder level")->check(CLI::Range(1, 7));
    add_output(cat);
    cat->callback([&] { action = [&] { return finish_study(catenoid_check(c.refine < 0 ? 5 : c.refine), c); }; });

    // plot
    std::string records_path, x_col = "param.eps", y_col = "obs.error", title;
    PlotOptions plot_opts;
    auto* plot = app.add_subcommand("plot", "Render a records CSV as an SVG line chart");
    plot->add_option("--records", records_path, "Records CSV")->required();
    plot->add_option("--x", x_col, "x column");
    plot->add_option("--y", y_col, "y column");
    plot->add_option("--title", plot_opts.title);
    plot->add_flag("--log-x", plot_opts.log_x);
    plot->add_flag("--log-y", plot_opts.log_y);
    plot->add_option("--out", c.out, "Output SVG path (default: stdout)");
    plot->callback([&] {
        action = [&] {
            std::ifstream in(records_path);
            if (!in) throw FormatError(records_path + ": cannot open");
            const auto records = read_records_csv(in);
            plot_opts.x_label = x_col;
            plot_opts.y_label = y_col;
            const auto series = series_from_records(records, x_col, y_col);
            if (series.empty()) throw UsageError("no records carry both " + x_col + " and " + y_col);
            std::ostringstream os;
            write_svg_line_chart(os, series, plot_opts);
            emit(c.out, os.str());
            return kPass;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }

    try {
        return action ? action() : kUsage;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
    } catch (const MeshError& e) {
        std::cerr << "error: " << e.what() << '\n';
    } catch (const DensityError& e) {
        std::cerr << "error: " << e.what() << '\n';
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return kUsage;
}
