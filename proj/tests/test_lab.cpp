#include "oracles.hpp"

#include "steklov/mesh_io.hpp"
#include "steklov/studies.hpp"
#include "steklov/svg_plot.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace steklov;

namespace {

std::string csv(const std::vector<ExperimentRecord>& records)
{
    std::ostringstream os;
    write_records_csv(os, records);
    return os.str();
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(STEKLOV_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "steklov_lab_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("records round trip through CSV and JSON")
{
    std::vector<ExperimentRecord> records{
        {"alpha", {{"eps", 0.1}, {"level", 3}}, {{"sigma", 1.0 / 3.0}, {"gap", -2.5e-17}}, 1e-9, true},
        {"beta", {{"t", 1e-6}}, {{"sigma", 6.283185307179586}}, 0.01, false},
        {"alpha", {}, {}, 0.0, true},
    };
    std::istringstream in(csv(records));
    CHECK(read_records_csv(in) == records);
    CHECK(records_from_json(records_to_json(records)) == records);
    CHECK(nlohmann::json::parse(records_to_json(records).dump())["pass"] == false);
}

TEST_CASE("records CSV errors carry line numbers")
{
    auto message = [](const std::string& text) {
        std::istringstream in(text);
        try {
            read_records_csv(in);
        } catch (const FormatError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message("").find("line 1") != std::string::npos);
    CHECK(message("experiment,foo,tolerance,pass\n").find("line 1") != std::string::npos);
    CHECK(message("experiment,obs.x,tolerance,pass\na,1,0.1,true\nb,zz,0.1,true\n").find("line 3") != std::string::npos);
    CHECK(message("experiment,obs.x,tolerance,pass\na,1,0.1\n").find("line 2") != std::string::npos);
    CHECK(message("experiment,obs.x,tolerance,pass\na,1,0.1,maybe\n").find("line 2") != std::string::npos);
}

TEST_CASE("critical half height")
{
    const double t = critical_half_height();
    CHECK(std::abs(t - oracle::critical_half_height()) < 1e-11);
    CHECK(std::abs(t - 1.19968) < 1e-5);
}

TEST_CASE("observed order of a synthetic power law")
{
    const std::vector<double> h{0.4, 0.2, 0.1, 0.05};
    std::vector<double> e;
    for (double x : h) e.push_back(3.0 * x * x);
    CHECK(observed_order(h, e) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS(observed_order({0.1}, {0.2}));
}

TEST_CASE("weinstock check at a coarse level")
{
    const StudyResult r = weinstock_check(3);
    CHECK(r.pass());
    for (const auto& rec : r.records) {
        if (rec.experiment == "weinstock_level" && rec.parameters.at("level") == 3) {
            CHECK(rec.observables.at("relative_error") < 0.02);
        }
        if (rec.experiment == "weinstock_scaled") CHECK(rec.observables.at("relative_difference") < 1e-10);
    }
    CHECK_THROWS(weinstock_check(-1));
}

TEST_CASE("catenoid check at a coarse level")
{
    const StudyResult r = catenoid_check(4);
    CHECK(r.pass());
}

TEST_CASE("convergence study: a constant family has zero error")
{
    const SurfaceMesh disk = refined_disk(2);
    const BoundaryDensity u = uniform_density(disk);
    const StudyResult r = convergence_study(disk, u, {0.4, 0.2, 0.1, 0.05}, heat_family(disk, u));
    CHECK(r.pass());
    for (const auto& rec : r.records) CHECK(rec.observables.at("error") < 1e-10);
}

TEST_CASE("convergence study: zeroed arcs")
{
    const SurfaceMesh disk = refined_disk(3);
    const BoundaryDensity u = uniform_density(disk);
    const auto schedule = default_eps_schedule(disk);
    const StudyResult r = convergence_study(disk, u, schedule, arc_family(disk, u, {{0, 0}, {0, 32}}));
    CHECK(r.pass());
    for (const auto& rec : r.records) {
        // Two arcs of length 2 eps each.
        CHECK(rec.observables.at("l1_distance") == doctest::Approx(4 * rec.parameters.at("eps")).epsilon(1e-12));
    }
    CHECK_THROWS(convergence_study(disk, u, {0.1, 0.2}, arc_family(disk, u, {{0, 0}})));
}

TEST_CASE("convergence study flags a non-monotone schedule")
{
    const SurfaceMesh disk = refined_disk(2);
    const BoundaryDensity u = uniform_density(disk);
    // A family that moves away from its limit as the parameter decreases.
    std::vector<double> v(disk.boundary_edge_count(), 1.0);
    for (std::size_t e = 0; e < v.size() / 2; ++e) v[e] = 0.1;
    const BoundaryDensity half(v);
    DensityFamily widening{"t", [&](double t) { return heat_smooth(disk, half, 0.01 / t).density; }};
    const StudyResult r = convergence_study(disk, half, {1.0, 0.5, 0.25}, widening);
    CHECK_FALSE(r.pass());
}

TEST_CASE("gluing study: bracketing and rejected schedules")
{
    const SurfaceMesh cyl = build_cylinder(1.0, 4, 16);
    const BoundaryDensity u = uniform_density(cyl);
    const StudyResult r = gluing_study(cyl, u, default_eps_schedule(cyl));
    CHECK(r.pass());
    int brackets = 0;
    for (const auto& rec : r.records) {
        if (rec.experiment != "gluing_bracket") continue;
        ++brackets;
        CHECK(rec.observables.at("sigma1_zeroed") <= rec.observables.at("sigma1_glued") * (1 + 1e-9));
        CHECK(rec.observables.at("genus") == 1);
    }
    CHECK(brackets == 3);  // 16 edges would cover the whole loop

    CHECK_THROWS_AS(gluing_study(cyl, u, {cyl.loop_length(0) / 2}), MeshError);
    CHECK_THROWS_AS(gluing_study(cyl, u, {0.123}), MeshError);
    CHECK_THROWS_AS(gluing_study(refined_disk(1), uniform_density(refined_disk(1)), {0.1}), MeshError);
    CHECK_THROWS(gluing_study(cyl, u, {0.2, 0.4}));
}

TEST_CASE("studies are deterministic and thread count does not change output")
{
    const SurfaceMesh cyl = build_cylinder(1.0, 4, 32);
    const BoundaryDensity u = uniform_density(cyl);
    GluingStudyConfig seq, par;
    par.threads = 4;
    const auto schedule = default_eps_schedule(cyl);
    const std::string a = csv(gluing_study(cyl, u, schedule, seq).records);
    const std::string b = csv(gluing_study(cyl, u, schedule, seq).records);
    const std::string c = csv(gluing_study(cyl, u, schedule, par).records);
    CHECK(a == b);
    CHECK(a == c);
    CHECK(csv(weinstock_check(2).records) == csv(weinstock_check(2).records));
}

TEST_CASE("parallel_for covers every index once and forwards errors")
{
    std::vector<int> hits(100, 0);
    parallel_for(100, 8, [&](int i) { ++hits[i]; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, 4, [](int i) {
                        if (i == 7) throw std::runtime_error("boom");
                    }),
                    std::runtime_error);
}

TEST_CASE("SVG chart")
{
    std::vector<PlotSeries> series{{"a<b", {1, 2, 3}, {1, 4, 9}}, {"b", {1, 2}, {0, 1}}};
    PlotOptions opts;
    opts.log_y = true;
    opts.title = "demo";
    std::ostringstream os;
    write_svg_line_chart(os, series, opts);
    const std::string svg = os.str();
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("a&lt;b") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);

    std::vector<ExperimentRecord> recs{{"x", {{"eps", 0.2}}, {{"error", 0.1}}, 0, true},
                                       {"x", {{"eps", 0.1}}, {{"error", 0.05}}, 0, true}};
    const auto s = series_from_records(recs, "param.eps", "obs.error");
    REQUIRE(s.size() == 1);
    CHECK(s[0].x == std::vector<double>{0.1, 0.2});
    CHECK_THROWS(series_from_records(recs, "eps", "obs.error"));
}

TEST_CASE("command line exit codes")
{
    const auto disk = scratch("disk.msh");
    const auto bad = scratch("bad.msh");
    {
        std::ofstream(bad) << "steklov-mesh v1\nV 3\n0 0\n1 zero\n0 1\n";
    }
    CHECK(run_cli("mesh build --shape disk --refine 2 --out " + disk.string()) == 0);
    CHECK(run_cli("mesh validate --mesh " + disk.string()) == 0);
    CHECK(run_cli("mesh validate --mesh " + bad.string()) == 2);
    CHECK(run_cli("spectrum --mesh " + disk.string() + " --frobnicate") == 2);
    CHECK(run_cli("spectrum") == 2);
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("study weinstock --refine 3") == 0);
    CHECK(run_cli("study gluing --eps-schedule 0.1,0.2") == 2);

    const auto out = scratch("spectrum.json");
    CHECK(run_cli("spectrum --mesh " + disk.string() + " --format json --out " + out.string()) == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j.contains("sigma"));
    CHECK(j.contains("sigma_bar"));
    CHECK(std::abs(j["sigma"][0].get<double>()) < 1e-10);

    const auto a = scratch("opt_a.csv"), b = scratch("opt_b.csv");
    CHECK(run_cli("optimize --mesh " + disk.string() + " --seed 5 --max-iters 5 --format csv --out " + a.string()) == 0);
    CHECK(run_cli("optimize --mesh " + disk.string() + " --seed 5 --max-iters 5 --format csv --out " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));

    const auto recs = scratch("conv.csv"), svg = scratch("conv.svg");
    CHECK(run_cli("study convergence --refine 3 --out " + recs.string()) == 0);
    CHECK(run_cli("plot --records " + recs.string() + " --x param.eps --y obs.error --out " + svg.string()) == 0);
    CHECK(slurp(svg).find("<polyline") != std::string::npos);
}
