#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "smoothflow/bench.hpp"
#include "smoothflow/report.hpp"

using namespace smoothflow;
namespace fs = std::filesystem;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

struct TempDir {
    fs::path path;
    TempDir(const char* tag) {
        path = fs::temp_directory_path() / (std::string("smoothflow-test-") + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("config parsing: defaults, overrides, rejection") {
    RunConfig def = parse_run_config("{}");
    CHECK(def.problem == "moo");
    CHECK(def.alpha == doctest::Approx(3.1));
    CHECK(def.samples == 400);
    CHECK(def.seed == 2);
    CHECK(def.r_values == std::vector<double>{2.1, 3.0, 5.0});

    RunConfig c = parse_run_config(
        R"({"problem":"dro","alpha":4.0,"r_values":[3],"T":25,"seed":7,"x0":[1,2,0,0,0]})");
    CHECK(c.problem == "dro");
    CHECK(c.alpha == doctest::Approx(4.0));
    CHECK(c.T == doctest::Approx(25.0));
    CHECK(c.seed == 7);
    CHECK(c.r_values == std::vector<double>{3.0});
    CHECK(c.x0 == std::vector<double>{1, 2, 0, 0, 0});

    CHECK_THROWS_AS(parse_run_config(R"({"not_a_key":1})"), Error);
    CHECK_THROWS_AS(parse_run_config(R"({"problem":"mystery"})"), Error);
    CHECK_THROWS_AS(parse_run_config(R"({"t0":-1})"), Error);
    CHECK_THROWS_AS(parse_run_config(R"({"r_values":[]})"), Error);
    CHECK_THROWS_AS(parse_run_config("not json"), Error);
}

TEST_CASE("two-quadratic instance geometry") {
    SupProblem moo = make_moo_problem();
    CHECK(moo.objectives().m == 2);
    // known minimizer and value of the max-scalarization
    Vector xs = vec({2.0 / 3.0, 2.0 / 3.0});
    CHECK(moo.sup_value(xs) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // Pareto parametrization endpoints and the symmetric point
    CHECK(moo_pareto_point(0.5).isApprox(xs, 1e-12));
    CHECK(moo_pareto_point(0.0).isApprox(vec({0, 1}), 1e-12));
    CHECK(moo_pareto_point(1.0).isApprox(vec({1, 0}), 1e-12));
}

TEST_CASE("reference oracle on an analytic single quadratic") {
    // g(x) = 1/2 ||x - a||^2 + e  =>  inf = e at a
    Vector a = vec({0.3, -1.2});
    auto fam = make_quadratic_family({Matrix::Identity(2, 2)}, {a}, vec({0.25}));
    SupProblem p(std::move(fam), FeasibleSet::simplex(1), Penalty::kl_uniform(1));
    auto obj = wrap(p);
    ReferenceSolution ref = reference_solve(*obj, Vector::Zero(2));
    CHECK(ref.inf_phi == doctest::Approx(0.25).epsilon(1e-10));
    CHECK((ref.x_star - a).norm() <= 1e-5);
    CHECK(ref.bracket_lower <= 0.25 + 1e-12);
    CHECK(ref.bracket_upper >= 0.25 - 1e-12);
    CHECK(ref.bracket_upper - ref.bracket_lower <= 1e-7);
}

TEST_CASE("reference oracle certifies the two-quadratic instance") {
    SupProblem moo = make_moo_problem();
    auto obj = wrap(moo);
    ReferenceSolution ref = reference_solve(*obj, vec({1, -1}));
    CHECK(ref.inf_phi == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
    CHECK((ref.x_star - vec({2.0 / 3.0, 2.0 / 3.0})).norm() <= 1e-4);
    CHECK(ref.bracket_lower <= ref.inf_phi);
    CHECK(ref.inf_phi <= ref.bracket_upper);
}

TEST_CASE("reference cache round-trips") {
    TempDir dir("cache");
    SupProblem moo = make_moo_problem();
    auto obj = wrap(moo);
    ReferenceSolution a = cached_reference(*obj, vec({1, -1}), "unit-moo", dir.path.string());
    // one cache file now exists
    int files = 0;
    for (auto& e : fs::directory_iterator(dir.path)) {
        (void)e;
        ++files;
    }
    CHECK(files == 1);
    ReferenceSolution b = cached_reference(*obj, vec({1, -1}), "unit-moo", dir.path.string());
    CHECK(a.inf_phi == b.inf_phi);
    CHECK((a.x_star - b.x_star).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("number formatting round-trips and is locale-independent") {
    for (double v : {0.0, 1.0, -2.5, 1.0 / 3.0, 1e-12, 3.14159265358979, 6.02e23, -1e-300}) {
        std::string s = format_number(v);
        double back = 0;
        std::sscanf(s.c_str(), "%lf", &back);
        CHECK(back == v);
        CHECK(s.find(',') == std::string::npos);
    }
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(2.0) == "2");
}

TEST_CASE("trajectory CSV layout") {
    Trajectory traj;
    traj.second_order = false;
    traj.samples.push_back({1.0, vec({0.5, -0.25}), Vector()});
    traj.samples.push_back({2.0, vec({0.25, -0.125}), Vector()});
    DiagnosticsSummary diag;
    for (const auto& s : traj.samples) {
        DiagnosticsRecord r;
        r.t = s.t;
        r.value_reg = 1.5;
        r.value_raw = 1.75;
        r.residual = 0.5;
        r.W = 0.75;
        r.t2_abs_residual = s.t * s.t * 0.5;
        diag.records.push_back(r);
    }
    std::string csv = trajectory_csv(traj, diag);
    CHECK(csv.rfind("t,x_1,x_2,v_1,v_2,value_reg,value_raw,residual,energy_E,W,t2_abs_residual,t_speed\n",
                    0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    // first-order runs write zero velocities
    CHECK(csv.find("1,0.5,-0.25,0,0,") != std::string::npos);

    Trajectory empty;
    CHECK_THROWS_AS(trajectory_csv(empty, DiagnosticsSummary{}), Error);
    DiagnosticsSummary mismatched;
    CHECK_THROWS_AS(trajectory_csv(traj, mismatched), DimensionMismatch);
}

TEST_CASE("SVG rendering is deterministic and validates input") {
    PlotSpec spec;
    spec.title = "decay";
    spec.xlabel = "t";
    spec.ylabel = "t^2 zeta";
    spec.logx = spec.logy = true;
    spec.slope_guide = true;
    spec.slope = -2.0;
    PlotSeries s;
    s.label = "r=3";
    for (int i = 1; i <= 40; ++i) {
        s.x.push_back(i);
        s.y.push_back(1.0 / (i * i));
    }
    spec.series.push_back(s);
    std::string a = render_svg(spec);
    std::string b = render_svg(spec);
    CHECK(a == b);
    CHECK(a.rfind("<?xml", 0) == 0);
    CHECK(a.find("<svg") != std::string::npos);
    CHECK(a.find("polyline") != std::string::npos);
    CHECK(a.find("slope -2") != std::string::npos);

    PlotSpec none;
    CHECK_THROWS_AS(render_svg(none), Error);
    PlotSpec negative = spec;
    negative.series[0].y.assign(negative.series[0].y.size(), -1.0);  // nothing plottable on log axis
    CHECK_THROWS_AS(render_svg(negative), Error);
}

TEST_CASE("profile report passes its sandwich checks") {
    TempDir dir("profile");
    RunConfig cfg;
    cfg.out = dir.path.string();
    cfg.quiet = true;
    for (const char* profile : {"entropic", "quadratic", "box"}) {
        cfg.profile = profile;
        BenchReport rep = smooth_profile(cfg);
        CHECK(rep.ok());
        CHECK(!rep.files.empty());
        for (const auto& f : rep.files) CHECK(fs::exists(fs::path(f)));
    }
}

TEST_CASE("benchmark outputs are byte-identical across reruns") {
    TempDir d1("det1");
    TempDir d2("det2");
    RunConfig cfg;
    cfg.quiet = true;
    cfg.samples = 120;
    cfg.r_values = {3.0};

    cfg.out = d1.path.string();
    BenchReport r1 = bench_moo_quadratic(cfg);
    cfg.out = d2.path.string();
    BenchReport r2 = bench_moo_quadratic(cfg);
    CHECK(r1.ok());
    CHECK(r2.ok());
    REQUIRE(r1.files.size() == r2.files.size());
    for (std::size_t i = 0; i < r1.files.size(); ++i)
        CHECK(slurp(r1.files[i]) == slurp(r2.files[i]));
}

TEST_CASE("schedule report flags per exponent") {
    TempDir dir("sched");
    RunConfig cfg;
    cfg.out = dir.path.string();
    cfg.quiet = true;
    cfg.r_values = {2.1, 2.0, 1.5};
    BenchReport rep = check_schedule(cfg);
    // informational: every requested exponent produces a line
    CHECK(rep.checks.size() >= 3);
}
