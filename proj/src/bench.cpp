#include "smoothflow/bench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "smoothflow/report.hpp"

namespace smoothflow {

namespace {

using nlohmann::json;

std::vector<double> as_doubles(const json& j, const std::string& key) {
    if (!j.is_array()) throw Error("config: '" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : j) {
        if (!e.is_number()) throw Error("config: '" + key + "' must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

Vector to_vector(const std::vector<double>& v) {
    Vector out(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
    return out;
}

std::string r_tag(double r) {
    std::ostringstream os;
    os << "r" << format_number(r);
    std::string s = os.str();
    for (auto& c : s)
        if (c == '.') c = 'p';
    return s;
}

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty()) return name;
    return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    if (!dir.empty()) std::filesystem::create_directories(dir);
}

// FNV-1a over the canonical descriptor string
std::string hash_key(const std::string& descriptor) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : descriptor) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void add_check(BenchReport& rep, const std::string& name, bool pass, const std::string& detail) {
    rep.checks.push_back({name, pass, detail});
}

struct RunOutput {
    Trajectory traj;
    DiagnosticsSummary diag;
};

RunOutput run_one(const SmoothedObjective& problem, const Schedule& sched, double alpha, double t0,
                  double T, const Vector& x0, const Vector& v0, int samples, bool second_order,
                  double inf_phi, const std::optional<Vector>& x_star) {
    auto times = log_spaced(t0, T, samples);
    RunOutput out;
    if (second_order)
        out.traj = integrate_inertial(problem, sched, alpha, t0, T, x0, v0, times);
    else
        out.traj = integrate_gradflow(problem, sched, t0, T, x0, times);
    out.diag = diagnostics(out.traj, inf_phi, second_order ? x_star : std::nullopt, problem, sched, alpha);
    return out;
}

// max |residual| over samples with t in [lo, hi]
double window_max_residual(const DiagnosticsSummary& d, double lo, double hi) {
    double best = 0;
    for (const auto& r : d.records)
        if (r.t >= lo && r.t <= hi) best = std::max(best, std::abs(r.residual));
    return best;
}

// least-squares slope of log10 |residual-envelope| vs log10 t over [t_lo, T],
// computed on dyadic envelope points to suppress oscillation zeros
double tail_slope(const DiagnosticsSummary& d, double t_lo) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < d.envelope_times.size(); ++i) {
        double lo = d.envelope_times[i];
        if (lo < t_lo) continue;
        double env_res = d.envelope_t2[i] / (lo * lo);  // envelope of |zeta| itself
        if (env_res <= 0) continue;
        xs.push_back(std::log10(lo));
        ys.push_back(std::log10(env_res));
    }
    if (xs.size() < 2) return 0.0;
    double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double den = n * sxx - sx * sx;
    return (den > 0) ? (n * sxy - sx * sy) / den : 0.0;
}

void alpha_banner(BenchReport& rep, double alpha) {
    if (alpha < 3.0)
        rep.notes.push_back("warning: alpha = " + format_number(alpha) +
                            " < 3 is outside the guaranteed-rate regime");
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        throw Error(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error("config: top level must be an object");
    RunConfig cfg;
    for (const auto& [key, val] : j.items()) {
        if (key == "problem") cfg.problem = val.get<std::string>();
        else if (key == "alpha") cfg.alpha = val.get<double>();
        else if (key == "schedule_c") cfg.schedule_c = val.get<double>();
        else if (key == "r_values") cfg.r_values = as_doubles(val, key);
        else if (key == "t0") cfg.t0 = val.get<double>();
        else if (key == "T") cfg.T = val.get<double>();
        else if (key == "samples") cfg.samples = val.get<int>();
        else if (key == "seed") cfg.seed = val.get<std::uint64_t>();
        else if (key == "x0") cfg.x0 = as_doubles(val, key);
        else if (key == "v0") cfg.v0 = as_doubles(val, key);
        else if (key == "out") cfg.out = val.get<std::string>();
        else if (key == "quiet") cfg.quiet = val.get<bool>();
        else if (key == "profile") cfg.profile = val.get<std::string>();
        else if (key == "mu_list") cfg.mu_list = as_doubles(val, key);
        else if (key == "grid_min") cfg.grid_min = val.get<double>();
        else if (key == "grid_max") cfg.grid_max = val.get<double>();
        else if (key == "grid_points") cfg.grid_points = val.get<int>();
        else if (key == "dro_n") cfg.dro_n = val.get<int>();
        else if (key == "dro_m") cfg.dro_m = val.get<int>();
        else throw Error("config: unknown key '" + key + "'");
    }
    if (cfg.problem != "moo" && cfg.problem != "dro")
        throw Error("config: problem must be 'moo' or 'dro'");
    if (!(cfg.t0 > 0)) throw Error("config: t0 must be positive");
    if (cfg.samples < 2) throw Error("config: samples must be at least 2");
    if (cfg.r_values.empty()) throw Error("config: r_values must be non-empty");
    for (double r : cfg.r_values)
        if (!(r > 0)) throw Error("config: r values must be positive");
    if (!(cfg.schedule_c > 0)) throw Error("config: schedule_c must be positive");
    if (cfg.grid_points < 2) throw Error("config: grid_points must be at least 2");
    if (!(cfg.grid_max > cfg.grid_min)) throw Error("config: grid_max must exceed grid_min");
    for (double mu : cfg.mu_list)
        if (!(mu > 0)) throw Error("config: mu values must be positive");
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read config file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_run_config(os.str());
}

SupProblem make_moo_problem() {
    Matrix M1 = Matrix::Zero(2, 2), M2 = Matrix::Zero(2, 2);
    M1(0, 0) = 2;
    M1(1, 1) = 1;
    M2(0, 0) = 1;
    M2(1, 1) = 2;
    Vector c1(2), c2(2);
    c1 << 1, 0;
    c2 << 0, 1;
    auto family = make_quadratic_family({M1, M2}, {c1, c2}, Vector::Zero(2));
    return SupProblem(std::move(family), FeasibleSet::simplex(2), Penalty::kl_uniform(2));
}

Vector moo_pareto_point(double rho) {
    Vector p(2);
    p[0] = 2.0 * rho / (rho + 1.0);
    p[1] = 2.0 * (1.0 - rho) / (2.0 - rho);
    return p;
}

DroProblem make_dro_problem(std::uint64_t seed, int n, int m) {
    auto [costs, set] = make_dro_benchmark(seed, n, m);
    Vector prior = Vector::Constant(m, 1.0 / m);
    return DroProblem(std::move(costs), std::move(set), std::move(prior));
}

ReferenceSolution cached_reference(const SmoothedObjective& problem, const Vector& x_init,
                                   const std::string& cache_key, const std::string& out_dir,
                                   const ReferenceOptions& opt) {
    std::string path;
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        path = join_path(out_dir, "reference_" + hash_key(cache_key) + ".json");
        std::ifstream in(path, std::ios::binary);
        if (in) {
            try {
                json j = json::parse(in);
                ReferenceSolution cached;
                cached.inf_phi = j.at("inf_phi").get<double>();
                cached.method = j.at("method").get<std::string>();
                cached.bracket_lower = j.at("bracket_lower").get<double>();
                cached.bracket_upper = j.at("bracket_upper").get<double>();
                cached.x_star = to_vector(j.at("x_star").get<std::vector<double>>());
                bool valid = cached.bracket_lower <= cached.bracket_upper &&
                             cached.bracket_upper - cached.bracket_lower <=
                                 1e-8 * (1.0 + std::abs(cached.inf_phi)) &&
                             j.at("key").get<std::string>() == cache_key;
                if (valid) return cached;
            } catch (const std::exception&) {
                // fall through to recompute
            }
        }
    }
    ReferenceSolution sol = reference_solve(problem, x_init, opt);
    if (sol.bracket_upper - sol.bracket_lower > 1e-8 * (1.0 + std::abs(sol.inf_phi)))
        throw OracleDisagreement("reference bracket too wide: [" +
                                 format_number(sol.bracket_lower) + ", " +
                                 format_number(sol.bracket_upper) + "]");
    if (!path.empty()) {
        json j;
        j["key"] = cache_key;
        j["inf_phi"] = sol.inf_phi;
        j["method"] = sol.method;
        j["bracket_lower"] = sol.bracket_lower;
        j["bracket_upper"] = sol.bracket_upper;
        std::vector<double> xs(sol.x_star.data(), sol.x_star.data() + sol.x_star.size());
        j["x_star"] = xs;
        write_text_file(path, j.dump(2) + "\n");
    }
    return sol;
}

BenchReport bench_moo_quadratic(const RunConfig& cfg) {
    BenchReport rep;
    alpha_banner(rep, cfg.alpha);
    const double T = (cfg.T > 0) ? cfg.T : 50.0;
    ensure_dir(cfg.out);

    SupProblem problem = make_moo_problem();
    auto wrapped = wrap(problem);
    Vector start = Vector::Constant(2, 0.5);
    ReferenceSolution ref = cached_reference(*wrapped, start, "moo-quadratic", cfg.out);
    add_check(rep, "reference inf phi = 1/3", std::abs(ref.inf_phi - 1.0 / 3.0) <= 1e-8,
              "inf_phi = " + format_number(ref.inf_phi) + " (" + ref.method + ")");
    Vector x_expected(2);
    x_expected << 2.0 / 3.0, 2.0 / 3.0;
    add_check(rep, "reference x* = (2/3, 2/3)", (ref.x_star - x_expected).norm() <= 1e-6,
              "x* = (" + format_number(ref.x_star[0]) + ", " + format_number(ref.x_star[1]) + ")");

    // default start off the symmetry diagonal: on it, g1 = g2 makes the
    // field independent of mu and every r produces the same trajectory
    Vector moo_x0(2);
    moo_x0 << 1.0, -1.0;
    Vector x0 = cfg.x0.empty() ? moo_x0 : to_vector(cfg.x0);
    Vector v0 = cfg.v0.empty() ? Vector::Zero(2) : to_vector(cfg.v0);

    PlotSpec res_plot;
    res_plot.title = "max-scalarized quadratics: residual decay";
    res_plot.xlabel = "t";
    res_plot.ylabel = "|phi_mu(x(t)) - inf phi|";
    res_plot.logx = res_plot.logy = true;
    res_plot.slope_guide = true;
    res_plot.slope = -2.0;

    PlotSpec plane_plot;
    plane_plot.title = "trajectories in the (x1, x2) plane";
    plane_plot.xlabel = "x1";
    plane_plot.ylabel = "x2";
    {
        PlotSeries pareto;
        pareto.label = "Pareto front";
        pareto.color = "#222222";
        pareto.dashed = true;
        for (int i = 0; i <= 200; ++i) {
            Vector p = moo_pareto_point(i / 200.0);
            pareto.x.push_back(p[0]);
            pareto.y.push_back(p[1]);
        }
        plane_plot.series.push_back(std::move(pareto));
    }

    const char* colors[] = {"#1f5fa8", "#c2401f", "#2d7f3f", "#7b3fa0", "#a07b1f"};
    int ci = 0;
    for (double r : cfg.r_values) {
        Schedule sched = Schedule::power(cfg.schedule_c, r);
        RunOutput run = run_one(*wrapped, sched, cfg.alpha, cfg.t0, T, x0, v0, cfg.samples, true,
                                ref.inf_phi, ref.x_star);
        std::string tag = r_tag(r);
        std::string csv_path = join_path(cfg.out, "moo_" + tag + ".csv");
        write_text_file(csv_path, trajectory_csv(run.traj, run.diag));
        rep.files.push_back(csv_path);

        PlotSeries rs, ts;
        rs.label = "r = " + format_number(r);
        rs.color = colors[ci % 5];
        ts.label = rs.label;
        ts.color = rs.color;
        for (std::size_t i = 0; i < run.diag.records.size(); ++i) {
            rs.x.push_back(run.diag.records[i].t);
            rs.y.push_back(std::abs(run.diag.records[i].residual));
            ts.x.push_back(run.traj.samples[i].x[0]);
            ts.y.push_back(run.traj.samples[i].x[1]);
        }
        res_plot.series.push_back(std::move(rs));
        plane_plot.series.push_back(std::move(ts));
        ++ci;

        const Vector& xT = run.traj.samples.back().x;
        add_check(rep, "endpoint near x* (" + tag + ")", (xT - ref.x_star).norm() <= 1e-2,
                  "dist = " + format_number((xT - ref.x_star).norm()));
        double raw_gap = std::abs(wrapped->value_raw(xT) - ref.inf_phi);
        add_check(rep, "endpoint value gap (" + tag + ")", raw_gap <= 1e-2,
                  "|phi(x(T)) - inf| = " + format_number(raw_gap));
        bool finite = std::isfinite(run.diag.sup_tail_t2_residual);
        add_check(rep, "t^2 residual bounded on tail (" + tag + ")", finite,
                  "sup t^2|zeta| = " + format_number(run.diag.sup_tail_t2_residual));
        add_check(rep, "W nonnegative (" + tag + ")", run.diag.W_nonnegative, "");
        add_check(rep, "energy lower bound (" + tag + ")", run.diag.energy_lower_bound, "");
        double slope = tail_slope(run.diag, T / 10.0);
        add_check(rep, "log-log decay shape (" + tag + ")", slope <= -1.5,
                  "envelope slope over final decade = " + format_number(slope));
    }

    std::string res_path = join_path(cfg.out, "moo_residuals.svg");
    write_text_file(res_path, render_svg(res_plot));
    rep.files.push_back(res_path);
    std::string plane_path = join_path(cfg.out, "moo_trajectories.svg");
    write_text_file(plane_path, render_svg(plane_plot));
    rep.files.push_back(plane_path);
    return rep;
}

BenchReport bench_dro(const RunConfig& cfg) {
    BenchReport rep;
    alpha_banner(rep, cfg.alpha);
    const double T = (cfg.T > 0) ? cfg.T : 20.0;
    ensure_dir(cfg.out);

    DroProblem problem = make_dro_problem(cfg.seed, cfg.dro_n, cfg.dro_m);
    auto wrapped = wrap(problem);
    Vector start = Vector::Zero(cfg.dro_n);
    std::string key = "dro-seed" + std::to_string(cfg.seed) + "-n" + std::to_string(cfg.dro_n) +
                      "-m" + std::to_string(cfg.dro_m);
    ReferenceSolution ref = cached_reference(*wrapped, start, key, cfg.out);
    add_check(rep, "reference bracket certified",
              ref.bracket_upper - ref.bracket_lower <= 1e-8 * (1.0 + std::abs(ref.inf_phi)),
              "inf_phi = " + format_number(ref.inf_phi) + " (" + ref.method + ")");

    Vector x0 = cfg.x0.empty() ? Vector::Zero(cfg.dro_n) : to_vector(cfg.x0);
    Vector v0 = cfg.v0.empty() ? Vector::Zero(cfg.dro_n) : to_vector(cfg.v0);

    PlotSpec res_plot;
    res_plot.title = "KL-regularized DRO: residual decay";
    res_plot.xlabel = "t";
    res_plot.ylabel = "|phi_mu(x(t)) - inf phi|";
    res_plot.logx = res_plot.logy = true;
    res_plot.slope_guide = true;
    res_plot.slope = -2.0;

    const char* colors[] = {"#1f5fa8", "#c2401f", "#2d7f3f", "#7b3fa0", "#a07b1f"};
    int ci = 0;
    for (double r : cfg.r_values) {
        Schedule sched = Schedule::power(cfg.schedule_c, r);
        RunOutput run = run_one(*wrapped, sched, cfg.alpha, cfg.t0, T, x0, v0, cfg.samples, true,
                                ref.inf_phi, ref.x_star);
        std::string tag = r_tag(r);
        std::string csv_path = join_path(cfg.out, "dro_" + tag + ".csv");
        write_text_file(csv_path, trajectory_csv(run.traj, run.diag));
        rep.files.push_back(csv_path);

        PlotSeries rs;
        rs.label = "r = " + format_number(r);
        rs.color = colors[ci % 5];
        for (const auto& rec : run.diag.records) {
            rs.x.push_back(rec.t);
            rs.y.push_back(std::abs(rec.residual));
        }
        res_plot.series.push_back(std::move(rs));
        ++ci;

        double sup_t2 = 0;
        for (const auto& rec : run.diag.records)
            if (rec.t >= 5.0 && rec.t <= T) sup_t2 = std::max(sup_t2, rec.t2_abs_residual);
        add_check(rep, "t^2 residual bounded on [5, T] (" + tag + ")", std::isfinite(sup_t2),
                  "sup t^2|zeta| = " + format_number(sup_t2));
        add_check(rep, "W nonnegative (" + tag + ")", run.diag.W_nonnegative, "");
        // decay shape: late-window residual well below the early window
        double early = window_max_residual(run.diag, cfg.t0, 2.0 * cfg.t0);
        double late = window_max_residual(run.diag, T / 2.0, T);
        add_check(rep, "residual decays (" + tag + ")", late < 0.1 * early + 1e-12,
                  "early max = " + format_number(early) + ", late max = " + format_number(late));
    }

    std::string res_path = join_path(cfg.out, "dro_residuals.svg");
    write_text_file(res_path, render_svg(res_plot));
    rep.files.push_back(res_path);
    return rep;
}

BenchReport smooth_profile(const RunConfig& cfg) {
    BenchReport rep;
    ensure_dir(cfg.out);

    std::unique_ptr<SupProblem> problem;
    if (cfg.profile == "entropic" || cfg.profile == "quadratic") {
        auto family = make_scalar_family(
            {[](const Vector& x) { return x[0] * x[0] + 1.0; },
             [](const Vector& x) { return std::exp(x[0]); }},
            {[](const Vector& x) {
                 Vector g(1);
                 g[0] = 2.0 * x[0];
                 return g;
             },
             [](const Vector& x) {
                 Vector g(1);
                 g[0] = std::exp(x[0]);
                 return g;
             }},
            1);
        Penalty pen = (cfg.profile == "entropic") ? Penalty::kl_uniform(2)
                                                  : Penalty::quadratic(Vector::Constant(2, 0.5));
        problem = std::make_unique<SupProblem>(std::move(family), FeasibleSet::simplex(2),
                                               std::move(pen));
    } else if (cfg.profile == "box") {
        auto family = make_scalar_family(
            {[](const Vector& x) { return x[0] - 1.0; },
             [](const Vector& x) { return -0.5 * x[0] + 0.2; }},
            {[](const Vector&) {
                 Vector g(1);
                 g[0] = 1.0;
                 return g;
             },
             [](const Vector&) {
                 Vector g(1);
                 g[0] = -0.5;
                 return g;
             }},
            1);
        Vector lo(2), hi(2), center(2);
        lo << 0.0, 0.2;
        hi << 2.0, 1.5;
        center << 1.0, 0.25;
        problem = std::make_unique<SupProblem>(std::move(family), FeasibleSet::box(lo, hi),
                                               Penalty::quadratic(center));
    } else {
        throw Error("smooth_profile: unknown profile '" + cfg.profile + "'");
    }

    std::vector<double> mus = cfg.mu_list;
    std::sort(mus.begin(), mus.end(), std::greater<double>());
    const double C = problem->sup_C();

    std::vector<double> grid(cfg.grid_points);
    for (int i = 0; i < cfg.grid_points; ++i)
        grid[i] = cfg.grid_min + (cfg.grid_max - cfg.grid_min) * i / (cfg.grid_points - 1);

    std::ostringstream csv;
    csv << "x,phi";
    for (double mu : mus) csv << ",phi_mu_" << format_number(mu);
    csv << "\n";

    PlotSpec plot;
    plot.title = "smoothing profile (" + cfg.profile + ")";
    plot.xlabel = "x";
    plot.ylabel = "value";
    PlotSeries raw;
    raw.label = "phi";
    raw.color = "#222222";
    std::vector<PlotSeries> mu_series(mus.size());
    const char* colors[] = {"#1f5fa8", "#c2401f", "#2d7f3f", "#7b3fa0", "#a07b1f"};
    for (std::size_t k = 0; k < mus.size(); ++k) {
        mu_series[k].label = "mu = " + format_number(mus[k]);
        mu_series[k].color = colors[k % 5];
    }

    bool sandwich_ok = true, monotone_ok = true;
    double worst_sandwich = 0, worst_monotone = 0;
    const double slack = 1e-9;
    for (double xv : grid) {
        Vector x(1);
        x[0] = xv;
        double phi = problem->sup_value(x);
        csv << format_number(xv) << ',' << format_number(phi);
        raw.x.push_back(xv);
        raw.y.push_back(phi);
        double prev = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < mus.size(); ++k) {
            double mu = mus[k];
            double pm = problem->reg_value(x, mu);
            csv << ',' << format_number(pm);
            mu_series[k].x.push_back(xv);
            mu_series[k].y.push_back(pm);
            double gap = phi - pm;
            if (gap < -slack || gap > C * mu + slack) {
                sandwich_ok = false;
                worst_sandwich = std::max(worst_sandwich, std::max(-gap, gap - C * mu));
            }
            // larger mu first: phi_mu nondecreasing as mu shrinks
            if (pm < prev - slack) {
                monotone_ok = false;
                worst_monotone = std::max(worst_monotone, prev - pm);
            }
            prev = pm;
        }
        if (prev > phi + slack) {
            monotone_ok = false;
            worst_monotone = std::max(worst_monotone, prev - phi);
        }
        csv << "\n";
    }
    plot.series.push_back(std::move(raw));
    for (auto& s : mu_series) plot.series.push_back(std::move(s));

    add_check(rep, "sandwich bound on grid", sandwich_ok,
              sandwich_ok ? "" : "worst violation = " + format_number(worst_sandwich));
    add_check(rep, "mu-monotonicity on grid", monotone_ok,
              monotone_ok ? "" : "worst violation = " + format_number(worst_monotone));

    std::string csv_path = join_path(cfg.out, "profile_" + cfg.profile + ".csv");
    write_text_file(csv_path, csv.str());
    rep.files.push_back(csv_path);
    std::string svg_path = join_path(cfg.out, "profile_" + cfg.profile + ".svg");
    write_text_file(svg_path, render_svg(plot));
    rep.files.push_back(svg_path);
    return rep;
}

BenchReport run_single(const RunConfig& cfg, bool second_order) {
    BenchReport rep;
    alpha_banner(rep, cfg.alpha);
    ensure_dir(cfg.out);

    std::unique_ptr<SmoothedObjective> wrapped;
    SupProblem moo = make_moo_problem();  // kept alive for the wrapped pointer
    std::string key;
    int n = 2;
    if (cfg.problem == "moo") {
        wrapped = wrap(moo);
        key = "moo-quadratic";
    } else {
        DroProblem dro = make_dro_problem(cfg.seed, cfg.dro_n, cfg.dro_m);
        wrapped = wrap(dro);
        key = "dro-seed" + std::to_string(cfg.seed) + "-n" + std::to_string(cfg.dro_n) + "-m" +
              std::to_string(cfg.dro_m);
        n = cfg.dro_n;
    }
    const double T = (cfg.T > 0) ? cfg.T : (cfg.problem == "moo" ? 50.0 : 20.0);
    Vector start = (cfg.problem == "moo") ? Vector::Constant(2, 0.5) : Vector::Zero(n);
    ReferenceSolution ref = cached_reference(*wrapped, start, key, cfg.out);

    Vector default_x0 = Vector::Zero(n);
    if (cfg.problem == "moo") default_x0 << 1.0, -1.0;  // off the symmetry diagonal
    Vector x0 = cfg.x0.empty() ? default_x0 : to_vector(cfg.x0);
    Vector v0 = cfg.v0.empty() ? Vector::Zero(n) : to_vector(cfg.v0);
    if (x0.size() != n || v0.size() != n) throw Error("config: x0/v0 dimension mismatch");

    double r = cfg.r_values.front();
    Schedule sched = Schedule::power(cfg.schedule_c, r);
    RunOutput run = run_one(*wrapped, sched, cfg.alpha, cfg.t0, T, x0, v0, cfg.samples,
                            second_order, ref.inf_phi, ref.x_star);

    std::string mode = second_order ? "inertial" : "gradflow";
    std::string csv_path = join_path(cfg.out, mode + "_" + cfg.problem + "_" + r_tag(r) + ".csv");
    write_text_file(csv_path, trajectory_csv(run.traj, run.diag));
    rep.files.push_back(csv_path);

    PlotSpec plot;
    plot.title = mode + " run (" + cfg.problem + ", r = " + format_number(r) + ")";
    plot.xlabel = "t";
    plot.ylabel = "|phi_mu(x(t)) - inf phi|";
    plot.logx = plot.logy = true;
    plot.slope_guide = second_order;
    PlotSeries rs;
    rs.label = "residual";
    for (const auto& rec : run.diag.records) {
        rs.x.push_back(rec.t);
        rs.y.push_back(std::abs(rec.residual));
    }
    plot.series.push_back(std::move(rs));
    std::string svg_path = join_path(cfg.out, mode + "_" + cfg.problem + "_" + r_tag(r) + ".svg");
    write_text_file(svg_path, render_svg(plot));
    rep.files.push_back(svg_path);

    add_check(rep, "finite diagnostics", std::isfinite(run.diag.sup_tail_t2_residual),
              "sup tail t^2|zeta| = " + format_number(run.diag.sup_tail_t2_residual));
    if (second_order) {
        add_check(rep, "W nonnegative", run.diag.W_nonnegative, "");
        add_check(rep, "energy lower bound", run.diag.energy_lower_bound, "");
    } else {
        // first-order rate observable: t * (phi(x(t)) - inf) bounded on tail
        double sup_t1 = 0;
        for (const auto& rec : run.diag.records)
            if (rec.t >= 0.25 * T)
                sup_t1 = std::max(sup_t1, rec.t * std::abs(rec.value_raw - ref.inf_phi));
        add_check(rep, "t * raw gap bounded on tail", std::isfinite(sup_t1),
                  "sup = " + format_number(sup_t1));
    }
    return rep;
}

BenchReport check_schedule(const RunConfig& cfg) {
    BenchReport rep;
    for (double r : cfg.r_values) {
        Schedule sched = Schedule::power(cfg.schedule_c, r);
        ScheduleReport sr = sched.check(cfg.t0);
        std::ostringstream os;
        os << "t*mu integrable: " << (sr.tmu_integrable ? "yes" : "no")
           << "; t^2*mu' integrable: " << (sr.t2mudot_integrable ? "yes" : "no")
           << "; mu in L1: " << (sr.l1_integrable ? "yes" : "no")
           << "; t^2*mu vanishes: " << (sr.t2mu_vanishes ? "yes" : "no");
        add_check(rep, "schedule r = " + format_number(r), true, os.str());
    }
    return rep;
}

BenchReport reference_report(const RunConfig& cfg) {
    BenchReport rep;
    ensure_dir(cfg.out);
    std::unique_ptr<SmoothedObjective> wrapped;
    SupProblem moo = make_moo_problem();
    std::string key;
    Vector start;
    if (cfg.problem == "moo") {
        wrapped = wrap(moo);
        key = "moo-quadratic";
        start = Vector::Constant(2, 0.5);
    } else {
        DroProblem dro = make_dro_problem(cfg.seed, cfg.dro_n, cfg.dro_m);
        wrapped = wrap(dro);
        key = "dro-seed" + std::to_string(cfg.seed) + "-n" + std::to_string(cfg.dro_n) + "-m" +
              std::to_string(cfg.dro_m);
        start = Vector::Zero(cfg.dro_n);
    }
    ReferenceSolution ref = cached_reference(*wrapped, start, key, cfg.out);
    std::ostringstream os;
    os << "inf_phi = " << format_number(ref.inf_phi) << "; bracket = ["
       << format_number(ref.bracket_lower) << ", " << format_number(ref.bracket_upper)
       << "]; method = " << ref.method;
    add_check(rep, "reference (" + cfg.problem + ")",
              ref.bracket_upper - ref.bracket_lower <= 1e-8 * (1.0 + std::abs(ref.inf_phi)),
              os.str());
    return rep;
}

std::string format_report(const BenchReport& rep) {
    std::ostringstream os;
    for (const auto& n : rep.notes) os << "# " << n << "\n";
    for (const auto& c : rep.checks) {
        os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name;
        if (!c.detail.empty()) os << ": " << c.detail;
        os << "\n";
    }
    for (const auto& f : rep.files) os << "wrote " << f << "\n";
    return os.str();
}

}  // namespace smoothflow
