#pragma once

#include <map>
#include <string>
#include <vector>

#include "smoothflow/dynamics.hpp"
#include "smoothflow/reference.hpp"

namespace smoothflow {

/// One run description; every field has a documented default so an empty
/// config is valid. Unknown keys in the config file are rejected.
struct RunConfig {
    std::string problem = "moo";          // "moo" | "dro"
    double alpha = 3.1;
    double schedule_c = 1.0;
    std::vector<double> r_values = {2.1, 3.0, 5.0};
    double t0 = 1.0;
    double T = 0.0;                        // 0 -> per-command default (50 moo, 20 dro)
    int samples = 400;
    std::uint64_t seed = 2;
    std::vector<double> x0;                // empty -> origin
    std::vector<double> v0;                // empty -> zero
    std::string out;                       // output directory
    bool quiet = false;
    // smooth-profile settings
    std::string profile = "entropic";      // "entropic" | "quadratic" | "box"
    std::vector<double> mu_list = {1.0, 0.1, 0.01};
    double grid_min = -2.0;
    double grid_max = 2.0;
    int grid_points = 401;
    // dro instance size
    int dro_n = 5;
    int dro_m = 6;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct BenchReport {
    std::vector<CheckResult> checks;
    std::vector<std::string> files;
    std::vector<std::string> notes;
    bool ok() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// The two-quadratic Chebyshev-scalarization instance (entropic smoothing on
/// the 2-simplex).
SupProblem make_moo_problem();

/// Pareto-front parametrization of the instance, rho in [0, 1].
Vector moo_pareto_point(double rho);

/// The randomized KL-DRO instance wrapped for integration, uniform prior.
DroProblem make_dro_problem(std::uint64_t seed, int n = 5, int m = 6);

/// Reference solve cached as JSON under `out_dir`, keyed by the problem
/// descriptor; the cache is re-validated on load.
ReferenceSolution cached_reference(const SmoothedObjective& problem, const Vector& x_init,
                                   const std::string& cache_key, const std::string& out_dir,
                                   const ReferenceOptions& opt = ReferenceOptions());

BenchReport bench_moo_quadratic(const RunConfig& cfg);
BenchReport bench_dro(const RunConfig& cfg);
BenchReport smooth_profile(const RunConfig& cfg);
/// Single integration run (inertial or gradient flow) with diagnostics.
BenchReport run_single(const RunConfig& cfg, bool second_order);
BenchReport check_schedule(const RunConfig& cfg);
BenchReport reference_report(const RunConfig& cfg);

/// Renders the report's pass/fail lines; machine-readable one check per line.
std::string format_report(const BenchReport& rep);

}  // namespace smoothflow
