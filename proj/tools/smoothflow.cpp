#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "smoothflow/bench.hpp"

namespace {

using namespace smoothflow;

struct GlobalOpts {
    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    bool have_seed = false;
    bool quiet = false;
};

RunConfig resolve_config(const GlobalOpts& g) {
    RunConfig cfg;
    if (!g.config_path.empty()) cfg = load_run_config(g.config_path);
    if (!g.out.empty()) cfg.out = g.out;
    if (cfg.out.empty()) {
        if (const char* env = std::getenv("SMOOTHFLOW_OUT")) cfg.out = env;
        else cfg.out = "out";
    }
    if (g.have_seed) cfg.seed = g.seed;
    if (g.quiet) cfg.quiet = true;
    return cfg;
}

int emit(const BenchReport& rep, bool quiet) {
    if (!quiet) std::cout << format_report(rep);
    else
        for (const auto& c : rep.checks)
            if (!c.pass) std::cout << "[FAIL] " << c.name << ": " << c.detail << "\n";
    return rep.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"penalty-smoothed supremum functions, inertial dynamics, and DRO benchmarks"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON run configuration file");
    app.add_option("--out", g.out, "output directory (default: $SMOOTHFLOW_OUT or ./out)");
    auto* seed_opt = app.add_option("--seed", g.seed, "seed overriding the config (default 2)");
    app.add_flag("--quiet", g.quiet, "only print failures");

    auto* sp = app.add_subcommand("smooth-profile",
                                  "tabulate phi and phi_mu on a 1-D grid (profiles: entropic, "
                                  "quadratic, box; mu list from config, default {1, 0.1, 0.01})");
    std::string profile;
    sp->add_option("--profile", profile, "entropic | quadratic | box (default entropic)");
    auto* moo = app.add_subcommand("bench-moo",
                                   "two-quadratic Chebyshev benchmark: alpha 3.1, t in [1,50], "
                                   "r in {2.1, 3, 5}, x0 = v0 = 0 unless configured");
    auto* dro = app.add_subcommand("bench-dro",
                                   "randomized KL-DRO benchmark: alpha 3.1, t in [1,20], "
                                   "r in {2.1, 3, 5}, x(1) = 0, x'(1) = 0");
    auto* ri = app.add_subcommand("run-inertial",
                                  "single inertial run of the configured problem (first r value)");
    auto* rg = app.add_subcommand("run-gradflow",
                                  "single gradient-flow run of the configured problem");
    auto* cs = app.add_subcommand("check-schedule",
                                  "integrability flags for mu(t) = c t^{-r}, all configured r");
    auto* rs = app.add_subcommand("reference-solve",
                                  "dual-oracle certification of inf phi for the configured problem");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);
    g.have_seed = seed_opt->count() > 0;

    try {
        RunConfig cfg = resolve_config(g);
        if (!profile.empty()) cfg.profile = profile;
        if (cfg.alpha < 3.0 && !cfg.quiet)
            std::cout << "# warning: alpha = " << cfg.alpha
                      << " < 3 lies outside the guaranteed-rate regime\n";
        BenchReport rep;
        if (sp->parsed()) rep = smooth_profile(cfg);
        else if (moo->parsed()) rep = bench_moo_quadratic(cfg);
        else if (dro->parsed()) rep = bench_dro(cfg);
        else if (ri->parsed()) rep = run_single(cfg, true);
        else if (rg->parsed()) rep = run_single(cfg, false);
        else if (cs->parsed()) rep = check_schedule(cfg);
        else if (rs->parsed()) rep = reference_report(cfg);
        return emit(rep, cfg.quiet);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 3;
    }
}
