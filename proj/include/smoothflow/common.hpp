#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace smoothflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Error hierarchy. Every failure mode surfaced by the library derives from
// Error so callers can catch one type at the CLI boundary.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};
struct InfeasiblePoint : Error {
    using Error::Error;
};
struct Infeasible : Error {
    using Error::Error;
};
struct BoundaryGradient : Error {
    using Error::Error;
};
struct UnsupportedPair : Error {
    using Error::Error;
};
struct DualSolveFailed : Error {
    using Error::Error;
};
struct MissingLipschitzData : Error {
    using Error::Error;
};
struct NoStrictWitness : Error {
    using Error::Error;
};
struct NewtonStalled : Error {
    using Error::Error;
};
struct StepUnderflow : Error {
    using Error::Error;
};
struct NotNonincreasing : Error {
    using Error::Error;
};
struct OracleDisagreement : Error {
    using Error::Error;
};

// Central tuning surface for every iterative routine in the library.
struct SolverConfig {
    double fixed_point_tol = 1e-12;   // fixed-point residual for projections/dual ascent
    double vi_tol = 1e-10;            // variational-inequality slack
    double feasibility_slack = 1e-9;  // membership slack when validating inputs
    double rank_tol = 1e-12;          // rank-revealing factorization threshold
    double newton_tol = 1e-10;        // moment-constraint residual for tilting solves
    int dual_max_iter = 100000;
    int newton_max_iter = 200;

    static const SolverConfig& defaults() {
        static const SolverConfig cfg{};
        return cfg;
    }
};

// Deterministic, platform-independent random stream (splitmix64 seeded
// xoshiro-style usage of std::mt19937_64 is avoided for distributions;
// uniforms and normals are derived from raw 64-bit words directly so the
// byte output of seeded runs is identical everywhere).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Derive an independent stream by a fixed label; adding a consumer
    // never perturbs another consumer's stream.
    Rng stream(std::uint64_t label) const { return Rng(state_ ^ (0x9e3779b97f4a7c15ULL * (label + 1))); }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        // Box-Muller; discards the paired deviate for simplicity.
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    Vector normal_vector(int n) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

  private:
    std::uint64_t state_;
};

}  // namespace smoothflow
