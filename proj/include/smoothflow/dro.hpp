#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "smoothflow/common.hpp"
#include "smoothflow/objective.hpp"

namespace smoothflow {

/// Moment-constrained ambiguity set {p : Ap = b, sum p = 1, p >= 0}.
/// Redundant rows of [A; 1^T] are removed on construction.
struct AmbiguitySet {
    Matrix A;  // d x m (possibly 0 x m)
    Vector b;
    int m = 0;
    std::optional<Vector> strict_witness;

    static AmbiguitySet make(const Matrix& A, const Vector& b, int m,
                             const SolverConfig& cfg = SolverConfig::defaults());
};

struct TiltingSolution {
    Vector p;               // strictly positive, sums to 1
    Vector theta;           // moment multipliers
    double log_normalizer;  // log of the tilting partition sum
    int newton_iters = 0;
    double residual = 0;          // ||A p - b||_inf
    double last_contraction = 0;  // residual ratio of the final two Newton steps
};

/// Scenario costs f_i with gradients; the benchmark family is quadratic.
struct ScenarioCosts {
    ObjectiveFamily family;
};

/// Exponential tilting p_i proportional to v_i exp((f_i - (A^T theta)_i)/mu)
/// with theta solving A p(theta) = b by damped Newton. `theta0` warm-starts.
TiltingSolution solve_tilting(const Vector& costs, const AmbiguitySet& set, double mu,
                              const Vector& prior, const Vector* theta0 = nullptr,
                              const SolverConfig& cfg = SolverConfig::defaults());

/// Per-trajectory evaluation context; owns the Newton warm start.
class DroProblem {
  public:
    DroProblem(ScenarioCosts costs, AmbiguitySet set, Vector prior,
               SolverConfig cfg = SolverConfig::defaults());

    const ScenarioCosts& costs() const { return costs_; }
    const AmbiguitySet& ambiguity() const { return set_; }
    const Vector& prior() const { return prior_; }
    double sup_C() const;

    TiltingSolution tilt(const Vector& x, double mu) const;
    double reg_value(const Vector& x, double mu) const;
    Vector reg_grad(const Vector& x, double mu) const;

    void reset_warm_start() const { warm_.reset(); }

  private:
    ScenarioCosts costs_;
    AmbiguitySet set_;
    Vector prior_;
    SolverConfig cfg_;
    mutable std::optional<Vector> warm_;
};

/// The randomized quadratic DRO instance (n decision vars, m scenarios,
/// pairwise moment constraints p1 = p2 = p3).
std::pair<ScenarioCosts, AmbiguitySet> make_dro_benchmark(std::uint64_t seed, int n = 5, int m = 6);

}  // namespace smoothflow
