#pragma once

#include <string>

#include "smoothflow/feasible_set.hpp"
#include "smoothflow/objective.hpp"
#include "smoothflow/penalty.hpp"

namespace smoothflow {

enum class ClosedForm {
    LogSumExpSimplex,
    QuadProxSimplex,
    QuadProxBox,
    QuadProxLpBall,
    VertexLogSumExp,
    Generic,
};

const char* to_string(ClosedForm tag);

/// Certificate attached to every dual maximizer computation.
struct DualCertificate {
    Vector maximizer;       // lambda^mu(x) in Q
    double vi_residual = 0; // max sampled violation of the variational inequality
    int iterations = 0;
    bool closed_form = true;
    /// For the vertex log-sum-exp form: the tilted weights over vertices.
    Vector vertex_weights;
};

struct SandwichReport {
    double phi = 0;
    double phi_mu = 0;
    double c_mu = 0;
    bool pass = false;
    double slack = 0;  // violation magnitude when pass is false
};

/// A supremum problem phi(x) = max_{lambda in Q} <lambda, g(x)> together with
/// its penalty-regularized surrogate phi_mu. Immutable after construction.
class SupProblem {
  public:
    SupProblem(ObjectiveFamily objectives, FeasibleSet set, Penalty penalty,
               SolverConfig cfg = SolverConfig::defaults());

    const ObjectiveFamily& objectives() const { return objectives_; }
    const FeasibleSet& set() const { return set_; }
    const Penalty& penalty() const { return penalty_; }
    ClosedForm tag() const { return tag_; }
    double sup_C() const { return sup_C_; }
    const SolverConfig& config() const { return cfg_; }

    /// phi(x), exact for closed forms; for Generic sets an epsilon-regularized
    /// bracket midpoint (see sup_value_bracket).
    double sup_value(const Vector& x) const;
    /// [lower, upper] bracket around phi(x) for the Generic route.
    std::pair<double, double> sup_value_bracket(const Vector& x) const;

    double reg_value(const Vector& x, double mu) const;
    DualCertificate reg_maximizer(const Vector& x, double mu) const;
    Vector reg_grad(const Vector& x, double mu) const;
    /// d/dmu phi_mu(x) = -D(lambda^mu(x)) <= 0.
    double reg_dmu(const Vector& x, double mu) const;

    /// Prop-2.2-style modulus on the ball (center, radius):
    /// M_Q L_g + G_B^2 / (mu sigma).
    double lipschitz_bound(const Vector& ball_center, double ball_radius, double mu) const;

    SandwichReport sandwich_check(const Vector& x, double mu) const;

    /// Same evaluations against raw objective values (used by the dro module
    /// for oracle equivalence without re-evaluating the oracles).
    double reg_value_from(const Vector& g, double mu) const;
    DualCertificate reg_maximizer_from(const Vector& g, double mu) const;

    /// Generic strongly-concave dual solver, exposed for oracle tests.
    DualCertificate generic_maximizer(const Vector& g, double mu) const;

  private:
    ObjectiveFamily objectives_;
    FeasibleSet set_;
    Penalty penalty_;
    SolverConfig cfg_;
    ClosedForm tag_;
    double sup_C_;
};

}  // namespace smoothflow
