#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "smoothflow/dro.hpp"
#include "smoothflow/rk45.hpp"
#include "smoothflow/schedule.hpp"
#include "smoothflow/sup_problem.hpp"

namespace smoothflow {

/// What the integrator needs from a problem: regularized value/gradient,
/// the raw supremum value, and the penalty constant C.
class SmoothedObjective {
  public:
    virtual ~SmoothedObjective() = default;
    virtual int dim() const = 0;
    virtual double value_reg(const Vector& x, double mu) const = 0;
    virtual Vector grad_reg(const Vector& x, double mu) const = 0;
    virtual double value_raw(const Vector& x) const = 0;
    virtual double sup_C() const = 0;
    /// Fresh evaluation context for one trajectory (warm-start caches are
    /// confined to the clone).
    virtual std::unique_ptr<SmoothedObjective> clone() const = 0;
};

std::unique_ptr<SmoothedObjective> wrap(const SupProblem& problem);
std::unique_ptr<SmoothedObjective> wrap(const DroProblem& problem);

struct TrajectorySample {
    double t;
    Vector x;
    Vector v;  // velocity; empty for gradient-flow runs
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    bool second_order = true;
};

struct DiagnosticsRecord {
    double t = 0;
    double value_reg = 0;
    double value_raw = 0;
    double residual = 0;         // zeta = value_reg - inf phi
    double energy_E = 0;         // 1/2 ||v_L||^2 + t^2 zeta / (alpha-1)^2
    double W = 0;                // 1/2 ||xdot||^2 + zeta + C mu(t)
    double t2_abs_residual = 0;  // t^2 |zeta|
    double t_speed = 0;          // t ||xdot||
    bool has_energy = false;     // energy requires x*
};

struct DiagnosticsSummary {
    std::vector<DiagnosticsRecord> records;
    double sup_tail_t2_residual = 0;        // sup over the tail of t^2 |zeta|
    std::vector<double> envelope_t2;        // dyadic-window running max of t^2 |zeta|
    std::vector<double> envelope_t_speed;   // dyadic-window running max of t ||xdot||
    std::vector<double> envelope_times;     // left edge of each dyadic window
    double energy_bound_pass_fraction = 1;  // discrete energy-derivative bound
    double energy_bound_pass_fraction_10x = 1;
    bool W_nonnegative = true;
    bool energy_lower_bound = true;
};

/// Right-hand side of the inertial system: (v, -(alpha/t) v - grad phi_mu(x)).
Vector inertial_field(double t, const Vector& x, const Vector& v, const SmoothedObjective& problem,
                      const Schedule& schedule, double alpha);

Trajectory integrate_inertial(const SmoothedObjective& problem, const Schedule& schedule, double alpha,
                              double t0, double T, const Vector& x0, const Vector& v0,
                              const std::vector<double>& sample_times,
                              const Rk45Options& opt = Rk45Options());

Trajectory integrate_gradflow(const SmoothedObjective& problem, const Schedule& schedule, double t0,
                              double T, const Vector& x0, const std::vector<double>& sample_times,
                              const Rk45Options& opt = Rk45Options());

DiagnosticsSummary diagnostics(const Trajectory& traj, double inf_phi, const std::optional<Vector>& x_star,
                               const SmoothedObjective& problem, const Schedule& schedule, double alpha);

}  // namespace smoothflow
