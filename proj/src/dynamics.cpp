#include "smoothflow/dynamics.hpp"

#include <cmath>

namespace smoothflow {

namespace {

class SupAdapter final : public SmoothedObjective {
  public:
    explicit SupAdapter(const SupProblem& p) : p_(&p) {}
    int dim() const override { return p_->objectives().n; }
    double value_reg(const Vector& x, double mu) const override { return p_->reg_value(x, mu); }
    Vector grad_reg(const Vector& x, double mu) const override { return p_->reg_grad(x, mu); }
    double value_raw(const Vector& x) const override { return p_->sup_value(x); }
    double sup_C() const override { return p_->sup_C(); }
    std::unique_ptr<SmoothedObjective> clone() const override {
        return std::make_unique<SupAdapter>(*p_);
    }

  private:
    const SupProblem* p_;
};

class DroAdapter final : public SmoothedObjective {
  public:
    explicit DroAdapter(DroProblem p) : p_(std::move(p)) {}
    int dim() const override { return p_.costs().family.n; }
    double value_reg(const Vector& x, double mu) const override { return p_.reg_value(x, mu); }
    Vector grad_reg(const Vector& x, double mu) const override { return p_.reg_grad(x, mu); }
    double value_raw(const Vector& x) const override {
        Vector f = p_.costs().family.eval(x);
        if (!poly_) poly_ = FeasibleSet::moment_polytope(p_.ambiguity().A, p_.ambiguity().b);
        return poly_->support(f);
    }
    double sup_C() const override { return p_.sup_C(); }
    std::unique_ptr<SmoothedObjective> clone() const override {
        auto c = std::make_unique<DroAdapter>(p_);
        c->p_.reset_warm_start();
        return c;
    }

  private:
    DroProblem p_;  // owns its Newton warm-start cache
    mutable std::optional<FeasibleSet> poly_;
};

}  // namespace

std::unique_ptr<SmoothedObjective> wrap(const SupProblem& problem) {
    return std::make_unique<SupAdapter>(problem);
}

std::unique_ptr<SmoothedObjective> wrap(const DroProblem& problem) {
    return std::make_unique<DroAdapter>(problem);
}

Vector inertial_field(double t, const Vector& x, const Vector& v, const SmoothedObjective& problem,
                      const Schedule& schedule, double alpha) {
    const int n = static_cast<int>(x.size());
    Vector out(2 * n);
    out.head(n) = v;
    out.tail(n) = -(alpha / t) * v - problem.grad_reg(x, schedule.mu(t));
    return out;
}

Trajectory integrate_inertial(const SmoothedObjective& problem, const Schedule& schedule, double alpha,
                              double t0, double T, const Vector& x0, const Vector& v0,
                              const std::vector<double>& sample_times, const Rk45Options& opt) {
    if (!(t0 > 0)) throw Error("integrate_inertial: t0 must be positive");
    const int n = problem.dim();
    if (x0.size() != n || v0.size() != n) throw DimensionMismatch("integrate_inertial: bad state size");
    auto ctx = problem.clone();
    Vector y0(2 * n);
    y0.head(n) = x0;
    y0.tail(n) = v0;
    Trajectory traj;
    traj.second_order = true;
    auto field = [&](double t, const Vector& y) {
        return inertial_field(t, y.head(n), y.tail(n), *ctx, schedule, alpha);
    };
    integrate_rk45(field, t0, T, y0, sample_times, [&](double t, const Vector& y) {
        traj.samples.push_back({t, y.head(n), y.tail(n)});
    }, opt);
    return traj;
}

Trajectory integrate_gradflow(const SmoothedObjective& problem, const Schedule& schedule, double t0,
                              double T, const Vector& x0, const std::vector<double>& sample_times,
                              const Rk45Options& opt) {
    if (!(t0 > 0)) throw Error("integrate_gradflow: t0 must be positive");
    const int n = problem.dim();
    if (x0.size() != n) throw DimensionMismatch("integrate_gradflow: bad state size");
    auto ctx = problem.clone();
    Trajectory traj;
    traj.second_order = false;
    auto field = [&](double t, const Vector& y) -> Vector {
        return -ctx->grad_reg(y, schedule.mu(t));
    };
    // the flow's curvature scales like 1/mu(t), so the integrator must be
    // L-stable; an explicit method would be stability-limited to steps ~ mu(t)
    integrate_stiff(field, t0, T, x0, sample_times, [&](double t, const Vector& y) {
        traj.samples.push_back({t, y, Vector()});
    }, opt);
    return traj;
}

DiagnosticsSummary diagnostics(const Trajectory& traj, double inf_phi, const std::optional<Vector>& x_star,
                               const SmoothedObjective& problem, const Schedule& schedule, double alpha) {
    DiagnosticsSummary sum;
    auto ctx = problem.clone();
    const double C = ctx->sup_C();
    const double am1 = alpha - 1.0;

    for (const auto& s : traj.samples) {
        DiagnosticsRecord rec;
        rec.t = s.t;
        double mu = schedule.mu(s.t);
        rec.value_reg = ctx->value_reg(s.x, mu);
        rec.value_raw = ctx->value_raw(s.x);
        rec.residual = rec.value_reg - inf_phi;
        double speed2 = s.v.size() ? s.v.squaredNorm() : 0.0;
        rec.W = 0.5 * speed2 + rec.residual + C * mu;
        rec.t2_abs_residual = s.t * s.t * std::abs(rec.residual);
        rec.t_speed = s.v.size() ? s.t * s.v.norm() : 0.0;
        if (x_star && s.v.size()) {
            Vector vl = s.x - *x_star + (s.t / am1) * s.v;
            rec.energy_E = 0.5 * vl.squaredNorm() + (s.t * s.t / (am1 * am1)) * rec.residual;
            rec.has_energy = true;
        }
        if (rec.W < -1e-9) sum.W_nonnegative = false;
        if (rec.has_energy &&
            rec.energy_E < -C * s.t * s.t * mu / (am1 * am1) - 1e-9 * (1.0 + std::abs(rec.energy_E)))
            sum.energy_lower_bound = false;
        sum.records.push_back(rec);
    }

    // tail sup of t^2 |zeta| over the last three quarters of the time range
    if (!sum.records.empty()) {
        double t_lo = sum.records.front().t + 0.25 * (sum.records.back().t - sum.records.front().t);
        double best = 0.0;
        for (const auto& r : sum.records)
            if (r.t >= t_lo) best = std::max(best, r.t2_abs_residual);
        sum.sup_tail_t2_residual = best;
    }

    // dyadic-window envelopes
    if (!sum.records.empty()) {
        double t0 = sum.records.front().t;
        double T = sum.records.back().t;
        for (double lo = t0; lo < T; lo *= 2.0) {
            double hi = std::min(lo * 2.0, T * (1 + 1e-12));
            double e2 = 0.0, es = 0.0;
            bool any = false;
            for (const auto& r : sum.records)
                if (r.t >= lo && r.t < hi) {
                    e2 = std::max(e2, r.t2_abs_residual);
                    es = std::max(es, r.t_speed);
                    any = true;
                }
            if (any) {
                sum.envelope_times.push_back(lo);
                sum.envelope_t2.push_back(e2);
                sum.envelope_t_speed.push_back(es);
            }
        }
    }

    // discrete energy-derivative bound at sample midpoints
    int checked = 0, pass = 0, pass10 = 0;
    for (std::size_t i = 0; i + 1 < sum.records.size(); ++i) {
        const auto& a = sum.records[i];
        const auto& b = sum.records[i + 1];
        if (!a.has_energy || !b.has_energy || b.t <= a.t) continue;
        double tm = 0.5 * (a.t + b.t);
        double lhs = (b.energy_E - a.energy_E) / (b.t - a.t);
        double rhs = C * (alpha - 3.0) / (am1 * am1) * tm * schedule.mu(tm) +
                     C / (am1 * am1) * tm * tm * std::abs(schedule.mu_dot(tm));
        double tol = 1e-6 * (1.0 + std::abs(a.energy_E));
        ++checked;
        if (lhs <= rhs + tol) ++pass;
        if (lhs <= rhs + 10.0 * tol) ++pass10;
    }
    if (checked > 0) {
        sum.energy_bound_pass_fraction = static_cast<double>(pass) / checked;
        sum.energy_bound_pass_fraction_10x = static_cast<double>(pass10) / checked;
    }
    return sum;
}

}  // namespace smoothflow
