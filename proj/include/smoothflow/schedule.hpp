#pragma once

#include <cmath>
#include <functional>

#include "smoothflow/common.hpp"

namespace smoothflow {

struct ScheduleReport {
    bool tmu_integrable = false;      // integral of t mu(t) finite
    bool t2mudot_integrable = false;  // integral of t^2 |mu'(t)| finite
    bool l1_integrable = false;       // integral of mu(t) finite
    bool t2mu_vanishes = false;       // t^2 mu(t) numerically decreasing to 0
};

/// Regularization path mu(t) = c t^{-r} (or a user closure with analytic
/// derivative); continuously differentiable and nonincreasing.
class Schedule {
  public:
    static Schedule power(double c, double r) {
        if (!(c > 0) || !(r > 0)) throw Error("Schedule::power: c > 0 and r > 0 required");
        Schedule s;
        s.c_ = c;
        s.r_ = r;
        return s;
    }

    static Schedule custom(std::function<double(double)> mu, std::function<double(double)> mu_dot) {
        Schedule s;
        s.mu_ = std::move(mu);
        s.mu_dot_ = std::move(mu_dot);
        return s;
    }

    double mu(double t) const { return mu_ ? mu_(t) : c_ * std::pow(t, -r_); }
    double mu_dot(double t) const { return mu_dot_ ? mu_dot_(t) : -c_ * r_ * std::pow(t, -r_ - 1.0); }
    bool is_power() const { return !mu_; }
    double exponent() const { return r_; }
    double scale() const { return c_; }

    ScheduleReport check(double t0) const;

  private:
    Schedule() = default;
    double c_ = 1.0, r_ = 0.0;
    std::function<double(double)> mu_;
    std::function<double(double)> mu_dot_;
};

inline ScheduleReport Schedule::check(double t0) const {
    // nonincreasing probe
    for (double t = t0; t <= 1e6 * t0; t *= 1.9) {
        if (mu_dot(t) > 0) throw NotNonincreasing("schedule: mu_dot > 0 at t = " + std::to_string(t));
    }
    ScheduleReport rep;
    if (is_power()) {
        rep.tmu_integrable = r_ > 2.0;
        rep.t2mudot_integrable = r_ > 2.0;
        rep.l1_integrable = r_ > 1.0;
    } else {
        // numeric tail comparison: treat the closure as power-like by slope
        double m1 = mu(1e3), m2 = mu(1e5);
        double slope = (m1 > 0 && m2 > 0) ? std::log(m1 / m2) / std::log(1e2) : 0.0;
        rep.tmu_integrable = slope > 2.0;
        rep.t2mudot_integrable = slope > 2.0;
        rep.l1_integrable = slope > 1.0;
    }
    if (rep.tmu_integrable && rep.t2mudot_integrable) {
        double a = 1e2 * 1e2 * mu(1e2);
        double b = 1e4 * 1e4 * mu(1e4);
        double c = 1e6 * 1e6 * mu(1e6);
        rep.t2mu_vanishes = (a > b) && (b > c);
    }
    return rep;
}

}  // namespace smoothflow
