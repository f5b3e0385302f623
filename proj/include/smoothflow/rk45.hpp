#pragma once

#include <functional>
#include <vector>

#include "smoothflow/common.hpp"

namespace smoothflow {

/// Adaptive embedded Dormand-Prince 4(5) pair with a PI step-size
/// controller. Integrates y' = f(t, y) from t0 to T and evaluates `observe`
/// at the requested sample times (steps are shortened to land on them
/// exactly, so no interpolation error enters the samples).
struct Rk45Options {
    double rtol = 1e-8;
    double atol = 1e-10;
    double safety = 0.9;
    double min_factor = 0.2;
    double max_factor = 10.0;
    double beta = 0.04;  // PI controller integral gain
    // step underflow threshold relative to the current time
    double underflow = 1e-14;
    long max_steps = 200000000L;
};

using OdeField = std::function<Vector(double, const Vector&)>;
using OdeObserver = std::function<void(double, const Vector&)>;

void integrate_rk45(const OdeField& f, double t0, double T, const Vector& y0,
                    const std::vector<double>& sample_times, const OdeObserver& observe,
                    const Rk45Options& opt = Rk45Options());

/// L-stable stiff integrator: implicit Euler solved by a modified Newton
/// iteration with finite-difference Jacobians, step-doubling error control,
/// and Richardson extrapolation (second order). Intended for strongly
/// contracting flows whose curvature grows without bound (e.g. gradient flow
/// under a vanishing smoothing schedule, where the Hessian scales like
/// 1/mu(t)); explicit methods are stability-limited to steps ~ mu(t) there.
void integrate_stiff(const OdeField& f, double t0, double T, const Vector& y0,
                     const std::vector<double>& sample_times, const OdeObserver& observe,
                     const Rk45Options& opt = Rk45Options());

/// Log-spaced sample grid over [t0, T], endpoints included.
std::vector<double> log_spaced(double t0, double T, int count);

}  // namespace smoothflow
