#include "smoothflow/rk45.hpp"

#include <algorithm>
#include <cmath>

namespace smoothflow {

std::vector<double> log_spaced(double t0, double T, int count) {
    std::vector<double> out;
    if (count < 2 || !(T > t0)) {
        out.push_back(t0);
        if (T > t0) out.push_back(T);
        return out;
    }
    double l0 = std::log(t0), l1 = std::log(T);
    for (int i = 0; i < count; ++i) out.push_back(std::exp(l0 + (l1 - l0) * i / (count - 1)));
    out.front() = t0;
    out.back() = T;
    return out;
}

namespace {

// Dormand-Prince RK5(4)7M coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// embedded 4th-order weights
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                 e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

}  // namespace

void integrate_rk45(const OdeField& f, double t0, double T, const Vector& y0,
                    const std::vector<double>& sample_times, const OdeObserver& observe,
                    const Rk45Options& opt) {
    if (!(T > t0)) throw Error("integrate_rk45: T must exceed t0");
    double t = t0;
    Vector y = y0;
    Vector k1 = f(t, y);

    std::size_t next_sample = 0;
    auto emit_due = [&](double tt, const Vector& yy) {
        while (next_sample < sample_times.size() && sample_times[next_sample] <= tt * (1 + 1e-14)) {
            observe(sample_times[next_sample], yy);
            ++next_sample;
        }
    };
    emit_due(t, y);

    // initial step heuristic
    double h = 1e-4 * std::max(1.0, std::abs(t0));
    double err_prev = 1.0;
    const double order = 5.0;

    for (long step = 0; step < opt.max_steps && t < T; ++step) {
        double h_full = h;  // controller-proposed step, before clipping to samples
        double target = T;
        if (next_sample < sample_times.size()) target = std::min(target, sample_times[next_sample]);
        if (t + h >= target) h = target - t;
        if (h < opt.underflow * std::max(t, 1.0))
            throw StepUnderflow("integrate_rk45: step underflow at t = " + std::to_string(t));

        Vector k2 = f(t + c2 * h, y + h * (a21 * k1));
        Vector k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        Vector k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        Vector k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        Vector k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        Vector y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        Vector k7 = f(t + h, y5);
        Vector y4 = y + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err = 0.0;
        for (int i = 0; i < y.size(); ++i) {
            double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
            double e = (y5[i] - y4[i]) / sc;
            err += e * e;
        }
        err = std::sqrt(err / y.size());

        if (err <= 1.0 || h <= opt.underflow * std::max(t, 1.0) * 2.0) {
            t += h;
            y = y5;
            k1 = k7;  // FSAL
            emit_due(t, y);
            double e = std::max(err, 1e-10);
            double factor = opt.safety * std::pow(e, -1.0 / order + opt.beta) *
                            std::pow(err_prev, opt.beta);
            factor = std::clamp(factor, opt.min_factor, opt.max_factor);
            err_prev = e;
            h = h_full * factor;
        } else {
            double factor = std::clamp(opt.safety * std::pow(err, -1.0 / order), opt.min_factor, 1.0);
            h *= factor;
        }
    }
    if (t < T) throw Error("integrate_rk45: step budget exhausted");
}

namespace {

// One implicit Euler step z = y + h f(t + h, z), solved by modified Newton
// with a finite-difference Jacobian assembled once per attempt. Returns false
// when the iteration fails to contract (caller halves the step).
bool implicit_euler_step(const OdeField& f, double t, const Vector& y, double h, Vector& out,
                         double newton_tol) {
    const int n = static_cast<int>(y.size());
    Vector fy = f(t, y);
    Vector z = y + h * fy;  // explicit predictor

    Matrix J(n, n);
    Vector fz = f(t + h, z);
    for (int j = 0; j < n; ++j) {
        double e = 1e-7 * (1.0 + std::abs(z[j]));
        Vector zp = z;
        zp[j] += e;
        J.col(j) = (f(t + h, zp) - fz) / e;
    }
    Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(n, n) - h * J);

    for (int it = 0; it < 25; ++it) {
        Vector res = z - y - h * fz;
        if (res.cwiseAbs().maxCoeff() <= newton_tol) {
            out = z;
            return true;
        }
        Vector dz = lu.solve(-res);
        if (!dz.allFinite()) return false;
        z += dz;
        fz = f(t + h, z);
    }
    return false;
}

}  // namespace

void integrate_stiff(const OdeField& f, double t0, double T, const Vector& y0,
                     const std::vector<double>& sample_times, const OdeObserver& observe,
                     const Rk45Options& opt) {
    if (!(T > t0)) throw Error("integrate_stiff: T must exceed t0");
    double t = t0;
    Vector y = y0;

    std::size_t next_sample = 0;
    auto emit_due = [&](double tt, const Vector& yy) {
        while (next_sample < sample_times.size() && sample_times[next_sample] <= tt * (1 + 1e-14)) {
            observe(sample_times[next_sample], yy);
            ++next_sample;
        }
    };
    emit_due(t, y);

    double h = 1e-3 * std::max(1.0, std::abs(t0));
    for (long step = 0; step < opt.max_steps && t < T; ++step) {
        double h_full = h;
        double target = T;
        if (next_sample < sample_times.size()) target = std::min(target, sample_times[next_sample]);
        if (t + h >= target) h = target - t;
        if (h < opt.underflow * std::max(t, 1.0))
            throw StepUnderflow("integrate_stiff: step underflow at t = " + std::to_string(t));

        double nt = 0.1 * (opt.atol + opt.rtol * y.cwiseAbs().maxCoeff());
        Vector y1, ya, y2;
        bool ok = implicit_euler_step(f, t, y, h, y1, nt) &&
                  implicit_euler_step(f, t, y, 0.5 * h, ya, nt) &&
                  implicit_euler_step(f, t + 0.5 * h, ya, 0.5 * h, y2, nt);
        if (!ok) {
            h *= 0.25;
            continue;
        }

        // step doubling: the half-step solution leads by ~ C h^2 / 2
        double err = 0.0;
        for (int i = 0; i < y.size(); ++i) {
            double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y2[i]));
            double e = (y2[i] - y1[i]) / sc;
            err += e * e;
        }
        err = std::sqrt(err / y.size());

        if (err <= 1.0) {
            t += h;
            y = 2.0 * y2 - y1;  // Richardson extrapolation, second order
            emit_due(t, y);
            double factor = std::clamp(opt.safety / std::sqrt(std::max(err, 1e-10)),
                                       opt.min_factor, opt.max_factor);
            h = h_full * factor;
        } else {
            h *= std::clamp(opt.safety / std::sqrt(err), opt.min_factor, 1.0);
        }
    }
    if (t < T) throw Error("integrate_stiff: step budget exhausted");
}

}  // namespace smoothflow
