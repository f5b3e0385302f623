#include "smoothflow/dro.hpp"

#include <cmath>
#include <sstream>

#include "smoothflow/feasible_set.hpp"

namespace smoothflow {

AmbiguitySet AmbiguitySet::make(const Matrix& A, const Vector& b, int m, const SolverConfig& cfg) {
    if (A.rows() != b.size()) throw DimensionMismatch("AmbiguitySet: A rows != b size");
    if (A.rows() > 0 && A.cols() != m) throw DimensionMismatch("AmbiguitySet: A cols != m");
    AmbiguitySet out;
    out.m = m;
    if (A.rows() == 0) {
        out.A = Matrix(0, m);
        out.b = Vector(0);
        out.strict_witness = Vector::Constant(m, 1.0 / m);
        return out;
    }
    FeasibleSet poly = FeasibleSet::moment_polytope(A, b, cfg);
    const auto* mp = poly.as<MomentPolytope>();
    out.A = mp->A;
    out.b = mp->b;
    if (mp->witness.size() > 0) out.strict_witness = mp->witness;
    return out;
}

namespace {

// Tilted distribution for multipliers theta, exponents centered by their max.
void tilt_at(const Vector& costs, const AmbiguitySet& set, double mu, const Vector& prior,
             const Vector& theta, Vector& p, double& log_normalizer) {
    Vector z = costs;
    if (set.A.rows() > 0) z -= set.A.transpose() * theta;
    z /= mu;
    double M = z.maxCoeff();
    double s = 0.0;
    p.resize(z.size());
    for (int i = 0; i < z.size(); ++i) {
        p[i] = prior[i] * std::exp(z[i] - M);
        s += p[i];
    }
    p /= s;
    log_normalizer = M + std::log(s);
}

}  // namespace

TiltingSolution solve_tilting(const Vector& costs, const AmbiguitySet& set, double mu,
                              const Vector& prior, const Vector* theta0, const SolverConfig& cfg) {
    if (!(mu > 0)) throw Error("solve_tilting: mu must be positive");
    if (costs.size() != set.m || prior.size() != set.m)
        throw DimensionMismatch("solve_tilting: dimension mismatch");
    if (!set.strict_witness) throw NoStrictWitness("solve_tilting: ambiguity set has no strict witness");

    const int d = static_cast<int>(set.A.rows());
    TiltingSolution sol;
    if (d == 0) {
        sol.theta = Vector(0);
        tilt_at(costs, set, mu, prior, sol.theta, sol.p, sol.log_normalizer);
        sol.residual = 0.0;
        return sol;
    }

    Vector theta = (theta0 && theta0->size() == d) ? *theta0 : Vector::Zero(d);
    Vector p;
    double logn = 0.0;

    // Damped Newton on the smooth convex dual psi(theta) = mu log Z + <theta, b>
    // (gradient b - A p, Hessian (1/mu) A Cov(p) A^T) at one mu level.
    double contraction = 0.0;
    auto solve_level = [&](double mu_k, Vector& th, int& iters, double tol) -> double {
        tilt_at(costs, set, mu_k, prior, th, p, logn);
        double psi = mu_k * logn + th.dot(set.b);
        double res = (set.A * p - set.b).cwiseAbs().maxCoeff();
        for (int it = 0; it < cfg.newton_max_iter && res > tol; ++it, ++iters) {
            Vector grad = set.b - set.A * p;
            Matrix cov = Matrix(p.asDiagonal()) - p * p.transpose();
            Matrix H = (1.0 / mu_k) * set.A * cov * set.A.transpose();
            // Levenberg damping keeps the step defined when Cov degenerates;
            // when a step is rejected the damping escalates, degrading the
            // direction toward plain gradient descent rather than giving up
            double tau = 0.0;
            bool improved = false;
            for (int damp = 0; damp < 40 && !improved; ++damp) {
                Eigen::LLT<Matrix> llt(H + tau * Matrix::Identity(d, d));
                Vector step;
                bool defined = false;
                if (llt.info() == Eigen::Success) {
                    step = llt.solve(-grad);
                    defined = step.allFinite();
                }
                if (defined) {
                    double s = 1.0;
                    for (int h = 0; h < 60; ++h) {
                        Vector cand_th = th + s * step;
                        Vector cand_p;
                        double cand_logn = 0.0;
                        tilt_at(costs, set, mu_k, prior, cand_th, cand_p, cand_logn);
                        double cand_psi = mu_k * cand_logn + cand_th.dot(set.b);
                        double cand_res = (set.A * cand_p - set.b).cwiseAbs().maxCoeff();
                        // near the optimum psi decrements drop below double
                        // precision; residual contraction is the reliable
                        // acceptance signal there (and only there -- accepting
                        // on contraction far from the optimum breaks descent)
                        if (cand_psi <= psi + 1e-4 * s * grad.dot(step) ||
                            (res <= 1e-6 && cand_res <= 0.9 * res)) {
                            th = cand_th;
                            p = cand_p;
                            logn = cand_logn;
                            psi = cand_psi;
                            improved = true;
                            break;
                        }
                        s *= 0.5;
                    }
                }
                tau = (tau == 0.0) ? 1e-8 * (1.0 + H.trace()) : 10.0 * tau;
            }
            if (!improved) break;
            double old_res = res;
            res = (set.A * p - set.b).cwiseAbs().maxCoeff();
            contraction = (old_res > 0) ? res / old_res : 0.0;
        }
        return res;
    };

    // Cold or far-off starts at small mu face enormous exponents; a geometric
    // mu-continuation keeps each Newton solve well conditioned.
    int iters = 0;
    Vector z = costs - set.A.transpose() * theta;
    double spread = z.maxCoeff() - z.minCoeff();
    // rounding in (f - A^T theta)/mu caps the reachable moment residual; the
    // effective tolerance honors that floor at very small mu
    const double floor = 32.0 * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, spread / mu);
    const double tol = std::max(cfg.newton_tol, floor);
    double res = std::numeric_limits<double>::infinity();
    if (spread / mu > 40.0) {
        double mu_k = spread / 20.0;
        while (mu_k > mu) {
            solve_level(mu_k, theta, iters, tol);
            mu_k = std::max(mu, 0.25 * mu_k);
        }
    }
    res = solve_level(mu, theta, iters, tol);
    if (res > tol) {
        std::ostringstream os;
        os << "solve_tilting: moment residual " << res << " above tolerance at mu = " << mu;
        throw NewtonStalled(os.str());
    }

    sol.p = p;
    sol.theta = theta;
    sol.log_normalizer = logn;
    sol.newton_iters = iters;
    sol.residual = res;
    sol.last_contraction = contraction;
    return sol;
}

DroProblem::DroProblem(ScenarioCosts costs, AmbiguitySet set, Vector prior, SolverConfig cfg)
    : costs_(std::move(costs)), set_(std::move(set)), prior_(std::move(prior)), cfg_(cfg) {
    if (prior_.size() != set_.m) throw DimensionMismatch("DroProblem: prior dimension mismatch");
    if (prior_.minCoeff() <= 0) throw Infeasible("DroProblem: prior must be strictly positive");
    prior_ /= prior_.sum();
}

double DroProblem::sup_C() const { return -std::log(prior_.minCoeff()); }

TiltingSolution DroProblem::tilt(const Vector& x, double mu) const {
    Vector f = costs_.family.eval(x);
    const Vector* warm = warm_ ? &*warm_ : nullptr;
    TiltingSolution sol = solve_tilting(f, set_, mu, prior_, warm, cfg_);
    warm_ = sol.theta;
    return sol;
}

double DroProblem::reg_value(const Vector& x, double mu) const {
    Vector f = costs_.family.eval(x);
    const Vector* warm = warm_ ? &*warm_ : nullptr;
    TiltingSolution sol = solve_tilting(f, set_, mu, prior_, warm, cfg_);
    warm_ = sol.theta;
    double kl = 0.0;
    for (int i = 0; i < sol.p.size(); ++i)
        if (sol.p[i] > 0) kl += sol.p[i] * std::log(sol.p[i] / prior_[i]);
    return sol.p.dot(f) - mu * std::max(kl, 0.0);
}

Vector DroProblem::reg_grad(const Vector& x, double mu) const {
    Vector f = costs_.family.eval(x);
    const Vector* warm = warm_ ? &*warm_ : nullptr;
    TiltingSolution sol = solve_tilting(f, set_, mu, prior_, warm, cfg_);
    warm_ = sol.theta;
    return costs_.family.grad(x) * sol.p;
}

std::pair<ScenarioCosts, AmbiguitySet> make_dro_benchmark(std::uint64_t seed, int n, int m) {
    Rng rng(seed);
    Rng rs = rng.stream(1);  // diagonal entries
    Rng rd = rng.stream(2);  // scenario centers
    Rng re = rng.stream(3);  // offsets
    std::vector<Matrix> Ms;
    std::vector<Vector> centers;
    Vector offs(m);
    for (int i = 0; i < m; ++i) {
        Vector diag(n);
        for (int j = 0; j < n; ++j) diag[j] = rs.uniform(0.5, 2.0);
        Ms.push_back(Matrix(diag.asDiagonal()));
        centers.push_back(rd.normal_vector(n));
        offs[i] = re.uniform(-0.2, 0.2);
    }
    ScenarioCosts costs{make_quadratic_family(std::move(Ms), std::move(centers), offs)};

    Matrix A = Matrix::Zero(2, m);
    A(0, 0) = 1.0;
    A(0, 1) = -1.0;
    A(1, 1) = 1.0;
    A(1, 2) = -1.0;
    Vector b = Vector::Zero(2);
    return {std::move(costs), AmbiguitySet::make(A, b, m)};
}

}  // namespace smoothflow
