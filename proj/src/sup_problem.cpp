#include "smoothflow/sup_problem.hpp"

#include <cmath>

namespace smoothflow {

const char* to_string(ClosedForm tag) {
    switch (tag) {
        case ClosedForm::LogSumExpSimplex: return "logsumexp-simplex";
        case ClosedForm::QuadProxSimplex: return "quadprox-simplex";
        case ClosedForm::QuadProxBox: return "quadprox-box";
        case ClosedForm::QuadProxLpBall: return "quadprox-lpball";
        case ClosedForm::VertexLogSumExp: return "vertex-logsumexp";
        case ClosedForm::Generic: return "generic";
    }
    return "?";
}

namespace {

ClosedForm deduce_tag(const FeasibleSet& set, const Penalty& penalty) {
    const bool kl = penalty.as<KlPenalty>() != nullptr;
    if (set.as<Simplex>()) return kl ? ClosedForm::LogSumExpSimplex : ClosedForm::QuadProxSimplex;
    if (set.as<Box>()) {
        if (kl) throw UnsupportedPair("KL penalty on a box is not in the catalog");
        return ClosedForm::QuadProxBox;
    }
    if (set.as<LpBall>()) {
        if (kl) throw UnsupportedPair("KL penalty on an lp-ball is not in the catalog");
        return ClosedForm::QuadProxLpBall;
    }
    if (set.as<VertexPolytope>() && kl) return ClosedForm::VertexLogSumExp;
    return ClosedForm::Generic;
}

double support_value(const FeasibleSet& set, const Vector& r, const SolverConfig& cfg) {
    return set.support(r, cfg);
}

// Stabilized weighted log-sum-exp: M + mu log sum_i w_i exp((z_i - M)/mu).
double weighted_lse(const Vector& z, const Vector& w, double mu, Vector* weights_out) {
    double M = z.maxCoeff();
    Vector e(z.size());
    double s = 0.0;
    for (int i = 0; i < z.size(); ++i) {
        e[i] = w[i] * std::exp((z[i] - M) / mu);
        s += e[i];
    }
    if (weights_out) *weights_out = e / s;
    return M + mu * std::log(s);
}

double spread(const Vector& g) { return g.maxCoeff() - g.minCoeff(); }

}  // namespace

SupProblem::SupProblem(ObjectiveFamily objectives, FeasibleSet set, Penalty penalty, SolverConfig cfg)
    : objectives_(std::move(objectives)),
      set_(std::move(set)),
      penalty_(std::move(penalty)),
      cfg_(cfg),
      tag_(deduce_tag(set_, penalty_)),
      sup_C_(penalty_.sup_C(set_)) {
    if (objectives_.m != set_.dim())
        throw DimensionMismatch("SupProblem: objective count differs from dual dimension");
}

double SupProblem::sup_value(const Vector& x) const {
    return support_value(set_, objectives_.eval(x), cfg_);
}

std::pair<double, double> SupProblem::sup_value_bracket(const Vector& x) const {
    Vector g = objectives_.eval(x);
    double v = support_value(set_, g, cfg_);
    return {v, v};
}

double SupProblem::reg_value(const Vector& x, double mu) const {
    return reg_value_from(objectives_.eval(x), mu);
}

double SupProblem::reg_value_from(const Vector& g, double mu) const {
    if (!(mu > 0)) throw Error("reg_value: mu must be positive");
    switch (tag_) {
        case ClosedForm::LogSumExpSimplex:
            return weighted_lse(g, penalty_.as<KlPenalty>()->prior, mu, nullptr);
        case ClosedForm::VertexLogSumExp: {
            const auto* vp = set_.as<VertexPolytope>();
            Vector s = vp->vertices.transpose() * g;
            return weighted_lse(s, penalty_.as<KlPenalty>()->prior, mu, nullptr);
        }
        default: {
            DualCertificate cert = reg_maximizer_from(g, mu);
            double d = (tag_ == ClosedForm::VertexLogSumExp)
                           ? 0.0
                           : penalty_.value(cert.maximizer);
            return cert.maximizer.dot(g) - mu * d;
        }
    }
}

DualCertificate SupProblem::reg_maximizer(const Vector& x, double mu) const {
    return reg_maximizer_from(objectives_.eval(x), mu);
}

DualCertificate SupProblem::reg_maximizer_from(const Vector& g, double mu) const {
    if (!(mu > 0)) throw Error("reg_maximizer: mu must be positive");
    DualCertificate cert;
    switch (tag_) {
        case ClosedForm::LogSumExpSimplex: {
            Vector lam;
            weighted_lse(g, penalty_.as<KlPenalty>()->prior, mu, &lam);
            cert.maximizer = lam;
            cert.vi_residual = 0.0;  // gradient is constant on the simplex at the softmax point
            return cert;
        }
        case ClosedForm::VertexLogSumExp: {
            const auto* vp = set_.as<VertexPolytope>();
            Vector s = vp->vertices.transpose() * g;
            Vector alpha;
            weighted_lse(s, penalty_.as<KlPenalty>()->prior, mu, &alpha);
            cert.maximizer = vp->vertices * alpha;
            cert.vertex_weights = alpha;
            cert.vi_residual = 0.0;
            return cert;
        }
        case ClosedForm::QuadProxSimplex:
        case ClosedForm::QuadProxBox:
        case ClosedForm::QuadProxLpBall: {
            const Vector& c = penalty_.as<QuadraticPenalty>()->center;
            Vector lam = set_.project(c + g / mu, cfg_);
            cert.maximizer = lam;
            Vector r = g - mu * (lam - c);
            cert.vi_residual = std::max(0.0, support_value(set_, r, cfg_) - r.dot(lam));
            return cert;
        }
        case ClosedForm::Generic:
            return generic_maximizer(g, mu);
    }
    throw Error("unreachable");
}

DualCertificate SupProblem::generic_maximizer(const Vector& g, double mu) const {
    if (tag_ == ClosedForm::Generic && mu < 1e-3 * std::max(spread(g), 1e-300))
        throw DualSolveFailed("generic dual solver disabled for mu below 1e-3 * spread(g)");
    const double sigma = penalty_.sigma();
    const int m = static_cast<int>(g.size());
    DualCertificate cert;
    cert.closed_form = false;

    auto objective = [&](const Vector& lam) { return lam.dot(g) - mu * penalty_.value(lam); };

    if (penalty_.as<QuadraticPenalty>()) {
        // projected gradient ascent, base step 1/(mu sigma), Armijo halving
        Vector lam = set_.interior_point();
        double tau0 = 1.0 / (mu * sigma);
        int it = 0;
        for (; it < cfg_.dual_max_iter; ++it) {
            Vector grad = g - mu * penalty_.grad(lam);
            double tau = tau0;
            Vector next = set_.project(lam + tau * grad, cfg_);
            double f0 = objective(lam);
            while (objective(next) < f0 + 1e-4 * grad.dot(next - lam) && tau > 1e-18 * tau0) {
                tau *= 0.5;
                next = set_.project(lam + tau * grad, cfg_);
            }
            double gap = (next - lam).norm();
            lam = next;
            if (gap <= cfg_.fixed_point_tol * (1.0 + lam.norm())) break;
        }
        cert.maximizer = lam;
        cert.iterations = it;
        Vector r = g - mu * penalty_.grad(lam);
        cert.vi_residual = std::max(0.0, support_value(set_, r, cfg_) - r.dot(lam));
        if (cert.vi_residual > 1e3 * cfg_.vi_tol * (1.0 + g.cwiseAbs().maxCoeff()))
            throw DualSolveFailed("generic dual solver: VI residual above tolerance");
        return cert;
    }

    // KL penalty: the maximizer is strictly interior, so ascend along the
    // affine slice {S lambda = s} with positivity backtracking, then polish
    // with damped Newton steps on the same slice.
    Matrix S;
    Vector srhs;
    if (set_.as<Simplex>()) {
        S = Matrix::Ones(1, m);
        srhs = Vector::Ones(1);
    } else if (const auto* mp = set_.as<MomentPolytope>()) {
        S = Matrix(mp->A.rows() + 1, m);
        S.topRows(mp->A.rows()) = mp->A;
        S.bottomRows(1).setOnes();
        srhs = Vector(mp->A.rows() + 1);
        srhs.head(mp->A.rows()) = mp->b;
        srhs[mp->A.rows()] = 1.0;
    } else {
        throw UnsupportedPair("generic KL dual solver: unsupported set variant");
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(S * S.transpose());
    auto null_project = [&](const Vector& v) -> Vector { return v - S.transpose() * cod.solve(S * v); };

    Vector lam = set_.interior_point();
    int it = 0;

    // One PG + damped-Newton pass at a fixed level mu_k; returns the final
    // projected-gradient norm.
    auto solve_level = [&](double mu_k, double tol_k) -> double {
        double tau0 = 1.0 / (mu_k * sigma);
        auto level_obj = [&](const Vector& l) { return l.dot(g) - mu_k * penalty_.value(l); };
        double dn = std::numeric_limits<double>::infinity();

        // phase 1: projected gradient ascent along the slice (warm start)
        for (int pg = 0; pg < 300; ++pg, ++it) {
            Vector grad = g - mu_k * penalty_.grad(lam);
            Vector d = null_project(grad);
            dn = d.norm();
            if (dn <= tol_k) break;
            double tau = tau0;
            // stay strictly interior
            for (int i = 0; i < m; ++i)
                if (d[i] < 0) tau = std::min(tau, -0.9 * lam[i] / d[i]);
            double f0 = level_obj(lam);
            Vector next = lam + tau * d;
            while ((next.minCoeff() <= 0 || level_obj(next) < f0 + 1e-4 * tau * d.squaredNorm()) &&
                   tau > 1e-18 * tau0) {
                tau *= 0.5;
                next = lam + tau * d;
            }
            lam = next;
        }

        // phase 2: damped Newton on the stationarity system along the slice.
        // With H = mu diag(1/lambda), eliminating the primal block reduces the
        // KKT system to the well-conditioned weighted least-squares problem
        //   (S Lam S^T) nu = S Lam gr,   step = (Lam/mu) (gr - S^T nu),
        // so concentrated maximizers (lambda_i ~ e^{-spread/mu}) never place
        // 1/lambda_i on the diagonal. Steps are accepted on residual
        // contraction, which is monotone and cannot cycle.
        for (int polish = 0; polish < 500 && dn > tol_k; ++polish, ++it) {
            Vector gr = g - mu_k * penalty_.grad(lam);
            Matrix W = S * lam.asDiagonal() * S.transpose();
            Vector nu = W.fullPivLu().solve(S * lam.asDiagonal() * gr);
            Vector step = lam.cwiseProduct(gr - S.transpose() * nu) / mu_k;
            // gd = <gr, step> = |gr - S^T nu|_Lam^2 / mu >= 0: ascent direction
            double gd = gr.dot(step);
            double t = 1.0;
            for (int i = 0; i < m; ++i)
                if (step[i] < 0) t = std::min(t, -0.9 * lam[i] / step[i]);
            double fl = level_obj(lam);
            bool accepted = false;
            Vector cand;
            double cand_dn = dn;
            for (; t > 1e-13; t *= 0.5) {
                cand = lam + t * step;
                if (cand.minCoeff() <= 0) continue;
                cand_dn = null_project(g - mu_k * penalty_.grad(cand)).norm();
                // strict Armijo ascent, or residual contraction once the
                // objective is flat to double precision (no flatness slack in
                // the ascent test: that would re-admit cycling steps)
                if (level_obj(cand) >= fl + 1e-4 * t * gd || cand_dn <= (1.0 - 0.3 * t) * dn) {
                    accepted = true;
                    break;
                }
            }
            if (!accepted) break;
            lam = cand;
            dn = cand_dn;
        }
        return dn;
    };

    // stationarity target: a projected-gradient norm of tol_n bounds the
    // maximizer error by tol_n / (mu sigma) via strong concavity
    const double gscale = 1.0 + g.cwiseAbs().maxCoeff();
    const double tol_n = 1e-10 * mu * sigma * gscale;
    // mu-continuation: concentrated maximizers at small mu are reached by
    // warm-starting from looser levels (cf. the tilting solver)
    const double sp = spread(g);
    if (sp / mu > 20.0) {
        double mu_k = sp / 10.0;
        while (mu_k > mu) {
            solve_level(mu_k, 1e-6 * mu_k * sigma * gscale);
            mu_k = std::max(mu, 0.3 * mu_k);
        }
    }
    double dn = solve_level(mu, tol_n);
    if (dn > 1e3 * tol_n)
        throw DualSolveFailed("generic dual solver: stationarity residual above tolerance");
    cert.maximizer = lam;
    cert.iterations = it;
    Vector r = g - mu * penalty_.grad(lam);
    cert.vi_residual = std::max(0.0, support_value(set_, r, cfg_) - r.dot(lam));
    return cert;
}

Vector SupProblem::reg_grad(const Vector& x, double mu) const {
    DualCertificate cert = reg_maximizer(x, mu);
    return objectives_.grad(x) * cert.maximizer;
}

double SupProblem::reg_dmu(const Vector& x, double mu) const {
    DualCertificate cert = reg_maximizer(x, mu);
    if (tag_ == ClosedForm::VertexLogSumExp) {
        // pushforward penalty evaluated at the tilted vertex weights
        const Vector& v = penalty_.as<KlPenalty>()->prior;
        double s = 0.0;
        for (int k = 0; k < cert.vertex_weights.size(); ++k)
            if (cert.vertex_weights[k] > 0)
                s += cert.vertex_weights[k] * std::log(cert.vertex_weights[k] / v[k]);
        return -std::max(s, 0.0);
    }
    return -penalty_.value(cert.maximizer);
}

double SupProblem::lipschitz_bound(const Vector& ball_center, double ball_radius, double mu) const {
    if (!objectives_.lipschitz || !objectives_.grad_norm_bound)
        throw MissingLipschitzData("lipschitz_bound: family lacks smoothness data");
    double L_g = objectives_.lipschitz->sum();
    double G2 = 0.0;
    for (int i = 0; i < objectives_.m; ++i) {
        double b = objectives_.grad_norm_bound(ball_center, ball_radius, i);
        G2 += b * b;
    }
    return set_.support_radius() * L_g + G2 / (mu * penalty_.sigma());
}

SandwichReport SupProblem::sandwich_check(const Vector& x, double mu) const {
    SandwichReport rep;
    rep.phi = sup_value(x);
    rep.phi_mu = reg_value(x, mu);
    rep.c_mu = sup_C_ * mu;
    double gap = rep.phi - rep.phi_mu;
    const double slack = 1e-9;
    rep.pass = (gap >= -slack) && (gap <= rep.c_mu + slack);
    rep.slack = rep.pass ? 0.0 : std::max(-gap, gap - rep.c_mu);
    return rep;
}

}  // namespace smoothflow
