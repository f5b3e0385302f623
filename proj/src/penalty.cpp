#include "smoothflow/penalty.hpp"

#include <cmath>

namespace smoothflow {

Penalty Penalty::kl(Vector prior) {
    if (prior.size() < 1) throw DimensionMismatch("kl: empty prior");
    if (prior.minCoeff() <= 0.0) throw Infeasible("kl: prior must be strictly positive");
    prior /= prior.sum();
    return Penalty(KlPenalty{std::move(prior)});
}

Penalty Penalty::kl_uniform(int m) { return kl(Vector::Constant(m, 1.0)); }

Penalty Penalty::quadratic(Vector center) {
    if (center.size() < 1) throw DimensionMismatch("quadratic: empty center");
    return Penalty(QuadraticPenalty{std::move(center)});
}

int Penalty::dim() const {
    if (const auto* k = as<KlPenalty>()) return static_cast<int>(k->prior.size());
    return static_cast<int>(as<QuadraticPenalty>()->center.size());
}

double Penalty::value(const Vector& lambda) const {
    if (lambda.size() != dim()) throw DimensionMismatch("penalty value: dimension mismatch");
    if (const auto* k = as<KlPenalty>()) {
        double s = 0.0;
        for (int i = 0; i < lambda.size(); ++i) {
            if (lambda[i] < -1e-12) throw InfeasiblePoint("penalty value: negative KL coordinate");
            if (lambda[i] > 0.0) s += lambda[i] * std::log(lambda[i] / k->prior[i]);
        }
        return std::max(s, 0.0);
    }
    const auto* q = as<QuadraticPenalty>();
    return 0.5 * (lambda - q->center).squaredNorm();
}

Vector Penalty::grad(const Vector& lambda) const {
    if (lambda.size() != dim()) throw DimensionMismatch("penalty grad: dimension mismatch");
    if (const auto* k = as<KlPenalty>()) {
        Vector g(lambda.size());
        for (int i = 0; i < lambda.size(); ++i) {
            if (lambda[i] <= 0.0) throw BoundaryGradient("penalty grad: KL gradient needs lambda > 0");
            g[i] = 1.0 + std::log(lambda[i] / k->prior[i]);
        }
        return g;
    }
    const auto* q = as<QuadraticPenalty>();
    return lambda - q->center;
}

double Penalty::sup_C(const FeasibleSet& set) const {
    if (const auto* k = as<KlPenalty>()) {
        if (set.as<Simplex>() || set.as<MomentPolytope>()) {
            if (dim() != set.dim()) throw DimensionMismatch("sup_C: prior dimension mismatch");
            return -std::log(k->prior.minCoeff());
        }
        if (const auto* vp = set.as<VertexPolytope>()) {
            // pushforward KL over vertex weights; prior lives on the K vertices
            if (dim() != vp->vertices.cols()) throw DimensionMismatch("sup_C: prior/vertex count mismatch");
            return -std::log(k->prior.minCoeff());
        }
        throw UnsupportedPair("sup_C: KL penalty only on Simplex, MomentPolytope or VertexPolytope");
    }
    const auto* q = as<QuadraticPenalty>();
    if (set.as<Simplex>()) {
        if (dim() != set.dim()) throw DimensionMismatch("sup_C: center dimension mismatch");
        return 0.5 * (1.0 + q->center.squaredNorm() - 2.0 * q->center.minCoeff());
    }
    if (const auto* bx = set.as<Box>()) {
        if (dim() != set.dim()) throw DimensionMismatch("sup_C: center dimension mismatch");
        double s = 0.0;
        for (int i = 0; i < bx->lower.size(); ++i) {
            double a = bx->lower[i] - q->center[i];
            double b = bx->upper[i] - q->center[i];
            s += std::max(a * a, b * b);
        }
        return 0.5 * s;
    }
    if (const auto* ball = set.as<LpBall>()) {
        if (dim() != set.dim()) throw DimensionMismatch("sup_C: center dimension mismatch");
        if (q->center.cwiseAbs().maxCoeff() != 0.0)
            throw UnsupportedPair("sup_C: lp-ball penalty must be centered at the origin");
        if (ball->p <= 2.0) return 0.5;
        return 0.5 * std::pow(static_cast<double>(ball->m), 1.0 - 2.0 / ball->p);
    }
    throw UnsupportedPair("sup_C: unsupported (penalty, set) pair");
}

}  // namespace smoothflow
