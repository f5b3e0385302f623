#include "smoothflow/feasible_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace smoothflow {

Vector project_simplex(const Vector& y) {
    const int m = static_cast<int>(y.size());
    if (m < 1) throw DimensionMismatch("project_simplex: empty input");
    std::vector<double> u(y.data(), y.data() + m);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, tau = 0.0;
    int k = 0;
    for (int i = 0; i < m; ++i) {
        css += u[i];
        double t = (css - 1.0) / (i + 1);
        if (u[i] - t > 0.0) {
            tau = t;
            k = i + 1;
        }
    }
    (void)k;
    Vector out(m);
    for (int i = 0; i < m; ++i) out[i] = std::max(y[i] - tau, 0.0);
    return out;
}

Vector project_box(const Vector& y, const Vector& lower, const Vector& upper) {
    if (y.size() != lower.size() || y.size() != upper.size())
        throw DimensionMismatch("project_box: dimension mismatch");
    return y.cwiseMax(lower).cwiseMin(upper);
}

Vector project_lp_ball(const Vector& y, double p) {
    const int m = static_cast<int>(y.size());
    if (p == 2.0) {
        double n = y.norm();
        return n <= 1.0 ? y : Vector(y / n);
    }
    if (std::isinf(p)) {
        return y.cwiseMax(-1.0).cwiseMin(1.0);
    }
    if (p == 1.0) {
        if (y.cwiseAbs().sum() <= 1.0) return y;
        Vector z = project_simplex(y.cwiseAbs());
        Vector out(m);
        for (int i = 0; i < m; ++i) out[i] = (y[i] < 0 ? -z[i] : z[i]);
        return out;
    }
    throw UnsupportedPair("project_lp_ball: p must be 1, 2 or inf");
}

namespace {

// Solve the equality-constrained projection with bound indices `active`
// pinned to zero: min ||p - y||^2 s.t. A p = b, p_i = 0 (i active).
// Returns false when the reduced system is inconsistent.
bool solve_pinned(const Matrix& A, const Vector& b, const Vector& y, const std::vector<bool>& active,
                  Vector& p, Vector& nu, double rank_tol) {
    const int m = static_cast<int>(y.size());
    const int d = static_cast<int>(A.rows());
    std::vector<int> free_idx;
    for (int i = 0; i < m; ++i)
        if (!active[i]) free_idx.push_back(i);
    const int nf = static_cast<int>(free_idx.size());
    Matrix Af(d, nf);
    Vector yf(nf);
    for (int j = 0; j < nf; ++j) {
        Af.col(j) = A.col(free_idx[j]);
        yf[j] = y[free_idx[j]];
    }
    // p_F = y_F - Af^T nu with Af Af^T nu = Af y_F - b
    Matrix G = Af * Af.transpose();
    Vector rhs = Af * yf - b;
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(G);
    cod.setThreshold(rank_tol);
    nu = cod.solve(rhs);
    Vector pf = yf - Af.transpose() * nu;
    double scale = 1.0 + b.cwiseAbs().maxCoeff() + 1e-6 * (nf ? yf.cwiseAbs().maxCoeff() : 0.0);
    if ((Af * pf - b).cwiseAbs().maxCoeff() > 1e-8 * scale) return false;
    p = Vector::Zero(m);
    for (int j = 0; j < nf; ++j) p[free_idx[j]] = pf[j];
    return true;
}

}  // namespace

Vector active_set_qp(const Matrix& A_eq, const Vector& b_eq, const Vector& y, const Vector& /*start*/,
                     const SolverConfig& cfg) {
    const int m = static_cast<int>(y.size());
    std::vector<bool> active(m, false);
    Vector p, nu;
    const int cap = 60 + 12 * m;
    for (int it = 0; it < cap; ++it) {
        if (!solve_pinned(A_eq, b_eq, y, active, p, nu, cfg.rank_tol)) {
            // inconsistent working set: release everything and retry once
            bool any = false;
            for (int i = 0; i < m; ++i)
                if (active[i]) {
                    active[i] = false;
                    any = true;
                }
            if (!any) throw Infeasible("active_set_qp: equality system inconsistent");
            continue;
        }
        // add most violated bound
        int worst = -1;
        double worst_v = -1e-12;
        for (int i = 0; i < m; ++i)
            if (!active[i] && p[i] < worst_v) {
                worst_v = p[i];
                worst = i;
            }
        if (worst >= 0) {
            active[worst] = true;
            continue;
        }
        // bound multipliers: mult_i = -(y + A^T nu)_i on the active set
        Vector g = y - A_eq.transpose() * nu;
        int drop = -1;
        double drop_v = -1e-10;
        for (int i = 0; i < m; ++i)
            if (active[i] && -g[i] < drop_v) {
                drop_v = -g[i];
                drop = i;
            }
        if (drop >= 0) {
            active[drop] = false;
            continue;
        }
        return p.cwiseMax(0.0);
    }
    // exhaustive fallback over active sets (m is small wherever this runs)
    if (m <= 18) {
        double best = std::numeric_limits<double>::infinity();
        Vector best_p;
        for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
            std::vector<bool> act(m, false);
            for (int i = 0; i < m; ++i) act[i] = (mask >> i) & 1u;
            Vector q, nn;
            if (!solve_pinned(A_eq, b_eq, y, act, q, nn, cfg.rank_tol)) continue;
            if (q.minCoeff() < -1e-10) continue;
            double v = (q - y).squaredNorm();
            if (v < best) {
                best = v;
                best_p = q.cwiseMax(0.0);
            }
        }
        if (best_p.size() > 0) return best_p;
        throw Infeasible("active_set_qp: no feasible active set");
    }
    throw DualSolveFailed("active_set_qp: iteration cap exceeded");
}

FeasibleSet FeasibleSet::simplex(int m) {
    if (m < 1) throw DimensionMismatch("simplex: m >= 1 required");
    return FeasibleSet(Simplex{m});
}

FeasibleSet FeasibleSet::box(Vector lower, Vector upper) {
    if (lower.size() != upper.size()) throw DimensionMismatch("box: bound sizes differ");
    for (int i = 0; i < lower.size(); ++i) {
        if (!(0.0 <= lower[i] && lower[i] <= upper[i]))
            throw Infeasible("box: requires 0 <= lower <= upper");
    }
    return FeasibleSet(Box{std::move(lower), std::move(upper)});
}

FeasibleSet FeasibleSet::lp_ball(int m, double p) {
    if (p != 1.0 && p != 2.0 && !std::isinf(p)) throw UnsupportedPair("lp_ball: p must be 1, 2 or inf");
    return FeasibleSet(LpBall{m, p});
}

FeasibleSet FeasibleSet::vertex_polytope(Matrix vertices) {
    if (vertices.cols() < 1) throw DimensionMismatch("vertex_polytope: needs at least one vertex");
    return FeasibleSet(VertexPolytope{std::move(vertices)});
}

FeasibleSet FeasibleSet::moment_polytope(const Matrix& A, const Vector& b, const SolverConfig& cfg) {
    const int m = static_cast<int>(A.cols() > 0 ? A.cols() : 0);
    if (A.rows() != b.size()) throw DimensionMismatch("moment_polytope: A rows != b size");
    if (m < 1) throw DimensionMismatch("moment_polytope: empty scenario space");
    // drop rows of A that are dependent within [A; 1^T]
    Matrix stacked(A.rows() + 1, m);
    stacked.topRows(A.rows()) = A;
    stacked.bottomRows(1).setOnes();
    Eigen::ColPivHouseholderQR<Matrix> qr(stacked.transpose());
    qr.setThreshold(cfg.rank_tol);
    const int rank = static_cast<int>(qr.rank());
    std::vector<int> keep;
    if (rank < stacked.rows()) {
        // greedy: keep the ones-row, then add A-rows while rank grows
        Matrix acc(1, m);
        acc.setOnes();
        for (int r = 0; r < A.rows(); ++r) {
            Matrix trial(acc.rows() + 1, m);
            trial.topRows(acc.rows()) = acc;
            trial.bottomRows(1) = A.row(r);
            Eigen::ColPivHouseholderQR<Matrix> q2(trial.transpose());
            q2.setThreshold(cfg.rank_tol);
            if (static_cast<int>(q2.rank()) == trial.rows()) {
                acc = trial;
                keep.push_back(r);
            }
        }
    } else {
        for (int r = 0; r < A.rows(); ++r) keep.push_back(r);
    }
    Matrix Ar(static_cast<int>(keep.size()), m);
    Vector br(static_cast<int>(keep.size()));
    for (int j = 0; j < static_cast<int>(keep.size()); ++j) {
        Ar.row(j) = A.row(keep[j]);
        br[j] = b[keep[j]];
    }
    // stacked equality system used by the projection QP
    Matrix S(Ar.rows() + 1, m);
    S.topRows(Ar.rows()) = Ar;
    S.bottomRows(1).setOnes();
    Vector s(Ar.rows() + 1);
    s.head(Ar.rows()) = br;
    s[Ar.rows()] = 1.0;

    Vector uniform = Vector::Constant(m, 1.0 / m);
    Vector w = active_set_qp(S, s, uniform, uniform, cfg);
    // verify the *full* system (dropped rows must be consistent)
    if (A.rows() > 0 && (A * w - b).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + b.cwiseAbs().maxCoeff()))
        throw Infeasible("moment_polytope: dropped moment rows are inconsistent");
    if (w.minCoeff() <= 1e-10) {
        // second pass: average projections of perturbed targets
        Vector avg = w;
        int cnt = 1;
        for (int i = 0; i < m; ++i) {
            Vector tgt = uniform;
            tgt[i] += 0.5;
            avg += active_set_qp(S, s, tgt, uniform, cfg);
            ++cnt;
        }
        avg /= cnt;
        if (avg.minCoeff() > 1e-10)
            w = avg;
        else
            w = Vector();  // no strict witness found
    }
    return FeasibleSet(MomentPolytope{Ar, br, w});
}

int FeasibleSet::dim() const {
    return std::visit(
        [](const auto& s) -> int {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Simplex>)
                return s.m;
            else if constexpr (std::is_same_v<T, Box>)
                return static_cast<int>(s.lower.size());
            else if constexpr (std::is_same_v<T, LpBall>)
                return s.m;
            else if constexpr (std::is_same_v<T, VertexPolytope>)
                return static_cast<int>(s.vertices.rows());
            else
                return static_cast<int>(s.A.cols());
        },
        v_);
}

Vector FeasibleSet::project(const Vector& y, const SolverConfig& cfg) const {
    if (y.size() != dim()) throw DimensionMismatch("project: wrong input dimension");
    if (const auto* s = as<Simplex>()) {
        (void)s;
        return project_simplex(y);
    }
    if (const auto* s = as<Box>()) return project_box(y, s->lower, s->upper);
    if (const auto* s = as<LpBall>()) return project_lp_ball(y, s->p);
    if (const auto* s = as<VertexPolytope>()) {
        // least squares over barycentric weights, FISTA + exact simplex projection
        const Matrix& V = s->vertices;
        const int K = static_cast<int>(V.cols());
        double L = (V.transpose() * V).operatorNorm();
        if (L <= 0) return V.col(0);
        Vector alpha = Vector::Constant(K, 1.0 / K), z = alpha;
        double tk = 1.0;
        for (int it = 0; it < 200000; ++it) {
            Vector grad = V.transpose() * (V * z - y);
            Vector next = project_simplex(z - grad / L);
            Vector fp_grad = V.transpose() * (V * alpha - y);
            if ((alpha - project_simplex(alpha - fp_grad / L)).norm() <= cfg.fixed_point_tol) break;
            double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
            z = next + ((tk - 1.0) / tn) * (next - alpha);
            alpha = next;
            tk = tn;
            if ((alpha.array() < 0).any()) alpha = project_simplex(alpha);
        }
        return V * alpha;
    }
    const auto* s = as<MomentPolytope>();
    Matrix S(s->A.rows() + 1, dim());
    S.topRows(s->A.rows()) = s->A;
    S.bottomRows(1).setOnes();
    Vector rhs(s->A.rows() + 1);
    rhs.head(s->A.rows()) = s->b;
    rhs[s->A.rows()] = 1.0;
    return active_set_qp(S, rhs, y, interior_point(), cfg);
}

double FeasibleSet::support(const Vector& r, const SolverConfig& cfg) const {
    if (r.size() != dim()) throw DimensionMismatch("support: wrong input dimension");
    if (as<Simplex>()) return r.maxCoeff();
    if (const auto* s = as<Box>()) {
        double v = 0.0;
        for (int i = 0; i < r.size(); ++i)
            v += s->upper[i] * std::max(r[i], 0.0) + s->lower[i] * std::min(r[i], 0.0);
        return v;
    }
    if (const auto* s = as<LpBall>()) {
        if (s->p == 1.0) return r.cwiseAbs().maxCoeff();
        if (s->p == 2.0) return r.norm();
        return r.cwiseAbs().sum();
    }
    if (const auto* s = as<VertexPolytope>()) {
        double best = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < s->vertices.cols(); ++k) best = std::max(best, s->vertices.col(k).dot(r));
        return best;
    }
    // moment polytope: the maximum over vertices, i.e. over basic feasible
    // solutions of {A p = b, sum p = 1, p >= 0} with support size <= #rows
    const auto* s = as<MomentPolytope>();
    const int m = dim();
    const int k = static_cast<int>(s->A.rows()) + 1;
    Matrix S(k, m);
    S.topRows(k - 1) = s->A;
    S.bottomRows(1).setOnes();
    Vector rhs(k);
    rhs.head(k - 1) = s->b;
    rhs[k - 1] = 1.0;
    if (m <= 24 && k <= 5) {
        double best = -std::numeric_limits<double>::infinity();
        std::vector<int> idx(k);
        // iterate over all k-subsets of columns
        for (int i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            Matrix B(k, k);
            for (int j = 0; j < k; ++j) B.col(j) = S.col(idx[j]);
            Eigen::FullPivLU<Matrix> lu(B);
            lu.setThreshold(cfg.rank_tol);
            if (lu.isInvertible()) {
                Vector pb = lu.solve(rhs);
                if (pb.minCoeff() >= -1e-11) {
                    double v = 0.0;
                    for (int j = 0; j < k; ++j) v += std::max(pb[j], 0.0) * r[idx[j]];
                    best = std::max(best, v);
                }
            }
            int pos = k - 1;
            while (pos >= 0 && idx[pos] == m - k + pos) --pos;
            if (pos < 0) break;
            ++idx[pos];
            for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
        if (std::isfinite(best)) return best;
        throw Infeasible("support: moment polytope has no basic feasible solution");
    }
    // large instances: epsilon-regularized projection bound
    const double eps = 1e-10 * std::max(1.0, r.cwiseAbs().maxCoeff());
    Vector lam = active_set_qp(S, rhs, r / eps, interior_point(), cfg);
    return lam.dot(r) + 0.5 * eps * support_radius() * support_radius();
}

double FeasibleSet::support_radius() const {
    if (as<Simplex>()) return 1.0;
    if (const auto* s = as<Box>()) return s->upper.sum();
    if (const auto* s = as<LpBall>()) {
        if (s->p == 1.0) return 1.0;
        if (s->p == 2.0) return std::sqrt(static_cast<double>(s->m));
        return static_cast<double>(s->m);
    }
    if (const auto* s = as<VertexPolytope>()) {
        double best = 0.0;
        for (int k = 0; k < s->vertices.cols(); ++k)
            best = std::max(best, s->vertices.col(k).cwiseAbs().sum());
        return best;
    }
    return 1.0;
}

bool FeasibleSet::contains(const Vector& y, double tol) const {
    if (y.size() != dim()) return false;
    if (as<Simplex>()) return y.minCoeff() >= -tol && std::abs(y.sum() - 1.0) <= tol;
    if (const auto* s = as<Box>())
        return ((y - s->lower).minCoeff() >= -tol) && ((s->upper - y).minCoeff() >= -tol);
    if (const auto* s = as<LpBall>()) {
        if (s->p == 1.0) return y.cwiseAbs().sum() <= 1.0 + tol;
        if (s->p == 2.0) return y.norm() <= 1.0 + tol;
        return y.cwiseAbs().maxCoeff() <= 1.0 + tol;
    }
    if (as<VertexPolytope>() || as<MomentPolytope>()) return (project(y) - y).norm() <= tol;
    return false;
}

Vector FeasibleSet::interior_point() const {
    if (const auto* s = as<Simplex>()) return Vector::Constant(s->m, 1.0 / s->m);
    if (const auto* s = as<Box>()) return 0.5 * (s->lower + s->upper);
    if (const auto* s = as<LpBall>()) return Vector::Zero(s->m);
    if (const auto* s = as<VertexPolytope>()) return s->vertices.rowwise().mean();
    const auto* s = as<MomentPolytope>();
    if (s->witness.size() == 0) throw NoStrictWitness("moment polytope has no strict witness");
    return s->witness;
}

Vector FeasibleSet::sample(Rng& rng) const {
    const int m = dim();
    if (as<Simplex>()) {
        Vector e(m);
        for (int i = 0; i < m; ++i) e[i] = -std::log(std::max(rng.uniform(), 1e-300));
        return e / e.sum();
    }
    if (const auto* s = as<Box>()) {
        Vector out(m);
        for (int i = 0; i < m; ++i) out[i] = rng.uniform(s->lower[i], s->upper[i]);
        return out;
    }
    if (const auto* s = as<LpBall>()) {
        double radius = std::pow(rng.uniform(), 1.0 / m);
        if (s->p == 2.0) {
            Vector d = rng.normal_vector(m);
            double n = d.norm();
            return n > 0 ? Vector(radius * d / n) : Vector::Zero(m);
        }
        if (std::isinf(s->p)) {
            Vector out(m);
            for (int i = 0; i < m; ++i) out[i] = rng.uniform(-1.0, 1.0);
            return out;
        }
        Vector e(m);
        for (int i = 0; i < m; ++i) e[i] = -std::log(std::max(rng.uniform(), 1e-300));
        e /= e.sum();
        Vector out(m);
        for (int i = 0; i < m; ++i) out[i] = (rng.uniform() < 0.5 ? -1.0 : 1.0) * radius * e[i];
        return out;
    }
    if (const auto* s = as<VertexPolytope>()) {
        const int K = static_cast<int>(s->vertices.cols());
        Vector e(K);
        for (int k = 0; k < K; ++k) e[k] = -std::log(std::max(rng.uniform(), 1e-300));
        e /= e.sum();
        return s->vertices * e;
    }
    // moment polytope: project a random simplex point
    Vector e(m);
    for (int i = 0; i < m; ++i) e[i] = -std::log(std::max(rng.uniform(), 1e-300));
    e /= e.sum();
    return project(e);
}

}  // namespace smoothflow
