#include "smoothflow/objective.hpp"

#include <cmath>
#include <memory>

namespace smoothflow {

ObjectiveFamily make_quadratic_family(std::vector<Matrix> Ms, std::vector<Vector> centers,
                                      Vector offsets) {
    const int m = static_cast<int>(Ms.size());
    if (m == 0 || centers.size() != Ms.size() || offsets.size() != m)
        throw DimensionMismatch("make_quadratic_family: inconsistent component counts");
    const int n = static_cast<int>(Ms[0].rows());
    for (int i = 0; i < m; ++i)
        if (Ms[i].rows() != n || Ms[i].cols() != n || centers[i].size() != n)
            throw DimensionMismatch("make_quadratic_family: inconsistent dimensions");

    auto data = std::make_shared<std::tuple<std::vector<Matrix>, std::vector<Vector>, Vector>>(
        std::move(Ms), std::move(centers), std::move(offsets));

    ObjectiveFamily fam;
    fam.m = m;
    fam.n = n;
    fam.eval = [data, m](const Vector& x) {
        const auto& [M, c, e] = *data;
        Vector g(m);
        for (int i = 0; i < m; ++i) {
            Vector d = x - c[i];
            g[i] = 0.5 * d.dot(M[i] * d) + e[i];
        }
        return g;
    };
    fam.grad = [data, m, n](const Vector& x) {
        const auto& [M, c, e] = *data;
        (void)e;
        Matrix G(n, m);
        for (int i = 0; i < m; ++i) G.col(i) = M[i] * (x - c[i]);
        return G;
    };
    Vector L(m);
    {
        const auto& [M, c, e] = *data;
        (void)c;
        (void)e;
        for (int i = 0; i < m; ++i) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M[i] + M[i].transpose()));
            L[i] = es.eigenvalues().cwiseAbs().maxCoeff();
        }
    }
    fam.lipschitz = L;
    fam.grad_norm_bound = [data](const Vector& center, double radius, int i) {
        const auto& [M, c, e] = *data;
        (void)e;
        // ||M (x - c_i)|| <= ||M (center - c_i)|| + radius * sigma_max(M)
        Eigen::JacobiSVD<Matrix> svd(M[i]);
        double smax = svd.singularValues()[0];
        return (M[i] * (center - c[i])).norm() + radius * smax;
    };
    return fam;
}

ObjectiveFamily make_scalar_family(std::vector<std::function<double(const Vector&)>> values,
                                   std::vector<std::function<Vector(const Vector&)>> gradients, int n,
                                   std::uint64_t sample_seed) {
    const int m = static_cast<int>(values.size());
    if (m == 0 || gradients.size() != values.size())
        throw DimensionMismatch("make_scalar_family: inconsistent component counts");
    auto vals = std::make_shared<std::vector<std::function<double(const Vector&)>>>(std::move(values));
    auto grads = std::make_shared<std::vector<std::function<Vector(const Vector&)>>>(std::move(gradients));

    ObjectiveFamily fam;
    fam.m = m;
    fam.n = n;
    fam.eval = [vals, m](const Vector& x) {
        Vector g(m);
        for (int i = 0; i < m; ++i) g[i] = (*vals)[i](x);
        return g;
    };
    fam.grad = [grads, m, n](const Vector& x) {
        Matrix G(n, m);
        for (int i = 0; i < m; ++i) G.col(i) = (*grads)[i](x);
        return G;
    };
    fam.grad_norm_bound = [grads, n, sample_seed](const Vector& center, double radius, int i) {
        Rng rng(sample_seed + static_cast<std::uint64_t>(i));
        double best = (*grads)[i](center).norm();
        for (int k = 0; k < 256; ++k) {
            Vector d = rng.normal_vector(n);
            double nn = d.norm();
            if (nn == 0) continue;
            Vector x = center + (radius * std::pow(rng.uniform(), 1.0 / n) / nn) * d;
            best = std::max(best, (*grads)[i](x).norm());
            // boundary points dominate for convex g
            x = center + (radius / nn) * d;
            best = std::max(best, (*grads)[i](x).norm());
        }
        return 1.1 * best;
    };
    return fam;
}

}  // namespace smoothflow
