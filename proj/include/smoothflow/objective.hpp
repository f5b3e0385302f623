#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "smoothflow/common.hpp"

namespace smoothflow {

/// Bundle of convex objectives g_1..g_m with value/gradient oracles and
/// optional smoothness data for the Lipschitz bound.
struct ObjectiveFamily {
    int m = 0;  // number of objectives
    int n = 0;  // decision dimension

    std::function<Vector(const Vector&)> eval;  // g(x) in R^m
    std::function<Matrix(const Vector&)> grad;  // n x m, column i = grad g_i(x)

    /// Per-component Lipschitz constants of grad g_i, when known.
    std::optional<Vector> lipschitz;

    /// sup over the ball (center, radius) of ||grad g_i||; exact constants for
    /// quadratic families, sampled (x 1.1 safety factor) otherwise.
    std::function<double(const Vector& center, double radius, int i)> grad_norm_bound;
};

/// g_i(x) = 1/2 (x - x_i)^T M_i (x - x_i) + e_i with exact smoothness data.
ObjectiveFamily make_quadratic_family(std::vector<Matrix> Ms, std::vector<Vector> centers,
                                      Vector offsets);

/// Wraps per-component scalar closures; smoothness bounds are estimated by
/// sampling the ball with a 1.1 safety factor.
ObjectiveFamily make_scalar_family(
    std::vector<std::function<double(const Vector&)>> values,
    std::vector<std::function<Vector(const Vector&)>> gradients, int n, std::uint64_t sample_seed = 17);

}  // namespace smoothflow
