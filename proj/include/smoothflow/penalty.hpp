#pragma once

#include <variant>

#include "smoothflow/common.hpp"
#include "smoothflow/feasible_set.hpp"

namespace smoothflow {

/// Strongly convex, nonnegative penalties on Q with inf 0.
struct KlPenalty {
    Vector prior;  // strictly positive, sums to 1
};

struct QuadraticPenalty {
    Vector center;
};

class Penalty {
  public:
    using Variant = std::variant<KlPenalty, QuadraticPenalty>;

    static Penalty kl(Vector prior);
    static Penalty kl_uniform(int m);
    static Penalty quadratic(Vector center);

    const Variant& variant() const { return v_; }

    template <class T>
    const T* as() const {
        return std::get_if<T>(&v_);
    }

    int dim() const;

    /// Strong-convexity modulus w.r.t. the Euclidean norm. 1 for both the KL
    /// penalty on simplex-like domains and the quadratic penalty.
    double sigma() const { return 1.0; }

    /// D(lambda). KL uses the 0 log 0 = 0 convention at the boundary.
    double value(const Vector& lambda) const;

    /// grad D(lambda). KL requires a strictly interior point.
    Vector grad(const Vector& lambda) const;

    /// sup over Q of D for the supported (penalty, set) catalog.
    /// Throws UnsupportedPair outside the catalog.
    double sup_C(const FeasibleSet& set) const;

  private:
    explicit Penalty(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

}  // namespace smoothflow
