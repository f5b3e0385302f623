#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "smoothflow/common.hpp"

namespace smoothflow {

/// Compact convex dual domains Q. All variants are bounded and (except for
/// LpBall and general VertexPolytope) contained in the nonnegative orthant.
struct Simplex {
    int m;
};

struct Box {
    Vector lower;
    Vector upper;
};

struct LpBall {
    int m;
    double p;  // 1, 2 or +inf
};

struct VertexPolytope {
    Matrix vertices;  // m x K, one vertex per column
};

struct MomentPolytope {
    Matrix A;  // d x m moment rows (after redundancy removal)
    Vector b;
    Vector witness;  // strictly positive feasible point
};

/// Exact Euclidean projection onto the probability simplex
/// (sort-and-threshold, O(m log m)).
Vector project_simplex(const Vector& y);

/// Componentwise clamp onto [lower, upper].
Vector project_box(const Vector& y, const Vector& lower, const Vector& upper);

/// Projection onto the unit lp-ball for p in {1, 2, inf}. p = 1 reduces to a
/// simplex projection of |y| with sign restoration.
Vector project_lp_ball(const Vector& y, double p);

class FeasibleSet {
  public:
    using Variant = std::variant<Simplex, Box, LpBall, VertexPolytope, MomentPolytope>;

    static FeasibleSet simplex(int m);
    static FeasibleSet box(Vector lower, Vector upper);
    static FeasibleSet lp_ball(int m, double p);
    static FeasibleSet vertex_polytope(Matrix vertices);
    /// Builds the moment polytope {p : Ap = b, sum p = 1, p >= 0}. Redundant
    /// rows of [A; 1^T] are dropped; throws Infeasible when the set is empty
    /// and NoStrictWitness when no strictly positive point exists.
    static FeasibleSet moment_polytope(const Matrix& A, const Vector& b,
                                       const SolverConfig& cfg = SolverConfig::defaults());

    int dim() const;
    const Variant& variant() const { return v_; }

    template <class T>
    const T* as() const {
        return std::get_if<T>(&v_);
    }

    /// Euclidean projection onto the set (total function).
    Vector project(const Vector& y, const SolverConfig& cfg = SolverConfig::defaults()) const;

    /// Support function sup_{q in Q} <q, r>; exact for every variant (moment
    /// polytopes enumerate basic feasible solutions).
    double support(const Vector& r, const SolverConfig& cfg = SolverConfig::defaults()) const;

    /// sup over Q of the l1 norm.
    double support_radius() const;

    bool contains(const Vector& y, double tol) const;

    /// A point in the relative interior (simplex barycenter, box midpoint,
    /// origin for balls, vertex average, stored witness).
    Vector interior_point() const;

    /// Random feasible point; uniform-ish per variant, exact membership.
    Vector sample(Rng& rng) const;

  private:
    explicit FeasibleSet(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

/// argmin over {Ap = b_eq, p >= 0} of ||p - y||^2 via a primal active-set QP.
/// A_eq must have independent rows; `start` must be feasible.
Vector active_set_qp(const Matrix& A_eq, const Vector& b_eq, const Vector& y, const Vector& start,
                     const SolverConfig& cfg);

}  // namespace smoothflow
