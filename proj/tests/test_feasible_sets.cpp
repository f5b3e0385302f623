#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "smoothflow/feasible_set.hpp"

using namespace smoothflow;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

std::vector<FeasibleSet> all_variants() {
    Matrix V(2, 2);
    V << 1, 0, 0, 1;  // vertices e1, e2
    Matrix A(1, 3);
    A << 1, -1, 0;
    std::vector<FeasibleSet> sets;
    sets.push_back(FeasibleSet::simplex(3));
    sets.push_back(FeasibleSet::box(vec({0, 0.2}), vec({2, 1.5})));
    sets.push_back(FeasibleSet::lp_ball(3, 1.0));
    sets.push_back(FeasibleSet::lp_ball(3, 2.0));
    sets.push_back(FeasibleSet::lp_ball(3, std::numeric_limits<double>::infinity()));
    sets.push_back(FeasibleSet::vertex_polytope(V));
    sets.push_back(FeasibleSet::moment_polytope(A, Vector::Zero(1)));
    return sets;
}

}  // namespace

TEST_CASE("simplex projection closed-form cases") {
    CHECK(project_simplex(vec({0.6, 0.6})).isApprox(vec({0.5, 0.5}), 1e-12));
    CHECK(project_simplex(vec({2, 0})).isApprox(vec({1, 0}), 1e-12));
    Vector u = Vector::Constant(3, 1.0 / 3.0);
    CHECK((project_simplex(u) - u).cwiseAbs().maxCoeff() <= 1e-14);
    // output always feasible
    Rng rng(11);
    for (int k = 0; k < 1000; ++k) {
        Vector y = rng.normal_vector(5) * 3.0;
        Vector p = project_simplex(y);
        CHECK(p.minCoeff() >= -1e-14);
        CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("box projection clamps componentwise") {
    CHECK(project_box(vec({3, -1}), vec({0, 0}), vec({2, 2})).isApprox(vec({2, 0}), 1e-14));
    CHECK(project_box(vec({1, 1}), vec({0, 0}), vec({2, 2})).isApprox(vec({1, 1}), 1e-14));
    CHECK(project_box(vec({0.5, 3, -0.2}), vec({0, 1, 0}), vec({1, 2, 1}))
              .isApprox(vec({0.5, 2, 0}), 1e-14));
    // degenerate box (point constraint) is allowed
    CHECK(project_box(vec({5}), vec({1}), vec({1}))[0] == doctest::Approx(1.0));
}

TEST_CASE("lp-ball projection") {
    CHECK(project_lp_ball(vec({3, 4}), 2.0).isApprox(vec({0.6, 0.8}), 1e-12));
    CHECK(project_lp_ball(vec({0.2, -0.3}), 1.0).isApprox(vec({0.2, -0.3}), 1e-12));
    CHECK(project_lp_ball(vec({2, 0}), 1.0).isApprox(vec({1, 0}), 1e-12));
    CHECK(project_lp_ball(vec({2, -3}), std::numeric_limits<double>::infinity())
              .isApprox(vec({1, -1}), 1e-14));
    // l1 projection keeps signs
    Vector p = project_lp_ball(vec({-2, 1}), 1.0);
    CHECK(p[0] < 0);
    CHECK(std::abs(p[0]) + std::abs(p[1]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("support radius per variant") {
    CHECK(FeasibleSet::simplex(5).support_radius() == doctest::Approx(1.0));
    CHECK(FeasibleSet::box(vec({0, 0.2}), vec({2, 1.5})).support_radius() == doctest::Approx(3.5));
    CHECK(FeasibleSet::lp_ball(4, 2.0).support_radius() == doctest::Approx(2.0));
    CHECK(FeasibleSet::lp_ball(3, 1.0).support_radius() == doctest::Approx(1.0));
    CHECK(FeasibleSet::lp_ball(3, std::numeric_limits<double>::infinity()).support_radius() ==
          doctest::Approx(3.0));
    Matrix V(2, 2);
    V << 1, 0, 0, 1;
    CHECK(FeasibleSet::vertex_polytope(V).support_radius() == doctest::Approx(1.0));
    Matrix A(1, 3);
    A << 1, -1, 0;
    CHECK(FeasibleSet::moment_polytope(A, Vector::Zero(1)).support_radius() == doctest::Approx(1.0));
}

TEST_CASE("moment polytope projection: hand KKT case") {
    Matrix A(1, 3);
    A << 1, -1, 0;
    FeasibleSet Q = FeasibleSet::moment_polytope(A, Vector::Zero(1));
    Vector p = Q.project(vec({1, 0, 0}));
    CHECK((p - vec({0.5, 0.5, 0})).cwiseAbs().maxCoeff() <= 1e-10);
    // idempotence on a feasible point
    Vector q = vec({0.25, 0.25, 0.5});
    CHECK((Q.project(q) - q).cwiseAbs().maxCoeff() <= 1e-10);
    // witness is strictly positive and feasible
    const auto* mp = Q.as<MomentPolytope>();
    REQUIRE(mp != nullptr);
    REQUIRE(mp->witness.size() == 3);
    CHECK(mp->witness.minCoeff() > 0);
    CHECK(std::abs(mp->witness[0] - mp->witness[1]) <= 1e-10);
    CHECK(mp->witness.sum() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("vertex polytope projection onto a segment") {
    Matrix V(2, 2);
    V << 1, 0, 0, 1;
    FeasibleSet Q = FeasibleSet::vertex_polytope(V);
    Vector p = Q.project(vec({2, 2}));
    CHECK((p - vec({0.5, 0.5})).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("moment polytope infeasible data is rejected") {
    Matrix A(1, 2);
    A << 1, 1;  // p1 + p2 = 5 contradicts sum = 1
    CHECK_THROWS_AS(FeasibleSet::moment_polytope(A, vec({5})), Infeasible);
}

TEST_CASE("projection invariants: idempotence, nonexpansiveness, variational inequality") {
    Rng rng(42);
    for (const auto& Q : all_variants()) {
        const int m = Q.dim();
        for (int k = 0; k < 200; ++k) {
            Vector y = rng.normal_vector(m) * 2.0;
            Vector z = rng.normal_vector(m) * 2.0;
            Vector py = Q.project(y);
            Vector pz = Q.project(z);
            CHECK(Q.contains(py, 1e-8));
            CHECK((Q.project(py) - py).norm() <= 1e-10 * (1.0 + py.norm()));
            CHECK((py - pz).norm() <= (y - z).norm() + 1e-10);
            for (int j = 0; j < 20; ++j) {
                Vector q = Q.sample(rng);
                CHECK((y - py).dot(q - py) <= 1e-8);
            }
        }
    }
}

TEST_CASE("support radius bounds and is attained by feasible points") {
    Rng rng(7);
    for (const auto& Q : all_variants()) {
        double R = Q.support_radius();
        double best = 0.0;
        for (int k = 0; k < 10000; ++k) {
            Vector q = Q.sample(rng);
            double n1 = q.cwiseAbs().sum();
            CHECK(n1 <= R + 1e-9);
            best = std::max(best, n1);
        }
        // push samples outward through the projection of scaled sign patterns;
        // the all-ones direction constructs the l1 maximizer for the balls
        best = std::max(best, Q.project(Vector::Constant(Q.dim(), 50.0)).cwiseAbs().sum());
        for (int k = 0; k < 200; ++k) {
            Vector y = rng.normal_vector(Q.dim()) * 50.0;
            best = std::max(best, Q.project(y).cwiseAbs().sum());
        }
        CHECK(best >= R - 1e-6);
    }
}

TEST_CASE("exact support function on moment polytopes") {
    Matrix A(1, 3);
    A << 1, -1, 0;
    FeasibleSet Q = FeasibleSet::moment_polytope(A, Vector::Zero(1));
    // vertices of {p1 = p2, sum = 1, p >= 0} are (0,0,1) and (1/2,1/2,0)
    CHECK(Q.support(vec({1, 0, 0})) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(Q.support(vec({0, 0, 1})) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(Q.support(vec({4, 2, 1})) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(Q.support(vec({-1, -1, -1})) == doctest::Approx(-1.0).epsilon(1e-12));
    // support dominates every sampled feasible point
    Rng rng(3);
    for (int k = 0; k < 200; ++k) {
        Vector r = rng.normal_vector(3) * 4.0;
        double s = Q.support(r);
        for (int j = 0; j < 50; ++j) CHECK(Q.sample(rng).dot(r) <= s + 1e-10);
    }
}

TEST_CASE("support function matches closed forms on simple variants") {
    CHECK(FeasibleSet::simplex(3).support(vec({2, -1, 0})) == doctest::Approx(2.0));
    CHECK(FeasibleSet::lp_ball(2, 2.0).support(vec({3, 4})) == doctest::Approx(5.0));
    CHECK(FeasibleSet::box(vec({0, 0}), vec({1, 1})).support(vec({2, -3})) == doctest::Approx(2.0));
    Matrix V(2, 2);
    V << 1, 0, 0, 1;
    CHECK(FeasibleSet::vertex_polytope(V).support(vec({1, 4})) == doctest::Approx(4.0));
}

TEST_CASE("interior points are strictly feasible") {
    for (const auto& Q : all_variants()) {
        Vector c = Q.interior_point();
        CHECK(Q.contains(c, 1e-9));
        if (Q.as<Simplex>() || Q.as<MomentPolytope>()) CHECK(c.minCoeff() > 0);
    }
}
