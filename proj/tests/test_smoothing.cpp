#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "smoothflow/sup_problem.hpp"

using namespace smoothflow;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

// g(x) = (x^2 + 1, e^x) on R
ObjectiveFamily scalar_pair() {
    return make_scalar_family(
        {[](const Vector& x) { return x[0] * x[0] + 1.0; },
         [](const Vector& x) { return std::exp(x[0]); }},
        {[](const Vector& x) { return Vector::Constant(1, 2.0 * x[0]); },
         [](const Vector& x) { return Vector::Constant(1, std::exp(x[0])); }},
        1);
}

// g(x) = (x, -x) on R
ObjectiveFamily antisymmetric_pair() {
    return make_scalar_family({[](const Vector& x) { return x[0]; },
                               [](const Vector& x) { return -x[0]; }},
                              {[](const Vector&) { return Vector::Constant(1, 1.0); },
                               [](const Vector&) { return Vector::Constant(1, -1.0); }},
                              1);
}

SupProblem moo_problem() {
    Matrix M1 = Matrix::Zero(2, 2), M2 = Matrix::Zero(2, 2);
    M1(0, 0) = 2;
    M1(1, 1) = 1;
    M2(0, 0) = 1;
    M2(1, 1) = 2;
    auto fam = make_quadratic_family({M1, M2}, {vec({1, 0}), vec({0, 1})}, Vector::Zero(2));
    return SupProblem(std::move(fam), FeasibleSet::simplex(2), Penalty::kl_uniform(2));
}

// random m-quadratic family in dimension n
ObjectiveFamily random_quadratics(Rng& rng, int m, int n) {
    std::vector<Matrix> Ms;
    std::vector<Vector> centers;
    Vector offs(m);
    for (int i = 0; i < m; ++i) {
        Vector d(n);
        for (int j = 0; j < n; ++j) d[j] = rng.uniform(0.3, 2.5);
        Ms.push_back(Matrix(d.asDiagonal()));
        centers.push_back(rng.normal_vector(n));
        offs[i] = rng.uniform(-1.0, 1.0);
    }
    return make_quadratic_family(std::move(Ms), std::move(centers), offs);
}

}  // namespace

TEST_CASE("supremum values via closed forms") {
    SupProblem lse(scalar_pair(), FeasibleSet::simplex(2), Penalty::kl_uniform(2));
    CHECK(lse.sup_value(Vector::Zero(1)) == doctest::Approx(1.0).epsilon(1e-12));

    Rng rng(1);
    ObjectiveFamily f = random_quadratics(rng, 2, 2);
    SupProblem box(random_quadratics(rng, 2, 2),
                   FeasibleSet::box(vec({0, 0}), vec({1, 1})),
                   Penalty::quadratic(vec({0.5, 0.5})));
    // hand case g = (2, -3): sup over the box = 2 (check via reg surrogate at tiny mu)
    double s = box.reg_value_from(vec({2, -3}), 1e-7);
    CHECK(std::abs(s - 2.0) <= box.sup_C() * 1e-7 + 1e-9);

    SupProblem ball(random_quadratics(rng, 2, 2), FeasibleSet::lp_ball(2, 2.0),
                    Penalty::quadratic(Vector::Zero(2)));
    double s2 = ball.reg_value_from(vec({3, 4}), 1e-7);
    CHECK(std::abs(s2 - 5.0) <= ball.sup_C() * 1e-7 + 1e-9);
}

TEST_CASE("entropic regularized value and maximizer reference points") {
    SupProblem lse(scalar_pair(), FeasibleSet::simplex(2), Penalty::kl_uniform(2));

    // symmetric arguments: phi_mu = common value for any mu
    for (double mu : {2.0, 0.5, 1e-3})
        CHECK(lse.reg_value_from(vec({0.7, 0.7}), mu) == doctest::Approx(0.7).epsilon(1e-12));

    const double e = std::exp(1.0);
    CHECK(lse.reg_value_from(vec({1, 0}), 1.0) ==
          doctest::Approx(std::log((e + 1.0) / 2.0)).epsilon(1e-12));

    DualCertificate c = lse.reg_maximizer_from(vec({1, 0}), 0.5);
    const double e2 = std::exp(2.0);
    CHECK(c.maximizer[0] == doctest::Approx(e2 / (e2 + 1.0)).epsilon(1e-12));
    CHECK(c.maximizer[1] == doctest::Approx(1.0 / (e2 + 1.0)).epsilon(1e-12));

    DualCertificate sym = lse.reg_maximizer_from(vec({0.3, 0.3}), 1.0);
    CHECK((sym.maximizer - Vector::Constant(2, 0.5)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("symmetric three-way maximizer is uniform") {
    auto fam = make_scalar_family({[](const Vector& x) { return x[0]; },
                                   [](const Vector& x) { return x[0]; },
                                   [](const Vector& x) { return x[0]; }},
                                  {[](const Vector&) { return Vector::Constant(1, 1.0); },
                                   [](const Vector&) { return Vector::Constant(1, 1.0); },
                                   [](const Vector&) { return Vector::Constant(1, 1.0); }},
                                  1);
    SupProblem p(std::move(fam), FeasibleSet::simplex(3), Penalty::kl_uniform(3));
    DualCertificate c = p.reg_maximizer(Vector::Constant(1, 0.4), 0.7);
    CHECK((c.maximizer - Vector::Constant(3, 1.0 / 3.0)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("quadratic-prox maximizer is a projection") {
    Rng rng(2);
    SupProblem p(random_quadratics(rng, 2, 2), FeasibleSet::simplex(2),
                 Penalty::quadratic(vec({0.5, 0.5})));
    DualCertificate c = p.reg_maximizer_from(vec({1, 0}), 1.0);
    CHECK((c.maximizer - vec({1, 0})).cwiseAbs().maxCoeff() <= 1e-12);
    // maximizer at the center when objectives tie
    DualCertificate c2 = p.reg_maximizer_from(vec({0.4, 0.4}), 1.0);
    CHECK((c2.maximizer - vec({0.5, 0.5})).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(p.reg_value_from(vec({0.4, 0.4}), 1.0) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("mu-derivative identity") {
    SupProblem lse(scalar_pair(), FeasibleSet::simplex(2), Penalty::kl_uniform(2));

    // softmax(1,0) at mu=1 is (e/(e+1), 1/(e+1)); dmu = -KL(. || uniform).
    // Independent derivation: d/dmu [mu log((e^{1/mu}+1)/2)] at mu = 1 equals
    // log((e+1)/2) - e/(e+1), so KL = e/(e+1) - log((e+1)/2) ~ 0.110944.
    const double e = std::exp(1.0);
    Vector lam = vec({e / (e + 1.0), 1.0 / (e + 1.0)});
    double kl = lam[0] * std::log(2.0 * lam[0]) + lam[1] * std::log(2.0 * lam[1]);
    CHECK(kl == doctest::Approx(e / (e + 1.0) - std::log((e + 1.0) / 2.0)).epsilon(1e-12));
    CHECK(kl == doctest::Approx(0.110944).epsilon(1e-4));

    SupProblem moo = moo_problem();
    Rng rng(9);
    for (int k = 0; k < 100; ++k) {
        Vector x = rng.normal_vector(2);
        double mu = rng.uniform(0.05, 1.0);
        double d = moo.reg_dmu(x, mu);
        CHECK(d <= 1e-12);
        CHECK(d >= -moo.sup_C() - 1e-12);
        double h = 1e-5 * mu;
        double fd = (moo.reg_value(x, mu + h) - moo.reg_value(x, mu - h)) / (2 * h);
        CHECK(std::abs(fd - d) <= 1e-5 * (1.0 + std::abs(d)));
    }
    // symmetric point: maximizer at the prior, derivative 0
    CHECK(std::abs(moo.reg_dmu(vec({0.5, 0.5}), 1.0)) <= 1e-12);
}

TEST_CASE("envelope gradient reference points and finite differences") {
    SupProblem anti(antisymmetric_pair(), FeasibleSet::simplex(2), Penalty::kl_uniform(2));
    CHECK(std::abs(anti.reg_grad(Vector::Zero(1), 1.0)[0]) <= 1e-12);

    SupProblem moo = moo_problem();
    Rng rng(21);
    const double h = 1e-6;
    for (int k = 0; k < 100; ++k) {
        Vector x = rng.normal_vector(2);
        double mu = rng.uniform(1e-2, 1.0);
        Vector g = moo.reg_grad(x, mu);
        for (int i = 0; i < 2; ++i) {
            Vector ei = Vector::Zero(2);
            ei[i] = h;
            double fd = (moo.reg_value(x + ei, mu) - moo.reg_value(x - ei, mu)) / (2 * h);
            CHECK(std::abs(fd - g[i]) <= 1e-6 * (1.0 + std::abs(g[i])));
        }
    }
}

TEST_CASE("sandwich bound and mu-monotonicity") {
    SupProblem moo = moo_problem();
    Rng rng(33);
    for (int k = 0; k < 500; ++k) {
        Vector x = rng.normal_vector(2) * 2.0;
        double mu = std::pow(10.0, rng.uniform(-4.0, 1.0));
        SandwichReport rep = moo.sandwich_check(x, mu);
        CHECK(rep.pass);
        double mu2 = mu * rng.uniform(0.1, 1.0);
        CHECK(moo.reg_value(x, mu) <= moo.reg_value(x, mu2) + 1e-9);
    }
    // reference gap at g = (1, 0), mu = 1
    double gap = 1.0 - std::log((std::exp(1.0) + 1.0) / 2.0);
    CHECK(gap == doctest::Approx(0.379885).epsilon(1e-4));
    CHECK(gap <= std::log(2.0));
}

TEST_CASE("phi_mu is convex in x") {
    SupProblem moo = moo_problem();
    Rng rng(44);
    for (int k = 0; k < 300; ++k) {
        Vector a = rng.normal_vector(2) * 2.0;
        Vector b = rng.normal_vector(2) * 2.0;
        double mu = rng.uniform(0.01, 2.0);
        double mid = moo.reg_value(0.5 * (a + b), mu);
        CHECK(mid <= 0.5 * moo.reg_value(a, mu) + 0.5 * moo.reg_value(b, mu) + 1e-9);
    }
}

TEST_CASE("closed forms agree with the generic solver") {
    Rng rng(55);
    for (int trial = 0; trial < 40; ++trial) {
        int m = (trial % 3 == 0) ? 2 : (trial % 3 == 1 ? 3 : 5);
        Vector x = rng.normal_vector(2);
        double mu = rng.uniform(0.1, 2.0);

        SupProblem kl(random_quadratics(rng, m, 2), FeasibleSet::simplex(m), Penalty::kl_uniform(m));
        Vector g = kl.objectives().eval(x);
        DualCertificate closed = kl.reg_maximizer_from(g, mu);
        DualCertificate generic = kl.generic_maximizer(g, mu);
        CHECK((closed.maximizer - generic.maximizer).cwiseAbs().maxCoeff() <= 1e-8);

        SupProblem qd(random_quadratics(rng, m, 2), FeasibleSet::simplex(m),
                      Penalty::quadratic(Vector::Constant(m, 1.0 / m)));
        Vector g2 = qd.objectives().eval(x);
        DualCertificate c2 = qd.reg_maximizer_from(g2, mu);
        DualCertificate gen2 = qd.generic_maximizer(g2, mu);
        CHECK((c2.maximizer - gen2.maximizer).cwiseAbs().maxCoeff() <= 1e-8);
        double v2 = c2.maximizer.dot(g2) - mu * qd.penalty().value(c2.maximizer);
        double w2 = gen2.maximizer.dot(g2) - mu * qd.penalty().value(gen2.maximizer);
        CHECK(std::abs(v2 - w2) <= 1e-8 * (1.0 + std::abs(v2)));
    }
}

TEST_CASE("brute-force grid confirms the entropic maximizer (m = 2)") {
    SupProblem lse(scalar_pair(), FeasibleSet::simplex(2), Penalty::kl_uniform(2));
    Rng rng(66);
    for (int k = 0; k < 20; ++k) {
        Vector g = rng.normal_vector(2);
        double mu = rng.uniform(0.3, 2.0);
        DualCertificate c = lse.reg_maximizer_from(g, mu);
        double best = -1e300, best_l = 0;
        for (int i = 0; i <= 1000; ++i) {
            double l = i / 1000.0;
            Vector lam = vec({l, 1 - l});
            double v = lam.dot(g) - mu * lse.penalty().value(lam);
            if (v > best) {
                best = v;
                best_l = l;
            }
        }
        CHECK(std::abs(c.maximizer[0] - best_l) <= 2e-3);
    }
}

TEST_CASE("Lipschitz modulus formula and empirical validity") {
    SupProblem moo = moo_problem();
    // quadratic family: L_i = lambda_max(M_i) = 2 each, L_g = 4
    CHECK(moo.objectives().lipschitz->sum() == doctest::Approx(4.0).epsilon(1e-12));

    // formula arithmetic: M_Q = 1, sigma = 1, L_g = 0, G_B = 1, mu = 0.1 -> 10
    ObjectiveFamily flat;
    flat.m = 2;
    flat.n = 1;
    flat.eval = [](const Vector& x) { return Vector::Constant(2, x[0]); };
    flat.grad = [](const Vector&) { return Matrix::Ones(1, 2); };
    flat.lipschitz = Vector::Zero(2);
    flat.grad_norm_bound = [](const Vector&, double, int) { return 1.0 / std::sqrt(2.0); };
    SupProblem flat_p(std::move(flat), FeasibleSet::simplex(2), Penalty::kl_uniform(2));
    CHECK(flat_p.lipschitz_bound(Vector::Zero(1), 1.0, 0.1) == doctest::Approx(10.0).epsilon(1e-12));

    // mu -> infinity limit: only M_Q L_g survives
    double huge = moo.lipschitz_bound(Vector::Zero(2), 1.0, 1e12);
    CHECK(huge == doctest::Approx(4.0).epsilon(1e-6));

    // empirical bound inside the declared ball
    Vector center = vec({0.5, 0.5});
    double radius = 1.5;
    Rng rng(77);
    for (int k = 0; k < 500; ++k) {
        double mu = rng.uniform(0.05, 1.0);
        double L = moo.lipschitz_bound(center, radius, mu);
        Vector dx = rng.normal_vector(2);
        Vector dy = rng.normal_vector(2);
        Vector x = center + radius * rng.uniform() * dx / dx.norm();
        Vector y = center + radius * rng.uniform() * dy / dy.norm();
        CHECK((moo.reg_grad(x, mu) - moo.reg_grad(y, mu)).norm() <= L * (x - y).norm() + 1e-12);
    }

    ObjectiveFamily no_data;
    no_data.m = 2;
    no_data.n = 1;
    no_data.eval = [](const Vector& x) { return Vector::Constant(2, x[0]); };
    no_data.grad = [](const Vector&) { return Matrix::Ones(1, 2); };
    SupProblem bare(std::move(no_data), FeasibleSet::simplex(2), Penalty::kl_uniform(2));
    CHECK_THROWS_AS(bare.lipschitz_bound(Vector::Zero(1), 1.0, 0.5), MissingLipschitzData);
}

TEST_CASE("vertex polytope log-sum-exp form") {
    Matrix V(2, 2);
    V << 1, 0, 0, 1;  // vertices e1, e2: reduces to the simplex case
    SupProblem vp(scalar_pair(), FeasibleSet::vertex_polytope(V), Penalty::kl_uniform(2));
    SupProblem lse(scalar_pair(), FeasibleSet::simplex(2), Penalty::kl_uniform(2));
    Rng rng(88);
    for (int k = 0; k < 50; ++k) {
        Vector g = rng.normal_vector(2);
        double mu = rng.uniform(0.1, 2.0);
        CHECK(vp.reg_value_from(g, mu) ==
              doctest::Approx(lse.reg_value_from(g, mu)).epsilon(1e-12));
        DualCertificate c = vp.reg_maximizer_from(g, mu);
        CHECK(c.vertex_weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(vp.tag() == ClosedForm::VertexLogSumExp);
}

TEST_CASE("generic route brackets and guards") {
    Matrix A(1, 3);
    A << 1, -1, 0;
    Rng rng(99);
    SupProblem gen(random_quadratics(rng, 3, 2),
                   FeasibleSet::moment_polytope(A, Vector::Zero(1)), Penalty::kl_uniform(3));
    CHECK(gen.tag() == ClosedForm::Generic);
    Vector x = vec({0.3, -0.2});
    auto [lo, hi] = gen.sup_value_bracket(x);
    CHECK(lo == hi);  // support values are exact via vertex enumeration
    double phi = gen.sup_value(x);
    CHECK(phi == doctest::Approx(lo).epsilon(1e-14));
    // generic maximizer respects the sandwich bound
    for (double mu : {1.0, 0.3}) {
        double reg = gen.reg_value(x, mu);
        CHECK(phi - reg >= -1e-9);
        CHECK(phi - reg <= gen.sup_C() * mu + 1e-9);
    }
    // degenerate-softmax guard for tiny mu
    Vector g = gen.objectives().eval(x);
    double sp = g.maxCoeff() - g.minCoeff();
    CHECK_THROWS_AS(gen.generic_maximizer(g, 1e-4 * sp), DualSolveFailed);
}
