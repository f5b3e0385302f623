#pragma once

#include "smoothflow/dynamics.hpp"

namespace smoothflow {

struct ReferenceSolution {
    double inf_phi = 0;
    Vector x_star;
    std::string method;
    double bracket_lower = 0;
    double bracket_upper = 0;
};

struct ReferenceOptions {
    double mu_final = 1e-9;        // endpoint of the smoothing continuation
    double grad_tol = 1e-10;       // stationarity target for the descent stage
    int descent_max_iter = 200000;
    long subgradient_iters = 1000000;  // direct oracle for n > 2
    double direct_slack = 1e-4;        // accuracy credited to the subgradient oracle
    double grid_halfwidth = 2.0;       // initial box half-width around the descent point
};

/// Certifies inf phi and a minimizer by two independent routes:
/// (a) smoothing descent with a vanishing-mu continuation, bracketed by the
///     sandwich bound; (b) a direct oracle on the raw phi (dense grid +
///     refinement for n <= 2, Polyak subgradient otherwise). Throws
/// OracleDisagreement when the routes fail to overlap.
ReferenceSolution reference_solve(const SmoothedObjective& problem, const Vector& x_init,
                                  const ReferenceOptions& opt = ReferenceOptions());

}  // namespace smoothflow
