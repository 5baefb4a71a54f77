#pragma once

#include "hycurv/expr.hpp"
#include "hycurv/grid.hpp"

namespace hycurv {

struct Tolerances {
    double residual_tol = 1e-9;     // Newton stop: sup-norm of the residual
    double margin = 1e-10;          // admissibility margin m0 kept by iterates
    int max_newton = 50;
    double damping_floor = 1e-6;    // smallest accepted backtracking factor
    double krylov_tol = 1e-10;      // relative BiCGSTAB tolerance
    int krylov_max_iter_cap = 5000; // iterations capped at min(cap, 10*sqrt(N))
    double t_step_init = 0.5;       // initial homotopy step
    double t_step_min = 1e-6;       // below this the continuation aborts
    double subsolution_slack = 1e-3;// FD-truncation allowance in f(kappa[ubar]) >= psi
};

struct ProblemSpec {
    int n = 2;
    int k = 2;
    expr::Ast psi;   // psi(x, u), positive on the working region
    expr::Ast ubar;  // subsolution ubar(x); its level sets define the domains
    SmallVec box_min;
    SmallVec box_max;
    double h = 1.0 / 64.0;
    Tolerances tol;
};

/// Grid covering [box_min, box_max] at spacing h; the box must be h-aligned.
Grid make_grid(const ProblemSpec& spec);

/// Evaluate ubar at x, mapping expression domain errors to NaN (outside).
double ubar_value_or_nan(const ProblemSpec& spec, const SmallVec& x);

/// One epsilon-level instance: mask of {ubar > eps}, the sampled subsolution,
/// the pinned starting iterate, and the first-stage homotopy data
///   c(x) = G[start]/start,  delta = 1/2 min c(x)
/// so that G[start] > delta * start holds with factor-two headroom.
struct DiscreteProblem {
    ProblemSpec spec;
    double eps = 0.0;
    MaskPtr mask;
    ScalarField ubar_raw;              // exact samples on INTERIOR u CUT
    ScalarField start;                 // ubar with Dirichlet pinning applied
    std::vector<double> stage1_coef;   // c at interior nodes, slot-aligned
    double delta = 0.0;
    double min_subsolution_gap = 0.0;  // min of f(kappa[start]) - psi(x, start)
    double min_psi = 0.0;              // min of psi(x, start)
};

DiscreteProblem make_discrete_problem(const ProblemSpec& spec, double eps);

} // namespace hycurv
