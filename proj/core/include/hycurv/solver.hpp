#pragma once

#include "hycurv/problem.hpp"
#include "hycurv/sparse.hpp"

#include <utility>
#include <vector>

namespace hycurv {

/// Right-hand side of G(D2u, Du, u) = rhs(x, u) for one homotopy stage:
///   stage1: ((1 - t) c(x) + t delta) * u      (from u = start at t = 0)
///   stage2: (1 - t) delta u + t psi(x, u)     (from the stage-1 endpoint)
///   target: psi(x, u)                          (== stage2 at t = 1)
struct RhsFunctional {
    enum class Kind { stage1, stage2, target };
    Kind kind = Kind::target;
    double t = 1.0;
    double delta = 0.0;
    const std::vector<double>* stage1_coef = nullptr;
    const expr::Ast* psi = nullptr;

    static RhsFunctional stage1(const DiscreteProblem& p, double t);
    static RhsFunctional stage2(const DiscreteProblem& p, double t);
    static RhsFunctional target(const DiscreteProblem& p);

    /// (value, d/du) at interior slot `slot`, position x, height u.
    std::pair<double, double> eval(long slot, const SmallVec& x, double u) const;
};

struct ResidualInfo {
    bool admissible = true;
    long bad_node = -1;
    double bad_margin = 0.0;
    std::vector<double> r;    // per interior slot (mask->interior order)
    double sup_norm = 0.0;
    double min_margin = 0.0;
};

/// Per-node G[u] - rhs(x, u) over the interior; admissibility is reported,
/// not thrown, so the Newton line search can probe candidate iterates.
ResidualInfo eval_residual(const DiscreteProblem& p, const ScalarField& u,
                           const RhsFunctional& rhs, double margin_floor);

/// Residual as a field (NaN off the interior). Throws an admissibility error
/// carrying the node and its cone margin when the iterate leaves the cone.
ScalarField residual(const DiscreteProblem& p, const ScalarField& u, const RhsFunctional& rhs);

/// CSR discretization of h -> G^{st} D_st h + G^s D_s h + (G_u - rhs_u) h
/// over the compact unknowns, with homogeneous Dirichlet rows at the CUT
/// constraints. Where a stencil touches a pinned CUT node, that node's
/// interpolation weights are folded onto its interior anchors, so the matrix
/// is the exact Jacobian of the reduced system.
CsrMatrix assemble_jacobian(const DiscreteProblem& p, const ScalarField& u,
                            const RhsFunctional& rhs);

struct NewtonStats {
    bool converged = false;
    int iterations = 0;
    double final_residual = 0.0;
    double min_damping = 1.0;
    int krylov_total = 0;
    std::vector<double> residual_history;
};

struct NewtonResult {
    ScalarField u;
    NewtonStats stats;
};

/// Damped Newton with admissibility preservation: each step solves
/// J h = -residual and backtracks tau in {1, 1/2, 1/4, ...} until every node
/// keeps cone margin >= m0 and the sup-norm residual strictly decreases.
/// Throws: cone_exit when no damping stays admissible, newton_nonconvergence
/// at the damping floor or iteration cap, krylov errors from the inner solve.
NewtonResult newton_solve(const DiscreteProblem& p, const ScalarField& start,
                          const RhsFunctional& rhs);

struct ContinuationLogEntry {
    int stage;          // 1 or 2
    double t;
    int newton_iters;
    double min_damping;
    double residual;
};

struct ContinuityResult {
    ScalarField u;
    std::vector<ContinuationLogEntry> log;
    double delta = 0.0;
    int total_newton_iterations = 0;
};

/// Two-step continuity method for the eps-level Dirichlet problem:
/// stage 1 marches t: 0 -> 1 from u = start, stage 2 continues to the target
/// psi. The t-step halves on Newton failure, grows by 1.5 on easy success,
/// and aborts with a continuation error below t_step_min.
ContinuityResult continuity_solve(const DiscreteProblem& p);

/// continuity_solve with the curvature order forced to k = 1.
ContinuityResult mean_curvature_solve(const ProblemSpec& spec, double eps,
                                      DiscreteProblem* problem_out = nullptr);

struct SolutionSummary {
    double residual_sup = 0.0;
    double max_kappa = 0.0;        // max over nodes of the largest |kappa_i|
    double min_margin = 0.0;
    double min_u_minus_ubar = 0.0; // over INTERIOR u CUT
    double sup_grad = 0.0;         // max |Du| over interior
    double max_height = 0.0;
    double min_height = 0.0;
};

SolutionSummary summarize_solution(const DiscreteProblem& p, const ScalarField& u);

} // namespace hycurv
