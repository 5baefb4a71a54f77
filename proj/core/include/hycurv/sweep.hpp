#pragma once

#include "hycurv/solver.hpp"

#include <string>
#include <vector>

namespace hycurv {

/// Tolerance for the solution monotonicity in eps (smaller eps => larger
/// solution on the common domain).
inline constexpr double kMonotonicityTol = 1e-6;

struct SweepEntry {
    double eps = 0.0;
    bool converged = false;
    double residual_sup = 0.0;
    double max_kappa = 0.0;
    double min_margin = 0.0;
    double min_u_minus_ubar = 0.0;
    double sup_grad_ref = 0.0;      // sup |Du| over the reference region
    long mono_violations = 0;       // vs previous (coarser) entry
    double mono_worst = 0.0;        // most negative u_fine - u_coarse
    double cauchy_sup_diff = 0.0;   // sup |u_i - u_{i-1}| on the reference region
    double limit_sup_diff = 0.0;    // sup |u_i - u_last| there (distance to the
                                    // limit field estimated by the finest entry)
    int continuation_steps = 0;
    int newton_iterations = 0;
    std::string failure;
};

struct SweepReport {
    std::vector<double> schedule;
    double reference_eps0 = 0.0;
    std::vector<SweepEntry> entries;
    bool all_converged = false;
    bool monotone_ok = false;
    // Distances to the estimated limit decrease along the schedule; with the
    // monotone family this is the meaningful Cauchy-convergence indicator
    // (consecutive increments are also recorded but need not be monotone at
    // moderate eps).
    bool cauchy_decreasing = false;
    double grad_ratio = 0.0;        // max/min of sup_grad_ref across entries
    double lipschitz_estimate = 0.0;// sup |Du| of the finest solution on the region
};

struct SweepOutput {
    SweepReport report;
    std::vector<DiscreteProblem> problems;                  // per converged entry
    std::vector<ScalarField> fields;                        // per converged entry
    std::vector<std::vector<ContinuationLogEntry>> logs;    // per converged entry
};

/// Solve the approximating problem along a strictly decreasing eps schedule,
/// recording pairwise monotonicity, the uniform interior C1 diagnostic on the
/// eps0 reference region, and Cauchy differences there. A solve failure marks
/// its entry and drops the remaining ones (partial report), independent of
/// the job count.
SweepOutput epsilon_sweep(const ProblemSpec& spec, const std::vector<double>& schedule,
                          double reference_eps0, int jobs = 1);

struct InclusionCheck {
    std::string name;
    bool holds = false;
    long violations = 0;
    long witness = -1;
};

/// Grid-mask bracketing of the solution level sets:
///   - {u_eps > eps} has exactly the interior of the base domain,
///   - domain(eps0) inside {u_eps > eps0} inside domain(eps),
///   - {u_eps > eps0} nests across thresholds,
///   - {u_eps > eps0} inside {u_mean > eps0} inside {ubar > delta_eps0},
/// with delta_eps0 = min ubar over the mean-curvature level region.
struct BracketReport {
    double eps0 = 0.0;
    double eps = 0.0;
    double delta_eps0 = 0.0;
    bool delta_in_range = false;       // 0 < delta_eps0 <= eps0
    bool eps_below_delta = false;      // hypothesis eps < delta_eps0
    double mean_min_above_ubar = 0.0;  // min (u_mean - ubar)
    std::vector<InclusionCheck> checks;
    double trace_worst = 0.0;          // max |u_eps - eps0| at derived CUT nodes
    double trace_tol = 0.0;
    bool trace_ok = false;
    bool all_hold = false;
};

BracketReport bracket_domains(const DiscreteProblem& prob_eps, const ScalarField& u_eps,
                              const ScalarField& u_mean, double eps0);

} // namespace hycurv
