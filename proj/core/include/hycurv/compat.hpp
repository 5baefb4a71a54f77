#pragma once

#include "hycurv/problem.hpp"

#include <string>

namespace hycurv {

struct ConditionStatus {
    bool applicable = true;
    bool passed = false;
    double worst_value = 0.0;  // the margin that must stay nonnegative/positive
    long worst_node = -1;
    std::string note;
};

/// Hypothesis checks for the approximating Dirichlet problem; evaluated on
/// grid samples, reported rather than thrown. When k == n the growth, cone
/// and sigma compatibility conditions are removable (the solve does not need
/// them), which the CLI turns into a warning-only policy.
struct CompatibilityReport {
    double eps = 0.0;
    double sigma = 0.0;
    double r0 = 0.0;

    ConditionStatus psi_growth;       // psi_u - psi/u >= 0 at (x, ubar(x))
    ConditionStatus boundary_hessian; // -lambda(D2 ubar) in Gamma_{k+1} near the zero set
    ConditionStatus eps_sigma;        // 0 < eps < r0 sigma and the quadratic margin > 0
    ConditionStatus subsolution;      // f(kappa[ubar]) >= psi(x, ubar) (minus FD slack)
    ConditionStatus sigma_separation; // psi(x, ubar) > C(n,k)^{1/k} sigma

    bool removable_for_top_order = false; // k == n

    bool all_passed() const {
        auto ok = [](const ConditionStatus& c) { return !c.applicable || c.passed; };
        return ok(psi_growth) && ok(boundary_hessian) && ok(eps_sigma) && ok(subsolution) &&
               ok(sigma_separation);
    }
    /// Failures among the removable conditions only (eq. growth/cone/sigma).
    bool removable_failures() const {
        auto bad = [](const ConditionStatus& c) { return c.applicable && !c.passed; };
        return bad(psi_growth) || bad(boundary_hessian) || bad(eps_sigma);
    }
    bool hard_failures() const {
        auto bad = [](const ConditionStatus& c) { return c.applicable && !c.passed; };
        return bad(subsolution) || bad(sigma_separation);
    }
};

/// Evaluate all five conditions at eps-level grid samples. r0 may be
/// infinity (convex level sets); the near-boundary band for the Hessian cone
/// test is 3h wide, measured as |ubar| / |D ubar| <= 3h.
CompatibilityReport check_compatibility(const ProblemSpec& spec, double eps, double sigma,
                                        double r0);

/// Re-evaluate the sigma separation a posteriori on a computed solution.
ConditionStatus sigma_separation_on_solution(const DiscreteProblem& p, const ScalarField& u,
                                             double sigma);

} // namespace hycurv
