#pragma once

#include "hycurv/solver.hpp"

#include <vector>

namespace hycurv {

/// Quadratic test-function probes of the viscosity characterization.
/// At each sampled node the discrete Taylor model is shifted by +alpha I
/// (touching from above) and -alpha I (touching from below). The first must
/// satisfy G >= psi - tol_probe; the second either loses admissibility or
/// satisfies G <= psi + tol_probe, with tol_probe = c_trunc * h^2 absorbing
/// the FD truncation of the discrete jets.
struct ViscosityProbeReport {
    double c_trunc = 0.0;
    double tol_probe = 0.0;
    int nodes_tested = 0;
    std::vector<double> alphas;
    long sub_checks = 0;
    long super_checks = 0;
    long sub_violations = 0;
    long super_violations = 0;
    long super_inadmissible = 0; // probes resolved by the inadmissibility clause
    long borderline = 0;         // margin within 1e-8 of the solver floor m0
    double worst_sub_slack = 0.0;
    double worst_super_slack = 0.0;
    bool passed() const { return sub_violations == 0 && super_violations == 0; }
};

/// sup |G_h[cap] - exact| / h^2 on an analytic reference cap (R = 1,
/// sigma = 1/2) sampled at spacing h; clamped below by 1.
double calibrate_trunc_constant(int n, int k, double h);

ViscosityProbeReport viscosity_probe(const DiscreteProblem& p, const ScalarField& u,
                                     const std::vector<long>& nodes,
                                     const std::vector<double>& alphas, double c_trunc);

/// Deterministic sample of `count` interior nodes (without replacement).
std::vector<long> pick_interior_nodes(const DomainMask& mask, int count, unsigned seed);

/// Discrete touching principle: where f(kappa[v]) < f(kappa[u]) nodewise and
/// kappa[v] stays in the closed cone, no interior local maximum of u - v may
/// sit at height zero (|u - v| < h^2 counts as touching).
struct TouchingReport {
    bool precondition_ok = false;    // hypothesis verified, reported separately
    double precondition_worst = 0.0; // min of f(u) - f(v)
    long maxima_count = 0;
    long touching_violations = 0;
    double min_abs_gap_at_maxima = 0.0;
    long witness = -1;
    bool passed() const { return touching_violations == 0; }
};

TouchingReport touching_test(const DiscreteProblem& p, const ScalarField& u,
                             const ScalarField& v);

/// eps <= ubar <= u <= C0 over the masked nodes.
struct SandwichReport {
    double min_ubar_minus_eps = 0.0;
    double min_u_minus_ubar = 0.0;
    double min_c0_minus_u = 0.0;
    bool holds(double tol) const {
        return min_ubar_minus_eps >= -tol && min_u_minus_ubar >= -tol && min_c0_minus_u >= -tol;
    }
};

SandwichReport c0_sandwich(const DiscreteProblem& p, const ScalarField& u, double c0);

/// w = 1/nu^{n+1} at the boundary-adjacent interior ring against the bound
///   w < 1 / (sigma - sqrt(1-sigma^2) eps / r0 - (1+sigma) eps^2 / r0^2).
struct BoundaryGradientReport {
    bool applicable = false;
    double bound = 0.0;
    double worst_w = 0.0;
    long violations = 0;
    long nodes_checked = 0;
    bool passed() const { return applicable && violations == 0; }
};

BoundaryGradientReport boundary_gradient_check(const DiscreteProblem& p, const ScalarField& u,
                                               double sigma, double r0);

/// Restart Newton from an admissibility-preserving interior bump of the
/// solution; the comparison principle predicts reconvergence to the same
/// field.
struct UniquenessProbeReport {
    bool converged = false;
    double sup_diff = 0.0;
    double bump_amplitude = 0.0;
    int newton_iterations = 0;
    bool passed(double tol) const { return converged && sup_diff <= tol; }
};

UniquenessProbeReport uniqueness_probe(const DiscreteProblem& p, const ScalarField& solution);

/// Directional derivative of the residual against J h for a smooth
/// deterministic h vanishing at the boundary. The forward variant is the
/// classical oracle; the central variant with a larger direction amplitude
/// stays above the 1/h^2 roundoff floor on fine grids.
struct JacobianSpotCheck {
    double rel_error = 0.0;
    bool passed = false;
};

JacobianSpotCheck jacobian_directional_check(const DiscreteProblem& p, const ScalarField& u,
                                             const RhsFunctional& rhs, double tau, double tol,
                                             bool central = false, double amplitude = 0.01);

} // namespace hycurv
