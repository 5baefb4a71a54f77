#pragma once

#include "hycurv/symfunc.hpp"

namespace hycurv {

/// Second-order jet (u, Du, D2u) of a graph height function at one point.
/// The height u must be positive (half-space coordinate), D2u symmetric.
struct JetPoint {
    double u = 0.0;
    SmallVec du;
    SmallMat d2u;
};

/// Metric factors of the vertical graph at a point with gradient du:
///   w        = sqrt(1 + |Du|^2)
///   gamma_up = delta_ik - u_i u_k / (w (1 + w))
///   gamma_dn = delta_ik + u_i u_k / (1 + w)
///   nu_vert  = 1 / w   (vertical component of the upward unit normal)
/// gamma_up * gamma_dn = I and gamma_dn * gamma_dn = I + Du Du^T.
struct MetricTerms {
    double w = 1.0;
    SmallMat gamma_up;
    SmallMat gamma_down;
    double nu_vertical = 1.0;
};

MetricTerms metric_terms(const SmallVec& du);

/// Per-point geometric package of the graph in the half-space model.
/// A = (1/w)(I + u gamma_up D2u gamma_up) is the hyperbolic curvature matrix;
/// kappa are its eigenvalues sorted ascending. kappa_euclid are the Euclidean
/// principal curvatures, recovered through the shared-eigenvector identity
/// A = u * a_tilde + nu_vert * I, i.e. kappa_i = u kappa_tilde_i + nu_vert.
struct CurvatureState {
    double w = 1.0;
    double nu_vertical = 1.0;
    SmallMat gamma_up;
    SmallMat gamma_down;
    SmallMat A;
    SmallVec kappa;
    SmallVec kappa_euclid;
    SmallMat eigenvectors;
    double margin = 0.0; // cone_margin(kappa, k)
};

CurvatureState curvature_matrix(const JetPoint& p, int k);

/// G(D2u, Du, u) = f(lambda(A[u])) = sigma_k^{1/k}(kappa[u]).
double G_value(const JetPoint& p, int k);

/// Coefficients of the linearized operator
///   L h = G^{st} D_st h + G^s D_s h + G_u h,
/// with
///   G^{st} = (u/w) F^{ij} gamma^{is} gamma^{tj}
///   G^s    = -(u_s/w^2) F^{ij} a_ij
///            - 2 (w gamma^{is} u_q + u_i gamma^{qs}) / (w(1+w)) F^{ij} a_qj
///            + (2/w^2) F^{ij} gamma^{is} u_j
///   G_u    = (1/u) (F^{ij} a_ij - (1/w) sum_i f_i).
/// G^{st} is positive definite on admissible jets (ellipticity).
struct LinearizationCoeffs {
    SmallMat Gst;
    SmallVec Gs;
    double Gu = 0.0;
};

LinearizationCoeffs linearization(const JetPoint& p, int k);

/// One-pass evaluation used by the solver: curvature state, F derivatives,
/// G value and (optionally) the linearization coefficients. When the cone
/// margin falls below `margin_floor` (or the spectrum leaves the cone) only
/// `state` is filled and `admissible` is false; the Newton line search uses
/// this instead of exception-driven control flow.
struct GraphEval {
    bool admissible = true;
    CurvatureState state;
    double G = 0.0;
    double sum_f = 0.0;          // sum_i f_i
    double F_dot_A = 0.0;        // F^{ij} a_ij = sum_i f_i kappa_i
    SmallMat dF;                 // F^{ij}
    LinearizationCoeffs coeffs;  // filled only when requested
};

GraphEval graph_eval(const JetPoint& p, int k, bool want_coeffs, double margin_floor = 0.0);

/// Graph of an equidistant sphere: u(x) = sqrt(R^2 - |x - a'|^2) - sigma R.
/// Upper-hemisphere cap over its positivity region; every point has constant
/// hyperbolic principal curvatures kappa_i = sigma (upward-normal convention).
struct SphereCap {
    SmallVec center_horizontal;
    double radius = 1.0;
    double sigma = 0.0; // in (-1, 1)
};

double sphere_cap_height(const SphereCap& cap, const SmallVec& x);

/// Analytic jet of the cap at x; throws a domain error outside the
/// positivity region.
JetPoint sphere_cap_jet(const SphereCap& cap, const SmallVec& x);

} // namespace hycurv
