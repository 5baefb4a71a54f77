#include "hycurv/graph_geometry.hpp"

#include <limits>
#include <string>

namespace hycurv {

MetricTerms metric_terms(const SmallVec& du) {
    const int n = du.n;
    if (!du.finite())
        throw Error(Errc::domain, "metric_terms: non-finite gradient");

    MetricTerms mt;
    mt.w = std::sqrt(1.0 + du.dot(du));
    mt.nu_vertical = 1.0 / mt.w;
    mt.gamma_up = SmallMat(n);
    mt.gamma_down = SmallMat(n);
    const double cu = 1.0 / (mt.w * (1.0 + mt.w));
    const double cd = 1.0 / (1.0 + mt.w);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double uij = du[i] * du[j];
            mt.gamma_up(i, j) = (i == j ? 1.0 : 0.0) - uij * cu;
            mt.gamma_down(i, j) = (i == j ? 1.0 : 0.0) + uij * cd;
        }
    }
    return mt;
}

namespace {

void validate_jet(const JetPoint& p) {
    if (!(p.u > 0.0))
        throw Error(Errc::domain, "jet: height u must be positive, got " + std::to_string(p.u));
    if (!p.du.finite())
        throw Error(Errc::domain, "jet: non-finite gradient");
    if (p.d2u.max_asymmetry() > kSymmetryTol * std::max(1.0, p.d2u.frobenius()))
        throw Error(Errc::shape, "jet: Hessian is not symmetric");
    if (p.du.n != p.d2u.n)
        throw Error(Errc::shape, "jet: gradient/Hessian dimension mismatch");
}

SmallMat sandwich(const SmallMat& g, const SmallMat& m) {
    // g * m * g for symmetric g, m.
    return g.mul(m).mul(g);
}

} // namespace

CurvatureState curvature_matrix(const JetPoint& p, int k) {
    validate_jet(p);
    const int n = p.du.n;
    const MetricTerms mt = metric_terms(p.du);

    CurvatureState st;
    st.w = mt.w;
    st.nu_vertical = mt.nu_vertical;
    st.gamma_up = mt.gamma_up;
    st.gamma_down = mt.gamma_down;

    const SmallMat core = sandwich(mt.gamma_up, p.d2u); // gamma^{ik} u_kl gamma^{lj}
    st.A = SmallMat(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            st.A(i, j) = ((i == j ? 1.0 : 0.0) + p.u * core(i, j)) / mt.w;
    // Exact symmetrization; core is symmetric up to rounding.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double s = 0.5 * (st.A(i, j) + st.A(j, i));
            st.A(i, j) = s;
            st.A(j, i) = s;
        }

    const EigenDecomp eig = jacobi_eigen(st.A);
    st.kappa = eig.lambda;
    st.eigenvectors = eig.vectors;
    // A = u * a_tilde + nu * I with shared eigenvectors.
    st.kappa_euclid = SmallVec(n);
    for (int i = 0; i < n; ++i)
        st.kappa_euclid[i] = (st.kappa[i] - mt.nu_vertical) / p.u;
    st.margin = cone_margin(st.kappa, k);
    return st;
}

double G_value(const JetPoint& p, int k) {
    const CurvatureState st = curvature_matrix(p, k);
    return f_eval(st.kappa, k).f_value; // throws admissibility with margin
}

GraphEval graph_eval(const JetPoint& p, int k, bool want_coeffs, double margin_floor) {
    GraphEval ev;
    ev.state = curvature_matrix(p, k);
    const int n = p.du.n;
    if (!(ev.state.margin > 0.0) || ev.state.margin < margin_floor) {
        ev.admissible = false;
        return ev;
    }

    const SymEval fe = f_eval(ev.state.kappa, k);
    ev.G = fe.f_value;
    ev.sum_f = 0.0;
    ev.F_dot_A = 0.0;
    for (int i = 0; i < n; ++i) {
        ev.sum_f += fe.grad[i];
        ev.F_dot_A += fe.grad[i] * ev.state.kappa[i];
    }

    // F^{ij} from the spectral formula.
    ev.dF = SmallMat(n);
    for (int q = 0; q < n; ++q) {
        const double fq = fe.grad[q];
        for (int i = 0; i < n; ++i) {
            const double viq = ev.state.eigenvectors(i, q);
            for (int j = 0; j < n; ++j)
                ev.dF(i, j) += fq * viq * ev.state.eigenvectors(j, q);
        }
    }

    if (!want_coeffs) return ev;

    const double w = ev.state.w;
    const SmallMat& gu = ev.state.gamma_up;
    const SmallMat& A = ev.state.A;
    const SmallMat& F = ev.dF;

    // G^{st} = (u/w) F^{ij} gamma^{is} gamma^{tj}
    ev.coeffs.Gst = sandwich(gu, F);
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t)
            ev.coeffs.Gst(s, t) *= p.u / w;

    // FA_q^j = F^{ij} a_qj contracted pieces, reused below.
    const SmallMat FA = F.mul(A); // (FA)_{iq}... F^{ij} a_{jq}; A symmetric
    // gamma^{is} u_i  (= u_s / w by the metric identity, but keep it explicit)
    SmallVec gu_u(n);
    for (int s = 0; s < n; ++s) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += gu(i, s) * p.du[i];
        gu_u[s] = acc;
    }

    ev.coeffs.Gs = SmallVec(n);
    for (int s = 0; s < n; ++s) {
        double term1 = -p.du[s] / (w * w) * ev.F_dot_A;

        // -2 (w gamma^{is} u_q + u_i gamma^{qs}) / (w (1 + w)) F^{ij} a_{qj}
        double term2 = 0.0;
        for (int i = 0; i < n; ++i)
            for (int q = 0; q < n; ++q) {
                const double coef = w * gu(i, s) * p.du[q] + p.du[i] * gu(q, s);
                term2 += coef * FA(i, q);
            }
        term2 *= -2.0 / (w * (1.0 + w));

        // (2/w^2) F^{ij} gamma^{is} u_j
        double term3 = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                term3 += F(i, j) * gu(i, s) * p.du[j];
        term3 *= 2.0 / (w * w);

        ev.coeffs.Gs[s] = term1 + term2 + term3;
    }

    ev.coeffs.Gu = (ev.F_dot_A - ev.sum_f / w) / p.u;
    return ev;
}

LinearizationCoeffs linearization(const JetPoint& p, int k) {
    const GraphEval ev = graph_eval(p, k, true);
    if (!ev.admissible)
        throw Error(Errc::admissibility, "linearization: jet is not admissible")
            .with_margin(ev.state.margin);
    return ev.coeffs;
}

double sphere_cap_height(const SphereCap& cap, const SmallVec& x) {
    double rr = 0.0;
    for (int i = 0; i < x.n; ++i) {
        const double d = x[i] - cap.center_horizontal[i];
        rr += d * d;
    }
    const double R2 = cap.radius * cap.radius;
    if (rr >= R2) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(R2 - rr) - cap.sigma * cap.radius;
}

JetPoint sphere_cap_jet(const SphereCap& cap, const SmallVec& x) {
    const int n = x.n;
    double rr = 0.0;
    SmallVec rel(n);
    for (int i = 0; i < n; ++i) {
        rel[i] = x[i] - cap.center_horizontal[i];
        rr += rel[i] * rel[i];
    }
    const double R2 = cap.radius * cap.radius;
    if (rr >= R2)
        throw Error(Errc::domain, "sphere_cap_jet: point outside the cap ball");
    const double s = std::sqrt(R2 - rr);
    const double u = s - cap.sigma * cap.radius;
    if (!(u > 0.0))
        throw Error(Errc::domain, "sphere_cap_jet: point outside positivity region");

    JetPoint p;
    p.u = u;
    p.du = SmallVec(n);
    p.d2u = SmallMat(n);
    for (int i = 0; i < n; ++i) p.du[i] = -rel[i] / s;
    const double s3 = s * s * s;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            p.d2u(i, j) = -((i == j ? 1.0 : 0.0) / s + rel[i] * rel[j] / s3);
    return p;
}

} // namespace hycurv
