#include "hycurv/compat.hpp"

#include <cmath>
#include <limits>

namespace hycurv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void track_min(ConditionStatus& st, double value, long node) {
    if (node == st.worst_node || value < st.worst_value || st.worst_node == -1) {
        if (st.worst_node == -1 || value < st.worst_value) {
            st.worst_value = value;
            st.worst_node = node;
        }
    }
}

} // namespace

CompatibilityReport check_compatibility(const ProblemSpec& spec, double eps, double sigma,
                                        double r0) {
    CompatibilityReport rep;
    rep.eps = eps;
    rep.sigma = sigma;
    rep.r0 = r0;
    rep.removable_for_top_order = (spec.k == spec.n);

    const DiscreteProblem p = make_discrete_problem(spec, eps);
    const Grid& g = p.mask->grid;

    // psi growth: psi_u - psi/u >= 0, sampled at u = ubar(x) over the masked
    // nodes; equality is allowed, so exact zeros pass up to roundoff.
    rep.psi_growth.applicable = true;
    rep.psi_growth.worst_value = kInf;
    for (long node = 0; node < g.num_nodes(); ++node) {
        if (p.mask->klass(node) == NodeClass::exterior) continue;
        const double uval = p.ubar_raw[node];
        const auto pv = spec.psi.eval_with_du(g.point(node), uval);
        track_min(rep.psi_growth, pv.du - pv.value / uval, node);
    }
    rep.psi_growth.passed = rep.psi_growth.worst_value >= -1e-12;

    // Subsolution inequality with the FD truncation allowance; evaluated on
    // the raw (unpinned) samples of ubar.
    rep.subsolution.applicable = true;
    rep.subsolution.worst_value = kInf;
    for (long node : p.mask->interior) {
        const JetPoint jet = fd_jet(p.ubar_raw, node);
        const GraphEval ev = graph_eval(jet, spec.k, false, 0.0);
        if (!ev.admissible) {
            rep.subsolution.passed = false;
            rep.subsolution.worst_value = ev.state.margin;
            rep.subsolution.worst_node = node;
            rep.subsolution.note = "ubar is not admissible at a node";
            break;
        }
        const double psi_val = spec.psi.eval(g.point(node), p.ubar_raw[node]);
        track_min(rep.subsolution, ev.G - psi_val, node);
    }
    if (rep.subsolution.note.empty()) {
        rep.subsolution.passed = rep.subsolution.worst_value >= -spec.tol.subsolution_slack;
        rep.subsolution.note =
            "allowed FD slack " + std::to_string(spec.tol.subsolution_slack);
    }

    // sigma separation: psi(x, ubar) > C(n,k)^{1/k} sigma. Since psi_u >= 0
    // under the growth condition and any solution dominates ubar, checking at
    // ubar is the conservative side.
    rep.sigma_separation.applicable = true;
    rep.sigma_separation.worst_value = kInf;
    const double sigma_fk = std::pow(binomial(spec.n, spec.k), 1.0 / spec.k) * sigma;
    for (long node = 0; node < g.num_nodes(); ++node) {
        if (p.mask->klass(node) == NodeClass::exterior) continue;
        const double psi_val = spec.psi.eval(g.point(node), p.ubar_raw[node]);
        track_min(rep.sigma_separation, psi_val - sigma_fk, node);
    }
    rep.sigma_separation.passed = rep.sigma_separation.worst_value > 0.0;

    // eps-sigma compatibility.
    rep.eps_sigma.applicable = true;
    if (!(sigma > 0.0) || !(sigma < 1.0)) {
        rep.eps_sigma.passed = false;
        rep.eps_sigma.note = "sigma must lie in (0, 1)";
    } else {
        const double upper = std::isinf(r0) ? kInf : r0 * sigma;
        const double quad = std::isinf(r0)
                                ? sigma
                                : sigma - std::sqrt(1.0 - sigma * sigma) / r0 * eps -
                                      (1.0 + sigma) / (r0 * r0) * eps * eps;
        rep.eps_sigma.worst_value = quad;
        rep.eps_sigma.passed = (eps > 0.0) && (eps < upper) && (quad > 0.0);
        rep.eps_sigma.note = std::isinf(r0) ? "r0 = inf; reduces to eps > 0 and sigma > 0"
                                            : "quadratic margin at r0";
    }

    // Hessian cone condition near the zero level set of ubar. Not formable
    // when k == n (the cone of order n + 1 is empty in R^n).
    if (spec.k == spec.n) {
        rep.boundary_hessian.applicable = false;
        rep.boundary_hessian.note = "removed for k = n";
    } else {
        rep.boundary_hessian.applicable = true;
        rep.boundary_hessian.worst_value = kInf;
        const long nn = g.num_nodes();
        std::vector<double> all(static_cast<size_t>(nn));
        for (long i = 0; i < nn; ++i) all[static_cast<size_t>(i)] = ubar_value_or_nan(spec, g.point(i));
        long band_nodes = 0;
        for (long i = 0; i < nn; ++i) {
            const double v = all[static_cast<size_t>(i)];
            // Band: distance estimate ubar/|D ubar| <= 3h on the ubar >= 0
            // side, where the hypothesis lives and the FD Hessian is sound.
            if (!std::isfinite(v) || v < 0.0) continue;
            const auto jet = fd_jet_unmasked(g, all, i);
            if (!jet) continue;
            const double grad = jet->du.norm();
            if (grad <= 0.0) continue;
            if (v > 3.0 * g.h * grad) continue;
            ++band_nodes;
            const EigenDecomp eig = jacobi_eigen(jet->d2u);
            SmallVec neg(spec.n);
            for (int a = 0; a < spec.n; ++a) neg[a] = -eig.lambda[a];
            track_min(rep.boundary_hessian, cone_margin(neg, spec.k + 1), i);
        }
        if (band_nodes == 0) {
            rep.boundary_hessian.applicable = false;
            rep.boundary_hessian.note = "no grid nodes within 3h of the zero level set";
        } else {
            rep.boundary_hessian.passed = rep.boundary_hessian.worst_value > 0.0;
            rep.boundary_hessian.note = "band of " + std::to_string(band_nodes) + " nodes";
        }
    }

    return rep;
}

ConditionStatus sigma_separation_on_solution(const DiscreteProblem& p, const ScalarField& u,
                                             double sigma) {
    ConditionStatus st;
    st.applicable = true;
    st.worst_value = kInf;
    const double sigma_fk = std::pow(binomial(p.spec.n, p.spec.k), 1.0 / p.spec.k) * sigma;
    const Grid& g = p.mask->grid;
    for (long node : p.mask->interior) {
        const double psi_val = p.spec.psi.eval(g.point(node), u[node]);
        track_min(st, psi_val - sigma_fk, node);
    }
    st.passed = st.worst_value > 0.0;
    st.note = "evaluated on the computed solution";
    return st;
}

} // namespace hycurv
