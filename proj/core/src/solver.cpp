#include "hycurv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hycurv {

RhsFunctional RhsFunctional::stage1(const DiscreteProblem& p, double t) {
    RhsFunctional r;
    r.kind = Kind::stage1;
    r.t = t;
    r.delta = p.delta;
    r.stage1_coef = &p.stage1_coef;
    return r;
}

RhsFunctional RhsFunctional::stage2(const DiscreteProblem& p, double t) {
    RhsFunctional r;
    r.kind = Kind::stage2;
    r.t = t;
    r.delta = p.delta;
    r.psi = &p.spec.psi;
    return r;
}

RhsFunctional RhsFunctional::target(const DiscreteProblem& p) {
    RhsFunctional r;
    r.kind = Kind::target;
    r.psi = &p.spec.psi;
    return r;
}

std::pair<double, double> RhsFunctional::eval(long slot, const SmallVec& x, double u) const {
    switch (kind) {
        case Kind::stage1: {
            const double c = (*stage1_coef)[static_cast<size_t>(slot)];
            const double coef = (1.0 - t) * c + t * delta;
            return {coef * u, coef};
        }
        case Kind::stage2: {
            const auto pv = psi->eval_with_du(x, u);
            return {(1.0 - t) * delta * u + t * pv.value, (1.0 - t) * delta + t * pv.du};
        }
        case Kind::target: {
            const auto pv = psi->eval_with_du(x, u);
            return {pv.value, pv.du};
        }
    }
    return {0.0, 0.0};
}

ResidualInfo eval_residual(const DiscreteProblem& p, const ScalarField& u,
                           const RhsFunctional& rhs, double margin_floor) {
    const DomainMask& m = *p.mask;
    const long ni = m.num_interior;
    ResidualInfo info;
    info.r.assign(static_cast<size_t>(ni), 0.0);
    info.min_margin = std::numeric_limits<double>::infinity();

    for (long s = 0; s < ni; ++s) {
        const long node = m.interior[static_cast<size_t>(s)];
        const double uval = u[node];
        if (!(uval > 0.0) || !std::isfinite(uval)) {
            info.admissible = false;
            info.bad_node = node;
            info.bad_margin = std::numeric_limits<double>::quiet_NaN();
            return info;
        }
        const JetPoint jet = fd_jet(u, node);
        const GraphEval ev = graph_eval(jet, p.spec.k, false, margin_floor);
        if (!ev.admissible) {
            info.admissible = false;
            info.bad_node = node;
            info.bad_margin = ev.state.margin;
            return info;
        }
        info.min_margin = std::min(info.min_margin, ev.state.margin);

        double rhs_value;
        try {
            rhs_value = rhs.eval(s, m.grid.point(node), uval).first;
        } catch (const Error&) {
            info.admissible = false; // rhs undefined at this iterate
            info.bad_node = node;
            info.bad_margin = ev.state.margin;
            return info;
        }
        const double r = ev.G - rhs_value;
        info.r[static_cast<size_t>(s)] = r;
        info.sup_norm = std::max(info.sup_norm, std::fabs(r));
    }
    return info;
}

ScalarField residual(const DiscreteProblem& p, const ScalarField& u, const RhsFunctional& rhs) {
    const ResidualInfo info = eval_residual(p, u, rhs, 0.0);
    if (!info.admissible)
        throw Error(Errc::admissibility, "residual: iterate is not admissible")
            .with_node(info.bad_node)
            .with_margin(info.bad_margin);
    ScalarField out = make_field(p.mask);
    for (long s = 0; s < p.mask->num_interior; ++s)
        out[p.mask->interior[static_cast<size_t>(s)]] = info.r[static_cast<size_t>(s)];
    return out;
}

namespace {

// Distribute a stencil weight onto the unknown columns: direct entry for an
// interior neighbor, interpolation anchors for a pinned CUT neighbor.
void add_weight(CsrBuilder& b, const DomainMask& m, long row, long nb_node, double w) {
    const NodeClass k = m.klass(nb_node);
    if (k == NodeClass::interior) {
        b.add(row, m.compact[static_cast<size_t>(nb_node)], w);
        return;
    }
    if (k == NodeClass::cut) {
        const CutNode& cn = m.cuts[static_cast<size_t>(m.cut_slot[static_cast<size_t>(nb_node)])];
        for (int q = cn.pin_begin; q < cn.pin_end; ++q)
            b.add(row, m.compact[static_cast<size_t>(m.pins[static_cast<size_t>(q)].anchor)],
                  w * m.pins[static_cast<size_t>(q)].weight);
        return;
    }
    throw Error(Errc::domain, "jacobian stencil reached an exterior node").with_node(nb_node);
}

} // namespace

CsrMatrix assemble_jacobian(const DiscreteProblem& p, const ScalarField& u,
                            const RhsFunctional& rhs) {
    const DomainMask& m = *p.mask;
    const Grid& g = m.grid;
    const int n = g.n;
    const double h = g.h;
    const double invh2 = 1.0 / (h * h);
    const double inv2h = 1.0 / (2.0 * h);

    CsrBuilder builder(m.num_unknown_rows());

    long str[3] = {0, 0, 0};
    for (int a = 0; a < n; ++a) str[a] = g.stride(a);

    for (long s = 0; s < m.num_interior; ++s) {
        const long node = m.interior[static_cast<size_t>(s)];
        const long row = m.compact[static_cast<size_t>(node)];
        const JetPoint jet = fd_jet(u, node);
        const GraphEval ev = graph_eval(jet, p.spec.k, true, 0.0);
        if (!ev.admissible)
            throw Error(Errc::admissibility, "assemble_jacobian: iterate is not admissible")
                .with_node(node)
                .with_margin(ev.state.margin);
        const double rhs_du = rhs.eval(s, g.point(node), u[node]).second;

        double center = ev.coeffs.Gu - rhs_du;
        for (int a = 0; a < n; ++a) {
            const double gaa = ev.coeffs.Gst(a, a) * invh2;
            const double gs = ev.coeffs.Gs[a] * inv2h;
            center -= 2.0 * gaa;
            add_weight(builder, m, row, node + str[a], gaa + gs);
            add_weight(builder, m, row, node - str[a], gaa - gs);
        }
        for (int a = 0; a < n; ++a)
            for (int c = a + 1; c < n; ++c) {
                const double wmix = ev.coeffs.Gst(a, c) * 0.5 * invh2;
                if (wmix == 0.0) continue;
                add_weight(builder, m, row, node + str[a] + str[c], wmix);
                add_weight(builder, m, row, node - str[a] - str[c], wmix);
                add_weight(builder, m, row, node + str[a] - str[c], -wmix);
                add_weight(builder, m, row, node - str[a] + str[c], -wmix);
            }
        builder.add(row, row, center);
    }

    for (const CutNode& cn : m.cuts) {
        const long row = m.compact[static_cast<size_t>(cn.node)];
        builder.add(row, row, 1.0);
    }
    return builder.finish();
}

namespace {

bool is_step_failure(Errc c) {
    return c == Errc::newton_nonconvergence || c == Errc::cone_exit ||
           c == Errc::krylov_breakdown || c == Errc::zero_diagonal;
}

} // namespace

NewtonResult newton_solve(const DiscreteProblem& p, const ScalarField& start,
                          const RhsFunctional& rhs) {
    const Tolerances& tol = p.spec.tol;
    const DomainMask& m = *p.mask;

    NewtonResult out;
    out.u = start;
    apply_dirichlet(out.u, p.eps);

    ResidualInfo cur = eval_residual(p, out.u, rhs, tol.margin);
    if (!cur.admissible)
        throw Error(Errc::admissibility, "newton_solve: start iterate is not admissible")
            .with_node(cur.bad_node)
            .with_margin(cur.bad_margin);
    out.stats.residual_history.push_back(cur.sup_norm);
    out.stats.final_residual = cur.sup_norm;
    if (cur.sup_norm <= tol.residual_tol) {
        out.stats.converged = true;
        return out;
    }

    const long rows = m.num_unknown_rows();
    const int max_krylov = static_cast<int>(std::min<double>(
        tol.krylov_max_iter_cap, std::max(50.0, 10.0 * std::sqrt(static_cast<double>(rows)))));

    for (int it = 1; it <= tol.max_newton; ++it) {
        const CsrMatrix J = assemble_jacobian(p, out.u, rhs);
        std::vector<double> b(static_cast<size_t>(rows), 0.0);
        for (long s = 0; s < m.num_interior; ++s)
            b[static_cast<size_t>(m.compact[static_cast<size_t>(m.interior[static_cast<size_t>(s)])])] =
                -cur.r[static_cast<size_t>(s)];

        const KrylovResult kr = solve_bicgstab(J, b, tol.krylov_tol, max_krylov);
        out.stats.krylov_total += kr.iterations;

        double tau = 1.0;
        bool accepted = false;
        bool any_admissible = false;
        ScalarField trial = out.u;
        ResidualInfo tri;
        while (tau >= tol.damping_floor) {
            trial = out.u;
            for (long s = 0; s < m.num_interior; ++s) {
                const long node = m.interior[static_cast<size_t>(s)];
                trial[node] += tau * kr.x[static_cast<size_t>(m.compact[static_cast<size_t>(node)])];
            }
            apply_dirichlet(trial, p.eps);
            tri = eval_residual(p, trial, rhs, tol.margin);
            if (tri.admissible) {
                any_admissible = true;
                if (tri.sup_norm < cur.sup_norm) {
                    accepted = true;
                    break;
                }
            }
            tau *= 0.5;
        }
        if (!accepted) {
            if (!any_admissible)
                throw Error(Errc::cone_exit,
                            "newton_solve: no damping keeps the iterate admissible (iteration " +
                                std::to_string(it) + ")")
                    .with_node(tri.bad_node)
                    .with_margin(tri.bad_margin);
            throw Error(Errc::newton_nonconvergence,
                        "newton_solve: damping floor reached at residual " +
                            std::to_string(cur.sup_norm));
        }

        out.u = trial;
        cur = tri;
        out.stats.iterations = it;
        out.stats.min_damping = std::min(out.stats.min_damping, tau);
        out.stats.residual_history.push_back(cur.sup_norm);
        out.stats.final_residual = cur.sup_norm;
        if (cur.sup_norm <= tol.residual_tol) {
            out.stats.converged = true;
            return out;
        }
    }
    throw Error(Errc::newton_nonconvergence,
                "newton_solve: iteration cap reached at residual " +
                    std::to_string(cur.sup_norm));
}

ContinuityResult continuity_solve(const DiscreteProblem& p) {
    const Tolerances& tol = p.spec.tol;
    if (!(p.min_psi > 0.0))
        throw Error(Errc::config_error,
                    "psi is not positive on the working region (min " +
                        std::to_string(p.min_psi) + ")");
    if (p.min_subsolution_gap < -tol.subsolution_slack)
        throw Error(Errc::config_error,
                    "subsolution inequality f(kappa[ubar]) >= psi(x, ubar) fails by " +
                        std::to_string(-p.min_subsolution_gap));

    ContinuityResult out;
    out.delta = p.delta;
    out.u = p.start;

    for (int stage = 1; stage <= 2; ++stage) {
        double t = 0.0;
        double dt = tol.t_step_init;
        while (t < 1.0) {
            const double t_try = std::min(1.0, t + dt);
            const RhsFunctional rhs = (stage == 1) ? RhsFunctional::stage1(p, t_try)
                                                   : RhsFunctional::stage2(p, t_try);
            bool ok = true;
            NewtonResult nr;
            try {
                nr = newton_solve(p, out.u, rhs);
            } catch (const Error& e) {
                if (!is_step_failure(e.code())) throw;
                ok = false;
            }
            if (!ok) {
                dt *= 0.5;
                if (dt < tol.t_step_min)
                    throw Error(Errc::continuation_failure,
                                "continuity_solve: t-step underflow at stage " +
                                    std::to_string(stage) + ", t = " + std::to_string(t));
                continue;
            }
            out.u = std::move(nr.u);
            t = t_try;
            out.total_newton_iterations += nr.stats.iterations;
            out.log.push_back({stage, t, nr.stats.iterations, nr.stats.min_damping,
                               nr.stats.final_residual});
            if (nr.stats.iterations <= 5 && nr.stats.min_damping == 1.0)
                dt = std::min(dt * 1.5, 1.0);
        }
    }
    return out;
}

ContinuityResult mean_curvature_solve(const ProblemSpec& spec, double eps,
                                      DiscreteProblem* problem_out) {
    ProblemSpec mc = spec;
    mc.k = 1;
    DiscreteProblem p = make_discrete_problem(mc, eps);
    ContinuityResult res = continuity_solve(p);
    if (problem_out != nullptr) *problem_out = std::move(p);
    return res;
}

SolutionSummary summarize_solution(const DiscreteProblem& p, const ScalarField& u) {
    const DomainMask& m = *p.mask;
    SolutionSummary sm;
    sm.min_margin = std::numeric_limits<double>::infinity();
    sm.min_u_minus_ubar = std::numeric_limits<double>::infinity();
    sm.min_height = std::numeric_limits<double>::infinity();

    const RhsFunctional rhs = RhsFunctional::target(p);
    const ResidualInfo info = eval_residual(p, u, rhs, 0.0);
    if (!info.admissible)
        throw Error(Errc::admissibility, "summarize_solution: field is not admissible")
            .with_node(info.bad_node)
            .with_margin(info.bad_margin);
    sm.residual_sup = info.sup_norm;
    sm.min_margin = info.min_margin;

    for (long s = 0; s < m.num_interior; ++s) {
        const long node = m.interior[static_cast<size_t>(s)];
        const JetPoint jet = fd_jet(u, node);
        const CurvatureState st = curvature_matrix(jet, p.spec.k);
        double mk = 0.0;
        for (int i = 0; i < st.kappa.n; ++i) mk = std::max(mk, std::fabs(st.kappa[i]));
        sm.max_kappa = std::max(sm.max_kappa, mk);
        sm.sup_grad = std::max(sm.sup_grad, std::sqrt(std::max(0.0, st.w * st.w - 1.0)));
    }
    for (long node = 0; node < m.grid.num_nodes(); ++node) {
        if (m.klass(node) == NodeClass::exterior) continue;
        sm.min_u_minus_ubar = std::min(sm.min_u_minus_ubar, u[node] - p.ubar_raw[node]);
        sm.max_height = std::max(sm.max_height, u[node]);
        sm.min_height = std::min(sm.min_height, u[node]);
    }
    return sm;
}

} // namespace hycurv
