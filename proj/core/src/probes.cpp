#include "hycurv/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace hycurv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

JetPoint shifted_jet(const JetPoint& p, double alpha) {
    JetPoint q = p;
    for (int a = 0; a < q.d2u.n; ++a) q.d2u(a, a) += alpha;
    return q;
}

} // namespace

double calibrate_trunc_constant(int n, int k, double h) {
    SphereCap cap;
    cap.center_horizontal = SmallVec(n);
    cap.radius = 1.0;
    cap.sigma = 0.5;

    Grid g;
    g.n = n;
    g.h = h;
    const int steps = static_cast<int>(std::lround(1.4 / h));
    for (int a = 0; a < n; ++a) g.dims[static_cast<size_t>(a)] = steps + 1;
    g.origin = SmallVec(n);
    for (int a = 0; a < n; ++a) g.origin[a] = -0.5 * h * steps;

    const LevelFn level = [&cap](const SmallVec& x) { return sphere_cap_height(cap, x); };
    auto mask = std::make_shared<DomainMask>(mask_from_levelset(g, level, 0.3));
    const ScalarField f = sample_on_mask(mask, level);

    const double exact = std::pow(binomial(n, k), 1.0 / k) * cap.sigma;
    double worst = 0.0;
    for (long node : mask->interior) {
        const JetPoint jet = fd_jet(f, node);
        const GraphEval ev = graph_eval(jet, k, false, 0.0);
        if (!ev.admissible) continue;
        worst = std::max(worst, std::fabs(ev.G - exact));
    }
    return std::max(1.0, worst / (h * h));
}

std::vector<long> pick_interior_nodes(const DomainMask& mask, int count, unsigned seed) {
    std::vector<long> pool = mask.interior;
    std::mt19937 rng(seed);
    std::vector<long> out;
    const int take = std::min<int>(count, static_cast<int>(pool.size()));
    for (int i = 0; i < take; ++i) {
        std::uniform_int_distribution<size_t> dist(static_cast<size_t>(i), pool.size() - 1);
        std::swap(pool[static_cast<size_t>(i)], pool[dist(rng)]);
        out.push_back(pool[static_cast<size_t>(i)]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

ViscosityProbeReport viscosity_probe(const DiscreteProblem& p, const ScalarField& u,
                                     const std::vector<long>& nodes,
                                     const std::vector<double>& alphas, double c_trunc) {
    ViscosityProbeReport rep;
    rep.c_trunc = c_trunc;
    rep.tol_probe = c_trunc * p.mask->grid.h * p.mask->grid.h;
    rep.alphas = alphas;
    rep.worst_sub_slack = kInf;
    rep.worst_super_slack = kInf;

    const Grid& g = p.mask->grid;
    const int k = p.spec.k;
    const double m0 = p.spec.tol.margin;

    for (long node : nodes) {
        if (p.mask->klass(node) != NodeClass::interior)
            throw Error(Errc::domain, "viscosity_probe: sample node is not interior")
                .with_node(node);
        ++rep.nodes_tested;
        const JetPoint jet = fd_jet(u, node);
        const double psi_val = p.spec.psi.eval(g.point(node), u[node]);

        for (double alpha : alphas) {
            // Touching from above: D2 phi = D2 u + alpha I.
            ++rep.sub_checks;
            const GraphEval above = graph_eval(shifted_jet(jet, alpha), k, false, 0.0);
            if (!above.admissible) {
                ++rep.sub_violations; // cannot happen for admissible u, alpha >= 0
            } else {
                const double slack = above.G - psi_val + rep.tol_probe;
                rep.worst_sub_slack = std::min(rep.worst_sub_slack, slack);
                if (slack < 0.0) ++rep.sub_violations;
            }

            // Touching from below: either inadmissible at the node or G <= psi.
            ++rep.super_checks;
            const GraphEval below = graph_eval(shifted_jet(jet, -alpha), k, false, 0.0);
            const double margin = below.state.margin;
            if (!below.admissible || margin < m0) {
                ++rep.super_inadmissible;
                continue;
            }
            if (margin <= m0 + 1e-8) ++rep.borderline;
            const double slack = psi_val + rep.tol_probe - below.G;
            rep.worst_super_slack = std::min(rep.worst_super_slack, slack);
            if (slack < 0.0 && margin > m0 + 1e-8) ++rep.super_violations;
        }
    }
    return rep;
}

TouchingReport touching_test(const DiscreteProblem& p, const ScalarField& u,
                             const ScalarField& v) {
    if (!(u.grid() == v.grid()))
        throw Error(Errc::grid_mismatch, "touching_test: fields on different grids");
    const DomainMask& m = *p.mask;
    const Grid& g = m.grid;
    const int k = p.spec.k;
    const double h2 = g.h * g.h;
    const double cone_band = 16.0 * h2; // FD slack for the closed-cone test

    TouchingReport rep;
    rep.precondition_worst = kInf;
    rep.min_abs_gap_at_maxima = kInf;

    // Precondition: kappa[v] in the closed cone (up to FD slack) and
    // f(kappa[v]) < f(kappa[u]) at every interior node.
    bool pre_ok = true;
    for (long node : m.interior) {
        const CurvatureState sv = curvature_matrix(fd_jet(v, node), k);
        if (sv.margin < -cone_band) {
            pre_ok = false;
            rep.witness = node;
            break;
        }
        double fv = 0.0;
        const double sk = sigma(sv.kappa, k);
        if (sk > 0.0 && in_gamma_k(sv.kappa, k)) fv = std::pow(sk, 1.0 / k);
        const GraphEval evu = graph_eval(fd_jet(u, node), k, false, 0.0);
        if (!evu.admissible) {
            pre_ok = false;
            rep.witness = node;
            break;
        }
        const double gap = evu.G - fv;
        rep.precondition_worst = std::min(rep.precondition_worst, gap);
        if (!(gap > 0.0)) {
            pre_ok = false;
            rep.witness = node;
            break;
        }
    }
    rep.precondition_ok = pre_ok;

    // Discrete local maxima of d = u - v over interior nodes. The scan runs
    // even when the comparison hypothesis fails; the report keeps the two
    // verdicts separate.
    long str[3] = {0, 0, 0};
    for (int a = 0; a < g.n; ++a) str[a] = g.stride(a);
    for (long node : m.interior) {
        const double d0 = u[node] - v[node];
        bool is_max = true;
        for (int dx = -1; dx <= 1 && is_max; ++dx)
            for (int dy = (g.n >= 2 ? -1 : 0); dy <= (g.n >= 2 ? 1 : 0) && is_max; ++dy)
                for (int dz = (g.n >= 3 ? -1 : 0); dz <= (g.n >= 3 ? 1 : 0); ++dz) {
                    if (dx == 0 && dy == 0 && dz == 0) continue;
                    const long nb = node + dx * str[0] + dy * (g.n >= 2 ? str[1] : 0) +
                                    dz * (g.n >= 3 ? str[2] : 0);
                    if (m.klass(nb) == NodeClass::exterior) continue;
                    const double dn = u[nb] - v[nb];
                    if (dn > d0) {
                        is_max = false;
                        break;
                    }
                }
        if (!is_max) continue;
        ++rep.maxima_count;
        rep.min_abs_gap_at_maxima = std::min(rep.min_abs_gap_at_maxima, std::fabs(d0));
        if (std::fabs(d0) < h2) {
            ++rep.touching_violations;
            if (rep.witness < 0) rep.witness = node;
        }
    }
    return rep;
}

SandwichReport c0_sandwich(const DiscreteProblem& p, const ScalarField& u, double c0) {
    SandwichReport rep;
    rep.min_ubar_minus_eps = kInf;
    rep.min_u_minus_ubar = kInf;
    rep.min_c0_minus_u = kInf;
    const DomainMask& m = *p.mask;
    for (long node = 0; node < m.grid.num_nodes(); ++node) {
        if (m.klass(node) == NodeClass::exterior) continue;
        rep.min_ubar_minus_eps = std::min(rep.min_ubar_minus_eps, p.ubar_raw[node] - p.eps);
        rep.min_u_minus_ubar = std::min(rep.min_u_minus_ubar, u[node] - p.ubar_raw[node]);
        rep.min_c0_minus_u = std::min(rep.min_c0_minus_u, c0 - u[node]);
    }
    return rep;
}

BoundaryGradientReport boundary_gradient_check(const DiscreteProblem& p, const ScalarField& u,
                                               double sigma, double r0) {
    BoundaryGradientReport rep;
    const double denom = std::isinf(r0)
                             ? sigma
                             : sigma - std::sqrt(1.0 - sigma * sigma) / r0 * p.eps -
                                   (1.0 + sigma) / (r0 * r0) * p.eps * p.eps;
    if (!(sigma > 0.0) || !(sigma < 1.0) || !(denom > 0.0)) {
        rep.applicable = false;
        return rep;
    }
    rep.applicable = true;
    rep.bound = 1.0 / denom;

    const DomainMask& m = *p.mask;
    const Grid& g = m.grid;
    long str[3] = {0, 0, 0};
    for (int a = 0; a < g.n; ++a) str[a] = g.stride(a);

    for (long node : m.interior) {
        bool rim = false;
        for (int dx = -1; dx <= 1 && !rim; ++dx)
            for (int dy = (g.n >= 2 ? -1 : 0); dy <= (g.n >= 2 ? 1 : 0) && !rim; ++dy)
                for (int dz = (g.n >= 3 ? -1 : 0); dz <= (g.n >= 3 ? 1 : 0); ++dz) {
                    if (dx == 0 && dy == 0 && dz == 0) continue;
                    const long nb = node + dx * str[0] + dy * (g.n >= 2 ? str[1] : 0) +
                                    dz * (g.n >= 3 ? str[2] : 0);
                    if (m.klass(nb) == NodeClass::cut) {
                        rim = true;
                        break;
                    }
                }
        if (!rim) continue;
        ++rep.nodes_checked;
        const JetPoint jet = fd_jet(u, node);
        const double w = std::sqrt(1.0 + jet.du.dot(jet.du));
        rep.worst_w = std::max(rep.worst_w, w);
        if (!(w < rep.bound)) ++rep.violations;
    }
    return rep;
}

UniquenessProbeReport uniqueness_probe(const DiscreteProblem& p, const ScalarField& solution) {
    UniquenessProbeReport rep;
    const DomainMask& m = *p.mask;
    const Grid& g = m.grid;

    double sup_excess = 0.0;
    for (long node : m.interior) sup_excess = std::max(sup_excess, solution[node] - p.eps);

    // Smooth interior bump vanishing at the boundary through the (u - eps)
    // factor; deterministic phases keep runs reproducible.
    auto bump_shape = [&](long node) {
        const SmallVec x = g.point(node);
        double s = solution[node] - p.eps;
        for (int a = 0; a < g.n; ++a) s *= std::cos(3.0 * x[a] + 0.5 * (a + 1));
        return s;
    };

    if (sup_excess <= 0.0) return rep;
    double amp = 0.02; // bump sup ~ 2% of the solution excess over eps
    const RhsFunctional rhs = RhsFunctional::target(p);

    ScalarField start = solution;
    bool admissible = false;
    for (int tries = 0; tries < 40; ++tries) {
        start = solution;
        for (long node : m.interior) start[node] += amp * bump_shape(node);
        apply_dirichlet(start, p.eps);
        const ResidualInfo info = eval_residual(p, start, rhs, p.spec.tol.margin);
        if (info.admissible) {
            admissible = true;
            break;
        }
        amp *= 0.5; // project back toward admissibility
    }
    rep.bump_amplitude = amp;
    if (!admissible) return rep;

    try {
        const NewtonResult nr = newton_solve(p, start, rhs);
        rep.converged = nr.stats.converged;
        rep.newton_iterations = nr.stats.iterations;
        double d = 0.0;
        for (long node = 0; node < g.num_nodes(); ++node) {
            if (m.klass(node) == NodeClass::exterior) continue;
            d = std::max(d, std::fabs(nr.u[node] - solution[node]));
        }
        rep.sup_diff = d;
    } catch (const Error&) {
        rep.converged = false;
    }
    return rep;
}

JacobianSpotCheck jacobian_directional_check(const DiscreteProblem& p, const ScalarField& u,
                                             const RhsFunctional& rhs, double tau, double tol,
                                             bool central, double amplitude) {
    const DomainMask& m = *p.mask;
    const Grid& g = m.grid;

    // Smooth direction vanishing at the boundary, normalized so the
    // difference quotient stays in the linear regime.
    std::vector<double> dir(static_cast<size_t>(m.num_unknown_rows()), 0.0);
    double sup = 0.0;
    for (long s = 0; s < m.num_interior; ++s) {
        const long node = m.interior[static_cast<size_t>(s)];
        const SmallVec x = g.point(node);
        double val = u[node] - p.eps;
        for (int a = 0; a < g.n; ++a) val *= std::cos(2.0 * x[a] + 0.3 * (a + 1));
        dir[static_cast<size_t>(m.compact[static_cast<size_t>(node)])] = val;
        sup = std::max(sup, std::fabs(val));
    }
    if (sup > 0.0)
        for (double& d : dir) d *= amplitude / sup;

    auto shift_by = [&](double factor) {
        ScalarField f = u;
        for (long s = 0; s < m.num_interior; ++s) {
            const long node = m.interior[static_cast<size_t>(s)];
            f[node] += factor * dir[static_cast<size_t>(m.compact[static_cast<size_t>(node)])];
        }
        apply_dirichlet(f, p.eps);
        return f;
    };

    const CsrMatrix J = assemble_jacobian(p, u, rhs);
    const std::vector<double> jh = spmv(J, dir);

    const ResidualInfo rp = eval_residual(p, shift_by(tau), rhs, 0.0);
    const ResidualInfo rb =
        central ? eval_residual(p, shift_by(-tau), rhs, 0.0) : eval_residual(p, u, rhs, 0.0);
    if (!rp.admissible || !rb.admissible)
        throw Error(Errc::admissibility, "jacobian_directional_check: inadmissible state");
    const double span = central ? 2.0 * tau : tau;

    double num = 0.0, den = 0.0;
    for (long s = 0; s < m.num_interior; ++s) {
        const long row = m.compact[static_cast<size_t>(m.interior[static_cast<size_t>(s)])];
        const double fd = (rp.r[static_cast<size_t>(s)] - rb.r[static_cast<size_t>(s)]) / span;
        num = std::max(num, std::fabs(fd - jh[static_cast<size_t>(row)]));
        den = std::max(den, std::fabs(jh[static_cast<size_t>(row)]));
    }
    JacobianSpotCheck out;
    out.rel_error = num / std::max(den, 1e-300);
    out.passed = out.rel_error < tol;
    return out;
}

} // namespace hycurv
