#include "hycurv/problem.hpp"

#include <cmath>
#include <string>

namespace hycurv {

Grid make_grid(const ProblemSpec& spec) {
    if (spec.n < 1 || spec.n > 3)
        throw Error(Errc::config_error, "dimension n must be 1, 2 or 3");
    if (spec.k < 1 || spec.k > spec.n)
        throw Error(Errc::config_error, "curvature order k must lie in [1, n]");
    if (!(spec.h > 0.0))
        throw Error(Errc::config_error, "grid spacing h must be positive");

    Grid g;
    g.n = spec.n;
    g.h = spec.h;
    g.origin = spec.box_min;
    for (int a = 0; a < spec.n; ++a) {
        const double extent = spec.box_max[a] - spec.box_min[a];
        if (!(extent > 0.0))
            throw Error(Errc::config_error, "grid box is empty along axis " + std::to_string(a + 1));
        const double steps = extent / spec.h;
        const long m = std::lround(steps);
        if (m < 2 || std::fabs(steps - static_cast<double>(m)) > 1e-6)
            throw Error(Errc::config_error,
                        "grid box is not h-aligned along axis " + std::to_string(a + 1));
        g.dims[static_cast<size_t>(a)] = static_cast<int>(m) + 1;
    }
    return g;
}

double ubar_value_or_nan(const ProblemSpec& spec, const SmallVec& x) {
    try {
        return spec.ubar.eval(x, 0.0);
    } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

DiscreteProblem make_discrete_problem(const ProblemSpec& spec, double eps) {
    if (!(eps > 0.0))
        throw Error(Errc::config_error, "eps must be positive");
    if (spec.ubar.depends_on_u())
        throw Error(Errc::config_error, "ubar must be a function of x only");

    DiscreteProblem p;
    p.spec = spec;
    p.eps = eps;

    const Grid g = make_grid(spec);
    const LevelFn level = [&spec](const SmallVec& x) { return ubar_value_or_nan(spec, x); };
    p.mask = std::make_shared<DomainMask>(mask_from_levelset(g, level, eps));
    p.ubar_raw = sample_on_mask(p.mask, level);
    p.start = p.ubar_raw;
    apply_dirichlet(p.start, eps);

    // Stage-1 homotopy data from the pinned start field, so the t = 0
    // residual vanishes identically.
    const long ni = p.mask->num_interior;
    p.stage1_coef.resize(static_cast<size_t>(ni));
    double min_c = std::numeric_limits<double>::infinity();
    for (long s = 0; s < ni; ++s) {
        const long node = p.mask->interior[static_cast<size_t>(s)];
        const JetPoint jet = fd_jet(p.start, node);
        GraphEval ev;
        try {
            ev = graph_eval(jet, spec.k, false, 0.0);
        } catch (Error& e) {
            e.with_node(node);
            throw;
        }
        if (!ev.admissible)
            throw Error(Errc::admissibility,
                        "pinned start field is not admissible at a grid node (margin " +
                            std::to_string(ev.state.margin) + ")")
                .with_node(node)
                .with_margin(ev.state.margin);
        const double c = ev.G / p.start[node];
        p.stage1_coef[static_cast<size_t>(s)] = c;
        min_c = std::min(min_c, c);
    }
    p.delta = 0.5 * min_c;

    // Hypothesis diagnostics on the raw samples: the Dirichlet pinning dents
    // the jets along the boundary ring, which would contaminate the check.
    double min_gap = std::numeric_limits<double>::infinity();
    double min_psi = std::numeric_limits<double>::infinity();
    for (long s = 0; s < ni; ++s) {
        const long node = p.mask->interior[static_cast<size_t>(s)];
        const JetPoint jet = fd_jet(p.ubar_raw, node);
        const GraphEval ev = graph_eval(jet, spec.k, false, 0.0);
        const double uval = p.ubar_raw[node];
        const double psi_val = spec.psi.eval(g.point(node), uval);
        min_psi = std::min(min_psi, psi_val);
        min_gap = std::min(min_gap, (ev.admissible ? ev.G : 0.0) - psi_val);
    }
    p.min_subsolution_gap = min_gap;
    p.min_psi = min_psi;

    if (!(p.delta > 0.0))
        throw Error(Errc::admissibility, "G[ubar]/ubar is not positive; no homotopy start");
    return p;
}

} // namespace hycurv
