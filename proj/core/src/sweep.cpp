#include "hycurv/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace hycurv {

namespace {

struct SolveSlot {
    bool attempted = false;
    bool converged = false;
    std::string failure;
    DiscreteProblem problem;
    ScalarField field;
    std::vector<ContinuationLogEntry> log;
    int continuation_steps = 0;
    int newton_iterations = 0;
};

void run_one(const ProblemSpec& spec, double eps, SolveSlot& slot) {
    slot.attempted = true;
    try {
        slot.problem = make_discrete_problem(spec, eps);
        ContinuityResult res = continuity_solve(slot.problem);
        slot.field = std::move(res.u);
        slot.log = std::move(res.log);
        slot.continuation_steps = static_cast<int>(slot.log.size());
        slot.newton_iterations = res.total_newton_iterations;
        slot.converged = true;
    } catch (const Error& e) {
        slot.failure = std::string(errc_name(e.code())) + ": " + e.what();
    }
}

} // namespace

SweepOutput epsilon_sweep(const ProblemSpec& spec, const std::vector<double>& schedule,
                          double reference_eps0, int jobs) {
    if (schedule.empty())
        throw Error(Errc::config_error, "epsilon_sweep: empty schedule");
    for (size_t i = 0; i + 1 < schedule.size(); ++i)
        if (!(schedule[i] > schedule[i + 1]))
            throw Error(Errc::config_error, "epsilon_sweep: schedule must be strictly decreasing");
    if (!(schedule.front() > 0.0) || !(schedule.back() > 0.0))
        throw Error(Errc::config_error, "epsilon_sweep: schedule entries must be positive");
    if (!(reference_eps0 >= schedule.front()))
        throw Error(Errc::config_error,
                    "epsilon_sweep: reference eps0 must be at least the largest schedule entry");

    const size_t m = schedule.size();
    std::vector<SolveSlot> slots(m);

    if (jobs <= 1) {
        for (size_t i = 0; i < m; ++i) {
            run_one(spec, schedule[i], slots[i]);
            if (!slots[i].converged) break; // partial report
        }
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        const int nw = std::min<int>(jobs, static_cast<int>(m));
        for (int w = 0; w < nw; ++w)
            pool.emplace_back([&]() {
                for (;;) {
                    const size_t i = next.fetch_add(1);
                    if (i >= m) return;
                    run_one(spec, schedule[i], slots[i]);
                }
            });
        for (auto& th : pool) th.join();
        // Keep the partial-report semantics identical to the sequential path:
        // everything after the first failure is discarded.
        for (size_t i = 0; i < m; ++i)
            if (!slots[i].converged) {
                for (size_t j = i + 1; j < m; ++j) slots[j] = SolveSlot{};
                break;
            }
    }

    SweepOutput out;
    out.report.schedule = schedule;
    out.report.reference_eps0 = reference_eps0;

    // Reference region mask (from ubar) for the C1 diagnostic.
    const Grid g = make_grid(spec);
    const LevelFn level = [&spec](const SmallVec& x) { return ubar_value_or_nan(spec, x); };
    const DomainMask ref_mask = mask_from_levelset(g, level, reference_eps0);

    double grad_min = std::numeric_limits<double>::infinity();
    double grad_max = 0.0;
    bool monotone_ok = true;
    bool all_converged = true;

    for (size_t i = 0; i < m; ++i) {
        const SolveSlot& sl = slots[i];
        if (!sl.attempted) break;
        SweepEntry e;
        e.eps = schedule[i];
        e.converged = sl.converged;
        e.failure = sl.failure;
        if (!sl.converged) {
            all_converged = false;
            out.report.entries.push_back(e);
            break;
        }

        const SolutionSummary sm = summarize_solution(sl.problem, sl.field);
        e.residual_sup = sm.residual_sup;
        e.max_kappa = sm.max_kappa;
        e.min_margin = sm.min_margin;
        e.min_u_minus_ubar = sm.min_u_minus_ubar;
        e.continuation_steps = sl.continuation_steps;
        e.newton_iterations = sl.newton_iterations;

        double supg = 0.0;
        for (long node : ref_mask.interior) {
            const JetPoint jet = fd_jet(sl.field, node);
            supg = std::max(supg, jet.du.norm());
        }
        e.sup_grad_ref = supg;
        grad_min = std::min(grad_min, supg);
        grad_max = std::max(grad_max, supg);

        if (i > 0 && slots[i - 1].converged) {
            const CompareStats cs = field_compare(sl.field, slots[i - 1].field,
                                                  *slots[i - 1].problem.mask, kMonotonicityTol);
            e.mono_violations = cs.violations;
            e.mono_worst = cs.min_diff;
            if (cs.violations > 0) monotone_ok = false;

            double d = 0.0;
            for (long node : ref_mask.interior)
                d = std::max(d, std::fabs(sl.field[node] - slots[i - 1].field[node]));
            e.cauchy_sup_diff = d;
        }

        out.report.entries.push_back(e);
        out.problems.push_back(sl.problem);
        out.fields.push_back(sl.field);
        out.logs.push_back(sl.log);
    }

    out.report.all_converged = all_converged && out.report.entries.size() == m;
    out.report.monotone_ok = monotone_ok;
    out.report.grad_ratio = (grad_min > 0.0) ? grad_max / grad_min
                                             : std::numeric_limits<double>::infinity();
    // Distance of each entry to the limit field estimated by the finest one.
    out.report.cauchy_decreasing = false;
    if (!out.fields.empty()) {
        const ScalarField& limit = out.fields.back();
        std::vector<double> dist;
        for (size_t i = 0; i < out.fields.size(); ++i) {
            double d = 0.0;
            for (long node : ref_mask.interior)
                d = std::max(d, std::fabs(out.fields[i][node] - limit[node]));
            out.report.entries[i].limit_sup_diff = d;
            if (i + 1 < out.fields.size()) dist.push_back(d);
        }
        out.report.cauchy_decreasing = true;
        for (size_t i = 0; i + 1 < dist.size(); ++i)
            if (dist[i + 1] > dist[i]) out.report.cauchy_decreasing = false;

        double lips = 0.0;
        for (long node : ref_mask.interior)
            lips = std::max(lips, fd_jet(limit, node).du.norm());
        out.report.lipschitz_estimate = lips;
    }
    return out;
}

namespace {

InclusionCheck subset_interior(const std::string& name, const DomainMask& a, const DomainMask& b) {
    InclusionCheck c;
    c.name = name;
    for (long node : a.interior) {
        if (b.klass(node) != NodeClass::interior) {
            ++c.violations;
            if (c.witness < 0) c.witness = node;
        }
    }
    c.holds = c.violations == 0;
    return c;
}

InclusionCheck equal_interior(const std::string& name, const DomainMask& a, const DomainMask& b) {
    InclusionCheck fwd = subset_interior(name, a, b);
    InclusionCheck bwd = subset_interior(name, b, a);
    InclusionCheck c;
    c.name = name;
    c.violations = fwd.violations + bwd.violations;
    c.witness = fwd.witness >= 0 ? fwd.witness : bwd.witness;
    c.holds = c.violations == 0;
    return c;
}

} // namespace

BracketReport bracket_domains(const DiscreteProblem& prob_eps, const ScalarField& u_eps,
                              const ScalarField& u_mean, double eps0) {
    const double eps = prob_eps.eps;
    if (!(eps < eps0))
        throw Error(Errc::config_error, "bracket_domains: eps must be below eps0");
    if (!(u_eps.grid() == u_mean.grid()))
        throw Error(Errc::grid_mismatch, "bracket_domains: solutions on different grids");

    BracketReport rep;
    rep.eps0 = eps0;
    rep.eps = eps;

    const ProblemSpec& spec = prob_eps.spec;
    const Grid& g = prob_eps.mask->grid;
    const LevelFn level = [&spec](const SmallVec& x) { return ubar_value_or_nan(spec, x); };

    const DomainMask& base = *prob_eps.mask;                 // Omega_eps from ubar
    const DomainMask dom_eps0 = mask_from_levelset(g, level, eps0);
    const DomainMask lvl_eps = mask_from_field(u_eps, eps);  // {u_eps > eps}
    const DomainMask lvl_eps0 = mask_from_field(u_eps, eps0);
    const double mid = 0.5 * (eps0 + eps);
    const DomainMask lvl_mid = mask_from_field(u_eps, mid);
    const DomainMask hat = mask_from_field(u_mean, eps0);    // {u_mean > eps0}

    // delta_eps0 = min ubar over the mean-curvature region.
    double delta = std::numeric_limits<double>::infinity();
    for (long node = 0; node < g.num_nodes(); ++node) {
        if (hat.klass(node) == NodeClass::exterior) continue;
        delta = std::min(delta, prob_eps.ubar_raw[node]);
    }
    rep.delta_eps0 = delta;
    rep.delta_in_range = (delta > 0.0) && (delta <= eps0);
    rep.eps_below_delta = eps < delta;

    const CompareStats mean_vs_ubar =
        field_compare(u_mean, prob_eps.ubar_raw, base, 1e-8);
    rep.mean_min_above_ubar = mean_vs_ubar.min_diff;

    rep.checks.push_back(equal_interior("u_eps_level_eps_equals_domain_eps", lvl_eps, base));
    rep.checks.push_back(subset_interior("domain_eps0_inside_u_eps_level_eps0", dom_eps0, lvl_eps0));
    rep.checks.push_back(subset_interior("u_eps_level_eps0_inside_domain_eps", lvl_eps0, base));
    rep.checks.push_back(subset_interior("u_eps_level_nesting_eps0_inside_mid", lvl_eps0, lvl_mid));
    rep.checks.push_back(subset_interior("u_eps_level_eps0_inside_mean_level_eps0", lvl_eps0, hat));

    // hat region sits inside the closed delta level region of ubar.
    InclusionCheck hat_in_delta;
    hat_in_delta.name = "mean_level_eps0_inside_ubar_level_delta";
    for (long node = 0; node < g.num_nodes(); ++node) {
        if (hat.klass(node) == NodeClass::exterior) continue;
        if (!(prob_eps.ubar_raw[node] >= delta)) {
            ++hat_in_delta.violations;
            if (hat_in_delta.witness < 0) hat_in_delta.witness = node;
        }
    }
    hat_in_delta.holds = hat_in_delta.violations == 0;
    rep.checks.push_back(hat_in_delta);

    // Boundary trace of the derived region: u_eps == eps0 on its rim, up to
    // one stencil step times the gradient bound.
    double supg = 0.0;
    for (long node : lvl_eps0.interior) supg = std::max(supg, fd_jet(u_eps, node).du.norm());
    rep.trace_tol = g.h * std::sqrt(static_cast<double>(g.n)) * (supg + 1.0);
    rep.trace_worst = 0.0;
    for (const CutNode& cn : lvl_eps0.cuts)
        rep.trace_worst = std::max(rep.trace_worst, std::fabs(u_eps[cn.node] - eps0));
    rep.trace_ok = rep.trace_worst <= rep.trace_tol;

    rep.all_hold = rep.delta_in_range && rep.eps_below_delta && rep.trace_ok &&
                   rep.mean_min_above_ubar >= -1e-8;
    for (const InclusionCheck& c : rep.checks) rep.all_hold = rep.all_hold && c.holds;
    return rep;
}

} // namespace hycurv
