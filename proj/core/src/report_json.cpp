#include "hycurv/report_json.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>

namespace hycurv {

namespace {

using ordered = nlohmann::ordered_json;

// JSON has no infinity; reports encode it as a string.
ordered num(double v) {
    if (std::isinf(v)) return ordered(v > 0 ? "inf" : "-inf");
    if (std::isnan(v)) return ordered("nan");
    return ordered(v);
}

ordered condition_json(const ConditionStatus& c) {
    ordered j;
    j["applicable"] = c.applicable;
    j["passed"] = c.passed;
    j["worst_value"] = num(c.worst_value);
    j["worst_node"] = c.worst_node;
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

ordered compat_json(const CompatibilityReport& r) {
    ordered j;
    j["eps"] = num(r.eps);
    j["sigma"] = num(r.sigma);
    j["r0"] = num(r.r0);
    j["psi_growth"] = condition_json(r.psi_growth);
    j["boundary_hessian_cone"] = condition_json(r.boundary_hessian);
    j["eps_sigma_compatibility"] = condition_json(r.eps_sigma);
    j["subsolution_inequality"] = condition_json(r.subsolution);
    j["sigma_separation"] = condition_json(r.sigma_separation);
    j["removable_for_top_order"] = r.removable_for_top_order;
    j["all_passed"] = r.all_passed();
    return j;
}

ordered summary_json(const SolutionSummary& sm) {
    ordered j;
    j["residual"] = num(sm.residual_sup);
    j["max_kappa"] = num(sm.max_kappa);
    j["min_margin"] = num(sm.min_margin);
    j["min_u_minus_ubar"] = num(sm.min_u_minus_ubar);
    j["sup_grad"] = num(sm.sup_grad);
    j["min_height"] = num(sm.min_height);
    j["max_height"] = num(sm.max_height);
    return j;
}

ordered boundary_json(const BoundaryGradientReport& r) {
    ordered j;
    j["applicable"] = r.applicable;
    j["bound"] = num(r.bound);
    j["worst_w"] = num(r.worst_w);
    j["violations"] = r.violations;
    j["nodes_checked"] = r.nodes_checked;
    return j;
}

ordered bracket_json(const BracketReport& r) {
    ordered j;
    j["eps0"] = num(r.eps0);
    j["eps"] = num(r.eps);
    j["delta_eps0"] = num(r.delta_eps0);
    j["delta_in_range"] = r.delta_in_range;
    j["eps_below_delta"] = r.eps_below_delta;
    j["mean_min_above_ubar"] = num(r.mean_min_above_ubar);
    ordered checks = ordered::array();
    for (const InclusionCheck& c : r.checks) {
        ordered cj;
        cj["name"] = c.name;
        cj["holds"] = c.holds;
        cj["violations"] = c.violations;
        cj["witness"] = c.witness;
        checks.push_back(cj);
    }
    j["inclusions"] = checks;
    j["trace_worst"] = num(r.trace_worst);
    j["trace_tol"] = num(r.trace_tol);
    j["trace_ok"] = r.trace_ok;
    j["all_hold"] = r.all_hold;
    return j;
}

ordered config_echo(const RunConfig& rc) {
    ordered j;
    j["n"] = rc.problem.n;
    j["k"] = rc.problem.k;
    j["psi"] = rc.psi_text;
    j["ubar"] = rc.ubar_text;
    j["h"] = num(rc.problem.h);
    return j;
}

} // namespace

std::string render_solve_summary(const RunConfig& rc, double eps, const SolutionSummary& sm,
                                 double delta, int continuation_steps, int newton_iterations) {
    ordered j;
    j["problem"] = config_echo(rc);
    j["eps"] = num(eps);
    j["delta"] = num(delta);
    j["continuation_steps"] = continuation_steps;
    j["newton_iterations"] = newton_iterations;
    j["summary"] = summary_json(sm);
    return j.dump(2) + "\n";
}

std::string render_sweep_report(const RunConfig& rc, const SweepReport& report,
                                const BracketReport* bracket,
                                const std::vector<BoundaryGradientReport>& boundary) {
    ordered j;
    j["problem"] = config_echo(rc);
    ordered sched = ordered::array();
    for (double e : report.schedule) sched.push_back(num(e));
    j["schedule"] = sched;
    j["reference_eps0"] = num(report.reference_eps0);

    ordered entries = ordered::array();
    for (size_t i = 0; i < report.entries.size(); ++i) {
        const SweepEntry& e = report.entries[i];
        ordered ej;
        ej["eps"] = num(e.eps);
        ej["converged"] = e.converged;
        if (!e.failure.empty()) ej["failure"] = e.failure;
        ej["residual"] = num(e.residual_sup);
        ej["max_kappa"] = num(e.max_kappa);
        ej["min_margin"] = num(e.min_margin);
        ej["min_u_minus_ubar"] = num(e.min_u_minus_ubar);
        ej["sup_grad_ref"] = num(e.sup_grad_ref);
        ej["mono_violations"] = e.mono_violations;
        ej["mono_worst"] = num(e.mono_worst);
        ej["cauchy_sup_diff"] = num(e.cauchy_sup_diff);
        ej["limit_sup_diff"] = num(e.limit_sup_diff);
        ej["continuation_steps"] = e.continuation_steps;
        ej["newton_iterations"] = e.newton_iterations;
        if (i < boundary.size()) ej["boundary_gradient"] = boundary_json(boundary[i]);
        entries.push_back(ej);
    }
    j["entries"] = entries;
    j["all_converged"] = report.all_converged;
    j["monotone_ok"] = report.monotone_ok;
    j["cauchy_decreasing"] = report.cauchy_decreasing;
    j["grad_ratio"] = num(report.grad_ratio);
    j["lipschitz_estimate"] = num(report.lipschitz_estimate);
    if (bracket != nullptr) j["bracket"] = bracket_json(*bracket);
    return j.dump(2) + "\n";
}

std::string render_verify_report(const RunConfig& rc, double eps, const VerifyBundle& b) {
    ordered j;
    j["problem"] = config_echo(rc);
    j["eps"] = num(eps);
    if (b.compat != nullptr) j["compatibility"] = compat_json(*b.compat);
    j["compat_policy_fatal"] = b.compat_fatal;
    if (b.summary != nullptr) j["solution"] = summary_json(*b.summary);
    if (b.sigma_on_solution != nullptr)
        j["sigma_separation_on_solution"] = condition_json(*b.sigma_on_solution);
    if (b.viscosity != nullptr) {
        const ViscosityProbeReport& v = *b.viscosity;
        ordered vj;
        vj["c_trunc"] = num(v.c_trunc);
        vj["tol_probe"] = num(v.tol_probe);
        vj["nodes_tested"] = v.nodes_tested;
        ordered al = ordered::array();
        for (double a : v.alphas) al.push_back(num(a));
        vj["alphas"] = al;
        vj["sub_checks"] = v.sub_checks;
        vj["super_checks"] = v.super_checks;
        vj["sub_violations"] = v.sub_violations;
        vj["super_violations"] = v.super_violations;
        vj["super_inadmissible"] = v.super_inadmissible;
        vj["borderline"] = v.borderline;
        vj["worst_sub_slack"] = num(v.worst_sub_slack);
        vj["worst_super_slack"] = num(v.worst_super_slack);
        vj["passed"] = v.passed();
        j["viscosity_probe"] = vj;
    }
    if (b.touching != nullptr) {
        const TouchingReport& t = *b.touching;
        ordered tj;
        tj["precondition_ok"] = t.precondition_ok;
        tj["precondition_worst"] = num(t.precondition_worst);
        tj["maxima_count"] = t.maxima_count;
        tj["touching_violations"] = t.touching_violations;
        tj["min_abs_gap_at_maxima"] = num(t.min_abs_gap_at_maxima);
        tj["passed"] = t.passed();
        j["touching_test"] = tj;
    }
    if (b.sandwich != nullptr) {
        ordered sj;
        sj["c0"] = num(b.sandwich_c0);
        sj["min_ubar_minus_eps"] = num(b.sandwich->min_ubar_minus_eps);
        sj["min_u_minus_ubar"] = num(b.sandwich->min_u_minus_ubar);
        sj["min_c0_minus_u"] = num(b.sandwich->min_c0_minus_u);
        sj["passed"] = b.sandwich->holds(1e-8);
        j["c0_sandwich"] = sj;
    }
    if (b.jacobian != nullptr) {
        ordered jj;
        jj["rel_error"] = num(b.jacobian->rel_error);
        jj["passed"] = b.jacobian->passed;
        j["jacobian_fd_check"] = jj;
    }
    j["all_passed"] = b.all_passed;
    return j.dump(2) + "\n";
}

std::string render_log_line(double eps, const ContinuationLogEntry& e) {
    ordered j;
    j["eps"] = num(eps);
    j["stage"] = e.stage;
    j["t"] = num(e.t);
    j["newton_iters"] = e.newton_iters;
    j["damping"] = num(e.min_damping);
    j["residual"] = num(e.residual);
    return j.dump() + "\n";
}

std::string render_run_meta(const std::string& command, const std::string& config_path) {
    const auto now = std::chrono::system_clock::now();
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch());
    ordered j;
    j["command"] = command;
    j["config"] = config_path;
    j["unix_time"] = static_cast<long>(secs.count());
    return j.dump(2) + "\n";
}

} // namespace hycurv
