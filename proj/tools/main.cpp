// hycurv: prescribed Weingarten-curvature graphs over the hyperbolic
// half-space, solved on level-set domains by a two-stage Newton continuation.
//
// Subcommands:
//   solve  --config FILE --eps X      one approximating Dirichlet problem
//   sweep  --config FILE [--jobs N]   eps schedule with monotonicity/bracketing
//   verify --config FILE [--strict-compat] [--eps X]  property suites
//
// Exit codes: 0 success, 1 configuration error, 2 solver/check failure.
// The output directory comes from the config, overridable with HYCURV_OUTDIR.

#include <CLI11.hpp>

#include "hycurv/compat.hpp"
#include "hycurv/config.hpp"
#include "hycurv/probes.hpp"
#include "hycurv/report_json.hpp"
#include "hycurv/sweep.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace hycurv;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;

std::string eps_tag(double eps) {
    char buf[32];
    snprintf(buf, sizeof buf, "%g", eps);
    return buf;
}

fs::path resolve_outdir(const RunConfig& rc) {
    const char* env = std::getenv("HYCURV_OUTDIR");
    return fs::path(env != nullptr && *env != '\0' ? env : rc.output.dir.c_str());
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write " + p.string());
    out << content;
}

void write_solution_csv(const fs::path& dir, double eps, const ScalarField& f) {
    std::ofstream out(dir / ("solution_" + eps_tag(eps) + ".csv"), std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write solution CSV");
    dump_csv(f, out);
}

int classify_exit(const Error& e) {
    switch (e.code()) {
        case Errc::parse_error:
        case Errc::config_error:
        case Errc::degenerate_domain:
        case Errc::io_error:
            return kExitConfig;
        default:
            return kExitSolver;
    }
}

bool compat_policy_fatal(const RunConfig& rc, bool strict) {
    // The removable conditions are warnings at top order k = n unless
    // --strict-compat is given; below top order they are fatal.
    return strict || rc.problem.k < rc.problem.n;
}

int cmd_solve(const RunConfig& rc, const std::string& config_path, double eps) {
    const fs::path dir = resolve_outdir(rc);
    fs::create_directories(dir);
    write_file(dir / "run_meta.json", render_run_meta("solve", config_path));

    DiscreteProblem prob = make_discrete_problem(rc.problem, eps);
    ContinuityResult res = continuity_solve(prob);

    std::string log;
    for (const ContinuationLogEntry& e : res.log) log += render_log_line(eps, e);
    write_file(dir / "log.jsonl", log);
    write_solution_csv(dir, eps, res.u);

    const SolutionSummary sm = summarize_solution(prob, res.u);
    write_file(dir / "solve_summary.json",
               render_solve_summary(rc, eps, sm, res.delta,
                                    static_cast<int>(res.log.size()),
                                    res.total_newton_iterations));
    std::cout << "solve eps=" << eps_tag(eps) << " residual=" << sm.residual_sup
              << " min_margin=" << sm.min_margin << "\n";
    return kExitOk;
}

int cmd_sweep(const RunConfig& rc, const std::string& config_path, int jobs) {
    const fs::path dir = resolve_outdir(rc);
    fs::create_directories(dir);
    write_file(dir / "run_meta.json", render_run_meta("sweep", config_path));

    SweepOutput sw = epsilon_sweep(rc.problem, rc.schedule.eps_list, rc.schedule.eps0, jobs);

    std::string log;
    for (size_t i = 0; i < sw.logs.size(); ++i)
        for (const ContinuationLogEntry& e : sw.logs[i])
            log += render_log_line(sw.report.schedule[i], e);
    write_file(dir / "log.jsonl", log);
    for (size_t i = 0; i < sw.fields.size(); ++i)
        write_solution_csv(dir, sw.report.schedule[i], sw.fields[i]);

    // Domain bracketing at (bracket_eps0, finest eps) when both solves exist.
    BracketReport bracket;
    bool have_bracket = false;
    if (sw.report.all_converged && rc.schedule.eps_list.back() < rc.schedule.bracket_eps0) {
        DiscreteProblem mean_prob;
        const ContinuityResult mean_res =
            mean_curvature_solve(rc.problem, rc.schedule.eps_list.back(), &mean_prob);
        bracket = bracket_domains(sw.problems.back(), sw.fields.back(), mean_res.u,
                                  rc.schedule.bracket_eps0);
        have_bracket = true;
    }

    std::vector<BoundaryGradientReport> boundary;
    for (size_t i = 0; i < sw.fields.size(); ++i)
        boundary.push_back(boundary_gradient_check(sw.problems[i], sw.fields[i],
                                                   rc.sigma_for(sw.report.schedule[i]),
                                                   rc.compat.r0));

    write_file(dir / "sweep_report.json",
               render_sweep_report(rc, sw.report, have_bracket ? &bracket : nullptr, boundary));

    const bool ok = sw.report.all_converged && sw.report.monotone_ok;
    std::cout << "sweep entries=" << sw.report.entries.size()
              << " converged=" << (sw.report.all_converged ? "yes" : "no")
              << " monotone=" << (sw.report.monotone_ok ? "yes" : "no") << "\n";
    return ok ? kExitOk : kExitSolver;
}

int cmd_verify(const RunConfig& rc, const std::string& config_path, bool strict, double eps) {
    const fs::path dir = resolve_outdir(rc);
    fs::create_directories(dir);
    write_file(dir / "run_meta.json", render_run_meta("verify", config_path));

    const double sigma = rc.sigma_for(eps);
    const CompatibilityReport compat = check_compatibility(rc.problem, eps, sigma, rc.compat.r0);
    const bool fatal = compat_policy_fatal(rc, strict);

    VerifyBundle bundle;
    bundle.compat = &compat;
    bundle.compat_fatal = fatal;

    bool all = true;
    if (compat.hard_failures()) all = false;
    if (fatal && compat.removable_failures()) all = false;

    SolutionSummary summary;
    ViscosityProbeReport visc;
    TouchingReport touching;
    SandwichReport sandwich;
    JacobianSpotCheck jac;
    ConditionStatus sigma_post;

    if (all) {
        DiscreteProblem prob = make_discrete_problem(rc.problem, eps);
        ContinuityResult res = continuity_solve(prob);

        std::string log;
        for (const ContinuationLogEntry& e : res.log) log += render_log_line(eps, e);
        write_file(dir / "log.jsonl", log);
        write_solution_csv(dir, eps, res.u);

        summary = summarize_solution(prob, res.u);
        bundle.summary = &summary;

        sigma_post = sigma_separation_on_solution(prob, res.u, sigma);
        bundle.sigma_on_solution = &sigma_post;
        if (!sigma_post.passed) all = false;

        const double c_trunc =
            calibrate_trunc_constant(rc.problem.n, rc.problem.k, rc.problem.h);
        const std::vector<long> nodes = pick_interior_nodes(*prob.mask, 50, 20240801u);
        visc = viscosity_probe(prob, res.u, nodes, {1e-3, 1e-2}, c_trunc);
        bundle.viscosity = &visc;
        if (!visc.passed()) all = false;

        // Touching test against the enclosing half-ball graph when C0 is
        // configured; it has curvature 0 < psi everywhere.
        if (rc.compat.c0 > 0.0) {
            SphereCap ball;
            ball.center_horizontal = SmallVec(rc.problem.n);
            ball.radius = rc.compat.c0;
            ball.sigma = 0.0;
            const ScalarField vfield = sample_on_mask(
                prob.mask, [&](const SmallVec& x) { return sphere_cap_height(ball, x); });
            touching = touching_test(prob, res.u, vfield);
            bundle.touching = &touching;
            if (!touching.passed() || !touching.precondition_ok) all = false;

            sandwich = c0_sandwich(prob, res.u, rc.compat.c0);
            bundle.sandwich = &sandwich;
            bundle.sandwich_c0 = rc.compat.c0;
            if (!sandwich.holds(1e-8)) all = false;
        }

        // Central difference and a larger direction keep the spot check above
        // the 1/h^2 roundoff floor on production grids.
        jac = jacobian_directional_check(prob, res.u, RhsFunctional::target(prob), 1e-6, 1e-5,
                                         /*central=*/true, /*amplitude=*/0.2);
        bundle.jacobian = &jac;
        if (!jac.passed) all = false;
    }

    bundle.all_passed = all;
    write_file(dir / "verify_report.json", render_verify_report(rc, eps, bundle));
    std::cout << "verify " << (all ? "passed" : "FAILED") << "\n";
    return all ? kExitOk : kExitSolver;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"prescribed Weingarten curvature graphs in the half-space model"};
    app.require_subcommand(1);

    std::string config_path;
    double eps = 0.0;
    int jobs = 1;
    bool strict = false;
    bool has_eps = false;

    CLI::App* solve = app.add_subcommand("solve", "solve one approximating problem");
    solve->add_option("--config", config_path, "configuration file")->required();
    solve->add_option("--eps", eps, "boundary level")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "run the eps schedule");
    sweep->add_option("--config", config_path, "configuration file")->required();
    sweep->add_option("--jobs", jobs, "parallel eps solves");

    CLI::App* verify = app.add_subcommand("verify", "compatibility and property checks");
    verify->add_option("--config", config_path, "configuration file")->required();
    verify->add_flag("--strict-compat", strict, "treat removable compatibility failures as fatal");
    verify->add_option("--jobs", jobs, "accepted for symmetry; verify runs serially");
    CLI::Option* veps = verify->add_option("--eps", eps, "override the verify level");

    CLI11_PARSE(app, argc, argv);
    has_eps = veps->count() > 0;

    try {
        RunConfig rc = load_config(config_path);
        if (solve->parsed()) return cmd_solve(rc, config_path, eps);
        if (sweep->parsed()) return cmd_sweep(rc, config_path, jobs);
        if (verify->parsed())
            return cmd_verify(rc, config_path, strict,
                              has_eps ? eps : rc.schedule.verify_eps);
    } catch (const Error& e) {
        std::cerr << "error (" << errc_name(e.code()) << "): " << e.what() << "\n";
        return classify_exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitConfig;
}
