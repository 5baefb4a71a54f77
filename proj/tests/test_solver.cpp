#include <doctest.h>

#include "hycurv/probes.hpp"
#include "hycurv/solver.hpp"
#include "support/example_problem.hpp"

#include <cmath>

using namespace hycurv;
using testsupport::example_spec;

TEST_CASE("stage-1 residual vanishes at the subsolution for t = 0") {
    const DiscreteProblem p = make_discrete_problem(example_spec(), 0.3);
    const ResidualInfo info = eval_residual(p, p.start, RhsFunctional::stage1(p, 0.0), 0.0);
    REQUIRE(info.admissible);
    CHECK(info.sup_norm < 1e-13);
    CHECK(p.delta > 0.0);
    // delta = min G[start]/start with factor-two headroom.
    double min_c = 1e300;
    for (double c : p.stage1_coef) min_c = std::min(min_c, c);
    CHECK(p.delta == doctest::Approx(0.5 * min_c));
}

TEST_CASE("residual of a constant field against a matching constant rhs") {
    ProblemSpec spec = example_spec();
    spec.psi = expr::parse("1", 2); // sigma_2^{1/2}(1,1) = 1
    const DiscreteProblem p = make_discrete_problem(spec, 0.3);
    ScalarField cst = make_field(p.mask);
    for (long i = 0; i < p.mask->grid.num_nodes(); ++i)
        if (p.mask->klass(i) != NodeClass::exterior) cst[i] = 0.42;
    const ScalarField r = residual(p, cst, RhsFunctional::target(p));
    for (long node : p.mask->interior) CHECK(std::fabs(r[node]) < 1e-12);
}

TEST_CASE("jacobian rows of a constant field reduce to the pure stencil") {
    ProblemSpec spec = example_spec();
    spec.psi = expr::parse("1", 2);
    const DiscreteProblem p = make_discrete_problem(spec, 0.3);
    ScalarField cst = make_field(p.mask);
    const double c = 0.42;
    for (long i = 0; i < p.mask->grid.num_nodes(); ++i)
        if (p.mask->klass(i) != NodeClass::exterior) cst[i] = c;

    const CsrMatrix J = assemble_jacobian(p, cst, RhsFunctional::target(p));

    // Pick an interior node whose whole stencil is interior.
    const Grid& g = p.mask->grid;
    long deep = -1;
    for (long node : p.mask->interior) {
        const SmallVec x = g.point(node);
        if (std::hypot(x[0], x[1]) < 0.2) {
            deep = node;
            break;
        }
    }
    REQUIRE(deep >= 0);
    // At Du = 0, D2u = 0: F^{st} = I/2 (n = 2, k = 2), G^{st} = c/2 I, no
    // zeroth or first order terms. Diagonal = -4 * (c/2) / h^2.
    const long row = p.mask->compact[static_cast<size_t>(deep)];
    const double invh2 = 1.0 / (g.h * g.h);
    double diag = 0.0, offsum = 0.0;
    for (long q = J.row_offsets[static_cast<size_t>(row)]; q < J.row_offsets[static_cast<size_t>(row) + 1]; ++q) {
        if (J.col[static_cast<size_t>(q)] == row)
            diag = J.val[static_cast<size_t>(q)];
        else
            offsum += J.val[static_cast<size_t>(q)];
    }
    CHECK(diag == doctest::Approx(-4.0 * 0.5 * c * invh2).epsilon(1e-12));
    CHECK(offsum == doctest::Approx(4.0 * 0.5 * c * invh2).epsilon(1e-12));
}

TEST_CASE("jacobian matches the directional derivative of the residual") {
    const DiscreteProblem p = make_discrete_problem(example_spec(), 0.3);
    // Check at a mildly deformed admissible state, not just the start.
    ScalarField u = p.start;
    for (long node : p.mask->interior) {
        const SmallVec x = p.mask->grid.point(node);
        u[node] += 0.01 * (u[node] - p.eps) * std::cos(1.3 * x[0]) * std::cos(0.9 * x[1]);
    }
    apply_dirichlet(u, p.eps);
    const JacobianSpotCheck chk =
        jacobian_directional_check(p, u, RhsFunctional::target(p), 1e-6, 1e-5);
    CHECK(chk.passed);
    CHECK(chk.rel_error < 1e-5);
}

TEST_CASE("newton returns immediately from a converged state") {
    const DiscreteProblem p = make_discrete_problem(example_spec(), 0.3);
    const ContinuityResult res = continuity_solve(p);
    const NewtonResult again = newton_solve(p, res.u, RhsFunctional::target(p));
    CHECK(again.stats.converged);
    CHECK(again.stats.iterations == 0);
    CHECK(testsupport::same_bits(again.u, res.u));
}

TEST_CASE("continuity method solves the model problem") {
    const DiscreteProblem p = make_discrete_problem(example_spec(), 0.3);
    const ContinuityResult res = continuity_solve(p);
    const SolutionSummary sm = summarize_solution(p, res.u);
    CHECK(sm.residual_sup < 1e-8);
    CHECK(sm.min_margin > 0.0);
    CHECK(sm.min_u_minus_ubar > -1e-8); // solution dominates the subsolution
    CHECK(sm.max_height <= 1.0);        // inside the enclosing half ball
    CHECK(res.log.size() >= 2);
    for (const ContinuationLogEntry& e : res.log) {
        CHECK(e.residual < 1e-8);
        CHECK((e.stage == 1 || e.stage == 2));
    }
    CHECK(res.log.back().t == 1.0);

    // Monotone residual decrease within each accepted Newton run is enforced
    // by construction; check the determinism contract instead.
    const ContinuityResult res2 = continuity_solve(p);
    CHECK(testsupport::same_bits(res.u, res2.u));
    CHECK(res.log.size() == res2.log.size());
}

TEST_CASE("zeroth-order coefficient is negative at converged solutions") {
    const DiscreteProblem p = make_discrete_problem(example_spec(), 0.3);
    const ContinuityResult res = continuity_solve(p);
    const Grid& g = p.mask->grid;
    for (long node : p.mask->interior) {
        const JetPoint jet = fd_jet(res.u, node);
        const GraphEval ev = graph_eval(jet, p.spec.k, true);
        REQUIRE(ev.admissible);
        const double psi_u = p.spec.psi.eval_with_du(g.point(node), res.u[node]).du;
        CHECK(ev.coeffs.Gu - psi_u < 0.0);
    }
}

TEST_CASE("stage-2 is a no-op when psi equals the stage-1 endpoint") {
    // psi = delta * u makes both homotopy families share the endpoint.
    const DiscreteProblem probe = make_discrete_problem(example_spec(), 0.3);
    char text[64];
    snprintf(text, sizeof text, "%.17g*u", probe.delta);
    ProblemSpec spec = example_spec();
    spec.psi = expr::parse(text, 2);
    const DiscreteProblem p = make_discrete_problem(spec, 0.3);
    const ContinuityResult res = continuity_solve(p);
    const SolutionSummary sm = summarize_solution(p, res.u);
    CHECK(sm.residual_sup < 1e-8);
    for (const ContinuationLogEntry& e : res.log)
        if (e.stage == 2) CHECK(e.newton_iters == 0);
}

TEST_CASE("mean curvature solve dominates the subsolution and orders by Maclaurin") {
    DiscreteProblem mc;
    const ContinuityResult res = mean_curvature_solve(example_spec(), 0.3, &mc);
    REQUIRE(mc.spec.k == 1);
    const SolutionSummary sm = summarize_solution(mc, res.u);
    CHECK(sm.residual_sup < 1e-8);
    CHECK(sm.min_u_minus_ubar > -1e-8);

    // sigma_1(kappa) >= sigma_k^{1/k}(kappa) wherever kappa stays in Gamma_k.
    for (long node : mc.mask->interior) {
        const CurvatureState st = curvature_matrix(fd_jet(res.u, node), 2);
        if (!in_gamma_k(st.kappa, 2)) continue;
        const double s1 = sigma(st.kappa, 1);
        const double s2 = std::sqrt(sigma(st.kappa, 2));
        CHECK(s1 >= s2 * (1.0 - 1e-12));
    }
}

TEST_CASE("k = 1 with a constant psi solves on the cap domain") {
    // The cap has sigma_1(kappa[ubar]) = 1, so any constant psi below 1
    // keeps ubar a subsolution of the mean curvature equation.
    ProblemSpec spec = example_spec(1.0 / 32.0, 1);
    spec.psi = expr::parse("0.9", 2);
    const DiscreteProblem p = make_discrete_problem(spec, 0.3);
    const ContinuityResult res = continuity_solve(p);
    CHECK(summarize_solution(p, res.u).residual_sup < 1e-8);
}

TEST_CASE("newton residual history decreases strictly") {
    const DiscreteProblem p = make_discrete_problem(example_spec(), 0.3);
    const NewtonResult nr = newton_solve(p, p.start, RhsFunctional::stage1(p, 0.7));
    REQUIRE(nr.stats.converged);
    REQUIRE(nr.stats.residual_history.size() >= 2);
    for (size_t i = 0; i + 1 < nr.stats.residual_history.size(); ++i)
        CHECK(nr.stats.residual_history[i + 1] < nr.stats.residual_history[i]);
}

TEST_CASE("one-dimensional graphs solve end to end") {
    ProblemSpec spec;
    spec.n = 1;
    spec.k = 1;
    spec.psi = expr::parse("2*u^2", 1);
    spec.ubar = expr::parse("sqrt(1 - x1^2) - 0.5", 1);
    spec.box_min = SmallVec{-0.875};
    spec.box_max = SmallVec{0.875};
    spec.h = 1.0 / 64.0;
    const DiscreteProblem p = make_discrete_problem(spec, 0.3);
    const ContinuityResult res = continuity_solve(p);
    const SolutionSummary sm = summarize_solution(p, res.u);
    CHECK(sm.residual_sup < 1e-8);
    CHECK(sm.min_u_minus_ubar > -1e-8);
}

TEST_CASE("three-dimensional graphs solve end to end") {
    // alpha = sigma_2^{1/2}(1/2,1/2,1/2) / ((1 - 1/2)^2 R^2) = sqrt(3/4)/(1/4).
    ProblemSpec spec;
    spec.n = 3;
    spec.k = 2;
    spec.psi = expr::parse("3.4641016151377544*u^2", 3);
    spec.ubar = expr::parse("sqrt(1 - x1^2 - x2^2 - x3^2) - 0.5", 3);
    spec.box_min = SmallVec{-0.875, -0.875, -0.875};
    spec.box_max = SmallVec{0.875, 0.875, 0.875};
    spec.h = 1.0 / 16.0;
    const DiscreteProblem p = make_discrete_problem(spec, 0.3);
    const ContinuityResult res = continuity_solve(p);
    const SolutionSummary sm = summarize_solution(p, res.u);
    CHECK(sm.residual_sup < 1e-8);
    CHECK(sm.min_margin > 0.0);
    CHECK(sm.min_u_minus_ubar > -1e-8);
}

TEST_CASE("forced failure surfaces as a continuation error") {
    ProblemSpec spec = example_spec();
    spec.tol.max_newton = 1;
    spec.tol.t_step_min = 1e-3;
    const DiscreteProblem p = make_discrete_problem(spec, 0.3);
    try {
        continuity_solve(p);
        FAIL("expected continuation failure");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::continuation_failure);
    }
}

TEST_CASE("uniqueness probe reconverges to the same solution") {
    const DiscreteProblem p = make_discrete_problem(example_spec(), 0.3);
    const ContinuityResult res = continuity_solve(p);
    const UniquenessProbeReport rep = uniqueness_probe(p, res.u);
    CHECK(rep.converged);
    CHECK(rep.sup_diff <= 1e-7);
}
