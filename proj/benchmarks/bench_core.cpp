#include <benchmark/benchmark.h>

#include "hycurv/solver.hpp"

#include <random>

using namespace hycurv;

namespace {

ProblemSpec bench_spec(double h) {
    ProblemSpec s;
    s.n = 2;
    s.k = 2;
    s.psi = expr::parse("2*u^2", 2);
    s.ubar = expr::parse("sqrt(1 - x1^2 - x2^2) - 0.5", 2);
    s.box_min = SmallVec{-0.875, -0.875};
    s.box_max = SmallVec{0.875, 0.875};
    s.h = h;
    return s;
}

SmallVec cone_sample(std::mt19937& rng, int n, int k) {
    std::uniform_real_distribution<double> pos(0.05, 3.0);
    std::uniform_real_distribution<double> any(-0.8, 3.0);
    for (;;) {
        SmallVec v(n);
        for (int i = 0; i < n; ++i) v[i] = (i == 0) ? pos(rng) : any(rng);
        if (in_gamma_k(v, k)) return v;
    }
}

void BM_f_eval(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937 rng(1);
    const SmallVec v = cone_sample(rng, n, n / 2 + 1);
    for (auto _ : state) benchmark::DoNotOptimize(f_eval(v, n / 2 + 1));
}
BENCHMARK(BM_f_eval)->Arg(2)->Arg(4)->Arg(8);

void BM_jacobi_eigen(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    SmallMat A(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            A(i, j) = dist(rng);
            A(j, i) = A(i, j);
        }
    for (auto _ : state) benchmark::DoNotOptimize(jacobi_eigen(A));
}
BENCHMARK(BM_jacobi_eigen)->Arg(2)->Arg(3)->Arg(8);

void BM_graph_eval(benchmark::State& state) {
    JetPoint p;
    p.u = 0.4;
    p.du = SmallVec{0.3, -0.2};
    p.d2u = SmallMat(2);
    p.d2u(0, 0) = -0.9;
    p.d2u(1, 1) = -0.7;
    p.d2u(0, 1) = p.d2u(1, 0) = 0.1;
    const bool coeffs = state.range(0) != 0;
    for (auto _ : state) benchmark::DoNotOptimize(graph_eval(p, 2, coeffs));
}
BENCHMARK(BM_graph_eval)->Arg(0)->Arg(1);

void BM_residual(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    const DiscreteProblem p = make_discrete_problem(bench_spec(h), 0.3);
    const RhsFunctional rhs = RhsFunctional::target(p);
    for (auto _ : state) benchmark::DoNotOptimize(eval_residual(p, p.start, rhs, 0.0));
    state.SetItemsProcessed(state.iterations() * p.mask->num_interior);
}
BENCHMARK(BM_residual)->Arg(64)->Arg(128);

void BM_assemble_jacobian(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    const DiscreteProblem p = make_discrete_problem(bench_spec(h), 0.3);
    const RhsFunctional rhs = RhsFunctional::target(p);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_jacobian(p, p.start, rhs));
}
BENCHMARK(BM_assemble_jacobian)->Arg(64)->Arg(128);

void BM_bicgstab_laplacian(benchmark::State& state) {
    const long n = state.range(0);
    CsrBuilder b(n);
    for (long i = 0; i < n; ++i) {
        b.add(i, i, 2.0);
        if (i > 0) b.add(i, i - 1, -1.0);
        if (i + 1 < n) b.add(i, i + 1, -1.0);
    }
    const CsrMatrix A = b.finish();
    const std::vector<double> rhs(static_cast<size_t>(n), 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_bicgstab(A, rhs, 1e-10, 5000));
}
BENCHMARK(BM_bicgstab_laplacian)->Arg(100)->Arg(1000);

void BM_newton_step(benchmark::State& state) {
    const DiscreteProblem p = make_discrete_problem(bench_spec(1.0 / 64.0), 0.3);
    const RhsFunctional rhs = RhsFunctional::stage1(p, 0.5);
    for (auto _ : state) {
        const NewtonResult r = newton_solve(p, p.start, rhs);
        benchmark::DoNotOptimize(r.stats.final_residual);
    }
}
BENCHMARK(BM_newton_step)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
