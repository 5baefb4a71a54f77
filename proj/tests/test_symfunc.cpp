#include <doctest.h>

#include "hycurv/symfunc.hpp"
#include "support/oracles.hpp"

#include <random>

using namespace hycurv;

TEST_CASE("sigma: closed-form values") {
    CHECK(sigma(SmallVec{1, 1, 1}, 2) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(sigma(SmallVec{1, 2, 3}, 2) == doctest::Approx(11.0).epsilon(1e-15));
    CHECK(sigma(SmallVec{2, 2, 2}, 3) == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(sigma(SmallVec{4, 5, 6}, 0) == 1.0);
    CHECK_THROWS_AS(sigma(SmallVec{1, 2}, 3), Error);
    CHECK_THROWS_AS(sigma(SmallVec{1, 2}, -1), Error);
}

TEST_CASE("sigma matches subset enumeration on random vectors") {
    std::mt19937 rng(991);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int rep = 0; rep < 500; ++rep) {
        const int n = 1 + static_cast<int>(rng() % 6);
        SmallVec v(n);
        for (int i = 0; i < n; ++i) v[i] = dist(rng);
        for (int j = 0; j <= n; ++j) {
            const double expect = oracles::sigma_enumerate(v, j);
            CHECK(sigma(v, j) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("sigma_excl removes one entry") {
    CHECK(sigma_excl(SmallVec{1, 2, 3}, 2, 2) == doctest::Approx(2.0)); // drop the value 3
    CHECK(sigma_excl(SmallVec{1, 1}, 1, 0) == doctest::Approx(1.0));
    CHECK(sigma_excl(SmallVec{4, 5, 6}, 0, 1) == 1.0);
    CHECK_THROWS_AS(sigma_excl(SmallVec{1, 2, 3}, 2, 3), Error);

    std::mt19937 rng(992);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 5);
        SmallVec v(n);
        for (int i = 0; i < n; ++i) v[i] = dist(rng);
        const int i = static_cast<int>(rng() % static_cast<unsigned>(n));
        SmallVec reduced(n - 1);
        int m = 0;
        for (int q = 0; q < n; ++q)
            if (q != i) reduced[m++] = v[q];
        for (int j = 0; j <= n - 1; ++j)
            CHECK(sigma_excl(v, j, i) ==
                  doctest::Approx(oracles::sigma_enumerate(reduced, j)).epsilon(1e-12));
    }
}

TEST_CASE("cone membership") {
    CHECK_FALSE(in_gamma_k(SmallVec{1, 1, -0.5}, 2)); // sigma_2 = 0, boundary
    CHECK(in_gamma_k(SmallVec{2, 1}, 2));
    CHECK(in_gamma_k(SmallVec{-1, 3, 3}, 1));
    CHECK(cone_margin(SmallVec{1, 1, 1}, 3) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cone_margin(SmallVec{1, 1, 1, 1}, 2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cone_margin(SmallVec{1, 1, -0.5}, 2) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("cone_margin sign agrees with in_gamma_k on 1e4 samples") {
    std::mt19937 rng(993);
    std::uniform_real_distribution<double> dist(-1.5, 2.5);
    for (int rep = 0; rep < 10000; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 4);
        const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
        SmallVec v(n);
        for (int i = 0; i < n; ++i) v[i] = dist(rng);
        const bool inside = in_gamma_k(v, k);
        const double m = cone_margin(v, k);
        CHECK(inside == (m > 0.0));
    }
}

TEST_CASE("f_eval: values, gradient, errors") {
    const SymEval a = f_eval(SmallVec{1, 1}, 2);
    CHECK(a.f_value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a.grad[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(a.grad[1] == doctest::Approx(0.5).epsilon(1e-15));

    const SymEval b = f_eval(SmallVec{0.5, 0.5}, 2);
    CHECK(b.f_value == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(b.grad[0] == doctest::Approx(0.5).epsilon(1e-15));

    try {
        f_eval(SmallVec{1, 1, -0.5}, 2);
        FAIL("expected admissibility error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::admissibility);
        CHECK(e.violated_order == 2);
    }
}

TEST_CASE("f_eval gradient against central finite differences") {
    std::mt19937 rng(994);
    for (int rep = 0; rep < 300; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 4);
        const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
        const SmallVec v = oracles::random_cone_vector(rng, n, k);
        const SymEval ev = f_eval(v, k);
        const double step = 1e-7 * std::max(1.0, v.norm());
        for (int i = 0; i < n; ++i) {
            SmallVec vp = v, vm = v;
            vp[i] += step;
            vm[i] -= step;
            if (!in_gamma_k(vp, k) || !in_gamma_k(vm, k)) continue;
            const double fd = (f_eval(vp, k).f_value - f_eval(vm, k).f_value) / (2.0 * step);
            CHECK(ev.grad[i] == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("cone algebra invariants: homogeneity, Euler, monotonicity, concavity") {
    std::mt19937 rng(995);
    std::uniform_real_distribution<double> tdist(0.1, 10.0);
    for (int rep = 0; rep < 1000; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 4);
        const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
        const SmallVec v = oracles::random_cone_vector(rng, n, k);
        const SymEval ev = f_eval(v, k);

        // Homogeneity of degree one.
        const double t = tdist(rng);
        SmallVec tv(n);
        for (int i = 0; i < n; ++i) tv[i] = t * v[i];
        CHECK(f_eval(tv, k).f_value == doctest::Approx(t * ev.f_value).epsilon(1e-12));

        // Euler identity  sum f_i lambda_i = f.
        double euler = 0.0;
        for (int i = 0; i < n; ++i) euler += ev.grad[i] * v[i];
        CHECK(euler == doctest::Approx(ev.f_value).epsilon(1e-12));

        // Monotonicity.
        for (int i = 0; i < n; ++i) CHECK(ev.grad[i] > 0.0);

        // Midpoint concavity.
        const SmallVec w = oracles::random_cone_vector(rng, n, k);
        SmallVec mid(n);
        for (int i = 0; i < n; ++i) mid[i] = 0.5 * (v[i] + w[i]);
        const double lhs = f_eval(mid, k).f_value;
        const double rhs = 0.5 * ev.f_value + 0.5 * f_eval(w, k).f_value;
        CHECK(lhs >= rhs - 1e-12 * std::fabs(lhs));
    }
}

TEST_CASE("Newton-Maclaurin ordering on 1e4 cone samples") {
    std::mt19937 rng(996);
    for (int rep = 0; rep < 10000; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 4);
        const int k = 2 + static_cast<int>(rng() % static_cast<unsigned>(n - 1));
        const SmallVec v = oracles::random_cone_vector(rng, n, k);
        const double lhs = std::pow(sigma(v, k) / binomial(n, k), 1.0 / k);
        const double rhs = std::pow(sigma(v, k - 1) / binomial(n, k - 1), 1.0 / (k - 1));
        CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
}

TEST_CASE("jacobi_eigen reconstructs symmetric matrices") {
    std::mt19937 rng(997);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 7);
        SmallMat A(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const double x = dist(rng);
                A(i, j) = x;
                A(j, i) = x;
            }
        const EigenDecomp eig = jacobi_eigen(A);
        for (int i = 0; i + 1 < n; ++i) CHECK(eig.lambda[i] <= eig.lambda[i + 1]);
        // A v_p = lambda_p v_p and orthonormal columns.
        for (int p = 0; p < n; ++p) {
            SmallVec v(n);
            for (int i = 0; i < n; ++i) v[i] = eig.vectors(i, p);
            const SmallVec av = A.apply(v);
            for (int i = 0; i < n; ++i)
                CHECK(av[i] == doctest::Approx(eig.lambda[p] * v[i]).epsilon(1e-10));
            for (int q = 0; q < n; ++q) {
                SmallVec wq(n);
                for (int i = 0; i < n; ++i) wq[i] = eig.vectors(i, q);
                CHECK(v.dot(wq) == doctest::Approx(p == q ? 1.0 : 0.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("F_eval: isotropic and diagonal cases") {
    SmallMat I2 = SmallMat::identity(2);
    const MatrixEval a = F_eval(I2, 2);
    CHECK(a.F_value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(a.dF(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(a.dF(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(a.dF(0, 1) == doctest::Approx(0.0).epsilon(1e-14));

    SmallMat D(2);
    D(0, 0) = 2.0;
    D(1, 1) = 0.5;
    const MatrixEval b = F_eval(D, 1);
    CHECK(b.F_value == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(b.dF(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b.dF(1, 1) == doctest::Approx(1.0).epsilon(1e-14));

    SmallMat bad(2);
    bad(0, 1) = 1.0; // not symmetric
    CHECK_THROWS_AS(F_eval(bad, 1), Error);
}

TEST_CASE("F_eval derivative against entrywise finite differences") {
    std::mt19937 rng(998);
    std::uniform_real_distribution<double> dist(-0.4, 0.4);
    int tested = 0;
    while (tested < 60) {
        const int n = 2 + static_cast<int>(rng() % 2);
        const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
        SmallMat A = SmallMat::identity(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const double x = dist(rng);
                A(i, j) += x;
                A(j, i) += (i == j ? 0.0 : x);
            }
        MatrixEval ev;
        try {
            ev = F_eval(A, k);
        } catch (const Error&) {
            continue;
        }
        ++tested;
        const double step = 1e-6;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                SmallMat Ap = A, Am = A;
                Ap(i, j) += step;
                Ap(j, i) = Ap(i, j);
                Am(i, j) -= step;
                Am(j, i) = Am(i, j);
                if (i != j) {
                    // Symmetric perturbation moves both entries; the
                    // directional derivative is F^{ij} + F^{ji}.
                    const double fd =
                        (F_eval(Ap, k).F_value - F_eval(Am, k).F_value) / (2.0 * step);
                    CHECK(fd == doctest::Approx(2.0 * ev.dF(i, j)).epsilon(1e-6));
                } else {
                    const double fd =
                        (F_eval(Ap, k).F_value - F_eval(Am, k).F_value) / (2.0 * step);
                    CHECK(fd == doctest::Approx(ev.dF(i, i)).epsilon(1e-6));
                }
            }
    }
}

TEST_CASE("F_eval on diag(lambda) reproduces f_eval, and sum F^{ii} stays positive") {
    std::mt19937 rng(999);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 4);
        const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
        const SmallVec v = oracles::random_cone_vector(rng, n, k);
        SmallMat D(n);
        for (int i = 0; i < n; ++i) D(i, i) = v[i];
        const MatrixEval me = F_eval(D, k);
        const SymEval fe = f_eval(v, k);
        CHECK(me.F_value == doctest::Approx(fe.f_value).epsilon(1e-13));
        CHECK(jacobi_eigen(me.dF).lambda[0] > 0.0); // F^{ij} positive definite on the cone
        double trace_dF = 0.0;
        for (int i = 0; i < n; ++i) trace_dF += me.dF(i, i);
        CHECK(trace_dF > 0.0);
        double sum_f = 0.0;
        for (int i = 0; i < n; ++i) sum_f += fe.grad[i];
        CHECK(trace_dF == doctest::Approx(sum_f).epsilon(1e-11));
    }
}
