#include <doctest.h>

#include "hycurv/graph_geometry.hpp"
#include "support/oracles.hpp"

#include <random>

using namespace hycurv;

namespace {

JetPoint random_admissible_jet(std::mt19937& rng, int n, int k, double margin_floor) {
    std::uniform_real_distribution<double> hdist(0.2, 2.0);
    std::uniform_real_distribution<double> gdist(-1.5, 1.5);
    std::uniform_real_distribution<double> mdist(-1.0, 1.0);
    for (;;) {
        JetPoint p;
        p.u = hdist(rng);
        p.du = SmallVec(n);
        p.d2u = SmallMat(n);
        for (int i = 0; i < n; ++i) p.du[i] = gdist(rng);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const double v = mdist(rng);
                p.d2u(i, j) = v;
                p.d2u(j, i) = v;
            }
        const CurvatureState st = curvature_matrix(p, k);
        if (st.margin >= margin_floor) return p;
    }
}

} // namespace

TEST_CASE("metric terms: identities and closed forms") {
    {
        const MetricTerms mt = metric_terms(SmallVec{0.0, 0.0});
        CHECK(mt.w == doctest::Approx(1.0).epsilon(1e-16));
        CHECK(mt.nu_vertical == doctest::Approx(1.0));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(mt.gamma_up(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
    }
    {
        const MetricTerms mt = metric_terms(SmallVec{3.0, 4.0});
        CHECK(mt.w == doctest::Approx(std::sqrt(26.0)).epsilon(1e-15));
        const SmallMat prod = mt.gamma_up.mul(mt.gamma_down);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(prod(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    }
    {
        // 1-D closed form: gamma_dn = 1 + t^2/(1+w) and gamma_up * gamma_dn = 1.
        const double t = 1.7;
        const MetricTerms mt = metric_terms(SmallVec{t});
        const double w = std::sqrt(1.0 + t * t);
        CHECK(mt.gamma_down(0, 0) == doctest::Approx(1.0 + t * t / (1.0 + w)).epsilon(1e-15));
        CHECK(mt.gamma_up(0, 0) * mt.gamma_down(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("gamma_down squares to the graph metric") {
    std::mt19937 rng(551);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 1 + static_cast<int>(rng() % 3);
        SmallVec du(n);
        for (int i = 0; i < n; ++i) du[i] = dist(rng) * std::pow(10.0, static_cast<double>(rng() % 4));
        const MetricTerms mt = metric_terms(du);
        const SmallMat gg = mt.gamma_down.mul(mt.gamma_down);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double expect = (i == j ? 1.0 : 0.0) + du[i] * du[j];
                CHECK(gg(i, j) == doctest::Approx(expect).epsilon(1e-12));
            }
        const SmallMat id = mt.gamma_up.mul(mt.gamma_down);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                CHECK(id(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    }
}

TEST_CASE("curvature of horizontal planes and sphere caps") {
    // Horizontal plane u = c: kappa = (1, ..., 1) for any c > 0.
    JetPoint flat;
    flat.u = 0.37;
    flat.du = SmallVec(2);
    flat.d2u = SmallMat(2);
    const CurvatureState st = curvature_matrix(flat, 2);
    CHECK(st.kappa[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(st.kappa[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(st.margin > 0.0);

    // Equidistant sphere cap: kappa = (sigma, sigma) everywhere.
    SphereCap cap;
    cap.center_horizontal = SmallVec(2);
    cap.radius = 1.0;
    cap.sigma = 0.5;

    const JetPoint at_center = sphere_cap_jet(cap, SmallVec{0.0, 0.0});
    CHECK(at_center.u == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(at_center.du[0] == 0.0);
    CHECK(at_center.d2u(0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(at_center.d2u(1, 1) == doctest::Approx(-1.0).epsilon(1e-15));

    const JetPoint off = sphere_cap_jet(cap, SmallVec{0.6, 0.0});
    CHECK(off.u == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(off.du.norm() == doctest::Approx(0.75).epsilon(1e-14));

    for (const SmallVec& x : {SmallVec{0.0, 0.0}, SmallVec{0.6, 0.0}, SmallVec{0.31, -0.4}}) {
        const CurvatureState cs = curvature_matrix(sphere_cap_jet(cap, x), 2);
        CHECK(cs.kappa[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(cs.kappa[1] == doctest::Approx(0.5).epsilon(1e-12));
    }

    CHECK_THROWS_AS(sphere_cap_jet(cap, SmallVec{0.9, 0.0}), Error); // outside positivity

    // Horizontal translation invariance: curvatures depend on the jet only.
    SphereCap moved = cap;
    moved.center_horizontal = SmallVec{0.2, -0.35};
    const JetPoint a = sphere_cap_jet(cap, SmallVec{0.3, 0.1});
    const JetPoint b = sphere_cap_jet(moved, SmallVec{0.5, -0.25});
    CHECK(a.u == doctest::Approx(b.u).epsilon(1e-15));
    const CurvatureState sa = curvature_matrix(a, 2);
    const CurvatureState sb = curvature_matrix(b, 2);
    CHECK(sa.kappa[0] == doctest::Approx(sb.kappa[0]).epsilon(1e-13));
    CHECK(sa.kappa[1] == doctest::Approx(sb.kappa[1]).epsilon(1e-13));
}

TEST_CASE("euclidean curvatures through the shared-eigenvector identity") {
    std::mt19937 rng(552);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 2);
        const JetPoint p = random_admissible_jet(rng, n, 1, 1e-8);
        const CurvatureState st = curvature_matrix(p, 1);
        for (int i = 0; i < n; ++i)
            CHECK(p.u * st.kappa_euclid[i] + st.nu_vertical ==
                  doctest::Approx(st.kappa[i]).epsilon(1e-13));
    }
}

TEST_CASE("hyperbolic curvatures against the generalized eigenproblem oracle") {
    std::mt19937 rng(553);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 2);
        const JetPoint p = random_admissible_jet(rng, n, 1, -1e9); // any jet
        const CurvatureState st = curvature_matrix(p, 1);

        // Metric and second fundamental form of the graph in the half space.
        const double w = st.w;
        SmallMat G(n), H(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double gij = (i == j ? 1.0 : 0.0) + p.du[i] * p.du[j];
                G(i, j) = gij / (p.u * p.u);
                H(i, j) = (gij + p.u * p.d2u(i, j)) / (p.u * p.u * w);
            }
        const SmallVec kappa_oracle = oracles::generalized_eigenvalues(H, G);
        for (int i = 0; i < n; ++i)
            CHECK(st.kappa[i] == doctest::Approx(kappa_oracle[i]).epsilon(1e-9));
    }
}

TEST_CASE("G on constant fields and caps") {
    JetPoint flat;
    flat.u = 1.3;
    flat.du = SmallVec(2);
    flat.d2u = SmallMat(2);
    CHECK(G_value(flat, 2) == doctest::Approx(1.0).epsilon(1e-14));

    JetPoint flat3;
    flat3.u = 0.8;
    flat3.du = SmallVec(3);
    flat3.d2u = SmallMat(3);
    CHECK(G_value(flat3, 2) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));

    SphereCap cap;
    cap.center_horizontal = SmallVec(2);
    cap.radius = 1.0;
    cap.sigma = 0.5;
    const JetPoint pj = sphere_cap_jet(cap, SmallVec{0.25, -0.3});
    // sigma_k^{1/k}(sigma, ..., sigma) = C(n,k)^{1/k} sigma.
    CHECK(G_value(pj, 2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(G_value(pj, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("linearization on constant fields") {
    JetPoint flat;
    flat.u = 0.9;
    flat.du = SmallVec(2);
    flat.d2u = SmallMat(2);
    const GraphEval ev = graph_eval(flat, 2, true);
    REQUIRE(ev.admissible);
    // G^{st} = u F^{st}, G^s = 0, G_u = 0 at Du = 0, D2u = 0.
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t)
            CHECK(ev.coeffs.Gst(s, t) == doctest::Approx(flat.u * ev.dF(s, t)).epsilon(1e-14));
    CHECK(ev.coeffs.Gs[0] == doctest::Approx(0.0));
    CHECK(ev.coeffs.Gs[1] == doctest::Approx(0.0));
    CHECK(ev.coeffs.Gu == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("linearization against finite differences of G") {
    std::mt19937 rng(554);
    int tested = 0;
    while (tested < 60) {
        const int n = 2 + static_cast<int>(rng() % 2);
        const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
        const JetPoint p = random_admissible_jet(rng, n, k, 5e-3);
        ++tested;
        const GraphEval ev = graph_eval(p, k, true);
        REQUIRE(ev.admissible);

        const double step = 1e-6;
        // G_u.
        {
            JetPoint pp = p, pm = p;
            pp.u += step;
            pm.u -= step;
            const double fd = (G_value(pp, k) - G_value(pm, k)) / (2.0 * step);
            CHECK(ev.coeffs.Gu == doctest::Approx(fd).epsilon(1e-5));
        }
        // G^s.
        for (int s = 0; s < n; ++s) {
            JetPoint pp = p, pm = p;
            pp.du[s] += step;
            pm.du[s] -= step;
            const double fd = (G_value(pp, k) - G_value(pm, k)) / (2.0 * step);
            CHECK(ev.coeffs.Gs[s] == doctest::Approx(fd).epsilon(1e-5));
        }
        // G^{st}; off-diagonal entries move a symmetric pair.
        for (int s = 0; s < n; ++s)
            for (int t = s; t < n; ++t) {
                JetPoint pp = p, pm = p;
                pp.d2u(s, t) += step;
                pp.d2u(t, s) = pp.d2u(s, t);
                pm.d2u(s, t) -= step;
                pm.d2u(t, s) = pm.d2u(s, t);
                const double fd = (G_value(pp, k) - G_value(pm, k)) / (2.0 * step);
                const double expect = (s == t) ? ev.coeffs.Gst(s, s) : 2.0 * ev.coeffs.Gst(s, t);
                CHECK(expect == doctest::Approx(fd).epsilon(2e-5));
            }
    }
}

TEST_CASE("ellipticity: G^{st} positive definite on admissible jets") {
    std::mt19937 rng(555);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 2);
        const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
        const JetPoint p = random_admissible_jet(rng, n, k, 1e-6);
        const GraphEval ev = graph_eval(p, k, true);
        REQUIRE(ev.admissible);
        const EigenDecomp eig = jacobi_eigen(ev.coeffs.Gst);
        CHECK(eig.lambda[0] > 0.0);
    }
}

TEST_CASE("G_u identity at exact solutions of G = psi(x) u") {
    // G_u - G/u = -(1/(w u)) sum f_i, an exact consequence of one-homogeneity.
    std::mt19937 rng(556);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 2);
        const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
        const JetPoint p = random_admissible_jet(rng, n, k, 1e-6);
        const GraphEval ev = graph_eval(p, k, true);
        REQUIRE(ev.admissible);
        const double lhs = ev.coeffs.Gu - ev.G / p.u;
        const double rhs = -ev.sum_f / (ev.state.w * p.u);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
        CHECK(lhs < 0.0);
    }
}
