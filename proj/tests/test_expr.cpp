#include <doctest.h>

#include "hycurv/expr.hpp"
#include "support/oracles.hpp"

#include <random>

using namespace hycurv;
using expr::parse;

TEST_CASE("parse and evaluate the model data expressions") {
    const expr::Ast psi = parse("2*u^2", 2);
    SmallVec x{0.1, 0.2};
    CHECK(psi.eval(x, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    const auto d = psi.eval_with_du(x, 0.5);
    CHECK(d.value == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d.du == doctest::Approx(2.0).epsilon(1e-15));

    const expr::Ast ubar = parse("sqrt(1 - x1^2 - x2^2) - 0.5", 2);
    SmallVec p{0.6, 0.0};
    CHECK(ubar.eval(p, 0.0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK_FALSE(ubar.depends_on_u());
    CHECK(ubar.eval_with_du(p, 1.0).du == 0.0);
}

TEST_CASE("syntax errors carry byte offsets") {
    try {
        parse("u +", 2);
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::parse_error);
        CHECK(e.byte_offset == 3);
    }
    CHECK_THROWS_AS(parse("x3 + 1", 2), Error);   // undeclared variable
    CHECK_THROWS_AS(parse("v * 2", 2), Error);    // unknown identifier
    CHECK_THROWS_AS(parse("u(2)", 2), Error);     // u is not a function
    CHECK_THROWS_AS(parse("u ^ u", 2), Error);    // exponent must be a constant
    CHECK_THROWS_AS(parse("(1 + 2", 2), Error);   // missing ')'
    CHECK_THROWS_AS(parse("1 + 2)", 2), Error);   // trailing input
}

TEST_CASE("evaluation domain errors") {
    SmallVec x{0.0, 0.0};
    CHECK_THROWS_AS(parse("sqrt(x1 - 1)", 2).eval(x, 1.0), Error);
    CHECK_THROWS_AS(parse("log(x1)", 2).eval(x, 1.0), Error);
    CHECK_THROWS_AS(parse("1/x1", 2).eval(x, 1.0), Error);
    CHECK(parse("exp(x1)", 2).eval(x, 1.0) == doctest::Approx(1.0));
    CHECK(parse("log(exp(1))", 2).eval(x, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("print-parse round trip is structurally stable") {
    const char* samples[] = {
        "2*u^2",
        "sqrt(1 - x1^2 - x2^2) - 0.5",
        "-u^2 + 3*(x1 - x2)/(u + 1)",
        "exp(-x1) * log(u + 2) - 1.5e-3",
    };
    for (const char* s : samples) {
        const expr::Ast a = parse(s, 2);
        const std::string printed = a.to_string();
        const expr::Ast b = parse(printed, 2);
        CHECK(b.to_string() == printed);
        SmallVec x{0.3, -0.2};
        CHECK(a.eval(x, 0.7) == doctest::Approx(b.eval(x, 0.7)).epsilon(1e-15));
    }
}

TEST_CASE("random expressions agree with the generator's reference value") {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    for (int rep = 0; rep < 400; ++rep) {
        const int n = 1 + static_cast<int>(rng() % 3);
        SmallVec x(n);
        for (int i = 0; i < n; ++i) x[i] = coord(rng);
        const double u = 0.2 + 0.8 * std::fabs(coord(rng));
        const auto gen = oracles::random_expression(rng, n, x, u, 4);

        const expr::Ast ast = parse(gen.text, n);
        const auto got = ast.eval_with_du(x, u);
        CHECK(got.value ==
              doctest::Approx(static_cast<double>(gen.value)).epsilon(1e-12));
        CHECK(ast.eval(x, u) == got.value); // value channel consistency

        // d/du against the generator and against central differences.
        CHECK(got.du == doctest::Approx(static_cast<double>(gen.du)).epsilon(1e-10));
        const double step = 1e-7;
        const double fd = (ast.eval(x, u + step) - ast.eval(x, u - step)) / (2.0 * step);
        CHECK(got.du == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("derivative is linear in the expression") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        SmallVec x{coord(rng), coord(rng)};
        const double u = 0.3 + std::fabs(coord(rng));
        const auto f = oracles::random_expression(rng, 2, x, u, 3);
        const auto g = oracles::random_expression(rng, 2, x, u, 3);
        const expr::Ast combo = parse("2.5*(" + f.text + ") - 0.75*(" + g.text + ")", 2);
        const double expect = 2.5 * static_cast<double>(f.du) - 0.75 * static_cast<double>(g.du);
        CHECK(combo.eval_with_du(x, u).du == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("power binds to the preceding factor") {
    // Per the grammar, -u^2 parses as (-u)^2.
    const expr::Ast a = parse("-u^2", 1);
    SmallVec x{0.0};
    CHECK(a.eval(x, 3.0) == doctest::Approx(9.0));
    const expr::Ast b = parse("2*u^2", 1);
    CHECK(b.eval(x, 3.0) == doctest::Approx(18.0));
    const expr::Ast c = parse("u^-1", 1);
    CHECK(c.eval(x, 4.0) == doctest::Approx(0.25));
}
