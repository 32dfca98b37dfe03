#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qprop/errors.hpp"
#include "qprop/expression.hpp"

using namespace qprop;
using expr::Expr;

TEST_CASE("literals parse to constant nodes") {
    const Expr e = expr::parse_expression("1");
    CHECK(e.root().kind == expr::Node::Kind::Constant);
    CHECK(e.root().value == 1.0);
    CHECK(expr::eval_expression(e, 0.0) == 1.0);
    CHECK(expr::eval_expression(expr::parse_expression("2.5e-1"), 0.0) == doctest::Approx(0.25));
    CHECK(expr::eval_expression(expr::parse_expression("pi"), 0.0) ==
          doctest::Approx(std::numbers::pi));
}

TEST_CASE("trap-shaped coefficient expression") {
    const Expr e = expr::parse_expression("a - 2*q*cos(W*t)");
    CHECK(e.root().kind == expr::Node::Kind::Binary);
    CHECK(e.root().op == expr::BinaryOp::Sub);
    const expr::Bindings b{{"a", 1.0}, {"q", 0.25}, {"W", 10.0}};
    CHECK(expr::eval_expression(e, 0.0, b) == doctest::Approx(0.5));
    // a - 2 q cos(2 r t) at a=1, q=0.25, r=10, t=0.
    const Expr e2 = expr::parse_expression("a - 2*q*cos(2*r*t)");
    CHECK(expr::eval_expression(e2, 0.0, {{"a", 1.0}, {"q", 0.25}, {"r", 10.0}}) ==
          doctest::Approx(0.5));
}

TEST_CASE("malformed input reports offset and expectation") {
    try {
        expr::parse_expression("sin(");
        FAIL("expected ParseError");
    } catch (const ParseError& pe) {
        CHECK(pe.offset == 4);
        CHECK(pe.expected == "expression");
    }
    CHECK_THROWS_AS(expr::parse_expression(""), ParseError);
    CHECK_THROWS_AS(expr::parse_expression("1 + * 2"), ParseError);
    CHECK_THROWS_AS(expr::parse_expression("(1"), ParseError);
    CHECK_THROWS_AS(expr::parse_expression("1)"), ParseError);
    CHECK_THROWS_AS(expr::parse_expression("foo(1)"), ParseError); // unknown function
}

TEST_CASE("precedence and associativity") {
    CHECK(expr::eval_expression(expr::parse_expression("2+3*4"), 0.0) == 14.0);
    CHECK(expr::eval_expression(expr::parse_expression("2^3^2"), 0.0) == 512.0);
    CHECK(expr::eval_expression(expr::parse_expression("-2^2"), 0.0) == -4.0);
    CHECK(expr::eval_expression(expr::parse_expression("2^-1"), 0.0) == 0.5);
    CHECK(expr::eval_expression(expr::parse_expression("10-2-3"), 0.0) == 5.0);
    CHECK(expr::eval_expression(expr::parse_expression("12/2/3"), 0.0) == 2.0);
}

TEST_CASE("derivatives of the basic rules") {
    auto d_at = [](const char* src, double t, const expr::Bindings& b = {}) {
        return expr::eval_expression(expr::differentiate(expr::parse_expression(src)), t, b);
    };
    // chain rule: d/dt sin(2t) = 2 cos(2t)
    CHECK(d_at("sin(2*t)", 0.7) == doctest::Approx(2.0 * std::cos(1.4)).epsilon(1e-12));
    // constants vanish
    CHECK(d_at("5", 3.0) == 0.0);
    // power and exponential
    CHECK(d_at("t^2 + exp(t)", 1.3) == doctest::Approx(2.6 + std::exp(1.3)).epsilon(1e-12));
    // parameters are constants
    CHECK(d_at("a*t", 2.0, {{"a", 3.0}}) == doctest::Approx(3.0));
    CHECK(d_at("sqrt(t)", 4.0) == doctest::Approx(0.25));
    CHECK(d_at("log(t)", 2.0) == doctest::Approx(0.5));
    CHECK(d_at("t/(1+t)", 1.0) == doctest::Approx(0.25));
}

TEST_CASE("evaluation domain errors") {
    CHECK(expr::eval_expression(expr::parse_expression("sin(t)"), 0.0) == 0.0);
    CHECK_THROWS_AS(expr::eval_expression(expr::parse_expression("1/t"), 0.0), DomainError);
    CHECK_THROWS_AS(expr::eval_expression(expr::parse_expression("sqrt(0-1)"), 0.0),
                    DomainError);
    CHECK_THROWS_AS(expr::eval_expression(expr::parse_expression("log(0-2)"), 0.0), DomainError);
    CHECK_THROWS_AS(expr::eval_expression(expr::parse_expression("missing + 1"), 0.0),
                    UnboundParameterError);
    try {
        expr::eval_expression(expr::parse_expression("x*t"), 1.0);
        FAIL("expected UnboundParameterError");
    } catch (const UnboundParameterError& e) {
        CHECK(e.parameter == "x");
    }
}

TEST_CASE("lagrangian reduction to c and e") {
    auto parse = [](const char* s) { return expr::parse_expression(s); };
    // a1 = 0, a2 = -k (harmonic): c = k, e = 0.
    {
        auto [c, e] = expr::reduce_lagrangian(parse("0"), parse("-k"), parse("0"), parse("0"));
        CHECK(expr::eval_expression(c, 2.0, {{"k", 4.0}}) == doctest::Approx(4.0));
        CHECK(expr::eval_expression(e, 2.0, {{"k", 4.0}}) == 0.0);
    }
    // a1 = t: c = 1.
    {
        auto [c, e] = expr::reduce_lagrangian(parse("t"), parse("0"), parse("0"), parse("0"));
        CHECK(expr::eval_expression(c, 5.0) == doctest::Approx(1.0));
        CHECK(expr::eval_expression(e, 5.0) == 0.0);
    }
    // a3 = t^2, a4 = t: e = 2t - t = t.
    {
        auto [c, e] = expr::reduce_lagrangian(parse("0"), parse("0"), parse("t^2"), parse("t"));
        CHECK(expr::eval_expression(e, 3.0) == doctest::Approx(3.0));
        CHECK(expr::eval_expression(c, 3.0) == 0.0);
    }
}

TEST_CASE("derivative matches central finite differences") {
    const char* sources[] = {
        "sin(2*t)",       "cos(t)*exp(0.3*t)", "t^3 - 2*t + 1", "exp(-0.5*t)*sin(t)",
        "1/(1+t)",        "sqrt(t+1)",         "log(t+2)",      "a - 2*q*cos(2*r*t)",
        "t^2*sin(t)",     "exp(sin(t))",
    };
    const expr::Bindings b{{"a", 1.0}, {"q", 0.25}, {"r", 10.0}};
    const double h = 1e-5;
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> pick_t(0.0, 10.0);

    int checked = 0;
    for (const char* src : sources) {
        const Expr f = expr::parse_expression(src);
        const Expr df = expr::differentiate(f);
        for (int k = 0; k < 10; ++k) {
            const double t = pick_t(rng);
            const double analytic = expr::eval_expression(df, t, b);
            const double fd = (expr::eval_expression(f, t + h, b) -
                               expr::eval_expression(f, t - h, b)) /
                              (2.0 * h);
            const double tol = 10.0 * h * h * std::max(1.0, std::abs(analytic));
            CHECK(std::abs(analytic - fd) <= tol);
            ++checked;
        }
    }
    CHECK(checked == 100);
}

TEST_CASE("parsing is total on arbitrary input") {
    std::mt19937 rng(777);
    std::uniform_int_distribution<int> len(0, 20);
    const std::string alphabet = "0123456789.+-*/^()abcqrtw sincoexplg_";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    for (int i = 0; i < 300; ++i) {
        std::string s;
        const int n = len(rng);
        for (int k = 0; k < n; ++k) s += alphabet[pick(rng)];
        try {
            const Expr e = expr::parse_expression(s);
            CHECK(e.valid());
        } catch (const ParseError&) {
            // located error: fine
        }
    }
}
