#include <catch_amalgamated.hpp>

#include "horn/dsl.hpp"

using namespace horn;
using namespace horn::dsl;

TEST_CASE("evaluates at a point") {
    CHECK(eval(parse("phi*X - X^2/2"), 2, 3) == Catch::Approx(1.5));
    CHECK(eval(parse("-X^2"), 0, 3) == Catch::Approx(-9));
    CHECK(eval(parse("2^3^2"), 0, 0) == Catch::Approx(64));
}

TEST_CASE("differentiates") {
    SExpr f = parse("X^3");
    CHECK(eval(differentiate(f, kX, 2), 0, 2) == Catch::Approx(12));
    CHECK(is_zero(differentiate(f, kPhi)));
    SExpr g = parse("exp(phi)*sin(X)");
    CHECK(eval(mixed(g, 1, 1), 0.3, 0.7) == Catch::Approx(std::exp(0.3) * std::cos(0.7)));
}

TEST_CASE("decimals are exact") {
    SExpr f = parse("0.1 + 0.2 - 0.3");
    CHECK(is_zero(f));
    CHECK(print(parse("1.5e-1")) == "3/20");
}

TEST_CASE("like terms combine") {
    CHECK(is_zero(parse("phi*X - X*phi")));
    CHECK(structurally_equal(parse("X + X"), parse("2*X")));
    CHECK(structurally_equal(parse("(X+1)^2/(X+1)"), parse("X+1")));
}

TEST_CASE("dependence is structural") {
    CHECK_FALSE(depends_on(parse("phi^2 + X - X"), kX));
    CHECK(depends_on(parse("phi*X"), kX));
}

TEST_CASE("printing round trips") {
    for (const char* src : {"phi*X - X^2/2", "-3/4*exp(-phi)*X^(-2)", "cos(phi+X)^3 - 1", "log(1 + X)/(phi - 2)", "1e30*X"}) {
        SExpr a = parse(src);
        SExpr b = parse(print(a));
        CHECK(structurally_equal(a, b));
    }
}

TEST_CASE("reports errors with byte offsets") {
    try {
        parse("phi + * X");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.offset == 6);
    }
    CHECK_THROWS_AS(parse("phi + Y"), UnknownIdentifier);
    CHECK_THROWS_AS(parse("X^phi"), ParseError);
    CHECK_THROWS_AS(parse("(X"), ParseError);
    CHECK_THROWS_AS(parse(""), ParseError);
}

TEST_CASE("converts into jet expressions") {
    reset_context();
    Expr e = to_expr(parse("phi*X - X^2/2"), {horn::phi(), kinetic_x()});
    CHECK(contains_kind(e, SymKind::InvMetric));
}
