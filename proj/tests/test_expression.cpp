#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "expression.hpp"

using namespace smoothnet;
using doctest::Approx;

TEST_CASE("literals and arithmetic") {
    CHECK(parse_expression("42")(0.0) == 42.0);
    CHECK(parse_expression("3.14")(0.0) == 3.14);
    CHECK(parse_expression(".5")(0.0) == 0.5);
    CHECK(parse_expression("1e-3")(0.0) == 1e-3);
    CHECK(parse_expression("2+3*4")(0.0) == 14.0);
    CHECK(parse_expression("(2+3)*4")(0.0) == 20.0);
    CHECK(parse_expression("5-2-1")(0.0) == 2.0);
    CHECK(parse_expression("6/3/2")(0.0) == 1.0);
    CHECK(parse_expression("2*3^2")(0.0) == 18.0);
    CHECK(parse_expression("2^3^2")(0.0) == 512.0);
    CHECK(parse_expression("-5")(0.0) == -5.0);
    CHECK(parse_expression("--5")(0.0) == 5.0);
    CHECK(parse_expression("-x^2")(2.0) == -4.0);
    CHECK(parse_expression("x^-2")(2.0) == 0.25);
    CHECK(parse_expression(" 1 + 2 * x ")(3.0) == 7.0);
}

TEST_CASE("functions and variables") {
    Expression e = parse_expression("sin(3*x)");
    CHECK(e.input_dim() == 1);
    for (double x : {0.0, 0.3, 0.7, 1.0}) CHECK(e(x) == Approx(std::sin(3.0 * x)).epsilon(1e-15));
    CHECK(parse_expression("cos(x)")(0.5) == Approx(std::cos(0.5)));
    CHECK(parse_expression("exp(2*x)")(0.4) == Approx(std::exp(0.8)));

    Expression e2 = parse_expression("16*(x^3+y^3)+3");
    CHECK(e2.input_dim() == 2);
    CHECK(e2(0.5, 0.25) == Approx(16.0 * (0.125 + 0.015625) + 3.0));
    CHECK(e2.eval({0.5, 0.25}) == e2(0.5, 0.25));
    CHECK(parse_expression("y")(0.0, 0.7) == 0.7);

    // the catalog strings the command line carries must all parse
    for (const char* text :
         {"x^3+3", "32*x^3+3", "exp(2*x)", "exp(8*x)", "30*(sin(15*x)+1)", "30*sin(6*x+3)+3",
          "16*(x^3+y^3)+3", "sin(3*(x+y+1))+3", "sin(20*x)"})
        CHECK_NOTHROW(parse_expression(text));
}

TEST_CASE("arity errors") {
    Expression e = parse_expression("x*y");
    CHECK_THROWS_AS(e(1.0), std::invalid_argument);
    CHECK_THROWS_AS(e.eval({1.0}), std::invalid_argument);
    Expression f = parse_expression("x+1");
    CHECK_THROWS_AS(f.eval({1.0, 2.0}), std::invalid_argument);
    CHECK(f.eval({1.0}) == 2.0);
}

TEST_CASE("parse errors cite the offending position") {
    CHECK_THROWS_WITH_AS(parse_expression("2+"), doctest::Contains("position 3"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_expression("2+"), doctest::Contains("unexpected end"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_expression("tan(x)"), doctest::Contains("unknown name 'tan'"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_expression("tan(x)"), doctest::Contains("position 1"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_expression("(1+2"), doctest::Contains("expected ')'"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_expression("1+2)"), doctest::Contains("position 4"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_expression("sin x"), doctest::Contains("expected '('"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_expression("3 @ 4"), doctest::Contains("'@'"),
                         std::invalid_argument);
    CHECK_THROWS_AS(parse_expression(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_expression("   "), std::invalid_argument);
}
