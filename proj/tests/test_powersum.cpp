#include <doctest.h>

#include <vector>

#include "lyapflow/powersum.hpp"

using namespace lyapflow;

TEST_SUITE("powersum") {

TEST_CASE("canonical form: sorted, merged, zero-free") {
    PowerSum p({{Rational(1), Rational(-1)},
                {Rational(2), Rational(0)},
                {Rational(3), Rational(-1)},
                {Rational(-2), Rational(0)}});
    REQUIRE(p.size() == 1);
    CHECK(p.terms()[0].coeff == Rational(4));
    CHECK(p.terms()[0].exponent == Rational(-1));
}

TEST_CASE("canonical form is insertion-order independent") {
    std::vector<PowerSum::Term> terms = {{Rational(1, 3), Rational(-2)},
                                         {Rational(5), Rational(1, 2)},
                                         {Rational(-7, 2), Rational(0)}};
    PowerSum a(terms);
    std::swap(terms[0], terms[2]);
    PowerSum b(terms);
    CHECK(a == b);
}

TEST_CASE("arithmetic closure") {
    const PowerSum a = PowerSum::monomial(Rational(2), Rational(-1));
    const PowerSum b = PowerSum::monomial(Rational(1, 2), Rational(-3, 2));
    CHECK((a + b).size() == 2);
    CHECK((a - a).is_zero());
    const PowerSum prod = a * b;  // 1 * t^(-5/2)
    REQUIRE(prod.size() == 1);
    CHECK(prod.terms()[0].coeff == Rational(1));
    CHECK(prod.terms()[0].exponent == Rational(-5, 2));
}

TEST_CASE("differentiation: d/dt c t^p = c p t^(p-1)") {
    const PowerSum p = PowerSum::monomial(Rational(4), Rational(-2)) +
                       PowerSum::monomial(Rational(3), Rational(0));
    const PowerSum d = p.derivative();
    REQUIRE(d.size() == 1);  // the constant term vanishes
    CHECK(d.terms()[0].coeff == Rational(-8));
    CHECK(d.terms()[0].exponent == Rational(-3));
}

TEST_CASE("evaluation matches direct arithmetic") {
    // 3 t^-1/2 - 1/2 t^-2 at t = 4: 3/2 - 1/32 = 47/32
    const PowerSum p = PowerSum::monomial(Rational(3), Rational(-1, 2)) +
                       PowerSum::monomial(Rational(-1, 2), Rational(-2));
    CHECK(p.eval(4.0) == doctest::Approx(47.0 / 32.0).epsilon(1e-15));
}

TEST_CASE("antiderivative handles the log term") {
    // gamma' = 2 t^-1 + 3 t^-1/2  ->  gamma = 2 log t + 6 t^1/2
    const PowerSum gp = PowerSum::monomial(Rational(2), Rational(-1)) +
                        PowerSum::monomial(Rational(3), Rational(-1, 2));
    const LogWeight g = antiderivative(gp);
    CHECK(g.log_coeff == Rational(2));
    REQUIRE(g.poly.size() == 1);
    CHECK(g.poly.terms()[0].coeff == Rational(6));
    CHECK(g.poly.terms()[0].exponent == Rational(1, 2));
    CHECK(g.eval(4.0) == doctest::Approx(2.0 * std::log(4.0) + 12.0).epsilon(1e-15));
}

TEST_CASE("coeff_at returns zero for absent exponents") {
    const PowerSum p = PowerSum::monomial(Rational(5), Rational(-1));
    CHECK(p.coeff_at(Rational(-1)) == Rational(5));
    CHECK(p.coeff_at(Rational(-2)) == Rational(0));
}

TEST_CASE("rational parsing round trip") {
    CHECK(parse_rational("2/3") == Rational(2, 3));
    CHECK(parse_rational("-3/2") == Rational(-3, 2));
    CHECK(parse_rational("7") == Rational(7));
    CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("0.5x"), std::invalid_argument);
    CHECK(to_string(Rational(-3, 2)) == "-3/2");
}

}  // TEST_SUITE
