#include <doctest.h>

#include <vector>

#include "lyapflow/dynamics.hpp"

using namespace lyapflow;

namespace {

ObjectiveSpec unit_quadratic(int dim) {
    return ObjectiveSpec::quadratic(std::vector<double>(dim, 1.0),
                                    std::vector<double>(dim, 0.0), 0.0, 1.0);
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("damping values") {
    const auto nag = SystemSpec::nag(Rational(3), unit_quadratic(2));
    CHECK(nag.damping(1.0) == 3.0);

    const auto gen =
        SystemSpec::generalized_nag(Rational(3), Rational(1, 2), unit_quadratic(2));
    CHECK(gen.damping(4.0) == doctest::Approx(1.5).epsilon(1e-15));

    const auto gf = SystemSpec::gradient_flow(unit_quadratic(2));
    CHECK(gf.damping(0.7) == 0.0);
    CHECK(gf.damping(123.0) == 0.0);
}

TEST_CASE("damping rejects nonpositive time") {
    const auto nag = SystemSpec::nag(Rational(2), unit_quadratic(1));
    CHECK_THROWS_AS(nag.damping(0.0), std::domain_error);
    CHECK_THROWS_AS(nag.damping(-1.0), std::domain_error);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(SystemSpec::nag(Rational(0), unit_quadratic(1)), std::invalid_argument);
    CHECK_THROWS_AS(SystemSpec::nag(Rational(-1), unit_quadratic(1)), std::invalid_argument);
    CHECK_THROWS_AS(SystemSpec::generalized_nag(Rational(1), Rational(1), unit_quadratic(1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(SystemSpec::generalized_nag(Rational(1), Rational(3, 2), unit_quadratic(1)),
                    std::invalid_argument);
    CHECK_NOTHROW(SystemSpec::generalized_nag(Rational(1), Rational(1, 2), unit_quadratic(1)));
}

TEST_CASE("nag vector field: dv = -d(t) v - grad f") {
    // grad f(x) = (1, 0) at x = (1, 0) for the unit quadratic
    const auto sys = SystemSpec::nag(Rational(3), unit_quadratic(2));
    State s{1.0, {1.0, 0.0}, {0.0, 1.0}};
    std::vector<double> dx, dv;
    sys.vector_field(s, dx, dv);
    CHECK(dx == std::vector<double>{0.0, 1.0});
    CHECK(dv == std::vector<double>{-1.0, -3.0});
}

TEST_CASE("gradient flow vector field: dx = -grad f, v ignored") {
    const auto obj = ObjectiveSpec::quadratic({2.0, 1.0}, {0.0, 0.0}, 0.0, 1.0);
    const auto sys = SystemSpec::gradient_flow(obj);
    State s{1.0, {1.0, -1.0}, {9.0, 9.0}};
    std::vector<double> dx, dv;
    sys.vector_field(s, dx, dv);
    CHECK(dx == std::vector<double>{-2.0, 1.0});
    CHECK(dv == std::vector<double>{0.0, 0.0});
}

TEST_CASE("generalized nag with zero gradient is pure friction") {
    // x at the minimizer: dv = -r t^-alpha v
    const auto sys =
        SystemSpec::generalized_nag(Rational(3), Rational(1, 2), unit_quadratic(2));
    State s{4.0, {0.0, 0.0}, {2.0, 0.0}};
    std::vector<double> dx, dv;
    sys.vector_field(s, dx, dv);
    CHECK(dv[0] == doctest::Approx(-3.0).epsilon(1e-15));
    CHECK(dv[1] == 0.0);
}

TEST_CASE("vector field is pure") {
    const auto sys = SystemSpec::nag(Rational(4), unit_quadratic(3));
    State s{2.5, {1.0, -0.5, 2.0}, {0.1, 0.2, -0.3}};
    std::vector<double> dx1, dv1, dx2, dv2;
    sys.vector_field(s, dx1, dv1);
    sys.vector_field(s, dx2, dv2);
    CHECK(dx1 == dx2);
    CHECK(dv1 == dv2);
}

TEST_CASE("damping exponent feeds the symbolic layer") {
    CHECK(SystemSpec::nag(Rational(5), unit_quadratic(1)).damping_exponent() == Rational(1));
    CHECK(SystemSpec::generalized_nag(Rational(2), Rational(3, 4), unit_quadratic(1))
              .damping_exponent() == Rational(3, 4));
}

}  // TEST_SUITE
