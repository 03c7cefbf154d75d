#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "lyapflow/symsearch.hpp"

using namespace lyapflow;

namespace {

PowerSum mono(long cn, long cd, long en, long ed) {
    return PowerSum::monomial(Rational(cn, cd), Rational(en, ed));
}

}  // namespace

TEST_SUITE("symsearch") {

TEST_CASE("collection for the r/t damping at r = 6") {
    // gamma' = 4/t, g = 2/t^2, h = 4/t, d = 6/t
    const auto col = derive_collection(mono(4, 1, -1, 1), mono(2, 1, -2, 1),
                                       mono(4, 1, -1, 1), mono(6, 1, -1, 1));
    CHECK(col.f_gap == mono(4, 1, -1, 1));
    CHECK(col.grad_dot_w == mono(-4, 1, -1, 1));
    CHECK(col.grad_dot_v.is_zero());
    CHECK(col.w_sq == mono(12, 1, -3, 1));  // (2 r^3 - 18 r)/27 = 12 at r = 6
    CHECK(col.w_dot_v.is_zero());
    CHECK(col.v_sq.is_zero());
}

TEST_CASE("collection for the r/t^alpha damping at r = 3, alpha = 1/2") {
    // gamma' = h = 2 t^-1/2, g = t^-1 - (1/2) t^-3/2, d = 3 t^-1/2
    const PowerSum g = mono(1, 1, -1, 1) + mono(-1, 2, -3, 2);
    const auto col = derive_collection(mono(2, 1, -1, 2), g, mono(2, 1, -1, 2),
                                       mono(3, 1, -1, 2));
    CHECK(col.f_gap == mono(2, 1, -1, 2));
    CHECK(col.grad_dot_w == mono(-2, 1, -1, 2));
    CHECK(col.grad_dot_v.is_zero());
    CHECK(col.w_dot_v.is_zero());
    CHECK(col.v_sq.is_zero());
    // (2 r^3/27) t^-3a - (r a (1+a)/3) t^-2-a = 2 t^-3/2 - (3/4) t^-5/2
    CHECK(col.w_sq == mono(2, 1, -3, 2) + mono(-3, 4, -5, 2));

    // independent numeric evaluation of both sides at t = 4
    const double lhs = col.w_sq.eval(4.0);
    const double rhs = 2.0 * std::pow(4.0, -1.5) - 0.75 * std::pow(4.0, -2.5);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-15));
}

TEST_CASE("pure energy ansatz differentiates to zero along the flow") {
    // g = h = 0, gamma' = 0, d = 0: E = f + |x'|^2/2 and dE/dt = 0 after the
    // ODE substitution (the <grad f, x'> contributions cancel exactly)
    const auto col = derive_collection(PowerSum::zero(), PowerSum::zero(), PowerSum::zero(),
                                       PowerSum::zero());
    CHECK(col.f_gap.is_zero());
    CHECK(col.grad_dot_w.is_zero());
    CHECK(col.grad_dot_v.is_zero());
    CHECK(col.w_sq.is_zero());
    CHECK(col.w_dot_v.is_zero());
    CHECK(col.v_sq.is_zero());
}

TEST_CASE("search rediscovers the r/t Lyapunov function") {
    const std::vector<Rational> grid = {Rational(-2), Rational(-1), Rational(0)};
    SUBCASE("r = 6, mu = 1: T^2 = 8") {
        const auto cands = search(mono(6, 1, -1, 1), grid, Rational(1));
        REQUIRE(cands.size() == 1);
        CHECK(cands[0].gamma_prime == mono(4, 1, -1, 1));
        CHECK(cands[0].g == mono(2, 1, -2, 1));
        CHECK(cands[0].h == mono(4, 1, -1, 1));
        CHECK(cands[0].threshold == Radical{Rational(8), Rational(2)});
    }
    SUBCASE("r = 3: the |w|^2 correction vanishes, T^2 = 2") {
        const auto cands = search(mono(3, 1, -1, 1), grid, Rational(1));
        REQUIRE(cands.size() == 1);
        CHECK(cands[0].g.is_zero());
        CHECK(cands[0].gamma_prime == mono(2, 1, -1, 1));
        CHECK(cands[0].threshold == Radical{Rational(2), Rational(2)});
    }
    SUBCASE("r = 4, mu = 2: T^2 = 2 r^2/(9 mu) = 16/9") {
        const auto cands = search(mono(4, 1, -1, 1), grid, Rational(2));
        REQUIRE(cands.size() == 1);
        CHECK(cands[0].g == PowerSum::monomial(Rational(4, 9), Rational(-2)));
        CHECK(cands[0].threshold == Radical{Rational(16, 9), Rational(2)});
    }
}

TEST_CASE("search rediscovers the r/t^alpha Lyapunov function at (3, 1/2, 1)") {
    const std::vector<Rational> grid = {Rational(-3, 2), Rational(-1), Rational(-1, 2),
                                        Rational(0)};
    const auto cands = search(mono(3, 1, -1, 2), grid, Rational(1));
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].gamma_prime == mono(2, 1, -1, 2));
    CHECK(cands[0].h == mono(2, 1, -1, 2));
    CHECK(cands[0].g == mono(1, 1, -1, 1) + mono(-1, 2, -3, 2));
    // T = (2 r^2 / (9 mu))^{1/(2 alpha)} = 2^1
    CHECK(cands[0].threshold == Radical{Rational(2), Rational(1)});
    CHECK(cands[0].threshold.value() == 2.0);
}

TEST_CASE("grids that cannot carry the coefficients return nothing") {
    // g for r=6 needs exponent -2
    const auto cands = search(mono(6, 1, -1, 1), {Rational(-1), Rational(0)}, Rational(1));
    CHECK(cands.empty());
    // empty results are not an error, just an empty list
    const auto none = search(mono(3, 1, -1, 2), {Rational(-1)}, Rational(1));
    CHECK(none.empty());
}

TEST_CASE("search results are independent of grid order") {
    const std::vector<Rational> a = {Rational(-2), Rational(-1), Rational(0)};
    const std::vector<Rational> b = {Rational(0), Rational(-2), Rational(-1)};
    const auto ca = search(mono(6, 1, -1, 1), a, Rational(1));
    const auto cb = search(mono(6, 1, -1, 1), b, Rational(1));
    REQUIRE(ca.size() == cb.size());
    for (std::size_t i = 0; i < ca.size(); ++i) {
        CHECK(ca[i].gamma_prime == cb[i].gamma_prime);
        CHECK(ca[i].g == cb[i].g);
        CHECK(ca[i].h == cb[i].h);
        CHECK(ca[i].threshold == cb[i].threshold);
    }
}

TEST_CASE("search input validation") {
    CHECK_THROWS_AS(search(mono(6, 1, -1, 1), {}, Rational(1)), std::invalid_argument);
    CHECK_THROWS_AS(search(mono(6, 1, -1, 1), {Rational(-1)}, Rational(0)),
                    std::invalid_argument);
    // two-term damping is outside the contract
    CHECK_THROWS_AS(search(mono(1, 1, -1, 1) + mono(1, 1, 0, 1), {Rational(-1)}, Rational(1)),
                    std::invalid_argument);
}

TEST_CASE("rational reconstruction recovers the coefficient formulas") {
    SUBCASE("(r^2 - 3r)/9 from four instances") {
        const auto res = reconstruct_rational_function({{Rational(3), Rational(0)},
                                                        {Rational(4), Rational(4, 9)},
                                                        {Rational(6), Rational(2)},
                                                        {Rational(9), Rational(6)}});
        REQUIRE(res.fn.is_polynomial());
        REQUIRE(res.fn.num.size() == 3);
        CHECK(res.fn.num[0] == Rational(0));
        CHECK(res.fn.num[1] == Rational(-1, 3));
        CHECK(res.fn.num[2] == Rational(1, 9));
        CHECK(res.points_held_out == 1);
        CHECK(res.fn.eval(Rational(12)) == Rational(12));  // (144-36)/9
    }
    SUBCASE("2r/3 from three instances") {
        const auto res = reconstruct_rational_function({{Rational(3), Rational(2)},
                                                        {Rational(4), Rational(8, 3)},
                                                        {Rational(6), Rational(4)}});
        REQUIRE(res.fn.num.size() == 2);
        CHECK(res.fn.num[0] == Rational(0));
        CHECK(res.fn.num[1] == Rational(2, 3));
        CHECK(res.points_held_out == 1);
    }
    SUBCASE("constant data fits at degree zero") {
        const auto res = reconstruct_rational_function({{Rational(3), Rational(5, 7)},
                                                        {Rational(4), Rational(5, 7)},
                                                        {Rational(6), Rational(5, 7)}});
        REQUIRE(res.fn.num.size() == 1);
        CHECK(res.fn.num[0] == Rational(5, 7));
        CHECK(res.points_held_out == 2);
    }
    SUBCASE("duplicate r values are rejected") {
        CHECK_THROWS_AS(reconstruct_rational_function(
                            {{Rational(3), Rational(1)}, {Rational(3), Rational(2)}}),
                        std::invalid_argument);
    }
}

TEST_CASE("candidate-level parameter reconstruction") {
    const std::vector<Rational> grid = {Rational(-2), Rational(-1), Rational(0)};
    std::vector<std::pair<Rational, SearchCandidate>> instances;
    for (long r : {3, 4, 6, 9}) {
        const auto cands = search(mono(r, 1, -1, 1), grid, Rational(1));
        REQUIRE(cands.size() == 1);
        instances.emplace_back(Rational(r), cands[0]);
    }
    const auto dep = reconstruct_parameter_dependence(instances);

    REQUIRE(dep.g.size() == 1);
    CHECK(dep.g[0].exponent == Rational(-2));
    CHECK(dep.g[0].coeff.fn.num ==
          std::vector<Rational>{Rational(0), Rational(-1, 3), Rational(1, 9)});

    REQUIRE(dep.h.size() == 1);
    CHECK(dep.h[0].exponent == Rational(-1));
    CHECK(dep.h[0].coeff.fn.num == std::vector<Rational>{Rational(0), Rational(2, 3)});

    REQUIRE(dep.gamma_prime.size() == 1);
    CHECK(dep.gamma_prime[0].coeff.fn.num ==
          std::vector<Rational>{Rational(0), Rational(2, 3)});
}

TEST_CASE("parameter reconstruction needs four distinct r values") {
    const std::vector<Rational> grid = {Rational(-2), Rational(-1), Rational(0)};
    std::vector<std::pair<Rational, SearchCandidate>> instances;
    for (long r : {3, 4, 6}) {
        const auto cands = search(mono(r, 1, -1, 1), grid, Rational(1));
        instances.emplace_back(Rational(r), cands[0]);
    }
    CHECK_THROWS_AS(reconstruct_parameter_dependence(instances), std::invalid_argument);
}

TEST_CASE("candidates serialize with exact integer pairs") {
    const auto cands = search(mono(6, 1, -1, 1), {Rational(-2), Rational(-1), Rational(0)},
                              Rational(1));
    const std::string js = to_json(cands);
    CHECK(js.find("\"coeff\":[\"4\",\"1\"]") != std::string::npos);
    CHECK(js.find("\"base\":[\"8\",\"1\"]") != std::string::npos);
    CHECK(js.find("\"root_index\":[\"2\",\"1\"]") != std::string::npos);
}

}  // TEST_SUITE
