#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lyapflow/rational.hpp"

namespace lyapflow {

// Finite sum  sum_k c_k * t^{p_k}  with exact rational coefficients and
// exponents. Canonical form: terms sorted by ascending exponent, duplicate
// exponents merged, zero coefficients dropped. Closed under +, -, *, scalar
// multiplication and d/dt.
class PowerSum {
public:
    struct Term {
        Rational coeff;
        Rational exponent;
    };

    PowerSum() = default;
    explicit PowerSum(std::vector<Term> terms);

    static PowerSum zero() { return PowerSum(); }
    static PowerSum constant(const Rational& c) { return monomial(c, Rational(0)); }
    static PowerSum monomial(const Rational& coeff, const Rational& exponent);

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    // Coefficient of t^exponent (zero if the exponent is absent).
    Rational coeff_at(const Rational& exponent) const;

    PowerSum operator+(const PowerSum& other) const;
    PowerSum operator-(const PowerSum& other) const;
    PowerSum operator*(const PowerSum& other) const;
    PowerSum operator-() const;
    PowerSum scaled(const Rational& c) const;

    // d/dt (c t^p) = c p t^{p-1}
    PowerSum derivative() const;

    double eval(double t) const;

    bool operator==(const PowerSum& other) const;

    std::string str() const;  // e.g. "2*t^-1 + (-1/2)*t^-3/2"

private:
    void canonicalize();
    std::vector<Term> terms_;
};

// Antiderivative of a PowerSum taken with zero integration constant, used as
// the log-weight gamma(t):  t^p integrates to t^{p+1}/(p+1) for p != -1 and
// to log t for p = -1.  eval() returns gamma(t) itself (natural-log units).
struct LogWeight {
    PowerSum poly;
    Rational log_coeff;

    double eval(double t) const { return poly.eval(t) + to_double(log_coeff) * std::log(t); }
};

LogWeight antiderivative(const PowerSum& p);

}  // namespace lyapflow
