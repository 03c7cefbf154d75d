#include "lyapflow/powersum.hpp"

#include <algorithm>
#include <sstream>

namespace lyapflow {

PowerSum::PowerSum(std::vector<Term> terms) : terms_(std::move(terms)) { canonicalize(); }

PowerSum PowerSum::monomial(const Rational& coeff, const Rational& exponent) {
    PowerSum p;
    if (coeff != 0) p.terms_.push_back({coeff, exponent});
    return p;
}

void PowerSum::canonicalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return a.exponent < b.exponent; });
    std::vector<Term> merged;
    for (auto& t : terms_) {
        if (!merged.empty() && merged.back().exponent == t.exponent) {
            merged.back().coeff += t.coeff;
        } else {
            merged.push_back(t);
        }
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const Term& t) { return t.coeff == 0; }),
                 merged.end());
    terms_ = std::move(merged);
}

Rational PowerSum::coeff_at(const Rational& exponent) const {
    for (const auto& t : terms_)
        if (t.exponent == exponent) return t.coeff;
    return Rational(0);
}

PowerSum PowerSum::operator+(const PowerSum& other) const {
    std::vector<Term> all = terms_;
    all.insert(all.end(), other.terms_.begin(), other.terms_.end());
    return PowerSum(std::move(all));
}

PowerSum PowerSum::operator-(const PowerSum& other) const { return *this + (-other); }

PowerSum PowerSum::operator-() const { return scaled(Rational(-1)); }

PowerSum PowerSum::scaled(const Rational& c) const {
    std::vector<Term> out;
    if (c == 0) return PowerSum();
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.push_back({t.coeff * c, t.exponent});
    return PowerSum(std::move(out));
}

PowerSum PowerSum::operator*(const PowerSum& other) const {
    std::vector<Term> out;
    out.reserve(terms_.size() * other.terms_.size());
    for (const auto& a : terms_)
        for (const auto& b : other.terms_)
            out.push_back({a.coeff * b.coeff, a.exponent + b.exponent});
    return PowerSum(std::move(out));
}

PowerSum PowerSum::derivative() const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.push_back({t.coeff * t.exponent, t.exponent - 1});
    return PowerSum(std::move(out));
}

double PowerSum::eval(double t) const {
    double sum = 0.0;
    for (const auto& term : terms_)
        sum += to_double(term.coeff) * std::pow(t, to_double(term.exponent));
    return sum;
}

bool PowerSum::operator==(const PowerSum& other) const {
    if (terms_.size() != other.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].coeff != other.terms_[i].coeff ||
            terms_[i].exponent != other.terms_[i].exponent)
            return false;
    return true;
}

std::string PowerSum::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
        if (!first) os << " + ";
        first = false;
        const bool frac = denominator(t.coeff) != 1;
        if (frac) os << "(" << to_string(t.coeff) << ")";
        else os << to_string(t.coeff);
        if (t.exponent != 0) os << "*t^" << to_string(t.exponent);
    }
    return os.str();
}

LogWeight antiderivative(const PowerSum& p) {
    LogWeight w;
    std::vector<PowerSum::Term> poly;
    for (const auto& t : p.terms()) {
        if (t.exponent == -1) {
            w.log_coeff += t.coeff;
        } else {
            poly.push_back({t.coeff / (t.exponent + 1), t.exponent + 1});
        }
    }
    w.poly = PowerSum(std::move(poly));
    return w;
}

}  // namespace lyapflow
