#pragma once

#include <vector>

#include "lyapflow/objectives.hpp"
#include "lyapflow/rational.hpp"

namespace lyapflow {

// State of a flow at time t: position x and velocity v = dx/dt.
// (v is ignored by the first-order gradient flow.)
struct State {
    double t = 0.0;
    std::vector<double> x;
    std::vector<double> v;
};

// A continuous-time optimization flow on an objective:
//
//   gradient-flow:    dx/dt = -grad f(x)
//   nag:              x'' + (r/t)   x' + grad f(x) = 0   (r > 0)
//   generalized-nag:  x'' + (r/t^a) x' + grad f(x) = 0   (r > 0, 0 < a < 1)
//
// r and alpha are kept exact so the symbolic layers can reuse them.
class SystemSpec {
public:
    enum class Kind { GradientFlow, Nag, GeneralizedNag };

    static SystemSpec gradient_flow(ObjectiveSpec objective);
    static SystemSpec nag(Rational r, ObjectiveSpec objective);
    static SystemSpec generalized_nag(Rational r, Rational alpha, ObjectiveSpec objective);

    Kind kind() const { return kind_; }
    const Rational& r() const { return r_; }
    const Rational& alpha() const { return alpha_; }
    double r_value() const { return to_double(r_); }
    double alpha_value() const { return to_double(alpha_); }
    const ObjectiveSpec& objective() const { return objective_; }

    // Damping exponent beta in d(t) = r * t^-beta (1 for nag, alpha for
    // generalized-nag, unused for gradient-flow).
    Rational damping_exponent() const;

    // d(t): r/t, r/t^alpha, or 0. Requires t > 0 for the damped kinds.
    double damping(double t) const;

    // First-order vector field on (x, v). For second-order kinds:
    // (dx, dv) = (v, -d(t) v - grad f(x)); for gradient-flow:
    // (dx, dv) = (-grad f(x), 0).
    void vector_field(const State& s, std::vector<double>& dx, std::vector<double>& dv) const;

private:
    SystemSpec() = default;
    Kind kind_ = Kind::GradientFlow;
    Rational r_;
    Rational alpha_;
    ObjectiveSpec objective_ = ObjectiveSpec::quadratic({1.0}, {0.0}, 0.0, 1.0);
};

}  // namespace lyapflow
