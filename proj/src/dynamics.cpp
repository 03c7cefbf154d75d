#include "lyapflow/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace lyapflow {

SystemSpec SystemSpec::gradient_flow(ObjectiveSpec objective) {
    SystemSpec s;
    s.kind_ = Kind::GradientFlow;
    s.objective_ = std::move(objective);
    return s;
}

SystemSpec SystemSpec::nag(Rational r, ObjectiveSpec objective) {
    if (r <= 0) throw std::invalid_argument("nag: r must be positive");
    SystemSpec s;
    s.kind_ = Kind::Nag;
    s.r_ = std::move(r);
    s.objective_ = std::move(objective);
    return s;
}

SystemSpec SystemSpec::generalized_nag(Rational r, Rational alpha, ObjectiveSpec objective) {
    if (r <= 0) throw std::invalid_argument("generalized-nag: r must be positive");
    if (alpha <= 0 || alpha >= 1)
        throw std::invalid_argument("generalized-nag: alpha must lie in (0,1)");
    SystemSpec s;
    s.kind_ = Kind::GeneralizedNag;
    s.r_ = std::move(r);
    s.alpha_ = std::move(alpha);
    s.objective_ = std::move(objective);
    return s;
}

Rational SystemSpec::damping_exponent() const {
    return kind_ == Kind::GeneralizedNag ? alpha_ : Rational(1);
}

double SystemSpec::damping(double t) const {
    if (kind_ == Kind::GradientFlow) return 0.0;
    if (t <= 0.0) throw std::domain_error("damping: t must be positive");
    if (kind_ == Kind::Nag) return r_value() / t;
    return r_value() * std::pow(t, -alpha_value());
}

void SystemSpec::vector_field(const State& s, std::vector<double>& dx,
                              std::vector<double>& dv) const {
    const int n = objective_.dimension();
    dx.resize(n);
    dv.resize(n);
    if (kind_ == Kind::GradientFlow) {
        objective_.grad_into(s.x, dx);
        for (auto& c : dx) c = -c;
        std::fill(dv.begin(), dv.end(), 0.0);
        return;
    }
    const double d = damping(s.t);
    objective_.grad_into(s.x, dv);
    for (int i = 0; i < n; ++i) {
        dx[i] = s.v[i];
        dv[i] = -d * s.v[i] - dv[i];
    }
}

}  // namespace lyapflow
