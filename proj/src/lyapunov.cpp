#include "lyapflow/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lyapflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PowerSum damping_powersum(const SystemSpec& sys) {
    switch (sys.kind()) {
        case SystemSpec::Kind::Nag:
            return PowerSum::monomial(sys.r(), Rational(-1));
        case SystemSpec::Kind::GeneralizedNag:
            return PowerSum::monomial(sys.r(), -sys.alpha());
        default:
            throw std::invalid_argument(
                "lyapunov: certification applies to the second-order flows only");
    }
}

struct StateParts {
    double t;
    double f_gap;        // f - f*
    double grad_dot_w;   // <grad f, w>
    double grad_dot_v;   // <grad f, v>
    double w_sq;         // |w|^2
    double w_dot_v;      // <w, v>
    double v_sq;         // |v|^2
    double w_norm;
    double g_t, h_t;
    double main_part, velocity_part, interior;
};

StateParts state_parts(const LyapunovSpec& lyap, const SystemSpec& sys, const State& s) {
    const auto& obj = sys.objective();
    const int n = obj.dimension();
    StateParts p{};
    p.t = s.t;
    const auto grad = obj.grad(s.x);
    p.f_gap = obj.eval(s.x) - obj.f_star();
    for (int i = 0; i < n; ++i) {
        const double wi = s.x[i] - obj.x_star()[i];
        p.w_sq += wi * wi;
        p.grad_dot_w += grad[i] * wi;
        p.grad_dot_v += grad[i] * s.v[i];
        p.w_dot_v += wi * s.v[i];
        p.v_sq += s.v[i] * s.v[i];
    }
    p.w_norm = std::sqrt(p.w_sq);
    p.g_t = lyap.g().eval(s.t);
    p.h_t = lyap.h().eval(s.t);
    p.main_part = p.f_gap - p.g_t * p.w_sq;
    p.velocity_part = 0.5 * (p.v_sq + 2.0 * p.h_t * p.w_dot_v + p.h_t * p.h_t * p.w_sq);
    p.interior = p.main_part + p.velocity_part;
    return p;
}

double bracket_from_collection(const DerivativeCollection& col, const StateParts& p) {
    return col.f_gap.eval(p.t) * p.f_gap + col.grad_dot_w.eval(p.t) * p.grad_dot_w +
           col.grad_dot_v.eval(p.t) * p.grad_dot_v + col.w_sq.eval(p.t) * p.w_sq +
           col.w_dot_v.eval(p.t) * p.w_dot_v + col.v_sq.eval(p.t) * p.v_sq;
}

// Everything the T-anchored displays need from the trajectory at t = T.
struct Anchor {
    double T;
    double gamma_T;
    double interior_T;   // E(T) e^-gamma(T)
    double E_T;          // e^gamma(T) * interior(T)
    double log_E_T;
    double y_norm_T;     // e^gamma(T) |w(T)|
};

Anchor anchor_at_T(const Trajectory& traj, const LyapunovSpec& lyap, const SystemSpec& sys) {
    const double T = threshold_T(lyap);
    if (T < traj.t0() || T > traj.t_end())
        throw std::invalid_argument("certify: trajectory span does not cover the threshold T");
    const State sT = traj.at(T);
    const StateParts p = state_parts(lyap, sys, sT);
    Anchor a;
    a.T = T;
    a.gamma_T = lyap.gamma().eval(T);
    a.interior_T = p.interior;
    a.E_T = std::exp(a.gamma_T) * p.interior;
    a.log_E_T = p.interior > 0.0 ? a.gamma_T + std::log(p.interior) : -kInf;
    a.y_norm_T = std::exp(a.gamma_T) * p.w_norm;
    return a;
}

double logsumexp2(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Weighted bound Bhat(t) = (Bound(t)) e^gamma(t) for the closing display,
// remainder terms re-anchored at T. Power weight (r/t damping):
//   Bhat = E(T) + c1 + c2 t^{-r/3-1} + c3 t^{-2r/3-2}
// Exponential weight (r/t^a damping, a in [0,1)):
//   Bhat = E(T) + 2 E(T) + (2r/3) s y t^{-a} u + (r^2/9) y^2 t^{-2a} u^2
//          - (6a/r) E(T) t^{a-1} - 2 a s y t^{-1} u - (r a/3) y^2 t^{-1-a} u^2
// with s = sqrt(2 E(T)), y = |y(T)|, u = e^{-(gamma(t)-  0)/2} decay factor.
class WeightedBound {
public:
    WeightedBound(const LyapunovSpec& lyap, const Anchor& a, bool clamp_negative_g)
        : lyap_(lyap), anchor_(a), clamp_negative_g_(clamp_negative_g) {
        power_form_ = lyap.gamma().log_coeff != 0;
        r_ = to_double(lyap.r());
        alpha_ = power_form_ ? 1.0 : to_double(lyap.alpha());
        s_ = a.E_T > 0.0 ? std::sqrt(2.0 * a.E_T) : 0.0;
    }

    // log of Bhat(t); -inf when the signed sum is nonpositive
    double log_value(double t, double gamma_t) const {
        const double E = anchor_.E_T, y = anchor_.y_norm_T;
        double bhat;
        if (clamp_negative_g_ && lyap_.g().eval(t) < 0.0) {
            bhat = E;
        } else if (power_form_) {
            const double c1 = 2.0 * r_ * (r_ - 3.0) * E / ((r_ + 3.0) * (r_ + 3.0));
            const double c2 = 2.0 * r_ * (r_ - 3.0) * s_ * y / (3.0 * (r_ + 3.0));
            const double c3 = r_ * (r_ - 3.0) * y * y / 9.0;
            bhat = E + c1 + c2 * std::pow(t, -r_ / 3.0 - 1.0) +
                   c3 * std::pow(t, -2.0 * r_ / 3.0 - 2.0);
        } else {
            const double u = std::exp(-0.5 * gamma_t);
            const double u2 = u * u;
            bhat = E + 2.0 * E +
                   (2.0 * r_ / 3.0) * s_ * y * std::pow(t, -alpha_) * u +
                   (r_ * r_ / 9.0) * y * y * std::pow(t, -2.0 * alpha_) * u2;
            if (alpha_ > 0.0) {
                bhat += -(6.0 * alpha_ / r_) * E * std::pow(t, alpha_ - 1.0) -
                        2.0 * alpha_ * s_ * y * u / t -
                        (r_ * alpha_ / 3.0) * y * y * std::pow(t, -1.0 - alpha_) * u2;
            }
        }
        return bhat > 0.0 ? std::log(bhat) : -kInf;
    }

private:
    const LyapunovSpec& lyap_;
    Anchor anchor_;
    bool clamp_negative_g_;
    bool power_form_;
    double r_, alpha_, s_;
};

}  // namespace

LyapunovSpec LyapunovSpec::paper_nag(const Rational& r, const Rational& mu) {
    if (r <= 0 || mu <= 0) throw std::invalid_argument("paper_nag: need r > 0 and mu > 0");
    LyapunovSpec l;
    l.provenance_ = Provenance::PaperNag;
    l.r_ = r;
    l.mu_ = mu;
    l.gamma_prime_ = PowerSum::monomial(Rational(2) * r / 3, Rational(-1));
    l.h_ = l.gamma_prime_;
    l.g_ = PowerSum::monomial((r * r - Rational(3) * r) / 9, Rational(-2));
    l.gamma_ = antiderivative(l.gamma_prime_);
    l.threshold_ = Radical{Rational(2) * r * r / (Rational(9) * mu), Rational(2)};
    return l;
}

LyapunovSpec LyapunovSpec::paper_alpha(const Rational& r, const Rational& alpha,
                                       const Rational& mu) {
    if (r <= 0 || mu <= 0) throw std::invalid_argument("paper_alpha: need r > 0 and mu > 0");
    if (alpha <= 0 || alpha >= 1)
        throw std::invalid_argument("paper_alpha: alpha must lie in (0,1)");
    LyapunovSpec l;
    l.provenance_ = Provenance::PaperAlpha;
    l.r_ = r;
    l.alpha_ = alpha;
    l.mu_ = mu;
    l.gamma_prime_ = PowerSum::monomial(Rational(2) * r / 3, -alpha);
    l.h_ = l.gamma_prime_;
    l.g_ = PowerSum::monomial(r * r / 9, Rational(-2) * alpha) +
           PowerSum::monomial(-r * alpha / 3, Rational(-1) - alpha);
    l.gamma_ = antiderivative(l.gamma_prime_);
    l.threshold_ = Radical{Rational(2) * r * r / (Rational(9) * mu), Rational(2) * alpha};
    return l;
}

LyapunovSpec LyapunovSpec::discovered(const SearchCandidate& cand, const Rational& mu) {
    LyapunovSpec l;
    l.provenance_ = Provenance::Discovered;
    l.mu_ = mu;
    l.gamma_prime_ = cand.gamma_prime;
    l.g_ = cand.g;
    l.h_ = cand.h;
    l.gamma_ = antiderivative(l.gamma_prime_);
    l.threshold_ = cand.threshold;
    // the family has h = (2r/3) t^-beta; recover r and the damping exponent
    if (cand.h.size() == 1) {
        l.r_ = cand.h.terms().front().coeff * Rational(3, 2);
        const Rational beta = -cand.h.terms().front().exponent;
        if (beta != 1) l.alpha_ = beta;
    }
    return l;
}

LyapunovSpec LyapunovSpec::with_scaled_g(const Rational& factor) const {
    LyapunovSpec l = *this;
    l.g_ = l.g_.scaled(factor);
    l.provenance_ = Provenance::Discovered;
    return l;
}

LyapunovSpec LyapunovSpec::with_scaled_gamma_prime(const Rational& factor) const {
    LyapunovSpec l = *this;
    l.gamma_prime_ = l.gamma_prime_.scaled(factor);
    l.gamma_ = antiderivative(l.gamma_prime_);
    l.provenance_ = Provenance::Discovered;
    return l;
}

double threshold_T(const LyapunovSpec& lyap) { return lyap.threshold().value(); }

LogEParts eval_logE(const LyapunovSpec& lyap, const SystemSpec& sys, const State& s) {
    if (s.t <= 0.0) throw std::domain_error("eval_logE: t must be positive");
    const StateParts p = state_parts(lyap, sys, s);
    LogEParts out;
    out.gamma = lyap.gamma().eval(s.t);
    out.main_part = p.main_part;
    out.velocity_part = p.velocity_part;
    out.interior = p.interior;
    if (p.interior > 0.0) out.log_value = out.gamma + std::log(p.interior);
    return out;
}

DerivValue analytic_dEdt(const LyapunovSpec& lyap, const SystemSpec& sys, const State& s) {
    if (s.t <= 0.0) throw std::domain_error("analytic_dEdt: t must be positive");
    const StateParts p = state_parts(lyap, sys, s);
    const double t = s.t;
    double bracket;
    if (lyap.provenance() == LyapunovSpec::Provenance::PaperNag) {
        // dE/dt = -t^{2r/3} [ (2r/3t)(f* - f - <grad f, x* - x>)
        //                     - ((2r^3 - 18r)/(27 t^3)) |w|^2 ]
        const double r = to_double(lyap.r());
        const double sc = -p.f_gap + p.grad_dot_w;  // f* - f - <grad f, x*-x>
        bracket = -((2.0 * r / (3.0 * t)) * sc -
                    (2.0 * r * r * r - 18.0 * r) / (27.0 * t * t * t) * p.w_sq);
    } else if (lyap.provenance() == LyapunovSpec::Provenance::PaperAlpha) {
        const double r = to_double(lyap.r());
        const double a = to_double(lyap.alpha());
        const double sc = -p.f_gap + p.grad_dot_w;
        const double coef_w = (2.0 * r * r * r * std::pow(t, -2.0 * a) -
                               9.0 * r * a * (1.0 + a) * std::pow(t, -2.0)) /
                              (27.0 * std::pow(t, a));
        bracket = -((2.0 * r / 3.0) * std::pow(t, -a) * sc - coef_w * p.w_sq);
    } else {
        const DerivativeCollection col =
            derive_collection(lyap.gamma_prime(), lyap.g(), lyap.h(), damping_powersum(sys));
        bracket = bracket_from_collection(col, p);
    }
    DerivValue v;
    v.bracket = bracket;
    v.sign = bracket > 0.0 ? 1 : (bracket < 0.0 ? -1 : 0);
    v.log_abs = bracket == 0.0 ? -kInf : lyap.gamma().eval(t) + std::log(std::fabs(bracket));
    return v;
}

CertReport certify_monotone(const Trajectory& traj, const LyapunovSpec& lyap,
                            const CertifyOptions& opts) {
    const SystemSpec& sys = traj.system();
    const Anchor anchor = anchor_at_T(traj, lyap, sys);

    double max_violation = -kInf;
    double location = anchor.T;
    long checked = 0;
    double prev_logE = kInf;
    bool have_prev = false;
    for (const auto& smp : traj.samples()) {
        if (smp.t < anchor.T) continue;
        ++checked;
        State s{smp.t, smp.x, smp.v};
        const StateParts p = state_parts(lyap, sys, s);
        if (p.interior <= 0.0) {
            // nonpositive interior is itself a certification finding
            const double v = std::fabs(p.interior) + 10.0 * opts.monotone_tol;
            if (v > max_violation) { max_violation = v; location = smp.t; }
            have_prev = false;
            continue;
        }
        // (a) analytic derivative in log-space: d(logE)/dt = (dE/dt) e^-gamma / interior
        const DerivValue d = analytic_dEdt(lyap, sys, s);
        const double slope = d.bracket / p.interior;
        if (slope > max_violation) { max_violation = slope; location = smp.t; }
        // (b) consecutive-sample logE increments
        const double logE = lyap.gamma().eval(smp.t) + std::log(p.interior);
        if (have_prev) {
            const double inc = logE - prev_logE;
            if (inc > max_violation) { max_violation = inc; location = smp.t; }
        }
        prev_logE = logE;
        have_prev = true;
    }
    if (checked == 0) throw std::invalid_argument("certify_monotone: no samples with t >= T");
    return make_report("lyapunov-monotone", checked, std::max(max_violation, 0.0), location,
                       opts.monotone_tol);
}

CertReport certify_main_nonneg(const Trajectory& traj, const LyapunovSpec& lyap,
                               const CertifyOptions& opts) {
    const SystemSpec& sys = traj.system();
    const Anchor anchor = anchor_at_T(traj, lyap, sys);
    double max_violation = 0.0, location = anchor.T;
    long checked = 0;
    for (const auto& smp : traj.samples()) {
        if (smp.t < anchor.T) continue;
        ++checked;
        const StateParts p = state_parts(lyap, sys, State{smp.t, smp.x, smp.v});
        const double v = -p.main_part;
        if (v > max_violation) { max_violation = v; location = smp.t; }
    }
    return make_report("main-part-nonnegative", checked, max_violation, location,
                       opts.main_tol);
}

MainProbe probe_main_below_T(const Trajectory& traj, const LyapunovSpec& lyap) {
    const SystemSpec& sys = traj.system();
    const double T = threshold_T(lyap);
    MainProbe probe;
    for (const auto& smp : traj.samples()) {
        if (smp.t >= T) break;
        ++probe.samples;
        const StateParts p = state_parts(lyap, sys, State{smp.t, smp.x, smp.v});
        if (-p.main_part > probe.max_violation) {
            probe.max_violation = -p.main_part;
            probe.location = smp.t;
        }
    }
    return probe;
}

CertReport certify_velocity_bound(const Trajectory& traj, const LyapunovSpec& lyap,
                                  const CertifyOptions& opts) {
    const SystemSpec& sys = traj.system();
    const Anchor anchor = anchor_at_T(traj, lyap, sys);
    double max_violation = -kInf, location = anchor.T;
    long checked = 0;
    for (const auto& smp : traj.samples()) {
        if (smp.t < anchor.T) continue;
        ++checked;
        const StateParts p = state_parts(lyap, sys, State{smp.t, smp.x, smp.v});
        if (p.velocity_part <= 0.0) continue;  // log term is -inf: trivially satisfied
        const double lhs = lyap.gamma().eval(smp.t) + std::log(p.velocity_part);
        const double v = anchor.log_E_T == -kInf ? kInf : lhs - anchor.log_E_T;
        if (v > max_violation) { max_violation = v; location = smp.t; }
    }
    return make_report("velocity-bound", checked, std::max(max_violation, 0.0), location,
                       opts.velocity_tol);
}

namespace {

CertReport bound_check(const Trajectory& traj, const LyapunovSpec& lyap,
                       const CertifyOptions& opts, const char* id, double tol) {
    const SystemSpec& sys = traj.system();
    const Anchor anchor = anchor_at_T(traj, lyap, sys);
    const WeightedBound bound(lyap, anchor, opts.clamp_negative_g);
    double max_violation = -kInf, location = anchor.T;
    long checked = 0;
    for (const auto& smp : traj.samples()) {
        if (smp.t < anchor.T) continue;
        ++checked;
        const StateParts p = state_parts(lyap, sys, State{smp.t, smp.x, smp.v});
        if (p.f_gap <= 0.0) continue;  // gap at the floor: bound trivially holds
        const double gamma_t = lyap.gamma().eval(smp.t);
        const double weighted_gap = std::log(p.f_gap) + gamma_t;
        const double log_bound = bound.log_value(smp.t, gamma_t);
        const double v = log_bound == -kInf ? kInf : weighted_gap - log_bound;
        if (v > max_violation) { max_violation = v; location = smp.t; }
    }
    return make_report(id, checked, std::max(max_violation, 0.0), location, tol);
}

}  // namespace

CertReport certify_rate_bound(const Trajectory& traj, const LyapunovSpec& lyap,
                              const CertifyOptions& opts) {
    return bound_check(traj, lyap, opts, "rate-bound", opts.rate_tol);
}

CertReport check_weighted_boundedness(const Trajectory& traj, const LyapunovSpec& lyap,
                                      const CertifyOptions& opts) {
    return bound_check(traj, lyap, opts, "weighted-boundedness", opts.rate_tol);
}

std::pair<CertReport, CertReport> certify_y_growth(const Trajectory& traj,
                                                   const LyapunovSpec& lyap,
                                                   const CertifyOptions& opts) {
    const SystemSpec& sys = traj.system();
    const auto& obj = sys.objective();
    const int n = obj.dimension();
    const Anchor anchor = anchor_at_T(traj, lyap, sys);

    // reference scale for the identity's noise floor
    double ref = 0.0;
    for (const auto& smp : traj.samples()) {
        if (smp.t < anchor.T) continue;
        const StateParts p = state_parts(lyap, sys, State{smp.t, smp.x, smp.v});
        ref = std::max(ref, std::sqrt(std::max(0.0, 2.0 * p.velocity_part)));
    }

    double id_violation = 0.0, id_location = anchor.T;
    double gb_violation = -kInf, gb_location = anchor.T;
    long checked = 0;

    const double r = to_double(lyap.r());
    const bool power_form = lyap.gamma().log_coeff != 0;
    const double alpha = power_form ? 1.0 : to_double(lyap.alpha());
    const double sqrt2E = anchor.E_T > 0.0 ? std::sqrt(2.0 * anchor.E_T) : 0.0;
    const double log_yT = anchor.y_norm_T > 0.0 ? std::log(anchor.y_norm_T) : -kInf;

    std::vector<double> yp(n), ym(n);
    for (const auto& smp : traj.samples()) {
        if (smp.t < anchor.T) continue;
        ++checked;
        const double t = smp.t;
        const StateParts p = state_parts(lyap, sys, State{smp.t, smp.x, smp.v});
        const double gamma_t = lyap.gamma().eval(t);

        // (a) transform identity, checked on the gamma(t)-shifted transform so
        // all quantities stay at trajectory scale:
        //   d/ds [ e^{gamma(s)-gamma(t)} w(s) ] at s=t  ==  v + h(t) w
        // The step is capped well below the oscillation period of the flows.
        const double delta0 = std::min(
            {0.005 * t, 0.02, 0.5 * (t - traj.t0()), 0.5 * (traj.t_end() - t)});
        if (delta0 > 0.0 && ref > 0.0) {
            double closed_norm_sq = 0.0;
            std::vector<double> closed(n);
            for (int i = 0; i < n; ++i) {
                closed[i] = smp.v[i] + p.h_t * (smp.x[i] - obj.x_star()[i]);
                closed_norm_sq += closed[i] * closed[i];
            }
            const double closed_norm = std::sqrt(closed_norm_sq);
            if (closed_norm > 1e-9 * ref) {
                auto fd_once = [&](double delta, std::vector<double>& out) {
                    const State sp = traj.at(t + delta);
                    const State sm = traj.at(t - delta);
                    const double wp = std::exp(lyap.gamma().eval(t + delta) - gamma_t);
                    const double wm = std::exp(lyap.gamma().eval(t - delta) - gamma_t);
                    for (int i = 0; i < n; ++i) {
                        const double yp_i = wp * (sp.x[i] - obj.x_star()[i]);
                        const double ym_i = wm * (sm.x[i] - obj.x_star()[i]);
                        out[i] = (yp_i - ym_i) / (2.0 * delta);
                    }
                };
                fd_once(delta0, yp);
                fd_once(0.5 * delta0, ym);
                double err_sq = 0.0;
                for (int i = 0; i < n; ++i) {
                    const double rich = (4.0 * ym[i] - yp[i]) / 3.0;
                    const double e = rich - closed[i];
                    err_sq += e * e;
                }
                const double rel = std::sqrt(err_sq) / closed_norm;
                if (rel > id_violation) { id_violation = rel; id_location = t; }
            }
        }

        // (b) |w(t)| <= P(t) + Q(t), in log space
        double log_P, log_Q;
        if (power_form) {
            log_P = (sqrt2E > 0.0 ? std::log(3.0 * sqrt2E / (r + 3.0)) : -kInf) +
                    (1.0 - r / 3.0) * std::log(t);
            log_Q = log_yT - (2.0 * r / 3.0) * std::log(t);
        } else {
            log_P = (sqrt2E > 0.0 ? std::log(3.0 * sqrt2E / r) : -kInf) +
                    alpha * std::log(t) - 0.5 * gamma_t;
            log_Q = log_yT - gamma_t;
        }
        const double rhs = logsumexp2(log_P, log_Q);
        if (p.w_norm > 0.0) {
            const double v = rhs == -kInf ? kInf : std::log(p.w_norm) - rhs;
            if (v > gb_violation) { gb_violation = v; gb_location = t; }
        }
    }

    CertReport identity = make_report("y-transform-identity", checked, id_violation,
                                      id_location, opts.y_identity_tol);
    CertReport growth = make_report("y-growth-bound", checked, std::max(gb_violation, 0.0),
                                    gb_location, opts.y_bound_tol);
    return {identity, growth};
}

DerivMatchReport validate_derivative_match(const Trajectory& traj, const LyapunovSpec& lyap,
                                           double rel_tol) {
    const SystemSpec& sys = traj.system();
    DerivMatchReport rep;
    long within = 0;
    for (const auto& smp : traj.samples()) {
        ++rep.total_samples;
        const double t = smp.t;
        const double delta0 = std::min(
            {0.005 * t, 0.02, 0.5 * (t - traj.t0()), 0.5 * (traj.t_end() - t)});
        if (delta0 <= 0.0) continue;
        const StateParts p = state_parts(lyap, sys, State{smp.t, smp.x, smp.v});
        if (p.interior <= 0.0) continue;
        const DerivValue d = analytic_dEdt(lyap, sys, State{smp.t, smp.x, smp.v});
        const double slope_an = d.bracket / p.interior;

        auto logE_at = [&](double tq) {
            const State s = traj.at(tq);
            const StateParts q = state_parts(lyap, sys, s);
            if (q.interior <= 0.0) return -kInf;
            return lyap.gamma().eval(tq) + std::log(q.interior);
        };
        const double f1p = logE_at(t + delta0), f1m = logE_at(t - delta0);
        const double f2p = logE_at(t + 0.5 * delta0), f2m = logE_at(t - 0.5 * delta0);
        if (f1p == -kInf || f1m == -kInf || f2p == -kInf || f2m == -kInf) continue;
        const double fd1 = (f1p - f1m) / (2.0 * delta0);
        const double fd2 = (f2p - f2m) / delta0;
        const double slope_fd = (4.0 * fd2 - fd1) / 3.0;

        // noise floor: interpolated logE carries ~1e-9 absolute noise
        const double floor = 200.0 * 1e-9 / delta0;
        if (std::fabs(slope_an) < floor) continue;
        ++rep.included;
        const double rel = std::fabs(slope_fd - slope_an) / std::fabs(slope_an);
        if (rel > rep.max_rel_err) {
            rep.max_rel_err = rel;
            rep.max_rel_err_location = t;
        }
        if (rel <= rel_tol) ++within;
    }
    rep.frac_within_tol = rep.included > 0 ? static_cast<double>(within) / rep.included : 1.0;
    return rep;
}

std::string to_json(const LyapunovSpec& lyap) {
    std::ostringstream os;
    auto ps = [&](const PowerSum& p) {
        os << "[";
        bool first = true;
        for (const auto& t : p.terms()) {
            if (!first) os << ",";
            first = false;
            os << "{\"coeff\":[\"" << numerator(t.coeff).str() << "\",\""
               << denominator(t.coeff).str() << "\"],\"exponent\":[\""
               << numerator(t.exponent).str() << "\",\"" << denominator(t.exponent).str()
               << "\"]}";
        }
        os << "]";
    };
    const char* prov = lyap.provenance() == LyapunovSpec::Provenance::PaperNag
                           ? "paper-nag"
                           : (lyap.provenance() == LyapunovSpec::Provenance::PaperAlpha
                                  ? "paper-alpha"
                                  : "discovered");
    os << "{\"provenance\":\"" << prov << "\",\"gamma_prime\":";
    ps(lyap.gamma_prime());
    os << ",\"g\":";
    ps(lyap.g());
    os << ",\"h\":";
    ps(lyap.h());
    os << ",\"threshold\":{\"base\":[\"" << numerator(lyap.threshold().base).str() << "\",\""
       << denominator(lyap.threshold().base).str() << "\"],\"root_index\":[\""
       << numerator(lyap.threshold().index).str() << "\",\""
       << denominator(lyap.threshold().index).str() << "\"]}}";
    return os.str();
}

}  // namespace lyapflow
