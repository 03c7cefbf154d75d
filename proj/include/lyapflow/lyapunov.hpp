#pragma once

#include <optional>
#include <string>
#include <utility>

#include "lyapflow/integrator.hpp"
#include "lyapflow/report.hpp"
#include "lyapflow/symsearch.hpp"

namespace lyapflow {

// Lyapunov ansatz
//   E(t) = e^gamma(t) (f - f* - g(t)|x-x*|^2) + 1/2 e^gamma(t) |x' + h(t)(x-x*)|^2
// with exact power-sum coefficient functions. gamma is the antiderivative of
// gamma_prime with zero constant, so weights match t^(2r/3) for the r/t
// damping and exp((2/3) r/(1-alpha) t^(1-alpha)) for the r/t^alpha damping.
class LyapunovSpec {
public:
    enum class Provenance { PaperNag, PaperAlpha, Discovered };

    static LyapunovSpec paper_nag(const Rational& r, const Rational& mu);
    static LyapunovSpec paper_alpha(const Rational& r, const Rational& alpha,
                                    const Rational& mu);
    static LyapunovSpec discovered(const SearchCandidate& cand, const Rational& mu);

    // Mutated copies for sensitivity tests. The result is treated as a
    // generic (discovered) spec so its derivative is computed mechanically.
    LyapunovSpec with_scaled_g(const Rational& factor) const;
    LyapunovSpec with_scaled_gamma_prime(const Rational& factor) const;

    Provenance provenance() const { return provenance_; }
    const PowerSum& gamma_prime() const { return gamma_prime_; }
    const PowerSum& g() const { return g_; }
    const PowerSum& h() const { return h_; }
    const LogWeight& gamma() const { return gamma_; }
    const Radical& threshold() const { return threshold_; }
    const Rational& r() const { return r_; }
    const Rational& alpha() const { return alpha_; }
    const Rational& mu() const { return mu_; }

private:
    Provenance provenance_ = Provenance::Discovered;
    PowerSum gamma_prime_, g_, h_;
    LogWeight gamma_;
    Radical threshold_;
    Rational r_, alpha_, mu_;
};

// T = sqrt(2r^2/(9 mu)) for the r/t damping, (2r^2/(9 mu))^(1/(2 alpha)) for
// r/t^alpha, and the candidate's own exact radical for discovered specs.
double threshold_T(const LyapunovSpec& lyap);

struct LogEParts {
    double gamma = 0.0;          // gamma(t)
    double main_part = 0.0;      // f - f* - g(t)|w|^2
    double velocity_part = 0.0;  // 1/2 |v + h(t) w|^2
    double interior = 0.0;       // main_part + velocity_part
    std::optional<double> log_value;  // gamma + log(interior); empty iff interior <= 0
};

LogEParts eval_logE(const LyapunovSpec& lyap, const SystemSpec& sys, const State& s);

struct DerivValue {
    int sign = 0;          // sign of dE/dt
    double log_abs = 0.0;  // log |dE/dt| (log-space report)
    double bracket = 0.0;  // dE/dt * e^-gamma, the collected display value
};

// Closed-form dE/dt along the flow: the collected displays for the paper
// specs, the mechanically derived coefficient collection otherwise.
DerivValue analytic_dEdt(const LyapunovSpec& lyap, const SystemSpec& sys, const State& s);

struct CertifyOptions {
    double monotone_tol = 1e-8;   // log-space
    double main_tol = 1e-10;      // absolute on the main part
    double velocity_tol = 1e-8;   // log-space
    double rate_tol = 1e-6;       // log-space
    double y_identity_tol = 1e-5; // relative
    double y_bound_tol = 1e-8;    // log-space
    // Rate-bound policy where g(t) < 0. The closing display's expansion step
    // needs g >= 0; where g(t) < 0 the remainder g|w|^2 is simply <= 0, so the
    // valid bound drops it (default). Turning this off keeps the signed
    // remainder terms as written, which can under-cover near T.
    bool clamp_negative_g = true;
};

// d/dt E <= 0 for t >= T, checked two ways on every sample with t >= T:
// the analytic derivative in log-space (dE/dt / E) and consecutive logE
// differences. Reports the worse violation.
CertReport certify_monotone(const Trajectory& traj, const LyapunovSpec& lyap,
                            const CertifyOptions& opts = {});

// main_part >= -tol for t >= T.
CertReport certify_main_nonneg(const Trajectory& traj, const LyapunovSpec& lyap,
                               const CertifyOptions& opts = {});

// Informational probe of the main part below T (out of contract there).
struct MainProbe {
    long samples = 0;
    double max_violation = 0.0;
    double location = 0.0;
};
MainProbe probe_main_below_T(const Trajectory& traj, const LyapunovSpec& lyap);

// gamma(t) + log(velocity_part) <= log E(T) for t >= T, E(T) taken by dense
// resampling at exactly T.
CertReport certify_velocity_bound(const Trajectory& traj, const LyapunovSpec& lyap,
                                  const CertifyOptions& opts = {});

// log(f - f*) <= log Bound(t) with Bound = E(T) e^-gamma plus every
// remainder term of the closing display, re-anchored at T.
CertReport certify_rate_bound(const Trajectory& traj, const LyapunovSpec& lyap,
                              const CertifyOptions& opts = {});

// (a) transform identity: d/dt [weight w] = weight (v + h w), finite
// differences against the closed form; (b) |w(t)| <= P(t) + Q(t), the
// T-anchored growth display. Two reports, one per inequality.
std::pair<CertReport, CertReport> certify_y_growth(const Trajectory& traj,
                                                   const LyapunovSpec& lyap,
                                                   const CertifyOptions& opts = {});

// Finite-difference validation of the analytic derivative along the
// trajectory (Richardson-extrapolated central differences of logE).
struct DerivMatchReport {
    long total_samples = 0;
    long included = 0;  // above the finite-difference noise floor
    double frac_within_tol = 0.0;
    double max_rel_err = 0.0;
    double max_rel_err_location = 0.0;
};
DerivMatchReport validate_derivative_match(const Trajectory& traj, const LyapunovSpec& lyap,
                                           double rel_tol = 1e-5);

// Weighted-gap boundedness: sup over samples of log(f-f*) + gamma(t) against
// the rate-bound constant log(E(T) + remainder e^gamma). Shares the bound
// machinery with certify_rate_bound.
CertReport check_weighted_boundedness(const Trajectory& traj, const LyapunovSpec& lyap,
                                      const CertifyOptions& opts = {});

std::string to_json(const LyapunovSpec& lyap);

}  // namespace lyapflow
