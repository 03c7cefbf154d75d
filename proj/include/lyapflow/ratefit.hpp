#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lyapflow/integrator.hpp"

namespace lyapflow {

// Regression model for the objective gap:
//   power-law:              log(f - f*)  against  log t
//   stretched-exponential:  log(f - f*)  against  t^(1 - alpha)
struct FitModel {
    enum class Kind { PowerLaw, StretchedExponential };
    Kind kind = Kind::PowerLaw;
    double alpha = 0.0;  // stretched-exponential regressor exponent parameter
};

struct FitWindow {
    double t_lo = 0.0;
    double t_hi = 0.0;
};

struct RateFit {
    FitModel model;
    double slope = 0.0;
    double intercept = 0.0;
    FitWindow window;
    double residual = 0.0;  // RMS residual in the transformed coordinates
    long samples_used = 0;
};

struct FitOptions {
    // Fraction of the initial gap below which samples count as float noise.
    double noise_floor_rel = 1e-13;
    // Regress on the decaying upper envelope (suffix running maximum) instead
    // of the raw gap; log-fits on raw oscillations are meaningless.
    bool envelope = false;
};

// Least-squares line in the transformed coordinates over the window.
// Fewer than 20 usable samples is an input error.
RateFit fit(const Trajectory& traj, const FitModel& model, const FitWindow& window,
            const FitOptions& opts = {});

// Same on a bare (t, gap) series (synthetic data, CSV input).
RateFit fit_series(std::vector<std::pair<double, double>> series, const FitModel& model,
                   const FitWindow& window, const FitOptions& opts = {});

// Exponent comparison against the rates this analysis improves on.
// nag (no alpha): 2r/3 versus the prior (r+1)/2; strictly better iff r > 3.
// alpha: (2/3) r/(1-a) versus prior rates (1/2) r/(1-a) and (2/3 - eps) r/(1-a).
struct RateComparison {
    double r = 0.0;
    std::optional<double> alpha;
    double epsilon = 0.01;
    double new_exponent = 0.0;
    double prior_exponent = 0.0;               // (r+1)/2 or (1/2) r/(1-a)
    std::optional<double> prior_tt_exponent;   // (2/3 - eps) r/(1-a), alpha only
    bool strict_improvement = false;           // new beats every prior strictly
    bool equality = false;                     // new equals the prior exactly
    bool ordering_ok = false;                  // alpha: new > tt > prior (eps < 1/6)
};

RateComparison compare_rates(double r, std::optional<double> alpha, double epsilon = 0.01);

std::string to_json(const RateFit& f);
std::string to_json(const RateComparison& c);
std::string to_csv(const RateComparison& c);

}  // namespace lyapflow
