#pragma once

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lyapflow/dynamics.hpp"

namespace lyapflow {

struct Tolerances {
    double rel = 1e-10;
    double abs = 1e-12;
};

struct TrajectorySample {
    double t = 0.0;
    std::vector<double> x;
    std::vector<double> v;
    double err_est = 0.0;  // absolute local-error estimate of the covering step
};

// Thrown when the step size underflows (stiffness or a singularity); carries
// the last state the integrator could certify.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(std::string msg, double last_t, std::vector<double> last_x,
                     std::vector<double> last_v)
        : std::runtime_error(std::move(msg)),
          last_t(last_t),
          last_x(std::move(last_x)),
          last_v(std::move(last_v)) {}
    double last_t;
    std::vector<double> last_x, last_v;
};

// One accepted step with its dense-output polynomial (4th-order continuous
// extension of the Dormand-Prince 5(4) pair).
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    std::vector<double> rc1, rc2, rc3, rc4, rc5;
    std::vector<double> y_end;
    double err_abs = 0.0;   // weighted absolute error estimate
    double err_scale = 0.0; // tolerance scale the step was accepted against
};

// Dense, reproducible solution samples of one flow. Samples sit exactly on
// the requested grid; the dense steps are retained so the trajectory can be
// resampled later without re-integration.
class Trajectory {
public:
    Trajectory(SystemSpec system, double t0, double t_end, Tolerances tol,
               std::shared_ptr<const std::vector<DenseStep>> steps,
               std::vector<TrajectorySample> samples);

    // Wraps externally produced samples (synthetic data, CSV input). The
    // result supports sample-based operations but cannot be resampled.
    static Trajectory from_samples(SystemSpec system, Tolerances tol,
                                   std::vector<TrajectorySample> samples);

    const SystemSpec& system() const { return system_; }
    double t0() const { return t0_; }
    double t_end() const { return t_end_; }
    const Tolerances& tol() const { return tol_; }
    const std::vector<TrajectorySample>& samples() const { return samples_; }

    // Dense-output interpolation at a new grid within [t0, t_end].
    Trajectory resample(std::span<const double> grid) const;

    // Single dense-output state at time t.
    State at(double t) const;

    // columns: t, x[0..n), v[0..n), err
    std::string to_csv() const;

private:
    void interpolate(double t, std::vector<double>& x, std::vector<double>& v,
                     double& err) const;

    SystemSpec system_;
    double t0_, t_end_;
    Tolerances tol_;
    std::shared_ptr<const std::vector<DenseStep>> steps_;
    std::vector<TrajectorySample> samples_;
};

// Integrates the system from (t0, x0, v0) to t_end, sampling exactly at the
// given strictly increasing grid (grid may be empty). Deterministic.
Trajectory integrate(const SystemSpec& sys, double t0, std::span<const double> x0,
                     std::span<const double> v0, double t_end, Tolerances tol,
                     std::span<const double> sample_grid);

// Low-level entry point on a raw first-order field dy/dt = rhs(t, y); used by
// the SystemSpec wrapper and by oracle tests that integrate custom fields.
using RhsFn = std::function<void(double, const double*, double*)>;

struct RawSolution {
    std::shared_ptr<const std::vector<DenseStep>> steps;
    std::vector<double> y_end;
    long n_accepted = 0;
    long n_rejected = 0;
};

RawSolution integrate_raw(const RhsFn& rhs, int dim, double t0, std::span<const double> y0,
                          double t_end, Tolerances tol);

// Evaluates the dense polynomial of the step covering t (binary search).
void dense_eval(const std::vector<DenseStep>& steps, double t, std::span<double> y_out);

}  // namespace lyapflow
