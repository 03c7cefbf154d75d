#include "lyapflow/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace lyapflow {

namespace {

// Dormand-Prince 5(4) tableau (Hairer-Norsett-Wanner DOPRI5).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// b - bhat, applied to k1..k7
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output weights
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr long kMaxSteps = 40'000'000;

double linf(std::span<const double> y) {
    double m = 0.0;
    for (double v : y) m = std::max(m, std::fabs(v));
    return m;
}

}  // namespace

RawSolution integrate_raw(const RhsFn& rhs, int dim, double t0, std::span<const double> y0,
                          double t_end, Tolerances tol) {
    if (!(tol.rel > 0.0) || !(tol.abs > 0.0))
        throw std::invalid_argument("integrate: tolerances must be a positive pair");
    if (!(t_end > t0)) throw std::invalid_argument("integrate: need t_end > t0");
    const int m = dim;

    std::vector<double> y(y0.begin(), y0.end()), ynew(m), ytmp(m);
    std::vector<double> k1(m), k2(m), k3(m), k4(m), k5(m), k6(m), k7(m);

    auto steps = std::make_shared<std::vector<DenseStep>>();
    double t = t0;
    rhs(t, y.data(), k1.data());

    // deterministic initial step size from the local derivative scale
    double h;
    {
        const double sk = tol.abs + tol.rel * linf(y);
        const double d0 = linf(y) / sk, dd1 = linf(k1) / sk;
        double h0 = (dd1 > 1e-10) ? 0.01 * d0 / dd1 : 1e-6;
        h0 = std::min(h0, t_end - t0);
        if (h0 <= 0.0) h0 = 1e-6;
        for (int i = 0; i < m; ++i) ytmp[i] = y[i] + h0 * k1[i];
        rhs(t + h0, ytmp.data(), k2.data());
        double d2 = 0.0;
        for (int i = 0; i < m; ++i) d2 = std::max(d2, std::fabs(k2[i] - k1[i]));
        d2 /= sk * h0;
        const double dmax = std::max(dd1, d2);
        double h1 = (dmax > 1e-15) ? std::pow(0.01 / dmax, 0.2) : std::max(1e-6, h0 * 1e-3);
        h = std::min({100.0 * h0, h1, t_end - t0});
    }

    long n_acc = 0, n_rej = 0;
    bool rejected_last = false;
    for (long step_count = 0; t < t_end; ++step_count) {
        if (step_count > kMaxSteps)
            throw IntegrationError("integrate: step limit exceeded", t, y, {});
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(t), 1.0))
            throw IntegrationError("integrate: step size underflow at t=" + std::to_string(t),
                                   t, y, {});
        if (t + h > t_end) h = t_end - t;

        for (int i = 0; i < m; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, ytmp.data(), k2.data());
        for (int i = 0; i < m; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp.data(), k3.data());
        for (int i = 0; i < m; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp.data(), k4.data());
        for (int i = 0; i < m; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, ytmp.data(), k5.data());
        for (int i = 0; i < m; ++i)
            ytmp[i] = y[i] +
                      h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t + h, ytmp.data(), k6.data());
        for (int i = 0; i < m; ++i)
            ynew[i] = y[i] +
                      h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        rhs(t + h, ynew.data(), k7.data());

        const double sk = tol.abs + tol.rel * std::max(linf(y), linf(ynew));
        double err_sq = 0.0;
        for (int i = 0; i < m; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                  e6 * k6[i] + e7 * k7[i]);
            err_sq += (e / sk) * (e / sk);
        }
        const double err = std::sqrt(err_sq / m);

        if (err <= 1.0) {
            DenseStep ds;
            ds.t0 = t;
            ds.h = h;
            ds.rc1.resize(m);
            ds.rc2.resize(m);
            ds.rc3.resize(m);
            ds.rc4.resize(m);
            ds.rc5.resize(m);
            for (int i = 0; i < m; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                ds.rc1[i] = y[i];
                ds.rc2[i] = ydiff;
                ds.rc3[i] = bspl;
                ds.rc4[i] = ydiff - h * k7[i] - bspl;
                ds.rc5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                 d6 * k6[i] + d7 * k7[i]);
            }
            ds.y_end = ynew;
            ds.err_abs = err * sk;
            ds.err_scale = sk;
            steps->push_back(std::move(ds));

            t += h;
            std::swap(y, ynew);
            std::swap(k1, k7);  // FSAL
            double fac = 0.9 * std::pow(std::max(err, 1e-16), -0.2);
            fac = std::clamp(fac, 0.2, rejected_last ? 1.0 : 10.0);
            h *= fac;
            rejected_last = false;
            ++n_acc;
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
            rejected_last = true;
            ++n_rej;
        }
    }

    RawSolution sol;
    sol.steps = std::move(steps);
    sol.y_end = std::move(y);
    sol.n_accepted = n_acc;
    sol.n_rejected = n_rej;
    return sol;
}

void dense_eval(const std::vector<DenseStep>& steps, double t, std::span<double> y_out) {
    if (steps.empty()) throw std::invalid_argument("dense_eval: no steps");
    auto it = std::upper_bound(steps.begin(), steps.end(), t,
                               [](double tv, const DenseStep& s) { return tv < s.t0; });
    if (it != steps.begin()) --it;
    const DenseStep& s = *it;
    if (t == s.t0) {
        std::copy(s.rc1.begin(), s.rc1.end(), y_out.begin());
        return;
    }
    if (t == s.t0 + s.h) {
        std::copy(s.y_end.begin(), s.y_end.end(), y_out.begin());
        return;
    }
    const double th = (t - s.t0) / s.h;
    const double th1 = 1.0 - th;
    for (std::size_t i = 0; i < y_out.size(); ++i) {
        y_out[i] = s.rc1[i] +
                   th * (s.rc2[i] + th1 * (s.rc3[i] + th * (s.rc4[i] + th1 * s.rc5[i])));
    }
}

namespace {

RhsFn make_rhs(const SystemSpec& sys) {
    const int n = sys.objective().dimension();
    if (sys.kind() == SystemSpec::Kind::GradientFlow) {
        return [&sys, n](double, const double* y, double* dy) {
            sys.objective().grad_into(std::span<const double>(y, n), std::span<double>(dy, n));
            for (int i = 0; i < n; ++i) dy[i] = -dy[i];
        };
    }
    return [&sys, n](double t, const double* y, double* dy) {
        const double d = sys.damping(t);
        sys.objective().grad_into(std::span<const double>(y, n),
                                  std::span<double>(dy + n, n));
        for (int i = 0; i < n; ++i) {
            dy[i] = y[n + i];
            dy[n + i] = -d * y[n + i] - dy[n + i];
        }
    };
}

void validate_grid(std::span<const double> grid, double t0, double t_end) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < t0 || grid[i] > t_end)
            throw std::invalid_argument("sample grid leaves the integration span");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw std::invalid_argument("sample grid must be strictly increasing");
    }
}

}  // namespace

Trajectory::Trajectory(SystemSpec system, double t0, double t_end, Tolerances tol,
                       std::shared_ptr<const std::vector<DenseStep>> steps,
                       std::vector<TrajectorySample> samples)
    : system_(std::move(system)),
      t0_(t0),
      t_end_(t_end),
      tol_(tol),
      steps_(std::move(steps)),
      samples_(std::move(samples)) {}

Trajectory Trajectory::from_samples(SystemSpec system, Tolerances tol,
                                    std::vector<TrajectorySample> samples) {
    if (samples.empty())
        throw std::invalid_argument("Trajectory::from_samples: need at least one sample");
    const double t0 = samples.front().t;
    const double t_end = samples.back().t;
    return Trajectory(std::move(system), t0, t_end, tol,
                      std::make_shared<std::vector<DenseStep>>(), std::move(samples));
}

void Trajectory::interpolate(double t, std::vector<double>& x, std::vector<double>& v,
                             double& err) const {
    const int n = system_.objective().dimension();
    const bool first_order = system_.kind() == SystemSpec::Kind::GradientFlow;
    const int m = first_order ? n : 2 * n;
    std::vector<double> y(m);
    dense_eval(*steps_, t, y);
    x.assign(y.begin(), y.begin() + n);
    if (first_order) {
        v = system_.objective().grad(x);
        for (auto& c : v) c = -c;
    } else {
        v.assign(y.begin() + n, y.end());
    }
    auto it = std::upper_bound(steps_->begin(), steps_->end(), t,
                               [](double tv, const DenseStep& s) { return tv < s.t0; });
    if (it != steps_->begin()) --it;
    err = it->err_abs;
}

State Trajectory::at(double t) const {
    if (t < t0_ || t > t_end_)
        throw std::invalid_argument("Trajectory::at: t outside the integration span");
    State s;
    s.t = t;
    if (steps_->empty()) {
        // sample-only trajectory: exact grid hits are the best it can do
        for (const auto& smp : samples_) {
            if (smp.t == t) {
                s.x = smp.x;
                s.v = smp.v;
                return s;
            }
        }
        throw std::invalid_argument(
            "Trajectory::at: sample-only trajectory has no dense output at this t");
    }
    double err;
    interpolate(t, s.x, s.v, err);
    return s;
}

Trajectory Trajectory::resample(std::span<const double> grid) const {
    validate_grid(grid, t0_, t_end_);
    std::vector<TrajectorySample> samples;
    samples.reserve(grid.size());
    for (double t : grid) {
        TrajectorySample smp;
        smp.t = t;
        interpolate(t, smp.x, smp.v, smp.err_est);
        if (t == t0_) smp.err_est = 0.0;
        samples.push_back(std::move(smp));
    }
    return Trajectory(system_, t0_, t_end_, tol_, steps_, std::move(samples));
}

std::string Trajectory::to_csv() const {
    const int n = system_.objective().dimension();
    std::ostringstream os;
    os << "t";
    for (int i = 0; i < n; ++i) os << ",x" << i;
    for (int i = 0; i < n; ++i) os << ",v" << i;
    os << ",err\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    for (const auto& s : samples_) {
        put(s.t);
        for (double c : s.x) { os << ','; put(c); }
        for (double c : s.v) { os << ','; put(c); }
        os << ',';
        put(s.err_est);
        os << '\n';
    }
    return os.str();
}

Trajectory integrate(const SystemSpec& sys, double t0, std::span<const double> x0,
                     std::span<const double> v0, double t_end, Tolerances tol,
                     std::span<const double> sample_grid) {
    const int n = sys.objective().dimension();
    if (static_cast<int>(x0.size()) != n || static_cast<int>(v0.size()) != n)
        throw std::invalid_argument("integrate: initial state dimension mismatch");
    if (!(t0 > 0.0)) throw std::invalid_argument("integrate: need t0 > 0");
    if (!(t_end > t0)) throw std::invalid_argument("integrate: need t_end > t0");
    validate_grid(sample_grid, t0, t_end);

    const bool first_order = sys.kind() == SystemSpec::Kind::GradientFlow;
    const int m = first_order ? n : 2 * n;
    std::vector<double> y0(m);
    std::copy(x0.begin(), x0.end(), y0.begin());
    if (!first_order) std::copy(v0.begin(), v0.end(), y0.begin() + n);

    RawSolution sol;
    try {
        sol = integrate_raw(make_rhs(sys), m, t0, y0, t_end, tol);
    } catch (IntegrationError& e) {
        // re-shape the raw state into (x, v) before surfacing
        std::vector<double> lx(e.last_x.begin(), e.last_x.begin() + std::min<std::size_t>(n, e.last_x.size()));
        std::vector<double> lv;
        if (!first_order && e.last_x.size() == static_cast<std::size_t>(2 * n))
            lv.assign(e.last_x.begin() + n, e.last_x.end());
        throw IntegrationError(e.what(), e.last_t, std::move(lx), std::move(lv));
    }

    Trajectory bare(sys, t0, t_end, tol, sol.steps, {});
    std::vector<double> grid_vec(sample_grid.begin(), sample_grid.end());
    return bare.resample(grid_vec);
}

}  // namespace lyapflow
