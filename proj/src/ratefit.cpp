#include "lyapflow/ratefit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace lyapflow {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

RateFit fit_series(std::vector<std::pair<double, double>> series, const FitModel& model,
                   const FitWindow& window, const FitOptions& opts) {
    if (series.empty()) throw std::invalid_argument("fit: empty series");
    const double gap0 = series.front().second;
    const double floor = opts.noise_floor_rel * std::fabs(gap0);

    std::vector<std::pair<double, double>> pts;
    for (const auto& [t, gap] : series) {
        if (t < window.t_lo || t > window.t_hi) continue;
        if (!(gap > floor)) continue;
        pts.emplace_back(t, gap);
    }
    if (opts.envelope) {
        for (std::size_t i = pts.size(); i-- > 1;)
            pts[i - 1].second = std::max(pts[i - 1].second, pts[i].second);
    }
    if (pts.size() < 20)
        throw std::invalid_argument("fit: fewer than 20 usable samples in the window");

    double su = 0, sy = 0, suu = 0, suy = 0;
    const auto n = static_cast<double>(pts.size());
    std::vector<std::pair<double, double>> uy;
    uy.reserve(pts.size());
    for (const auto& [t, gap] : pts) {
        const double u = model.kind == FitModel::Kind::PowerLaw
                             ? std::log(t)
                             : std::pow(t, 1.0 - model.alpha);
        const double y = std::log(gap);
        uy.emplace_back(u, y);
        su += u;
        sy += y;
        suu += u * u;
        suy += u * y;
    }
    const double det = n * suu - su * su;
    if (det == 0.0) throw std::invalid_argument("fit: degenerate regressor");
    RateFit f;
    f.model = model;
    f.window = window;
    f.samples_used = static_cast<long>(pts.size());
    f.slope = (n * suy - su * sy) / det;
    f.intercept = (sy - f.slope * su) / n;
    double rss = 0.0;
    for (const auto& [u, y] : uy) {
        const double e = y - (f.slope * u + f.intercept);
        rss += e * e;
    }
    f.residual = std::sqrt(rss / n);
    return f;
}

RateFit fit(const Trajectory& traj, const FitModel& model, const FitWindow& window,
            const FitOptions& opts) {
    const auto& obj = traj.system().objective();
    std::vector<std::pair<double, double>> series;
    series.reserve(traj.samples().size());
    for (const auto& s : traj.samples())
        series.emplace_back(s.t, obj.eval(s.x) - obj.f_star());
    return fit_series(std::move(series), model, window, opts);
}

RateComparison compare_rates(double r, std::optional<double> alpha, double epsilon) {
    if (!(r > 0)) throw std::invalid_argument("compare_rates: r must be positive");
    RateComparison c;
    c.r = r;
    c.alpha = alpha;
    c.epsilon = epsilon;
    if (!alpha) {
        c.new_exponent = 2.0 * r / 3.0;
        c.prior_exponent = (r + 1.0) / 2.0;
        c.strict_improvement = c.new_exponent > c.prior_exponent;  // exactly r > 3
        c.equality = c.new_exponent == c.prior_exponent;
        c.ordering_ok = c.strict_improvement;
        return c;
    }
    if (!(*alpha > 0.0 && *alpha < 1.0))
        throw std::invalid_argument("compare_rates: alpha must lie in (0,1)");
    const double scale = r / (1.0 - *alpha);
    c.new_exponent = (2.0 / 3.0) * scale;
    c.prior_exponent = 0.5 * scale;
    c.prior_tt_exponent = (2.0 / 3.0 - epsilon) * scale;
    c.strict_improvement =
        c.new_exponent > c.prior_exponent && c.new_exponent > *c.prior_tt_exponent;
    c.equality = false;
    c.ordering_ok = c.strict_improvement && *c.prior_tt_exponent > c.prior_exponent;
    return c;
}

std::string to_json(const RateFit& f) {
    std::ostringstream os;
    os << "{\"model\":\""
       << (f.model.kind == FitModel::Kind::PowerLaw ? "power-law" : "stretched-exponential")
       << "\"";
    if (f.model.kind == FitModel::Kind::StretchedExponential)
        os << ",\"alpha\":" << fmt(f.model.alpha);
    os << ",\"slope\":" << fmt(f.slope) << ",\"intercept\":" << fmt(f.intercept)
       << ",\"window\":[" << fmt(f.window.t_lo) << "," << fmt(f.window.t_hi) << "]"
       << ",\"residual\":" << fmt(f.residual) << ",\"samples\":" << f.samples_used << "}";
    return os.str();
}

std::string to_json(const RateComparison& c) {
    std::ostringstream os;
    os << "{\"r\":" << fmt(c.r);
    if (c.alpha) os << ",\"alpha\":" << fmt(*c.alpha) << ",\"epsilon\":" << fmt(c.epsilon);
    os << ",\"new_exponent\":" << fmt(c.new_exponent)
       << ",\"prior_exponent\":" << fmt(c.prior_exponent);
    if (c.prior_tt_exponent) os << ",\"prior_tt_exponent\":" << fmt(*c.prior_tt_exponent);
    os << ",\"strict_improvement\":" << (c.strict_improvement ? "true" : "false")
       << ",\"equality\":" << (c.equality ? "true" : "false")
       << ",\"ordering_ok\":" << (c.ordering_ok ? "true" : "false") << "}";
    return os.str();
}

std::string to_csv(const RateComparison& c) {
    std::ostringstream os;
    os << "r,alpha,epsilon,new_exponent,prior_exponent,prior_tt_exponent,strict_improvement,"
          "equality,ordering_ok\n";
    os << fmt(c.r) << ',' << (c.alpha ? fmt(*c.alpha) : "") << ',' << fmt(c.epsilon) << ','
       << fmt(c.new_exponent) << ',' << fmt(c.prior_exponent) << ','
       << (c.prior_tt_exponent ? fmt(*c.prior_tt_exponent) : "") << ','
       << (c.strict_improvement ? "true" : "false") << ',' << (c.equality ? "true" : "false")
       << ',' << (c.ordering_ok ? "true" : "false") << '\n';
    return os.str();
}

}  // namespace lyapflow
