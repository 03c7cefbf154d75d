#include "lyapflow/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lyapflow {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_sq(std::span<const double> a) { return dot(a, a); }

// Solves H s = -g in place for a symmetric positive definite H (Cholesky).
std::vector<double> solve_spd(std::vector<double> H, std::vector<double> g, int n) {
    for (int j = 0; j < n; ++j) {
        double d = H[j * n + j];
        for (int k = 0; k < j; ++k) d -= H[j * n + k] * H[j * n + k];
        if (d <= 0.0) throw std::runtime_error("solve_spd: matrix not positive definite");
        H[j * n + j] = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = H[i * n + j];
            for (int k = 0; k < j; ++k) s -= H[i * n + k] * H[j * n + k];
            H[i * n + j] = s / H[j * n + j];
        }
    }
    // forward then backward substitution on -g
    std::vector<double> y(n), s(n);
    for (int i = 0; i < n; ++i) {
        double v = -g[i];
        for (int k = 0; k < i; ++k) v -= H[i * n + k] * y[k];
        y[i] = v / H[i * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double v = y[i];
        for (int k = i + 1; k < n; ++k) v -= H[k * n + i] * s[k];
        s[i] = v / H[i * n + i];
    }
    return s;
}

}  // namespace

std::uint64_t SampleStream::next_bits() {
    // splitmix64
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double SampleStream::uniform() { return static_cast<double>(next_bits() >> 11) * 0x1.0p-53; }

double SampleStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double SampleStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return mag * std::cos(2.0 * M_PI * u2);
}

ObjectiveSpec ObjectiveSpec::quadratic(std::vector<double> spectrum, std::vector<double> x_star,
                                       double f_star, double mu) {
    if (spectrum.empty()) throw std::invalid_argument("quadratic: dimension must be positive");
    if (spectrum.size() != x_star.size())
        throw std::invalid_argument("quadratic: spectrum and x_star sizes differ");
    if (mu <= 0.0) throw std::invalid_argument("quadratic: mu must be positive");
    for (double d : spectrum)
        if (d <= 0.0) throw std::invalid_argument("quadratic: eigenvalues must be positive");
    ObjectiveSpec o;
    o.kind_ = Kind::Quadratic;
    o.dimension_ = static_cast<int>(spectrum.size());
    o.mu_ = mu;
    o.spectrum_ = std::move(spectrum);
    o.x_star_ = std::move(x_star);
    o.f_star_ = f_star;
    return o;
}

ObjectiveSpec ObjectiveSpec::regularized_logsumexp(int dimension, double mu, int num_rows,
                                                   std::uint64_t row_seed) {
    if (dimension < 1) throw std::invalid_argument("logsumexp: dimension must be positive");
    if (mu <= 0.0) throw std::invalid_argument("logsumexp: mu must be positive");
    if (num_rows < 1) throw std::invalid_argument("logsumexp: need at least one row");
    ObjectiveSpec o;
    o.kind_ = Kind::RegularizedLogSumExp;
    o.dimension_ = dimension;
    o.mu_ = mu;
    o.num_rows_ = num_rows;
    o.row_seed_ = row_seed;
    o.rows_.resize(static_cast<std::size_t>(num_rows) * dimension);
    SampleStream rng(row_seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dimension));
    for (auto& v : o.rows_) v = scale * rng.normal();

    // Damped Newton pre-solve for the minimizer; Hessian = mu I + softmax
    // covariance is positive definite, so plain Newton with backtracking
    // converges fast from the origin.
    const int n = dimension;
    std::vector<double> x(n, 0.0);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<double> g = o.grad(x);
        const double gnorm = std::sqrt(norm_sq(g));
        if (gnorm <= 1e-13) break;

        // Hessian of log-sum-exp part: A^T diag(p) A - (A^T p)(A^T p)^T
        std::vector<double> z(o.num_rows_);
        double zmax = -1e300;
        for (int i = 0; i < o.num_rows_; ++i) {
            z[i] = dot(std::span<const double>(o.rows_).subspan(i * n, n), x);
            zmax = std::max(zmax, z[i]);
        }
        double Z = 0.0;
        for (int i = 0; i < o.num_rows_; ++i) Z += std::exp(z[i] - zmax);
        std::vector<double> p(o.num_rows_);
        for (int i = 0; i < o.num_rows_; ++i) p[i] = std::exp(z[i] - zmax) / Z;
        std::vector<double> H(n * n, 0.0), ap(n, 0.0);
        for (int i = 0; i < o.num_rows_; ++i) {
            const double* a = &o.rows_[static_cast<std::size_t>(i) * n];
            for (int u = 0; u < n; ++u) {
                ap[u] += p[i] * a[u];
                for (int v = 0; v <= u; ++v) H[u * n + v] += p[i] * a[u] * a[v];
            }
        }
        for (int u = 0; u < n; ++u) {
            for (int v = 0; v <= u; ++v) {
                H[u * n + v] -= ap[u] * ap[v];
                H[v * n + u] = H[u * n + v];
            }
            H[u * n + u] += mu;
        }
        std::vector<double> step = solve_spd(std::move(H), g, n);
        double t = 1.0;
        const double f0 = o.eval(x);
        const double slope = dot(g, step);
        std::vector<double> trial(n);
        for (int ls = 0; ls < 60; ++ls) {
            for (int u = 0; u < n; ++u) trial[u] = x[u] + t * step[u];
            if (o.eval(trial) <= f0 + 1e-4 * t * slope) break;
            t *= 0.5;
        }
        x = trial;
    }
    o.x_star_ = x;
    o.f_star_ = o.eval(x);
    return o;
}

void ObjectiveSpec::check_dim(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dimension_)
        throw std::invalid_argument("objective: point has dimension " +
                                    std::to_string(x.size()) + ", expected " +
                                    std::to_string(dimension_));
}

double ObjectiveSpec::eval(std::span<const double> x) const {
    check_dim(x);
    if (kind_ == Kind::Quadratic) {
        double s = 0.0;
        for (int i = 0; i < dimension_; ++i) {
            const double w = x[i] - x_star_[i];
            s += spectrum_[i] * w * w;
        }
        return 0.5 * s + f_star_;
    }
    double zmax = -1e300;
    std::vector<double> z(num_rows_);
    for (int i = 0; i < num_rows_; ++i) {
        z[i] = dot(std::span<const double>(rows_).subspan(
                       static_cast<std::size_t>(i) * dimension_, dimension_),
                   x);
        zmax = std::max(zmax, z[i]);
    }
    double Z = 0.0;
    for (int i = 0; i < num_rows_; ++i) Z += std::exp(z[i] - zmax);
    return zmax + std::log(Z) + 0.5 * mu_ * norm_sq(x);
}

void ObjectiveSpec::grad_into(std::span<const double> x, std::span<double> out) const {
    check_dim(x);
    if (kind_ == Kind::Quadratic) {
        for (int i = 0; i < dimension_; ++i) out[i] = spectrum_[i] * (x[i] - x_star_[i]);
        return;
    }
    std::vector<double> z(num_rows_);
    double zmax = -1e300;
    for (int i = 0; i < num_rows_; ++i) {
        z[i] = dot(std::span<const double>(rows_).subspan(
                       static_cast<std::size_t>(i) * dimension_, dimension_),
                   x);
        zmax = std::max(zmax, z[i]);
    }
    double Z = 0.0;
    for (int i = 0; i < num_rows_; ++i) Z += std::exp(z[i] - zmax);
    for (int u = 0; u < dimension_; ++u) out[u] = mu_ * x[u];
    for (int i = 0; i < num_rows_; ++i) {
        const double p = std::exp(z[i] - zmax) / Z;
        const double* a = &rows_[static_cast<std::size_t>(i) * dimension_];
        for (int u = 0; u < dimension_; ++u) out[u] += p * a[u];
    }
}

std::vector<double> ObjectiveSpec::grad(std::span<const double> x) const {
    std::vector<double> g(dimension_);
    grad_into(x, g);
    return g;
}

CertReport ObjectiveSpec::check_strong_convexity(int n_pairs, std::uint64_t seed) const {
    if (n_pairs < 1) throw std::invalid_argument("check_strong_convexity: n_pairs must be >= 1");
    SampleStream rng(seed);
    double min_residual = 1e300;
    long worst_index = 0;
    std::vector<double> x(dimension_), y(dimension_), d(dimension_);
    for (int k = 0; k < n_pairs; ++k) {
        for (auto& v : x) v = rng.uniform(-2.0, 2.0);
        for (auto& v : y) v = rng.uniform(-2.0, 2.0);
        const auto g = grad(x);
        for (int i = 0; i < dimension_; ++i) d[i] = y[i] - x[i];
        const double residual =
            eval(y) - eval(x) - dot(g, d) - 0.5 * mu_ * norm_sq(d);
        if (residual < min_residual) {
            min_residual = residual;
            worst_index = k;
        }
    }
    // violation is the amount by which the strong-convexity lower bound fails
    return make_report("strong-convexity", n_pairs, std::max(0.0, -min_residual),
                       static_cast<double>(worst_index), 1e-10);
}

}  // namespace lyapflow
