#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lyapflow/report.hpp"

namespace lyapflow {

// Strongly convex test objective with known minimizer, minimum value and
// strong-convexity modulus mu.
//
// quadratic:             f(x) = 1/2 (x - x*)^T D (x - x*) + f*,  D diagonal.
// regularized-logsumexp: f(x) = log(sum_i exp(a_i . x)) + mu/2 |x|^2 with
//                        fixed seeded rows a_i; x*, f* found once by a damped
//                        Newton pre-solve at construction.
class ObjectiveSpec {
public:
    enum class Kind { Quadratic, RegularizedLogSumExp };

    // mu is declared, not derived: check_strong_convexity must be able to
    // catch a declared mu that the spectrum does not support.
    static ObjectiveSpec quadratic(std::vector<double> spectrum, std::vector<double> x_star,
                                   double f_star, double mu);
    static ObjectiveSpec regularized_logsumexp(int dimension, double mu, int num_rows,
                                               std::uint64_t row_seed);

    Kind kind() const { return kind_; }
    int dimension() const { return dimension_; }
    double mu() const { return mu_; }
    const std::vector<double>& x_star() const { return x_star_; }
    double f_star() const { return f_star_; }
    const std::vector<double>& spectrum() const { return spectrum_; }

    double eval(std::span<const double> x) const;
    std::vector<double> grad(std::span<const double> x) const;
    void grad_into(std::span<const double> x, std::span<double> out) const;

    // Samples n_pairs (x, y) from a reproducible stream and reports the
    // minimum of f(y) - f(x) - <grad f(x), y-x> - mu/2 |y-x|^2 over pairs.
    // Pass iff that minimum is >= -1e-10.
    CertReport check_strong_convexity(int n_pairs, std::uint64_t seed) const;

private:
    ObjectiveSpec() = default;
    void check_dim(std::span<const double> x) const;

    Kind kind_ = Kind::Quadratic;
    int dimension_ = 0;
    double mu_ = 0.0;
    std::vector<double> x_star_;
    double f_star_ = 0.0;
    std::vector<double> spectrum_;          // quadratic only
    std::vector<double> rows_;              // logsumexp, row-major num_rows x dim
    int num_rows_ = 0;
    std::uint64_t row_seed_ = 0;
};

// Deterministic scalar streams used for seeded sampling. Hand-rolled
// transforms (not std::*_distribution) so the stream is fixed by the seed
// alone, independent of the standard library.
class SampleStream {
public:
    explicit SampleStream(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    double uniform();                      // [0, 1)
    double uniform(double lo, double hi);
    double normal();                       // Box-Muller

private:
    std::uint64_t next_bits();
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace lyapflow
