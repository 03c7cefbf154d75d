#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lyapflow/powersum.hpp"

namespace lyapflow {

// Exact radical value base^(1/index) with rational base and root index.
struct Radical {
    Rational base;
    Rational index;  // positive; index 1 means the value is base itself

    double value() const;
    std::string str() const;
    bool operator==(const Radical& o) const { return base == o.base && index == o.index; }
};

// Coefficient functions of d/dt E after substituting the flow
// x'' = -d(t) x' - grad f(x) into the ansatz
//
//   E = e^gamma (f - f* - g(t)|x-x*|^2) + 1/2 e^gamma |x' + h(t)(x-x*)|^2,
//
// expressed in the basis
//   f - f*, <grad f, x-x*>, <grad f, x'>, |x-x*|^2, <x-x*, x'>, |x'|^2,
// all after factoring out e^gamma(t).
struct DerivativeCollection {
    PowerSum f_gap;       // coefficient of f - f*
    PowerSum grad_dot_w;  // coefficient of <grad f, x - x*>
    PowerSum grad_dot_v;  // coefficient of <grad f, x'> (zero by construction)
    PowerSum w_sq;        // coefficient of |x - x*|^2
    PowerSum w_dot_v;     // coefficient of <x - x*, x'>
    PowerSum v_sq;        // coefficient of |x'|^2
};

// Product/chain rule applied mechanically to the ansatz along the flow.
DerivativeCollection derive_collection(const PowerSum& gamma_prime, const PowerSum& g,
                                       const PowerSum& h, const PowerSum& damping);

// One Lyapunov candidate produced by the search.
struct SearchCandidate {
    PowerSum gamma_prime;
    PowerSum g;
    PowerSum h;
    Radical threshold;           // T with d/dt E <= 0 certified for t >= T
    PowerSum absorbed;           // merged |x-x*|^2 coefficient after mu-absorption
    std::string certificate;     // human-readable account of the exact sign check
};

// Enumerates ansatz candidates over the exponent grid for the damping
// d(t) = rho t^-beta, keeps those whose derivative collection cancels the
// velocity cross terms exactly and groups into the strong-convexity form,
// and extracts the exact threshold T. Exact rational arithmetic throughout.
std::vector<SearchCandidate> search(const PowerSum& damping,
                                    const std::vector<Rational>& exponent_grid,
                                    const Rational& mu);

// Rational function P(r)/Q(r) with exact coefficients (Q(0)-normalized).
struct RationalFn {
    std::vector<Rational> num;  // ascending powers of r
    std::vector<Rational> den;  // ascending powers; den[0] == 1

    Rational eval(const Rational& r) const;
    std::string str() const;
    bool is_polynomial() const { return den.size() == 1; }
};

// Recovers a coefficient's dependence on r from numeric instances by rational
// interpolation over increasing degree pairs; the lowest-complexity candidate
// that reproduces every instance exactly wins. Points beyond those needed for
// the solve act as exact hold-out validation.
struct ReconstructionResult {
    RationalFn fn;
    int points_used_for_solve = 0;
    int points_held_out = 0;
};

ReconstructionResult reconstruct_rational_function(
    const std::vector<std::pair<Rational, Rational>>& data, int max_total_degree = 4);

// Per-exponent reconstruction across full candidates solved at several r
// values. All instances must share the damping exponent structure; an
// exponent missing from one instance counts as a zero coefficient there.
struct CoefficientDependence {
    Rational exponent;
    ReconstructionResult coeff;
};

struct CandidateDependence {
    std::vector<CoefficientDependence> gamma_prime;
    std::vector<CoefficientDependence> g;
    std::vector<CoefficientDependence> h;
};

CandidateDependence reconstruct_parameter_dependence(
    const std::vector<std::pair<Rational, SearchCandidate>>& instances);

std::string to_json(const SearchCandidate& c);
std::string to_json(const std::vector<SearchCandidate>& cs);

}  // namespace lyapflow
