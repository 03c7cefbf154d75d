#include "lyapflow/symsearch.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace lyapflow {

double Radical::value() const {
    if (index == 1) return to_double(base);
    return std::pow(to_double(base), 1.0 / to_double(index));
}

std::string Radical::str() const {
    if (index == 1) return to_string(base);
    return "(" + to_string(base) + ")^(1/" + to_string(index) + ")";
}

DerivativeCollection derive_collection(const PowerSum& gamma_prime, const PowerSum& g,
                                       const PowerSum& h, const PowerSum& damping) {
    const Rational half(1, 2);
    DerivativeCollection c;

    // d/dt of e^gamma (f - f* - g W):
    //   gamma' F + <grad f, x'> - (gamma' g + g') W - 2 g <w, x'>
    c.f_gap = gamma_prime;
    PowerSum grad_v_from_main = PowerSum::constant(Rational(1));
    c.w_sq = -(gamma_prime * g + g.derivative());
    c.w_dot_v = g.scaled(Rational(-2));

    // d/dt of 1/2 e^gamma |x' + h w|^2 with x'' = -d x' - grad f substituted:
    //   (gamma'/2 + h - d) V + (gamma' h + h' + h(h - d)) <w, x'>
    //   + (gamma' h^2 / 2 + h h') W - <grad f, x'> - h <grad f, w>
    c.v_sq = gamma_prime.scaled(half) + h - damping;
    c.w_dot_v = c.w_dot_v + gamma_prime * h + h.derivative() + h * h - h * damping;
    c.w_sq = c.w_sq + (gamma_prime * h * h).scaled(half) + h * h.derivative();
    PowerSum grad_v_from_velocity = PowerSum::constant(Rational(-1));
    c.grad_dot_w = -h;

    c.grad_dot_v = grad_v_from_main + grad_v_from_velocity;  // cancels identically
    return c;
}

namespace {

struct DampingTerm {
    Rational rho;   // coefficient
    Rational beta;  // d(t) = rho * t^-beta
};

DampingTerm single_term_damping(const PowerSum& damping) {
    if (damping.size() != 1)
        throw std::invalid_argument("search: damping must be a single power term");
    const auto& t = damping.terms().front();
    if (t.coeff <= 0) throw std::invalid_argument("search: damping coefficient must be positive");
    return {t.coeff, -t.exponent};
}

bool exponents_within(const PowerSum& p, const std::set<Rational>& grid) {
    for (const auto& t : p.terms())
        if (grid.find(t.exponent) == grid.end()) return false;
    return true;
}

// Growth order of e^gamma for ranking: (power of t in gamma, coefficient).
// A polynomial power beats the log term; among equal powers, bigger
// coefficient means faster decay of e^-gamma.
std::pair<Rational, Rational> gamma_growth(const PowerSum& gamma_prime) {
    const LogWeight gamma = antiderivative(gamma_prime);
    Rational best_exp(0), best_coeff = gamma.log_coeff;
    for (const auto& t : gamma.poly.terms()) {
        if (t.coeff > 0 && t.exponent > best_exp) {
            best_exp = t.exponent;
            best_coeff = t.coeff;
        }
    }
    return {best_exp, best_coeff};
}

std::vector<Rational> exponent_signature(const SearchCandidate& c) {
    std::vector<Rational> sig;
    for (const auto& t : c.gamma_prime.terms()) sig.push_back(t.exponent);
    sig.push_back(Rational(99991));  // separator
    for (const auto& t : c.g.terms()) sig.push_back(t.exponent);
    sig.push_back(Rational(99991));
    for (const auto& t : c.h.terms()) sig.push_back(t.exponent);
    return sig;
}

}  // namespace

std::vector<SearchCandidate> search(const PowerSum& damping,
                                    const std::vector<Rational>& exponent_grid,
                                    const Rational& mu) {
    if (exponent_grid.empty()) throw std::invalid_argument("search: empty exponent grid");
    if (mu <= 0) throw std::invalid_argument("search: mu must be positive");
    const DampingTerm d = single_term_damping(damping);

    std::set<Rational> grid(exponent_grid.begin(), exponent_grid.end());

    // Enumerate candidate supports for h (single exponents and pairs).
    std::vector<std::vector<Rational>> supports;
    std::vector<Rational> sorted_grid(grid.begin(), grid.end());
    for (std::size_t i = 0; i < sorted_grid.size(); ++i) {
        supports.push_back({sorted_grid[i]});
        for (std::size_t j = i + 1; j < sorted_grid.size(); ++j)
            supports.push_back({sorted_grid[i], sorted_grid[j]});
    }

    std::vector<SearchCandidate> out;
    for (const auto& support : supports) {
        // Velocity-square cancellation gives gamma' = 2(d - h); the grouping
        // into the strong-convexity form needs gamma' = h, hence 3h = 2d on
        // the candidate support.
        PowerSum h;
        for (const auto& e : support)
            h = h + PowerSum::monomial(damping.coeff_at(e) * Rational(2, 3), e);
        if (!(h.scaled(Rational(3)) == damping.scaled(Rational(2)))) continue;
        const PowerSum gamma_prime = h;

        // <w, x'> cancellation determines g exactly.
        const PowerSum g =
            (gamma_prime * h + h.derivative() + h * h - h * damping).scaled(Rational(1, 2));
        if (g.size() > 2 || !exponents_within(g, grid)) continue;
        if (!exponents_within(h, grid) || !exponents_within(gamma_prime, grid)) continue;

        // A(t) = h must be nonnegative termwise for the absorption step.
        bool a_ok = true;
        for (const auto& t : h.terms())
            if (t.coeff < 0) a_ok = false;
        if (!a_ok) continue;

        const DerivativeCollection col = derive_collection(gamma_prime, g, h, damping);
        if (!col.grad_dot_v.is_zero() || !col.v_sq.is_zero() || !col.w_dot_v.is_zero())
            continue;  // conditions (i)-(iii) must hold exactly

        // Absorb (mu/2) A into the |w|^2 coefficient:
        //   d/dt E <= e^gamma (w_sq - (mu/2) h) |w|^2.
        const PowerSum absorbed = col.w_sq - h.scaled(mu / 2);

        // Structural split of w_sq for this family: the destabilizing part is
        // (2/27) d^3 and the rest (-d''/3) is termwise nonpositive slack. The
        // threshold balances (2/27) d^3 against (mu/2) h = (mu/3) d.
        const PowerSum balance =
            PowerSum::monomial(Rational(2, 27) * d.rho * d.rho * d.rho, Rational(-3) * d.beta);
        const PowerSum slack = col.w_sq - balance;
        bool slack_ok = true;
        for (const auto& t : slack.terms())
            if (t.coeff > 0) slack_ok = false;
        if (!slack_ok) continue;

        const Rational pair_base = Rational(2) * d.rho * d.rho / (Rational(9) * mu);
        SearchCandidate cand;
        cand.gamma_prime = gamma_prime;
        cand.g = g;
        cand.h = h;
        cand.absorbed = absorbed;
        std::ostringstream cert;
        if (d.beta == 0) {
            // constant damping: balance and absorption share the exponent
            const Rational s = Rational(2, 27) * d.rho * d.rho * d.rho - mu * d.rho / 3;
            if (s > 0) continue;
            cand.threshold = Radical{Rational(0), Rational(1)};
            cert << "constant damping: absorbed coefficient " << to_string(s)
                 << " <= 0 for all t";
        } else {
            cand.threshold = Radical{pair_base, Rational(2) * d.beta};
            cert << "w_sq - (mu/2)h = [" << balance.str() << " - "
                 << to_string(mu * d.rho / 3) << "*t^" << to_string(-d.beta)
                 << "] + slack(" << slack.str() << "); slack termwise <= 0; "
                 << "pair <= 0 iff t^" << to_string(Rational(2) * d.beta)
                 << " >= " << to_string(pair_base);
        }
        cand.certificate = cert.str();
        out.push_back(std::move(cand));
    }

    // canonical dedupe (different supports can collapse to one candidate)
    std::vector<SearchCandidate> unique;
    for (auto& c : out) {
        bool seen = false;
        for (const auto& u : unique)
            if (u.gamma_prime == c.gamma_prime && u.g == c.g && u.h == c.h) seen = true;
        if (!seen) unique.push_back(std::move(c));
    }

    std::sort(unique.begin(), unique.end(), [](const SearchCandidate& a, const SearchCandidate& b) {
        const auto ga = gamma_growth(a.gamma_prime), gb = gamma_growth(b.gamma_prime);
        if (ga != gb) return ga > gb;  // faster decay of e^-gamma first
        const double ta = a.threshold.value(), tb = b.threshold.value();
        if (ta != tb) return ta < tb;
        return exponent_signature(a) < exponent_signature(b);
    });
    return unique;
}

Rational RationalFn::eval(const Rational& r) const {
    Rational n(0), d(0), p(1);
    for (const auto& c : num) {
        n += c * p;
        p *= r;
    }
    p = 1;
    for (const auto& c : den) {
        d += c * p;
        p *= r;
    }
    if (d == 0) throw std::domain_error("RationalFn::eval: denominator vanishes");
    return n / d;
}

std::string RationalFn::str() const {
    auto poly = [](const std::vector<Rational>& cs) {
        std::ostringstream os;
        bool first = true;
        for (std::size_t i = 0; i < cs.size(); ++i) {
            if (cs[i] == 0 && cs.size() > 1) continue;
            if (!first) os << " + ";
            first = false;
            os << "(" << to_string(cs[i]) << ")";
            if (i == 1) os << "*r";
            if (i > 1) os << "*r^" << i;
        }
        if (first) os << "0";
        return os.str();
    };
    if (is_polynomial()) return poly(num);
    return "[" + poly(num) + "] / [" + poly(den) + "]";
}

namespace {

// Gaussian elimination over exact rationals; returns empty on singularity.
std::optional<std::vector<Rational>> solve_linear(std::vector<std::vector<Rational>> M,
                                                  std::vector<Rational> rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && M[pivot][col] == 0) ++pivot;
        if (pivot == n) return std::nullopt;
        std::swap(M[pivot], M[col]);
        std::swap(rhs[pivot], rhs[col]);
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || M[row][col] == 0) continue;
            const Rational f = M[row][col] / M[col][col];
            for (std::size_t k = col; k < n; ++k) M[row][k] -= f * M[col][k];
            rhs[row] -= f * rhs[col];
        }
    }
    std::vector<Rational> sol(n);
    for (std::size_t i = 0; i < n; ++i) sol[i] = rhs[i] / M[i][i];
    return sol;
}

}  // namespace

ReconstructionResult reconstruct_rational_function(
    const std::vector<std::pair<Rational, Rational>>& data, int max_total_degree) {
    if (data.empty()) throw std::invalid_argument("reconstruct: no data");
    for (std::size_t i = 0; i < data.size(); ++i)
        for (std::size_t j = i + 1; j < data.size(); ++j)
            if (data[i].first == data[j].first)
                throw std::invalid_argument("reconstruct: duplicate r values");

    for (int total = 0; total <= max_total_degree; ++total) {
        for (int dq = 0; dq <= total; ++dq) {
            const int dp = total - dq;
            const int unknowns = dp + 1 + dq;
            if (unknowns > static_cast<int>(data.size())) continue;

            // P(r_i) - f_i * (q_1 r_i + ... + q_dq r_i^dq) = f_i, with Q(0)=1
            std::vector<std::vector<Rational>> M;
            std::vector<Rational> rhs;
            for (int i = 0; i < unknowns; ++i) {
                const Rational& r = data[i].first;
                const Rational& f = data[i].second;
                std::vector<Rational> row(unknowns);
                Rational p(1);
                for (int j = 0; j <= dp; ++j) {
                    row[j] = p;
                    p *= r;
                }
                p = r;
                for (int j = 0; j < dq; ++j) {
                    row[dp + 1 + j] = -f * p;
                    p *= r;
                }
                M.push_back(std::move(row));
                rhs.push_back(f);
            }
            auto sol = solve_linear(std::move(M), std::move(rhs));
            if (!sol) continue;

            RationalFn fn;
            fn.num.assign(sol->begin(), sol->begin() + dp + 1);
            fn.den.assign(1, Rational(1));
            for (int j = 0; j < dq; ++j) fn.den.push_back((*sol)[dp + 1 + j]);

            bool exact = true;
            for (const auto& [r, f] : data) {
                Rational den(0), p(1);
                for (const auto& c : fn.den) {
                    den += c * p;
                    p *= r;
                }
                if (den == 0 || fn.eval(r) != f) {
                    exact = false;
                    break;
                }
            }
            if (exact) {
                ReconstructionResult res;
                res.fn = std::move(fn);
                res.points_used_for_solve = unknowns;
                res.points_held_out = static_cast<int>(data.size()) - unknowns;
                return res;
            }
        }
    }
    throw std::runtime_error("reconstruct: no rational function up to degree " +
                             std::to_string(max_total_degree) + " fits the data exactly");
}

namespace {

std::vector<CoefficientDependence> reconstruct_slot(
    const std::vector<std::pair<Rational, SearchCandidate>>& instances,
    const PowerSum SearchCandidate::*slot) {
    std::set<Rational> exponents;
    for (const auto& [r, cand] : instances)
        for (const auto& t : (cand.*slot).terms()) exponents.insert(t.exponent);
    std::vector<CoefficientDependence> out;
    for (const auto& e : exponents) {
        std::vector<std::pair<Rational, Rational>> data;
        for (const auto& [r, cand] : instances) data.emplace_back(r, (cand.*slot).coeff_at(e));
        CoefficientDependence dep;
        dep.exponent = e;
        dep.coeff = reconstruct_rational_function(data);
        out.push_back(std::move(dep));
    }
    return out;
}

}  // namespace

CandidateDependence reconstruct_parameter_dependence(
    const std::vector<std::pair<Rational, SearchCandidate>>& instances) {
    std::set<Rational> distinct;
    for (const auto& [r, c] : instances) distinct.insert(r);
    if (distinct.size() < 4)
        throw std::invalid_argument("reconstruct: need at least 4 distinct r values");

    // candidates must come from a common damping-exponent structure
    const auto& ref = instances.front().second;
    for (const auto& [r, c] : instances) {
        if (c.h.size() != ref.h.size() || c.gamma_prime.size() != ref.gamma_prime.size())
            throw std::invalid_argument("reconstruct: inconsistent exponent sets across instances");
        for (std::size_t i = 0; i < c.h.size(); ++i)
            if (c.h.terms()[i].exponent != ref.h.terms()[i].exponent)
                throw std::invalid_argument(
                    "reconstruct: inconsistent exponent sets across instances");
    }

    CandidateDependence dep;
    dep.gamma_prime = reconstruct_slot(instances, &SearchCandidate::gamma_prime);
    dep.g = reconstruct_slot(instances, &SearchCandidate::g);
    dep.h = reconstruct_slot(instances, &SearchCandidate::h);
    return dep;
}

namespace {

void json_rational(std::ostringstream& os, const Rational& q) {
    os << "[\"" << numerator(q).str() << "\",\"" << denominator(q).str() << "\"]";
}

void json_powersum(std::ostringstream& os, const PowerSum& p) {
    os << "[";
    bool first = true;
    for (const auto& t : p.terms()) {
        if (!first) os << ",";
        first = false;
        os << "{\"coeff\":";
        json_rational(os, t.coeff);
        os << ",\"exponent\":";
        json_rational(os, t.exponent);
        os << "}";
    }
    os << "]";
}

}  // namespace

std::string to_json(const SearchCandidate& c) {
    std::ostringstream os;
    os << "{\"gamma_prime\":";
    json_powersum(os, c.gamma_prime);
    os << ",\"g\":";
    json_powersum(os, c.g);
    os << ",\"h\":";
    json_powersum(os, c.h);
    os << ",\"threshold\":{\"base\":";
    json_rational(os, c.threshold.base);
    os << ",\"root_index\":";
    json_rational(os, c.threshold.index);
    os << "},\"absorbed\":";
    json_powersum(os, c.absorbed);
    os << ",\"certificate\":\"" << c.certificate << "\"}";
    return os.str();
}

std::string to_json(const std::vector<SearchCandidate>& cs) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (i) os << ",";
        os << to_json(cs[i]);
    }
    os << "]";
    return os.str();
}

}  // namespace lyapflow
