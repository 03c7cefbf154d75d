// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Each criterion is self-contained and runs at desk scale.

#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lyapflow/experiment.hpp"
#include "lyapflow/lyapunov.hpp"
#include "lyapflow/ratefit.hpp"

using namespace lyapflow;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s  criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

struct AcceptanceRun {
    std::string name;
    SystemSpec sys;
    LyapunovSpec lyap;
    Trajectory traj;
};

const ObjectiveSpec& quad4() {
    static const auto obj =
        ObjectiveSpec::quadratic({1.0, 2.0, 5.0, 10.0}, {0, 0, 0, 0}, 0.0, 1.0);
    return obj;
}

constexpr double kGammaCap = 40.0;
const Tolerances kTol{1e-10, 1e-22};

double cap_end_alpha(double r, double a) {
    return std::pow(3.0 * kGammaCap * (1.0 - a) / (2.0 * r), 1.0 / (1.0 - a));
}

// The five (r, system) cells every trajectory-based criterion runs on.
const std::vector<AcceptanceRun>& runs() {
    static const std::vector<AcceptanceRun> all = [] {
        const std::vector<double> x0{1.0, -1.0, 0.5, -0.25}, v0{0, 0, 0, 0};
        std::vector<AcceptanceRun> out;
        auto add = [&](const std::string& name, SystemSpec sys, LyapunovSpec lyap,
                       double t_end) {
            const auto grid = log_grid(0.1, t_end, 1500);
            out.push_back({name, sys, lyap,
                           integrate(sys, 0.1, x0, v0, t_end, kTol, grid)});
        };
        for (long r : {3, 4, 6})
            add("nag r=" + std::to_string(r), SystemSpec::nag(Rational(r), quad4()),
                LyapunovSpec::paper_nag(Rational(r), Rational(1)), 100.0);
        add("alpha r=3 a=1/2",
            SystemSpec::generalized_nag(Rational(3), Rational(1, 2), quad4()),
            LyapunovSpec::paper_alpha(Rational(3), Rational(1, 2), Rational(1)),
            cap_end_alpha(3.0, 0.5));
        add("alpha r=2 a=3/4",
            SystemSpec::generalized_nag(Rational(2), Rational(3, 4), quad4()),
            LyapunovSpec::paper_alpha(Rational(2), Rational(3, 4), Rational(1)),
            cap_end_alpha(2.0, 0.75));
        return out;
    }();
    return all;
}

char buf[256];

void criterion_1_monotonicity() {
    bool pass = true;
    double worst = 0.0;
    std::string worst_name;
    for (const auto& run : runs()) {
        const auto rep = certify_monotone(run.traj, run.lyap);
        if (!rep.pass || rep.max_violation > 1e-8) pass = false;
        if (rep.max_violation >= worst) {
            worst = rep.max_violation;
            worst_name = run.name;
        }
    }
    std::snprintf(buf, sizeof buf, "worst log-space violation %.2e on %s, tol 1e-8", worst,
                  worst_name.c_str());
    report(1, "Lyapunov monotonicity on [T, t_end]", pass, buf);
}

void criterion_2_derivative_validation() {
    bool pass = true;
    double worst_frac = 1.0, worst_max = 0.0;
    for (const auto& run : runs()) {
        const auto rep = validate_derivative_match(run.traj, run.lyap, 1e-5);
        if (rep.frac_within_tol < 0.95 || rep.max_rel_err > 1e-4) pass = false;
        worst_frac = std::min(worst_frac, rep.frac_within_tol);
        worst_max = std::max(worst_max, rep.max_rel_err);
    }
    std::snprintf(buf, sizeof buf,
                  "min fraction within 1e-5: %.4f (need 0.95); max rel err %.2e (cap 1e-4)",
                  worst_frac, worst_max);
    report(2, "analytic dE/dt matches finite differences", pass, buf);
}

void criterion_3_rate_bounds() {
    bool pass = true;
    double worst = 0.0;
    for (const auto& run : runs()) {
        const auto rep = certify_rate_bound(run.traj, run.lyap);
        if (!rep.pass || rep.max_violation > 1e-6) pass = false;
        worst = std::max(worst, rep.max_violation);
    }
    std::snprintf(buf, sizeof buf, "worst log-space violation %.2e, tol 1e-6", worst);
    report(3, "explicit rate bounds with closing-display constants", pass, buf);
}

void criterion_4_velocity_bound() {
    bool pass = true;
    double worst = 0.0;
    for (const auto& run : runs()) {
        const auto rep = certify_velocity_bound(run.traj, run.lyap);
        if (!rep.pass || rep.max_violation > 1e-8) pass = false;
        worst = std::max(worst, rep.max_violation);
    }
    std::snprintf(buf, sizeof buf, "worst log-space violation %.2e, tol 1e-8", worst);
    report(4, "weighted velocity bound against E(T)", pass, buf);
}

void criterion_5_rediscovery_nag() {
    bool pass = true;
    std::string detail = "exact match at every (r, mu)";
    const std::vector<Rational> grid = {Rational(-2), Rational(-1), Rational(0)};
    for (long r : {3, 4, 6}) {
        for (long mu : {1, 2}) {
            const auto cands =
                search(PowerSum::monomial(Rational(r), Rational(-1)), grid, Rational(mu));
            const PowerSum want_gp = PowerSum::monomial(Rational(2 * r, 3), Rational(-1));
            const PowerSum want_g =
                PowerSum::monomial(Rational(r * r - 3 * r, 9), Rational(-2));
            const Radical want_T{Rational(2 * r * r, 9 * mu), Rational(2)};
            if (cands.size() != 1 || !(cands[0].gamma_prime == want_gp) ||
                !(cands[0].g == want_g) || !(cands[0].h == want_gp) ||
                !(cands[0].threshold == want_T)) {
                pass = false;
                detail = "mismatch at r=" + std::to_string(r) + ", mu=" + std::to_string(mu);
            }
        }
    }
    report(5, "rediscovery of the r/t Lyapunov function and threshold", pass, detail);
}

void criterion_6_rediscovery_alpha() {
    const std::vector<Rational> grid = {Rational(-3, 2), Rational(-1), Rational(-1, 2),
                                        Rational(0)};
    const auto cands =
        search(PowerSum::monomial(Rational(3), Rational(-1, 2)), grid, Rational(1));
    const PowerSum want_gp = PowerSum::monomial(Rational(2), Rational(-1, 2));
    const PowerSum want_g = PowerSum::monomial(Rational(1), Rational(-1)) +
                            PowerSum::monomial(Rational(-1, 2), Rational(-3, 2));
    const bool pass = cands.size() == 1 && cands[0].gamma_prime == want_gp &&
                      cands[0].h == want_gp && cands[0].g == want_g &&
                      cands[0].threshold == Radical{Rational(2), Rational(1)};
    report(6, "rediscovery of the r/t^alpha Lyapunov function, T = 2", pass,
           pass ? "exact match including the two-term g" : "mismatch");
}

void criterion_7_reconstruction() {
    const std::vector<Rational> grid = {Rational(-2), Rational(-1), Rational(0)};
    std::vector<std::pair<Rational, SearchCandidate>> instances;
    for (long r : {3, 4, 6, 9}) {
        const auto cands =
            search(PowerSum::monomial(Rational(r), Rational(-1)), grid, Rational(1));
        if (cands.size() != 1) {
            report(7, "parameter reconstruction over r in {3,4,6,9}", false, "search failed");
            return;
        }
        instances.emplace_back(Rational(r), cands[0]);
    }
    const auto dep = reconstruct_parameter_dependence(instances);
    const std::vector<Rational> want_g = {Rational(0), Rational(-1, 3), Rational(1, 9)};
    const std::vector<Rational> want_h = {Rational(0), Rational(2, 3)};
    const bool pass = dep.g.size() == 1 && dep.g[0].coeff.fn.is_polynomial() &&
                      dep.g[0].coeff.fn.num == want_g && dep.h.size() == 1 &&
                      dep.h[0].coeff.fn.num == want_h &&
                      dep.gamma_prime.size() == 1 &&
                      dep.gamma_prime[0].coeff.fn.num == want_h;
    report(7, "parameter reconstruction over r in {3,4,6,9}", pass,
           pass ? "(r^2 - 3r)/9 and 2r/3 recovered exactly" : "wrong interpolants");
}

void criterion_8_integrator_oracles() {
    bool pass = true;
    std::string detail;

    // closed form for the gradient flow on the unit quadratic
    {
        const auto sys =
            SystemSpec::gradient_flow(ObjectiveSpec::quadratic({1.0}, {0.0}, 0.0, 1.0));
        const auto grid = log_grid(0.1, 1.1, 41);
        const auto traj = integrate(sys, 0.1, std::vector<double>{1.0},
                                    std::vector<double>{0.0}, 1.1, {1e-10, 1e-12}, grid);
        double err = 0.0;
        for (const auto& s : traj.samples())
            err = std::max(err, std::fabs(s.x[0] - std::exp(-(s.t - 0.1))));
        if (err > 1e-8) pass = false;
        std::snprintf(buf, sizeof buf, "closed-form err %.2e (tol 1e-8)", err);
        detail = buf;
    }

    // undamped oscillator round trip
    {
        const RhsFn rhs = [](double, const double* y, double* dy) {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        const auto sol = integrate_raw(rhs, 2, 0.0, std::vector<double>{1.0, 0.0},
                                       2.0 * M_PI, {1e-10, 1e-12});
        const double err = std::hypot(sol.y_end[0] - 1.0, sol.y_end[1]);
        if (err > 1e-6) pass = false;
        std::snprintf(buf, sizeof buf, "%s; oscillator err %.2e (tol 1e-6)", detail.c_str(),
                      err);
        detail = buf;
    }

    // mechanical-energy non-increase on every damped acceptance run
    {
        double worst = -1e300;
        for (const auto& run : runs()) {
            double e_prev = 1e300;
            for (const auto& s : run.traj.samples()) {
                double v_sq = 0.0;
                for (double c : s.v) v_sq += c * c;
                const double e = 0.5 * v_sq + quad4().eval(s.x);
                if (e_prev < 1e300) {
                    const double allowed = 10.0 * (kTol.abs + kTol.rel * std::fabs(e_prev));
                    worst = std::max(worst, e - e_prev - allowed);
                    if (e - e_prev > allowed) pass = false;
                }
                e_prev = e;
            }
        }
        std::snprintf(buf, sizeof buf, "%s; worst energy slack %.2e (<= 0 required)",
                      detail.c_str(), worst);
        detail = buf;
    }
    report(8, "integrator closed-form and energy oracles", pass, detail);
}

void criterion_9_rate_comparison() {
    bool pass = true;
    // nag: strict improvement exactly when r > 3, equality exactly at r = 3
    for (double r : {0.5, 1.0, 2.0, 2.999, 3.0, 3.001, 4.0, 6.0, 9.0}) {
        const auto c = compare_rates(r, std::nullopt);
        if (c.strict_improvement != (r > 3.0)) pass = false;
        if (c.equality != (r == 3.0)) pass = false;
    }
    // alpha: improvement always, ordering holds at the configured epsilon < 1/6
    for (const auto& [r, a] : std::vector<std::pair<double, double>>{
             {3.0, 0.5}, {2.0, 0.75}, {1.0, 0.25}}) {
        const auto c = compare_rates(r, a, 0.01);
        if (!c.strict_improvement || !c.ordering_ok) pass = false;
    }
    const auto c = compare_rates(3.0, 0.5, 0.01);
    std::snprintf(buf, sizeof buf, "exponents at (3, 1/2): %.2f > %.2f > %.2f",
                  c.new_exponent, *c.prior_tt_exponent, c.prior_exponent);
    report(9, "rate comparison flags", pass, buf);
}

void criterion_10_mutation_sensitivity() {
    // mutations evaluated on the nag r=6 trajectory
    const AcceptanceRun* run6 = nullptr;
    for (const auto& run : runs())
        if (run.name == "nag r=6") run6 = &run;
    auto fails_somewhere = [&](const LyapunovSpec& mutated) {
        const bool mono = certify_monotone(run6->traj, mutated).pass;
        const bool rate = certify_rate_bound(run6->traj, mutated).pass;
        const bool bounded = check_weighted_boundedness(run6->traj, mutated).pass;
        return !(mono && rate && bounded);
    };
    const bool g_detected = fails_somewhere(run6->lyap.with_scaled_g(Rational(2)));
    const bool gp_detected =
        fails_somewhere(run6->lyap.with_scaled_gamma_prime(Rational(6, 5)));
    const bool pass = g_detected && gp_detected;
    std::snprintf(buf, sizeof buf, "g doubled detected: %s; gamma' * 1.2 detected: %s",
                  g_detected ? "yes" : "no", gp_detected ? "yes" : "no");
    report(10, "mutation sensitivity (non-vacuous certifications)", pass, buf);
}

}  // namespace

int main() {
    std::printf("acceptance suite: quadratic dim 4, spectrum {1,2,5,10}, mu = 1\n");
    criterion_1_monotonicity();
    criterion_2_derivative_validation();
    criterion_3_rate_bounds();
    criterion_4_velocity_bound();
    criterion_5_rediscovery_nag();
    criterion_6_rediscovery_alpha();
    criterion_7_reconstruction();
    criterion_8_integrator_oracles();
    criterion_9_rate_comparison();
    criterion_10_mutation_sensitivity();
    if (g_failures == 0) {
        std::printf("all acceptance criteria pass\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
}
