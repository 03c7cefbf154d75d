#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lyapflow/experiment.hpp"
#include "lyapflow/lyapunov.hpp"
#include "lyapflow/ratefit.hpp"

namespace py = pybind11;
using namespace lyapflow;

namespace {

// exact rationals cross the boundary as strings ("2/3")
Rational rat(const std::string& s) { return parse_rational(s); }

std::vector<std::pair<std::string, std::string>> powersum_terms(const PowerSum& p) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& t : p.terms()) out.emplace_back(to_string(t.coeff), to_string(t.exponent));
    return out;
}

Trajectory integrate_py(const SystemSpec& sys, double t0, std::vector<double> x0,
                        std::vector<double> v0, double t_end, double rel_tol, double abs_tol,
                        std::optional<std::vector<double>> grid, int samples) {
    std::vector<double> g = grid ? *grid : log_grid(t0, t_end, samples);
    return integrate(sys, t0, x0, v0, t_end, {rel_tol, abs_tol}, g);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "continuous-time optimization dynamics lab: accelerated gradient flows, "
              "Lyapunov certification, symbolic Lyapunov search, rate estimation";

    py::class_<ObjectiveSpec>(m, "Objective")
        .def_static("quadratic", &ObjectiveSpec::quadratic, py::arg("spectrum"),
                    py::arg("x_star"), py::arg("f_star") = 0.0, py::arg("mu") = 1.0)
        .def_static("regularized_logsumexp", &ObjectiveSpec::regularized_logsumexp,
                    py::arg("dimension"), py::arg("mu"), py::arg("num_rows"),
                    py::arg("row_seed"))
        .def_property_readonly("dimension", &ObjectiveSpec::dimension)
        .def_property_readonly("mu", &ObjectiveSpec::mu)
        .def_property_readonly("x_star", &ObjectiveSpec::x_star)
        .def_property_readonly("f_star", &ObjectiveSpec::f_star)
        .def("eval",
             [](const ObjectiveSpec& o, std::vector<double> x) { return o.eval(x); })
        .def("grad",
             [](const ObjectiveSpec& o, std::vector<double> x) { return o.grad(x); })
        .def("check_strong_convexity", &ObjectiveSpec::check_strong_convexity,
             py::arg("n_pairs") = 200, py::arg("seed") = 1);

    py::class_<SystemSpec>(m, "System")
        .def_static(
            "gradient_flow",
            [](const ObjectiveSpec& o) { return SystemSpec::gradient_flow(o); },
            py::arg("objective"))
        .def_static(
            "nag",
            [](const std::string& r, const ObjectiveSpec& o) {
                return SystemSpec::nag(rat(r), o);
            },
            py::arg("r"), py::arg("objective"))
        .def_static(
            "generalized_nag",
            [](const std::string& r, const std::string& alpha, const ObjectiveSpec& o) {
                return SystemSpec::generalized_nag(rat(r), rat(alpha), o);
            },
            py::arg("r"), py::arg("alpha"), py::arg("objective"))
        .def("damping", &SystemSpec::damping, py::arg("t"))
        .def_property_readonly("r", [](const SystemSpec& s) { return to_string(s.r()); })
        .def_property_readonly("objective", &SystemSpec::objective);

    py::class_<Trajectory>(m, "Trajectory")
        .def_property_readonly("t0", &Trajectory::t0)
        .def_property_readonly("t_end", &Trajectory::t_end)
        .def("times",
             [](const Trajectory& tr) {
                 std::vector<double> t;
                 for (const auto& s : tr.samples()) t.push_back(s.t);
                 return t;
             })
        .def("positions",
             [](const Trajectory& tr) {
                 std::vector<std::vector<double>> x;
                 for (const auto& s : tr.samples()) x.push_back(s.x);
                 return x;
             })
        .def("velocities",
             [](const Trajectory& tr) {
                 std::vector<std::vector<double>> v;
                 for (const auto& s : tr.samples()) v.push_back(s.v);
                 return v;
             })
        .def("gaps",
             [](const Trajectory& tr) {
                 std::vector<double> g;
                 const auto& obj = tr.system().objective();
                 for (const auto& s : tr.samples()) g.push_back(obj.eval(s.x) - obj.f_star());
                 return g;
             })
        .def("resample",
             [](const Trajectory& tr, std::vector<double> grid) { return tr.resample(grid); })
        .def("to_csv", &Trajectory::to_csv);

    m.def("integrate", &integrate_py, py::arg("system"), py::arg("t0"), py::arg("x0"),
          py::arg("v0"), py::arg("t_end"), py::arg("rel_tol") = 1e-10,
          py::arg("abs_tol") = 1e-12, py::arg("grid") = std::nullopt,
          py::arg("samples") = 400);

    py::class_<CertReport>(m, "CertReport")
        .def_readonly("inequality_id", &CertReport::inequality_id)
        .def_readonly("samples_checked", &CertReport::samples_checked)
        .def_readonly("max_violation", &CertReport::max_violation)
        .def_readonly("violation_location", &CertReport::violation_location)
        .def_readonly("tolerance", &CertReport::tolerance)
        .def_readonly("passed", &CertReport::pass)
        .def("__repr__", [](const CertReport& r) { return to_json(r); });

    py::class_<LyapunovSpec>(m, "Lyapunov")
        .def_static(
            "paper_nag",
            [](const std::string& r, const std::string& mu) {
                return LyapunovSpec::paper_nag(rat(r), rat(mu));
            },
            py::arg("r"), py::arg("mu"))
        .def_static(
            "paper_alpha",
            [](const std::string& r, const std::string& alpha, const std::string& mu) {
                return LyapunovSpec::paper_alpha(rat(r), rat(alpha), rat(mu));
            },
            py::arg("r"), py::arg("alpha"), py::arg("mu"))
        .def_static(
            "discovered",
            [](const SearchCandidate& c, const std::string& mu) {
                return LyapunovSpec::discovered(c, rat(mu));
            },
            py::arg("candidate"), py::arg("mu"))
        .def("with_scaled_g",
             [](const LyapunovSpec& l, const std::string& f) {
                 return l.with_scaled_g(rat(f));
             })
        .def("with_scaled_gamma_prime",
             [](const LyapunovSpec& l, const std::string& f) {
                 return l.with_scaled_gamma_prime(rat(f));
             })
        .def_property_readonly("gamma_prime",
                               [](const LyapunovSpec& l) { return powersum_terms(l.gamma_prime()); })
        .def_property_readonly("g", [](const LyapunovSpec& l) { return powersum_terms(l.g()); })
        .def_property_readonly("h", [](const LyapunovSpec& l) { return powersum_terms(l.h()); })
        .def("__repr__", [](const LyapunovSpec& l) { return to_json(l); });

    m.def("threshold_T", &threshold_T, py::arg("lyapunov"));

    m.def(
        "eval_logE",
        [](const LyapunovSpec& lyap, const SystemSpec& sys, double t, std::vector<double> x,
           std::vector<double> v) {
            const auto parts = eval_logE(lyap, sys, State{t, std::move(x), std::move(v)});
            py::dict d;
            d["gamma"] = parts.gamma;
            d["main_part"] = parts.main_part;
            d["velocity_part"] = parts.velocity_part;
            d["interior"] = parts.interior;
            d["logE"] = parts.log_value ? py::object(py::float_(*parts.log_value))
                                        : py::object(py::none());
            return d;
        },
        py::arg("lyapunov"), py::arg("system"), py::arg("t"), py::arg("x"), py::arg("v"));

    m.def(
        "analytic_dEdt",
        [](const LyapunovSpec& lyap, const SystemSpec& sys, double t, std::vector<double> x,
           std::vector<double> v) {
            const auto d = analytic_dEdt(lyap, sys, State{t, std::move(x), std::move(v)});
            py::dict out;
            out["sign"] = d.sign;
            out["log_abs"] = d.log_abs;
            out["bracket"] = d.bracket;
            return out;
        },
        py::arg("lyapunov"), py::arg("system"), py::arg("t"), py::arg("x"), py::arg("v"));

    m.def("certify_monotone",
          [](const Trajectory& tr, const LyapunovSpec& l) { return certify_monotone(tr, l); });
    m.def("certify_main_nonneg", [](const Trajectory& tr, const LyapunovSpec& l) {
        return certify_main_nonneg(tr, l);
    });
    m.def("certify_velocity_bound", [](const Trajectory& tr, const LyapunovSpec& l) {
        return certify_velocity_bound(tr, l);
    });
    m.def("certify_rate_bound", [](const Trajectory& tr, const LyapunovSpec& l) {
        return certify_rate_bound(tr, l);
    });
    m.def("certify_y_growth", [](const Trajectory& tr, const LyapunovSpec& l) {
        return certify_y_growth(tr, l);
    });
    m.def("check_weighted_boundedness", [](const Trajectory& tr, const LyapunovSpec& l) {
        return check_weighted_boundedness(tr, l);
    });
    m.def("validate_derivative_match",
          [](const Trajectory& tr, const LyapunovSpec& l, double tol) {
              const auto rep = validate_derivative_match(tr, l, tol);
              py::dict d;
              d["total_samples"] = rep.total_samples;
              d["included"] = rep.included;
              d["frac_within_tol"] = rep.frac_within_tol;
              d["max_rel_err"] = rep.max_rel_err;
              return d;
          },
          py::arg("trajectory"), py::arg("lyapunov"), py::arg("rel_tol") = 1e-5);

    py::class_<SearchCandidate>(m, "SearchCandidate")
        .def_property_readonly(
            "gamma_prime",
            [](const SearchCandidate& c) { return powersum_terms(c.gamma_prime); })
        .def_property_readonly("g",
                               [](const SearchCandidate& c) { return powersum_terms(c.g); })
        .def_property_readonly("h",
                               [](const SearchCandidate& c) { return powersum_terms(c.h); })
        .def_property_readonly("threshold",
                               [](const SearchCandidate& c) {
                                   return std::make_pair(to_string(c.threshold.base),
                                                         to_string(c.threshold.index));
                               })
        .def_property_readonly("threshold_value",
                               [](const SearchCandidate& c) { return c.threshold.value(); })
        .def_readonly("certificate", &SearchCandidate::certificate)
        .def("__repr__", [](const SearchCandidate& c) { return to_json(c); });

    m.def(
        "search",
        [](const std::string& rho, const std::string& beta,
           const std::vector<std::string>& grid, const std::string& mu) {
            std::vector<Rational> g;
            for (const auto& e : grid) g.push_back(rat(e));
            return search(PowerSum::monomial(rat(rho), -rat(beta)), g, rat(mu));
        },
        py::arg("rho"), py::arg("beta"), py::arg("grid"), py::arg("mu"),
        "Lyapunov candidate search for the damping rho * t^-beta over the exponent grid.");

    m.def(
        "reconstruct_parameter_dependence",
        [](const std::vector<std::pair<std::string, SearchCandidate>>& instances) {
            std::vector<std::pair<Rational, SearchCandidate>> in;
            for (const auto& [r, c] : instances) in.emplace_back(rat(r), c);
            const auto dep = reconstruct_parameter_dependence(in);
            auto slot = [](const std::vector<CoefficientDependence>& deps) {
                py::list out;
                for (const auto& d : deps) {
                    py::dict e;
                    e["exponent"] = to_string(d.exponent);
                    e["formula"] = d.coeff.fn.str();
                    e["held_out"] = d.coeff.points_held_out;
                    out.append(e);
                }
                return out;
            };
            py::dict d;
            d["gamma_prime"] = slot(dep.gamma_prime);
            d["g"] = slot(dep.g);
            d["h"] = slot(dep.h);
            return d;
        },
        py::arg("instances"));

    m.def(
        "fit_rate",
        [](const Trajectory& tr, const std::string& model, double alpha, double t_lo,
           double t_hi, bool envelope) {
            FitModel fm;
            fm.kind = model == "power-law" ? FitModel::Kind::PowerLaw
                                           : FitModel::Kind::StretchedExponential;
            fm.alpha = alpha;
            FitOptions opts;
            opts.envelope = envelope;
            const auto f = fit(tr, fm, FitWindow{t_lo, t_hi}, opts);
            py::dict d;
            d["model"] = model;
            d["slope"] = f.slope;
            d["intercept"] = f.intercept;
            d["residual"] = f.residual;
            d["samples_used"] = f.samples_used;
            return d;
        },
        py::arg("trajectory"), py::arg("model"), py::arg("alpha") = 0.0, py::arg("t_lo"),
        py::arg("t_hi"), py::arg("envelope") = false);

    m.def(
        "compare_rates",
        [](double r, std::optional<double> alpha, double epsilon) {
            const auto c = compare_rates(r, alpha, epsilon);
            py::dict d;
            d["new_exponent"] = c.new_exponent;
            d["prior_exponent"] = c.prior_exponent;
            if (c.prior_tt_exponent) d["prior_tt_exponent"] = *c.prior_tt_exponent;
            d["strict_improvement"] = c.strict_improvement;
            d["equality"] = c.equality;
            d["ordering_ok"] = c.ordering_ok;
            return d;
        },
        py::arg("r"), py::arg("alpha") = std::nullopt, py::arg("epsilon") = 0.01);

    m.attr("__version__") = "0.1.0";
}
