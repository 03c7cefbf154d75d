#include "lyapflow/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

namespace lyapflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Rational rational_field(const json& j, const std::string& what) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    throw ConfigError(what + ": expected an integer or an exact rational string like \"2/3\"");
}

double double_field(const json& j, const std::string& what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return to_double(parse_rational(j.get<std::string>()));
    throw ConfigError(what + ": expected a number");
}

std::vector<double> double_vector(const json& j, const std::string& what) {
    if (!j.is_array()) throw ConfigError(what + ": expected an array");
    std::vector<double> out;
    for (const auto& e : j) out.push_back(double_field(e, what));
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << content;
}

}  // namespace

std::vector<double> log_grid(double t0, double t_end, int n) {
    if (n < 2) throw ConfigError("samples: need at least 2 grid points");
    std::vector<double> g(n);
    const double l0 = std::log(t0), l1 = std::log(t_end);
    for (int i = 0; i < n; ++i) g[i] = std::exp(l0 + (l1 - l0) * i / (n - 1));
    g.front() = t0;
    g.back() = t_end;
    for (int i = 1; i < n; ++i)
        if (!(g[i] > g[i - 1])) throw ConfigError("samples: grid not strictly increasing");
    return g;
}

ExperimentConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    if (!j.contains("schema_version"))
        throw ConfigError("config: missing schema_version");
    cfg.schema_version = j["schema_version"].get<int>();
    if (cfg.schema_version != 1)
        throw ConfigError("config: unsupported schema_version");
    cfg.seed = j.value("seed", 0ull);
    cfg.output_dir = j.value("output_dir", std::string());

    std::map<std::string, std::pair<ObjectiveSpec, Rational>> objective_map;
    if (!j.contains("objectives") || !j["objectives"].is_array() || j["objectives"].empty())
        throw ConfigError("config: objectives: need a nonempty array");
    for (const auto& o : j["objectives"]) {
        ObjectiveDecl decl;
        decl.name = o.value("name", std::string());
        if (decl.name.empty()) throw ConfigError("objectives: each entry needs a name");
        const std::string kind = o.value("kind", std::string());
        decl.mu_exact = rational_field(o.at("mu"), "objectives." + decl.name + ".mu");
        const double mu = to_double(decl.mu_exact);
        if (kind == "quadratic") {
            if (!o.contains("spectrum"))
                throw ConfigError("objectives." + decl.name + ": quadratic needs a spectrum");
            std::vector<double> spectrum;
            Rational min_eig;
            bool first = true;
            for (const auto& e : o["spectrum"]) {
                const Rational q = rational_field(e, "spectrum");
                spectrum.push_back(to_double(q));
                if (first || q < min_eig) min_eig = q;
                first = false;
            }
            if (min_eig != decl.mu_exact)
                throw ConfigError("objectives." + decl.name +
                                  ": smallest eigenvalue must equal mu exactly");
            std::vector<double> x_star(spectrum.size(), 0.0);
            if (o.contains("x_star")) x_star = double_vector(o["x_star"], "x_star");
            const double f_star = o.contains("f_star") ? double_field(o["f_star"], "f_star") : 0.0;
            decl.spec = ObjectiveSpec::quadratic(spectrum, x_star, f_star, mu);
        } else if (kind == "regularized-logsumexp") {
            const int dim = o.at("dimension").get<int>();
            const int rows = o.value("rows", 2 * dim + 1);
            const std::uint64_t row_seed = o.value("row_seed", 1234ull);
            decl.spec = ObjectiveSpec::regularized_logsumexp(dim, mu, rows, row_seed);
        } else {
            throw ConfigError("objectives." + decl.name + ": unknown kind '" + kind + "'");
        }
        objective_map.emplace(decl.name, std::make_pair(decl.spec, decl.mu_exact));
        cfg.objectives.push_back(std::move(decl));
    }

    if (!j.contains("systems") || !j["systems"].is_array() || j["systems"].empty())
        throw ConfigError("config: systems: need a nonempty array");
    for (const auto& s : j["systems"]) {
        SystemDecl decl;
        decl.name = s.value("name", std::string());
        if (decl.name.empty()) throw ConfigError("systems: each entry needs a name");
        const std::string kind = s.value("kind", std::string());
        const std::string oname = s.value("objective", std::string());
        const auto it = objective_map.find(oname);
        if (it == objective_map.end())
            throw ConfigError("systems." + decl.name + ": unknown objective '" + oname + "'");
        decl.mu_exact = it->second.second;
        if (kind == "gradient-flow") {
            decl.spec = SystemSpec::gradient_flow(it->second.first);
        } else if (kind == "nag") {
            decl.spec = SystemSpec::nag(rational_field(s.at("r"), "r"), it->second.first);
        } else if (kind == "generalized-nag") {
            const Rational r = rational_field(s.at("r"), "r");
            const Rational alpha = rational_field(s.at("alpha"), "alpha");
            if (alpha <= 0 || alpha >= 1)
                throw ConfigError("systems." + decl.name + ".alpha: must lie in (0,1)");
            decl.spec = SystemSpec::generalized_nag(r, alpha, it->second.first);
        } else {
            throw ConfigError("systems." + decl.name + ": unknown kind '" + kind + "'");
        }
        if (s.contains("x0")) decl.x0 = double_vector(s["x0"], "x0");
        if (s.contains("v0")) decl.v0 = double_vector(s["v0"], "v0");
        cfg.systems.push_back(std::move(decl));
    }

    if (j.contains("integrate")) {
        const auto& i = j["integrate"];
        cfg.integrate.t0 = i.value("t0", 0.1);
        if (i.contains("t_end")) cfg.integrate.t_end = double_field(i["t_end"], "t_end");
        if (i.contains("gamma_cap"))
            cfg.integrate.gamma_cap = double_field(i["gamma_cap"], "gamma_cap");
        if (cfg.integrate.t_end && cfg.integrate.gamma_cap)
            throw ConfigError("integrate: t_end and gamma_cap cannot both be set");
        if (!cfg.integrate.t_end && !cfg.integrate.gamma_cap)
            throw ConfigError("integrate: one of t_end or gamma_cap is required");
        cfg.integrate.tol.rel = i.value("rel_tol", 1e-10);
        cfg.integrate.tol.abs = i.value("abs_tol", 1e-12);
        cfg.integrate.samples = i.value("samples", 800);
        if (i.contains("x0")) cfg.integrate.x0 = double_vector(i["x0"], "integrate.x0");
        if (i.contains("v0")) cfg.integrate.v0 = double_vector(i["v0"], "integrate.v0");
        if (!(cfg.integrate.t0 > 0.0)) throw ConfigError("integrate.t0: must be positive");
        if (cfg.integrate.t_end && !(*cfg.integrate.t_end > cfg.integrate.t0))
            throw ConfigError("integrate.t_end: must exceed t0");
    } else {
        throw ConfigError("config: integrate section is required");
    }

    if (j.contains("lyapunov")) {
        const auto& l = j["lyapunov"];
        if (l.contains("spec")) {
            if (l["spec"].is_string()) {
                cfg.lyapunov.spec = l["spec"].get<std::string>();
                if (cfg.lyapunov.spec != "auto" && cfg.lyapunov.spec != "paper-nag" &&
                    cfg.lyapunov.spec != "paper-alpha")
                    throw ConfigError("lyapunov.spec: unknown value '" + cfg.lyapunov.spec + "'");
            } else if (l["spec"].is_object() && l["spec"].contains("discovered_index")) {
                cfg.lyapunov.spec = "discovered";
                cfg.lyapunov.discovered_index = l["spec"]["discovered_index"].get<int>();
            } else {
                throw ConfigError("lyapunov.spec: expected a string or {discovered_index}");
            }
        }
        if (l.contains("mutate")) {
            const auto& m = l["mutate"];
            if (m.contains("g_scale"))
                cfg.lyapunov.g_scale = rational_field(m["g_scale"], "mutate.g_scale");
            if (m.contains("gamma_prime_scale"))
                cfg.lyapunov.gamma_prime_scale =
                    rational_field(m["gamma_prime_scale"], "mutate.gamma_prime_scale");
        }
        if (l.contains("tolerances")) {
            const auto& t = l["tolerances"];
            auto& o = cfg.lyapunov.options;
            o.monotone_tol = t.value("monotone", o.monotone_tol);
            o.main_tol = t.value("main", o.main_tol);
            o.velocity_tol = t.value("velocity", o.velocity_tol);
            o.rate_tol = t.value("rate", o.rate_tol);
            o.y_identity_tol = t.value("y_identity", o.y_identity_tol);
            o.y_bound_tol = t.value("y_bound", o.y_bound_tol);
        }
        cfg.lyapunov.options.clamp_negative_g =
            l.value("clamp_negative_g", cfg.lyapunov.options.clamp_negative_g);
    }

    if (j.contains("symsearch")) {
        const auto& s = j["symsearch"];
        if (s.contains("grid"))
            for (const auto& e : s["grid"])
                cfg.symsearch.grid.push_back(rational_field(e, "symsearch.grid"));
        if (s.contains("mu")) cfg.symsearch.mu = rational_field(s["mu"], "symsearch.mu");
        cfg.symsearch.from_systems = s.value("from_systems", false);
        if (s.contains("dampings")) {
            for (const auto& d : s["dampings"]) {
                SymsearchSection::Damping damping;
                damping.rho = rational_field(d.at("rho"), "damping.rho");
                damping.beta = rational_field(d.at("beta"), "damping.beta");
                cfg.symsearch.dampings.push_back(std::move(damping));
            }
        }
    }

    if (j.contains("ratefit")) {
        const auto& f = j["ratefit"];
        cfg.ratefit.model = f.value("model", std::string("auto"));
        if (cfg.ratefit.model != "auto" && cfg.ratefit.model != "power-law" &&
            cfg.ratefit.model != "stretched-exponential")
            throw ConfigError("ratefit.model: unknown value '" + cfg.ratefit.model + "'");
        if (f.contains("window")) {
            const auto w = double_vector(f["window"], "ratefit.window");
            if (w.size() != 2) throw ConfigError("ratefit.window: expected [t_lo, t_hi]");
            cfg.ratefit.window = FitWindow{w[0], w[1]};
        }
        cfg.ratefit.envelope = f.value("envelope", true);
        cfg.ratefit.epsilon = f.value("epsilon", 0.01);
        cfg.ratefit.input_csv = f.value("input_csv", std::string());
    }

    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_config_json(buf.str());
}

namespace {

double cap_time(const SystemSpec& sys, double cap) {
    // gamma(t_end) = cap for the auto Lyapunov weight of the system
    if (sys.kind() == SystemSpec::Kind::Nag) {
        const double r = sys.r_value();
        return std::exp(3.0 * cap / (2.0 * r));
    }
    if (sys.kind() == SystemSpec::Kind::GeneralizedNag) {
        const double r = sys.r_value(), a = sys.alpha_value();
        return std::pow(3.0 * cap * (1.0 - a) / (2.0 * r), 1.0 / (1.0 - a));
    }
    throw ConfigError("integrate.gamma_cap: gradient-flow has no weight; set t_end");
}

}  // namespace

std::vector<Cell> resolve_cells(const ExperimentConfig& cfg) {
    std::vector<Cell> cells;
    for (const auto& sys : cfg.systems) {
        Cell c;
        c.system = &sys;
        c.t0 = cfg.integrate.t0;
        c.t_end = cfg.integrate.t_end ? *cfg.integrate.t_end
                                      : cap_time(sys.spec, *cfg.integrate.gamma_cap);
        if (!(c.t_end > c.t0))
            throw ConfigError("integrate: resolved t_end does not exceed t0 for system '" +
                              sys.name + "'");
        const auto& obj = sys.spec.objective();
        const int n = obj.dimension();
        c.x0 = !sys.x0.empty() ? sys.x0 : cfg.integrate.x0;
        if (c.x0.empty()) {
            c.x0 = obj.x_star();
            for (auto& v : c.x0) v += 1.0;
        }
        c.v0 = !sys.v0.empty() ? sys.v0 : cfg.integrate.v0;
        if (c.v0.empty()) c.v0.assign(n, 0.0);
        if (static_cast<int>(c.x0.size()) != n || static_cast<int>(c.v0.size()) != n)
            throw ConfigError("x0/v0 dimension does not match objective for system '" +
                              sys.name + "'");
        c.grid = log_grid(c.t0, c.t_end, cfg.integrate.samples);
        cells.push_back(std::move(c));
    }
    return cells;
}

LyapunovSpec lyapunov_for_cell(const ExperimentConfig& cfg, const SystemDecl& sys) {
    const auto& sec = cfg.lyapunov;
    LyapunovSpec lyap = [&] {
        if (sec.spec == "paper-nag" ||
            (sec.spec == "auto" && sys.spec.kind() == SystemSpec::Kind::Nag))
            return LyapunovSpec::paper_nag(sys.spec.r(), sys.mu_exact);
        if (sec.spec == "paper-alpha" ||
            (sec.spec == "auto" && sys.spec.kind() == SystemSpec::Kind::GeneralizedNag))
            return LyapunovSpec::paper_alpha(sys.spec.r(), sys.spec.alpha(), sys.mu_exact);
        if (sec.spec == "discovered") {
            if (cfg.symsearch.grid.empty())
                throw ConfigError("lyapunov.spec: discovered requires a symsearch grid");
            const PowerSum damping =
                PowerSum::monomial(sys.spec.r(), -sys.spec.damping_exponent());
            const auto candidates = search(damping, cfg.symsearch.grid, sys.mu_exact);
            const int idx = sec.discovered_index.value_or(0);
            if (idx < 0 || idx >= static_cast<int>(candidates.size()))
                throw ConfigError("lyapunov.spec: discovered_index out of range");
            return LyapunovSpec::discovered(candidates[idx], sys.mu_exact);
        }
        throw ConfigError("lyapunov.spec: no Lyapunov function for system '" + sys.name + "'");
    }();
    if (sec.g_scale) lyap = lyap.with_scaled_g(*sec.g_scale);
    if (sec.gamma_prime_scale) lyap = lyap.with_scaled_gamma_prime(*sec.gamma_prime_scale);
    return lyap;
}

Trajectory simulate_cell(const Cell& cell, const Tolerances& tol) {
    return integrate(cell.system->spec, cell.t0, cell.x0, cell.v0, cell.t_end, tol, cell.grid);
}

namespace {

std::string trajectory_csv_with_gap(const Trajectory& traj) {
    const auto& obj = traj.system().objective();
    const int n = obj.dimension();
    std::ostringstream os;
    os << "t";
    for (int i = 0; i < n; ++i) os << ",x" << i;
    for (int i = 0; i < n; ++i) os << ",v" << i;
    os << ",f_gap,err\n";
    for (const auto& s : traj.samples()) {
        os << fmt(s.t);
        for (double c : s.x) os << ',' << fmt(c);
        for (double c : s.v) os << ',' << fmt(c);
        os << ',' << fmt(obj.eval(s.x) - obj.f_star()) << ',' << fmt(s.err_est) << '\n';
    }
    return os.str();
}

// Runs fn over the cells with at most `jobs` concurrent workers; results are
// collected in cell order.
template <typename Fn>
auto run_cells(const std::vector<Cell>& cells, int jobs, Fn fn)
    -> std::vector<decltype(fn(cells.front()))> {
    using Result = decltype(fn(cells.front()));
    std::vector<Result> results(cells.size());
    if (jobs < 2) {
        for (std::size_t i = 0; i < cells.size(); ++i) results[i] = fn(cells[i]);
        return results;
    }
    std::vector<std::future<Result>> futures(cells.size());
    std::size_t next = 0;
    while (next < cells.size()) {
        const std::size_t batch =
            std::min<std::size_t>(jobs, cells.size() - next);
        for (std::size_t k = 0; k < batch; ++k)
            futures[next + k] = std::async(std::launch::async,
                                           [&fn, &cells, i = next + k] { return fn(cells[i]); });
        for (std::size_t k = 0; k < batch; ++k) results[next + k] = futures[next + k].get();
        next += batch;
    }
    return results;
}

}  // namespace

int run_simulate(const ExperimentConfig& cfg, const RunContext& ctx) {
    const auto cells = resolve_cells(cfg);
    const auto csvs = run_cells(cells, ctx.jobs, [&](const Cell& c) {
        return trajectory_csv_with_gap(simulate_cell(c, cfg.integrate.tol));
    });
    for (std::size_t i = 0; i < cells.size(); ++i)
        write_file(fs::path(ctx.out_dir) / (cells[i].system->name + "_trajectory.csv"),
                   csvs[i]);
    return kExitOk;
}

int run_certify(const ExperimentConfig& cfg, const RunContext& ctx) {
    const auto cells = resolve_cells(cfg);
    struct CellResult {
        std::string json_text;
        std::vector<CertReport> reports;
    };
    const auto results = run_cells(cells, ctx.jobs, [&](const Cell& c) {
        const LyapunovSpec lyap = lyapunov_for_cell(cfg, *c.system);
        const Trajectory traj = simulate_cell(c, cfg.integrate.tol);
        const auto& opts = cfg.lyapunov.options;
        std::vector<CertReport> reports;
        reports.push_back(certify_monotone(traj, lyap, opts));
        reports.push_back(certify_main_nonneg(traj, lyap, opts));
        reports.push_back(certify_velocity_bound(traj, lyap, opts));
        reports.push_back(certify_rate_bound(traj, lyap, opts));
        const auto y = certify_y_growth(traj, lyap, opts);
        reports.push_back(y.first);
        reports.push_back(y.second);

        std::ostringstream os;
        os << "{\"system\":\"" << c.system->name << "\",\"threshold_T\":"
           << fmt(threshold_T(lyap)) << ",\"anchor\":\"T\","
           << "\"note\":\"inequalities evaluated on [T, t_end]; trajectory starts at t0="
           << fmt(c.t0) << " > 0 and integral terms are anchored at T\","
           << "\"lyapunov\":" << to_json(lyap) << ",\"reports\":" << to_json(reports) << "}";
        return CellResult{os.str(), reports};
    });

    bool all_pass = true;
    std::vector<CertReport> flat;
    // objective-level strong-convexity certificates, seeded from the run
    for (const auto& obj : cfg.objectives) {
        CertReport r = obj.spec.check_strong_convexity(200, ctx.seed + 1);
        r.inequality_id = obj.name + ":" + r.inequality_id;
        all_pass = all_pass && r.pass;
        flat.push_back(std::move(r));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        write_file(fs::path(ctx.out_dir) / (cells[i].system->name + "_certification.json"),
                   results[i].json_text);
        for (const auto& r : results[i].reports) {
            CertReport tagged = r;
            tagged.inequality_id = cells[i].system->name + ":" + r.inequality_id;
            flat.push_back(std::move(tagged));
            all_pass = all_pass && r.pass;
        }
    }
    write_file(fs::path(ctx.out_dir) / "certification_summary.csv", to_csv(flat));
    return all_pass ? kExitOk : kExitCertificationFailure;
}

int run_discover(const ExperimentConfig& cfg, const RunContext& ctx) {
    std::vector<SymsearchSection::Damping> dampings = cfg.symsearch.dampings;
    std::vector<Rational> mus;
    if (cfg.symsearch.from_systems) {
        for (const auto& s : cfg.systems) {
            if (s.spec.kind() == SystemSpec::Kind::GradientFlow) continue;
            dampings.push_back({s.spec.r(), s.spec.damping_exponent()});
            mus.push_back(s.mu_exact);
        }
    }
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < dampings.size(); ++i) {
        const Rational mu = cfg.symsearch.mu
                                ? *cfg.symsearch.mu
                                : (i < mus.size() ? mus[i] : Rational(1));
        std::vector<SearchCandidate> candidates;
        if (!cfg.symsearch.grid.empty()) {
            const PowerSum damping = PowerSum::monomial(dampings[i].rho, -dampings[i].beta);
            candidates = search(damping, cfg.symsearch.grid, mu);
        }
        if (i) os << ",";
        os << "{\"damping\":{\"rho\":\"" << to_string(dampings[i].rho) << "\",\"beta\":\""
           << to_string(dampings[i].beta) << "\"},\"mu\":\"" << to_string(mu)
           << "\",\"candidates\":" << to_json(candidates) << "}";
    }
    os << "]";
    write_file(fs::path(ctx.out_dir) / "candidates.json", os.str());
    return kExitOk;
}

int run_fit(const ExperimentConfig& cfg, const RunContext& ctx) {
    // synthetic input path: fit a recorded (t, f_gap) series
    if (!cfg.ratefit.input_csv.empty()) {
        std::ifstream is(cfg.ratefit.input_csv);
        if (!is) throw ConfigError("ratefit.input_csv: cannot open " + cfg.ratefit.input_csv);
        std::string header;
        std::getline(is, header);
        std::vector<std::string> cols;
        std::stringstream hs(header);
        std::string col;
        while (std::getline(hs, col, ',')) cols.push_back(col);
        const auto t_it = std::find(cols.begin(), cols.end(), "t");
        const auto g_it = std::find(cols.begin(), cols.end(), "f_gap");
        if (t_it == cols.end() || g_it == cols.end())
            throw ConfigError("ratefit.input_csv: need t and f_gap columns");
        const std::size_t ti = t_it - cols.begin(), gi = g_it - cols.begin();
        std::vector<std::pair<double, double>> series;
        std::string line;
        while (std::getline(is, line)) {
            std::stringstream ls(line);
            std::vector<std::string> fields;
            while (std::getline(ls, col, ',')) fields.push_back(col);
            if (fields.size() <= std::max(ti, gi)) continue;
            series.emplace_back(std::stod(fields[ti]), std::stod(fields[gi]));
        }
        if (cfg.ratefit.model == "auto")
            throw ConfigError("ratefit: input_csv needs an explicit model");
        FitModel model;
        model.kind = cfg.ratefit.model == "power-law" ? FitModel::Kind::PowerLaw
                                                      : FitModel::Kind::StretchedExponential;
        FitWindow window = cfg.ratefit.window.value_or(
            FitWindow{series.front().first, series.back().first});
        FitOptions fopts;
        fopts.envelope = cfg.ratefit.envelope;
        const RateFit f = fit_series(series, model, window, fopts);
        write_file(fs::path(ctx.out_dir) / "ratefit_input.json", to_json(f));
        return kExitOk;
    }

    const auto cells = resolve_cells(cfg);
    struct FitOutputs {
        std::string fit_json, comparison_json, comparison_csv;
        std::string gap_csv, logE_csv, weighted_csv;
    };
    const auto results = run_cells(cells, ctx.jobs, [&](const Cell& c) {
        FitOutputs out;
        const Trajectory traj = simulate_cell(c, cfg.integrate.tol);
        const auto& obj = traj.system().objective();
        const auto kind = c.system->spec.kind();

        FitModel model;
        if (cfg.ratefit.model == "power-law") {
            model.kind = FitModel::Kind::PowerLaw;
        } else if (cfg.ratefit.model == "stretched-exponential") {
            model.kind = FitModel::Kind::StretchedExponential;
            model.alpha = kind == SystemSpec::Kind::GeneralizedNag
                              ? c.system->spec.alpha_value()
                              : 0.0;
        } else {  // auto
            if (kind == SystemSpec::Kind::Nag) {
                model.kind = FitModel::Kind::PowerLaw;
            } else {
                model.kind = FitModel::Kind::StretchedExponential;
                model.alpha = kind == SystemSpec::Kind::GeneralizedNag
                                  ? c.system->spec.alpha_value()
                                  : 0.0;
            }
        }
        FitWindow window =
            cfg.ratefit.window.value_or(FitWindow{c.t_end / 10.0, c.t_end});
        FitOptions fopts;
        fopts.envelope = cfg.ratefit.envelope && kind != SystemSpec::Kind::GradientFlow;
        const RateFit f = fit(traj, model, window, fopts);
        out.fit_json = to_json(f);

        if (kind != SystemSpec::Kind::GradientFlow) {
            const auto comparison = compare_rates(
                c.system->spec.r_value(),
                kind == SystemSpec::Kind::GeneralizedNag
                    ? std::optional<double>(c.system->spec.alpha_value())
                    : std::nullopt,
                cfg.ratefit.epsilon);
            out.comparison_json = to_json(comparison);
            out.comparison_csv = to_csv(comparison);
        }

        // plot data: t vs f-gap, t vs logE, t vs weighted gap
        std::ostringstream gap_os, logE_os, weighted_os;
        gap_os << "t,f_gap\n";
        for (const auto& s : traj.samples())
            gap_os << fmt(s.t) << ',' << fmt(obj.eval(s.x) - obj.f_star()) << '\n';
        out.gap_csv = gap_os.str();
        if (kind != SystemSpec::Kind::GradientFlow) {
            const LyapunovSpec lyap = lyapunov_for_cell(cfg, *c.system);
            logE_os << "t,logE\n";
            weighted_os << "t,weighted_log_gap\n";
            for (const auto& s : traj.samples()) {
                const auto parts = eval_logE(lyap, traj.system(), State{s.t, s.x, s.v});
                if (parts.log_value) logE_os << fmt(s.t) << ',' << fmt(*parts.log_value) << '\n';
                const double gap = obj.eval(s.x) - obj.f_star();
                if (gap > 0.0)
                    weighted_os << fmt(s.t) << ',' << fmt(std::log(gap) + parts.gamma) << '\n';
            }
            out.logE_csv = logE_os.str();
            out.weighted_csv = weighted_os.str();
        }
        return out;
    });

    for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::string& name = cells[i].system->name;
        const fs::path dir(ctx.out_dir);
        write_file(dir / (name + "_ratefit.json"), results[i].fit_json);
        if (!results[i].comparison_json.empty()) {
            write_file(dir / (name + "_rate_comparison.json"), results[i].comparison_json);
            write_file(dir / (name + "_rate_comparison.csv"), results[i].comparison_csv);
        }
        write_file(dir / (name + "_gap.csv"), results[i].gap_csv);
        if (!results[i].logE_csv.empty()) {
            write_file(dir / (name + "_logE.csv"), results[i].logE_csv);
            write_file(dir / (name + "_weighted_gap.csv"), results[i].weighted_csv);
        }
    }
    return kExitOk;
}

int run_report(const RunContext& ctx) {
    const fs::path dir(ctx.out_dir);
    if (!fs::exists(dir)) throw ConfigError("report: output directory does not exist");
    json summary;
    summary["certifications"] = json::array();
    summary["ratefits"] = json::array();
    summary["candidates"] = json::array();
    std::vector<fs::path> paths;
    for (const auto& e : fs::directory_iterator(dir)) paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    bool any_failure = false;
    for (const auto& p : paths) {
        const std::string name = p.filename().string();
        auto read = [&p]() {
            std::ifstream is(p);
            std::stringstream buf;
            buf << is.rdbuf();
            return json::parse(buf.str());
        };
        if (name.size() > 19 && name.substr(name.size() - 19) == "_certification.json") {
            const json j = read();
            summary["certifications"].push_back(j);
            for (const auto& r : j["reports"])
                if (!r["pass"].get<bool>()) any_failure = true;
        } else if (name.size() > 13 && name.substr(name.size() - 13) == "_ratefit.json") {
            json j = read();
            j["source"] = name;
            summary["ratefits"].push_back(j);
        } else if (name == "candidates.json") {
            summary["candidates"] = read();
        }
    }
    summary["all_certifications_pass"] = !any_failure;
    write_file(dir / "summary.json", summary.dump(2));

    std::ostringstream txt;
    txt << "lyapflow report\n===============\n";
    for (const auto& c : summary["certifications"]) {
        txt << "system " << c["system"].get<std::string>() << " (T=" << c["threshold_T"]
            << ")\n";
        for (const auto& r : c["reports"])
            txt << "  " << (r["pass"].get<bool>() ? "PASS" : "FAIL") << "  "
                << r["inequality-id"].get<std::string>()
                << "  max-violation=" << r["max-violation"] << "\n";
    }
    for (const auto& f : summary["ratefits"])
        txt << "ratefit " << f["source"].get<std::string>() << ": slope=" << f["slope"]
            << " residual=" << f["residual"] << "\n";
    txt << (any_failure ? "RESULT: certification failures present\n"
                        : "RESULT: all certifications pass\n");
    write_file(dir / "summary.txt", txt.str());
    return kExitOk;
}

}  // namespace lyapflow
