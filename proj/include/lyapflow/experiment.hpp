#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lyapflow/lyapunov.hpp"
#include "lyapflow/ratefit.hpp"

namespace lyapflow {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitCertificationFailure = 1,
    kExitConfigError = 2,
    kExitIntegrationFailure = 3,
};

struct ObjectiveDecl {
    std::string name;
    ObjectiveSpec spec = ObjectiveSpec::quadratic({1.0}, {0.0}, 0.0, 1.0);
    Rational mu_exact = Rational(1);
};

struct SystemDecl {
    std::string name;
    SystemSpec spec = SystemSpec::gradient_flow(ObjectiveSpec::quadratic({1.0}, {0.0}, 0.0, 1.0));
    Rational mu_exact = Rational(1);
    std::vector<double> x0;
    std::vector<double> v0;
};

struct IntegrateSection {
    double t0 = 0.1;
    std::optional<double> t_end;
    std::optional<double> gamma_cap;  // mutually exclusive with t_end
    Tolerances tol{1e-10, 1e-12};
    int samples = 800;
    std::vector<double> x0;  // optional global default
    std::vector<double> v0;
};

struct LyapunovSection {
    // "auto" selects paper-nag / paper-alpha from the system kind
    std::string spec = "auto";
    std::optional<int> discovered_index;
    std::optional<Rational> g_scale;            // mutation: scale g
    std::optional<Rational> gamma_prime_scale;  // mutation: scale gamma'
    CertifyOptions options;
};

struct SymsearchSection {
    std::vector<Rational> grid;
    std::optional<Rational> mu;  // defaults to each damping's objective mu
    struct Damping {
        Rational rho;
        Rational beta;
    };
    std::vector<Damping> dampings;
    bool from_systems = false;
};

struct RatefitSection {
    std::string model = "auto";  // power-law | stretched-exponential | auto
    std::optional<FitWindow> window;
    bool envelope = true;
    double epsilon = 0.01;
    std::string input_csv;  // fit a pre-recorded trajectory CSV instead
};

struct ExperimentConfig {
    int schema_version = 1;
    std::uint64_t seed = 0;
    std::string output_dir;
    std::vector<ObjectiveDecl> objectives;
    std::vector<SystemDecl> systems;
    IntegrateSection integrate;
    LyapunovSection lyapunov;
    SymsearchSection symsearch;
    RatefitSection ratefit;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_json(const std::string& text);

struct RunContext {
    std::string out_dir;
    std::uint64_t seed = 0;
    int jobs = 1;
};

// Per-system resolved run: end time (gamma-cap aware), initial state, grid.
struct Cell {
    const SystemDecl* system = nullptr;
    double t0 = 0.0, t_end = 0.0;
    std::vector<double> x0, v0;
    std::vector<double> grid;
};

std::vector<Cell> resolve_cells(const ExperimentConfig& cfg);

// Builds the Lyapunov spec a cell certifies against (mutations applied).
LyapunovSpec lyapunov_for_cell(const ExperimentConfig& cfg, const SystemDecl& sys);

Trajectory simulate_cell(const Cell& cell, const Tolerances& tol);

int run_simulate(const ExperimentConfig& cfg, const RunContext& ctx);
int run_certify(const ExperimentConfig& cfg, const RunContext& ctx);
int run_discover(const ExperimentConfig& cfg, const RunContext& ctx);
int run_fit(const ExperimentConfig& cfg, const RunContext& ctx);
int run_report(const RunContext& ctx);

// log-spaced grid on [t0, t_end] with exact endpoints
std::vector<double> log_grid(double t0, double t_end, int n);

}  // namespace lyapflow
