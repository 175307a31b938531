// cli.hpp — Run configuration and subcommand dispatch for the spinflop tool

#pragma once

#include "spinflop/core.hpp"
#include "spinflop/decoherence.hpp"
#include "spinflop/dynamics.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinflop::cli {

/// Missing, unknown or malformed configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalError = 3 };

struct SystemSection {
    std::optional<double> omega0_rad_per_s;
    std::optional<double> gamma_rad_per_s;
    std::optional<double> omega_rad_per_s; // defaults to omega0
    std::optional<double> field_gauss;     // alternative to gamma
};

struct BathSection {
    std::optional<double> temperature_K;
    std::optional<double> cutoff_rad_per_s;
    CothMode coth_mode{CothMode::high_t()};
};

struct NumericsSection {
    double quad_rel_tol{1e-9};
    std::optional<double> ode_dt_s;  // default 0.01 / k
    std::optional<double> t_final_s; // default depends on the subcommand
    std::vector<double> epsilon_list{decoherence::kDefaultEpsilons.begin(), decoherence::kDefaultEpsilons.end()};
    decoherence::A1Mode a1_mode{decoherence::A1Mode::series(1)};
    int grid_points{200};
    int gamma_order{3};
};

struct DynamicsSection {
    dynamics::TermToggles toggles{};
    std::string initial_state{"plus_x"}; // plus_x | up | down
    std::string d_factor_source{"closed"}; // closed | quadrature
};

struct SweepSection {
    std::vector<double> omega0_over_gamma_list{10.0, 100.0, 1000.0};
    double k_over_lambda_min{0.01};
    double k_over_lambda_max{10.0};
    int k_over_lambda_points{200};
};

struct OutputSection {
    std::string path{"-"}; // "-" writes to stdout
    int precision{17};
};

struct RunConfig {
    SystemSection system;
    BathSection bath;
    NumericsSection numerics;
    DynamicsSection dynamics;
    SweepSection sweep;
    OutputSection output;

    /// Drive parameters; ConfigError naming the key when one is missing.
    DriveParams drive() const;
    /// Bath parameters; ConfigError naming the key when one is missing.
    BathParams bath_params() const;
    double omega0() const;
    double temperature() const;
    /// Checks cross-key constraints (gamma vs field_gauss, positivity, list contents).
    void validate() const;
};

/// Every recognised `section.key`.
const std::vector<std::string>& known_keys();

/// Sets one key from its textual value. `where` prefixes error messages.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value, const std::string& where);

/// Parses `section.key = value` lines; `#` starts a comment, blank lines are ignored.
/// Errors carry the line number and key.
RunConfig parse_config(std::istream& in, const std::string& origin, RunConfig base = {});

RunConfig load_config(const std::string& path);

/// File values, then `--section.key value` overrides, then validation.
RunConfig resolve_config(const std::optional<std::string>& path, const std::map<std::string, std::string>& overrides);

/// spinflop <rabi|coeffs|kernels|dfactor|evolve|figure1|crossing> [-c FILE] [--section.key VALUE ...]
/// CSV goes to output.path (or `out`), diagnostics to `err`. Returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

} // namespace spinflop::cli
