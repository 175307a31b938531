// cli.cpp — Config grammar, overrides and the subcommand pipelines

#include "spinflop/cli.hpp"
#include "spinflop/analysis.hpp"
#include "spinflop/csv.hpp"
#include "spinflop/errors.hpp"
#include "spinflop/kernels.hpp"
#include "spinflop/propagator.hpp"
#include "spinflop/rabi.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace spinflop::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string{s.substr(b, e - b + 1)};
}

[[noreturn]] void bad_value(const std::string& where, const std::string& key, const std::string& value,
                            const std::string& expected) {
    throw ConfigError(where + ": key '" + key + "': invalid value '" + value + "' (expected " + expected + ")");
}

double parse_double(const std::string& key, const std::string& raw, const std::string& where) {
    const std::string v = trim(raw);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
        bad_value(where, key, raw, "a finite number");
    return out;
}

int parse_int(const std::string& key, const std::string& raw, const std::string& where) {
    const std::string v = trim(raw);
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) bad_value(where, key, raw, "an integer");
    return out;
}

bool parse_bool(const std::string& key, const std::string& raw, const std::string& where) {
    const std::string v = trim(raw);
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    bad_value(where, key, raw, "true or false");
}

std::vector<double> parse_list(const std::string& key, const std::string& raw, const std::string& where) {
    std::vector<double> out;
    for (const auto& item : split_csv_line(raw)) out.push_back(parse_double(key, item, where));
    if (out.empty()) bad_value(where, key, raw, "a comma-separated list of numbers");
    return out;
}

// "name" or "name:N"
std::pair<std::string, std::optional<int>> parse_tagged(const std::string& key, const std::string& raw,
                                                        const std::string& where) {
    const std::string v = trim(raw);
    const auto colon = v.find(':');
    if (colon == std::string::npos) return {v, std::nullopt};
    return {v.substr(0, colon), parse_int(key, v.substr(colon + 1), where)};
}

CothMode parse_coth_mode(const std::string& key, const std::string& raw, const std::string& where) {
    const auto [name, order] = parse_tagged(key, raw, where);
    if (name == "high_t" && !order) return CothMode::high_t();
    if (name == "exact" && !order) return CothMode::exact();
    if (name == "series" && order && *order >= 0 && *order <= kMaxSeriesOrder) return CothMode::series(*order);
    bad_value(where, key, raw, "high_t, exact or series:N with 0 <= N <= 20");
}

decoherence::A1Mode parse_a1_mode(const std::string& key, const std::string& raw, const std::string& where) {
    const auto [name, order] = parse_tagged(key, raw, where);
    if (name == "exact" && !order) return decoherence::A1Mode::exact();
    if (name == "series" && order && *order >= 1) return decoherence::A1Mode::series(*order);
    bad_value(where, key, raw, "exact or series:N with N >= 1");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value, const std::string& where)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto number = [&t](const std::string& key, auto member) {
            t[key] = [member](RunConfig& c, const std::string& k, const std::string& v, const std::string& w) {
                member(c) = parse_double(k, v, w);
            };
        };
        auto integer = [&t](const std::string& key, auto member) {
            t[key] = [member](RunConfig& c, const std::string& k, const std::string& v, const std::string& w) {
                member(c) = parse_int(k, v, w);
            };
        };
        auto flag = [&t](const std::string& key, auto member) {
            t[key] = [member](RunConfig& c, const std::string& k, const std::string& v, const std::string& w) {
                member(c) = parse_bool(k, v, w);
            };
        };
        auto text = [&t](const std::string& key, auto member, std::vector<std::string> allowed) {
            t[key] = [member, allowed](RunConfig& c, const std::string& k, const std::string& v, const std::string& w) {
                const std::string s = trim(v);
                if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
                    std::string list;
                    for (const auto& a : allowed) list += (list.empty() ? "" : " | ") + a;
                    bad_value(w, k, v, list);
                }
                if (s.empty()) bad_value(w, k, v, "a non-empty string");
                member(c) = s;
            };
        };

        number("system.omega0_rad_per_s", [](RunConfig& c) -> auto& { return c.system.omega0_rad_per_s; });
        number("system.gamma_rad_per_s", [](RunConfig& c) -> auto& { return c.system.gamma_rad_per_s; });
        number("system.omega_rad_per_s", [](RunConfig& c) -> auto& { return c.system.omega_rad_per_s; });
        number("system.field_gauss", [](RunConfig& c) -> auto& { return c.system.field_gauss; });
        number("bath.temperature_K", [](RunConfig& c) -> auto& { return c.bath.temperature_K; });
        number("bath.cutoff_rad_per_s", [](RunConfig& c) -> auto& { return c.bath.cutoff_rad_per_s; });
        t["bath.coth_mode"] = [](RunConfig& c, const std::string& k, const std::string& v, const std::string& w) {
            c.bath.coth_mode = parse_coth_mode(k, v, w);
        };
        number("numerics.quad_rel_tol", [](RunConfig& c) -> auto& { return c.numerics.quad_rel_tol; });
        number("numerics.ode_dt_s", [](RunConfig& c) -> auto& { return c.numerics.ode_dt_s; });
        number("numerics.t_final_s", [](RunConfig& c) -> auto& { return c.numerics.t_final_s; });
        t["numerics.epsilon_list"] = [](RunConfig& c, const std::string& k, const std::string& v, const std::string& w) {
            c.numerics.epsilon_list = parse_list(k, v, w);
        };
        t["numerics.a1_mode"] = [](RunConfig& c, const std::string& k, const std::string& v, const std::string& w) {
            c.numerics.a1_mode = parse_a1_mode(k, v, w);
        };
        integer("numerics.grid_points", [](RunConfig& c) -> auto& { return c.numerics.grid_points; });
        integer("numerics.gamma_order", [](RunConfig& c) -> auto& { return c.numerics.gamma_order; });
        flag("dynamics.unitary", [](RunConfig& c) -> auto& { return c.dynamics.toggles.unitary; });
        flag("dynamics.dephasing", [](RunConfig& c) -> auto& { return c.dynamics.toggles.dephasing; });
        flag("dynamics.d1", [](RunConfig& c) -> auto& { return c.dynamics.toggles.d1; });
        flag("dynamics.d2", [](RunConfig& c) -> auto& { return c.dynamics.toggles.d2; });
        flag("dynamics.lamb_shifts", [](RunConfig& c) -> auto& { return c.dynamics.toggles.lamb_shifts; });
        text("dynamics.initial_state", [](RunConfig& c) -> auto& { return c.dynamics.initial_state; },
             {"plus_x", "up", "down"});
        text("dynamics.d_factor_source", [](RunConfig& c) -> auto& { return c.dynamics.d_factor_source; },
             {"closed", "quadrature"});
        t["sweep.omega0_over_gamma_list"] = [](RunConfig& c, const std::string& k, const std::string& v,
                                               const std::string& w) {
            c.sweep.omega0_over_gamma_list = parse_list(k, v, w);
        };
        number("sweep.k_over_lambda_min", [](RunConfig& c) -> auto& { return c.sweep.k_over_lambda_min; });
        number("sweep.k_over_lambda_max", [](RunConfig& c) -> auto& { return c.sweep.k_over_lambda_max; });
        integer("sweep.k_over_lambda_points", [](RunConfig& c) -> auto& { return c.sweep.k_over_lambda_points; });
        text("output.path", [](RunConfig& c) -> auto& { return c.output.path; }, {});
        integer("output.precision", [](RunConfig& c) -> auto& { return c.output.precision; });
        return t;
    }();
    return table;
}

double require(const std::optional<double>& v, const char* key) {
    if (!v) throw ConfigError("missing required key '" + std::string{key} + "'");
    return *v;
}

void require_positive(double v, const std::string& key) {
    if (!(v > 0.0)) throw ConfigError("key '" + key + "' must be > 0");
}

void require_positive(const std::optional<double>& v, const std::string& key) {
    if (v) require_positive(*v, key);
}

} // namespace

DriveParams RunConfig::drive() const {
    DriveParams d;
    d.omega0 = require(system.omega0_rad_per_s, "system.omega0_rad_per_s");
    if (system.gamma_rad_per_s) {
        d.gamma = *system.gamma_rad_per_s;
    } else if (system.field_gauss) {
        d.gamma = gamma_from_field(*system.field_gauss);
    } else {
        throw ConfigError("missing required key 'system.gamma_rad_per_s' (or 'system.field_gauss')");
    }
    d.omega = system.omega_rad_per_s.value_or(d.omega0);
    return d;
}

BathParams RunConfig::bath_params() const {
    return BathParams{require(bath.temperature_K, "bath.temperature_K"),
                      require(bath.cutoff_rad_per_s, "bath.cutoff_rad_per_s"), bath.coth_mode};
}

double RunConfig::omega0() const { return require(system.omega0_rad_per_s, "system.omega0_rad_per_s"); }

double RunConfig::temperature() const { return require(bath.temperature_K, "bath.temperature_K"); }

void RunConfig::validate() const {
    if (system.gamma_rad_per_s && system.field_gauss)
        throw ConfigError("keys 'system.gamma_rad_per_s' and 'system.field_gauss' are mutually exclusive");
    require_positive(system.omega0_rad_per_s, "system.omega0_rad_per_s");
    require_positive(system.omega_rad_per_s, "system.omega_rad_per_s");
    if (system.gamma_rad_per_s && !(*system.gamma_rad_per_s >= 0.0))
        throw ConfigError("key 'system.gamma_rad_per_s' must be >= 0");
    if (system.field_gauss && !(*system.field_gauss >= 0.0))
        throw ConfigError("key 'system.field_gauss' must be >= 0");
    require_positive(bath.temperature_K, "bath.temperature_K");
    require_positive(bath.cutoff_rad_per_s, "bath.cutoff_rad_per_s");
    require_positive(numerics.quad_rel_tol, "numerics.quad_rel_tol");
    require_positive(numerics.ode_dt_s, "numerics.ode_dt_s");
    require_positive(numerics.t_final_s, "numerics.t_final_s");
    for (double e : numerics.epsilon_list) require_positive(e, "numerics.epsilon_list");
    if (numerics.grid_points < 2) throw ConfigError("key 'numerics.grid_points' must be >= 2");
    if (numerics.gamma_order < 1) throw ConfigError("key 'numerics.gamma_order' must be >= 1");
    for (double r : sweep.omega0_over_gamma_list) require_positive(r, "sweep.omega0_over_gamma_list");
    require_positive(sweep.k_over_lambda_min, "sweep.k_over_lambda_min");
    if (!(sweep.k_over_lambda_max >= sweep.k_over_lambda_min))
        throw ConfigError("key 'sweep.k_over_lambda_max' must be >= sweep.k_over_lambda_min");
    if (sweep.k_over_lambda_points < 1) throw ConfigError("key 'sweep.k_over_lambda_points' must be >= 1");
    if (output.precision < 1 || output.precision > 17) throw ConfigError("key 'output.precision' must be in [1, 17]");
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, setter] : setters()) k.push_back(name);
        return k;
    }();
    return keys;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value, const std::string& where) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + ": unknown key '" + key + "'");
    it->second(cfg, key, value, where);
}

RunConfig parse_config(std::istream& in, const std::string& origin, RunConfig base) {
    std::string line;
    std::map<std::string, int> seen;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        const std::string where = origin + ":" + std::to_string(lineno);
        const std::string body = trim(std::string_view{line}.substr(0, line.find('#')));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'section.key = value', got '" + body + "'");
        const std::string key = trim(std::string_view{body}.substr(0, eq));
        const std::string value = trim(std::string_view{body}.substr(eq + 1));
        if (key.find('.') == std::string::npos) throw ConfigError(where + ": key '" + key + "' has no section");
        if (const auto prev = seen.find(key); prev != seen.end())
            throw ConfigError(where + ": key '" + key + "' already set on line " + std::to_string(prev->second));
        seen[key] = lineno;
        apply_setting(base, key, value, where);
    }
    return base;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

RunConfig resolve_config(const std::optional<std::string>& path, const std::map<std::string, std::string>& overrides) {
    RunConfig cfg = path ? load_config(*path) : RunConfig{};
    for (const auto& [key, value] : overrides) apply_setting(cfg, key, value, "--" + key);
    cfg.validate();
    return cfg;
}

namespace {

struct Context {
    const RunConfig& cfg;
    std::ostream& out; // CSV
    std::ostream& err; // diagnostics
    CsvFormat fmt;

    kernels::QuadratureSettings quad() const {
        kernels::QuadratureSettings q;
        q.rel_tol = cfg.numerics.quad_rel_tol;
        return q;
    }
};

void note(std::ostream& err, const std::string& key, double value) {
    err << "# " << key << " = " << format_number(value, CsvFormat{}) << '\n';
}

std::vector<double> linspace(double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = hi * i / (n - 1);
    return g;
}

double default_dt(const RunConfig& cfg, const DriveParams& drive) {
    return cfg.numerics.ode_dt_s.value_or(0.01 / drive.k());
}

std::size_t stride_for(double t_final, double dt, int points) {
    const double steps = std::ceil(t_final / dt);
    return std::max<std::size_t>(1, static_cast<std::size_t>(steps / points));
}

void cmd_rabi(const Context& c) {
    const auto drive = c.cfg.drive();
    const double t_final = c.cfg.numerics.t_final_s.value_or(2.0 * rabi::retrieval_period(drive).tau);
    const double dt = default_dt(c.cfg, drive);
    const auto res = rabi::evolve_tdse(drive, rabi::SpinState::up(), t_final, dt,
                                       stride_for(t_final, dt, c.cfg.numerics.grid_points));
    write_csv_header(c.out, {"t", "p_closed", "p_tdse", "abs_diff"});
    double worst = 0.0;
    for (const auto& s : res.samples) {
        const double closed = rabi::transition_probability(drive, s.t);
        const double tdse = std::norm(s.state.c_minus);
        worst = std::max(worst, std::abs(closed - tdse));
        write_csv_row(c.out, {s.t, closed, tdse, std::abs(closed - tdse)}, c.fmt);
    }
    note(c.err, "max_abs_diff", worst);
    note(c.err, "peak_norm_drift", res.peak_norm_drift);
    note(c.err, "steps", static_cast<double>(res.steps));
}

void cmd_coeffs(const Context& c) {
    const auto drive = c.cfg.drive();
    const double t_final = c.cfg.numerics.t_final_s.value_or(2.0 * std::acos(-1.0) / drive.k());
    const auto grid = linspace(t_final, c.cfg.numerics.grid_points);
    const auto report = propagator::consistency_report(drive, grid);
    propagator::write_consistency_csv(c.out, report, c.fmt);
    note(c.err, "printed_a4_at_0", report.rows.front().printed.a4);
    note(c.err, "max_oracle_a4", report.max_oracle_a4);
    note(c.err, "max_oracle_norm_defect", report.max_oracle_norm_defect);
    note(c.err, "max_abs_diff_a1", report.max_abs_diff.a1);
    note(c.err, "max_abs_diff_a2", report.max_abs_diff.a2);
    note(c.err, "max_abs_diff_a3", report.max_abs_diff.a3);
    note(c.err, "max_abs_diff_a4", report.max_abs_diff.a4);
    note(c.err, "branch_crossings", static_cast<double>(report.branch_crossings.size()));
}

void cmd_kernels(const Context& c) {
    const auto bath = c.cfg.bath_params();
    const double t_final = c.cfg.numerics.t_final_s.value_or(10.0 / bath.cutoff);
    const auto grid = linspace(t_final, c.cfg.numerics.grid_points);
    const auto table = kernels::kernel_table(bath, grid, c.quad());
    kernels::write_kernel_csv(c.out, table, c.fmt);
}

void cmd_dfactor(const Context& c) {
    const auto drive = c.cfg.drive();
    const auto bath = c.cfg.bath_params();
    const auto q = c.quad();
    const int series_order = bath.coth_mode.kind == CothMode::Kind::Series ? bath.coth_mode.order : 10;

    std::vector<decoherence::DFactorRow> rows;
    rows.push_back({decoherence::dfactor_quadrature(drive, bath, c.cfg.numerics.a1_mode, q, c.cfg.numerics.epsilon_list),
                    drive, bath});
    rows.push_back({decoherence::dfactor_closed_high_t(drive, bath), drive, bath});
    auto optional_route = [&](const char* name, auto&& fn) {
        try {
            rows.push_back({fn(), drive, bath});
        } catch (const SeriesInvalid& e) {
            c.err << "# " << name << " skipped: " << e.what() << '\n';
        }
    };
    optional_route("series_t", [&] { return decoherence::dfactor_series_t(drive, bath, series_order); });
    optional_route("higher_order",
                   [&] { return decoherence::dfactor_higher_order(drive, bath, c.cfg.numerics.gamma_order); });
    decoherence::write_dfactor_csv(c.out, rows, c.fmt);

    for (const auto& r : rows)
        if (r.result.negative_d_factor) c.err << "# " << decoherence::method_name(r.result.method) << ": negative D\n";
    if (drive.gamma > 0.0) {
        try {
            const auto rep = decoherence::higher_order_report(drive, bath, c.cfg.numerics.gamma_order, q);
            note(c.err, "higher_order", rep.higher_order);
            note(c.err, "quadrature_exact_a1", rep.quadrature_exact_a1);
            note(c.err, "higher_order_abs_deviation", rep.abs_deviation);
            note(c.err, "higher_order_rel_deviation", rep.rel_deviation);
        } catch (const SeriesInvalid& e) {
            c.err << "# higher-order report skipped: " << e.what() << '\n';
        }
    }
}

void cmd_evolve(const Context& c) {
    const auto drive = c.cfg.drive();
    const auto bath = c.cfg.bath_params();
    const auto& dyn = c.cfg.dynamics;
    const double d_factor =
        dyn.d_factor_source == "quadrature"
            ? decoherence::dfactor_quadrature(drive, bath, c.cfg.numerics.a1_mode, c.quad(), c.cfg.numerics.epsilon_list)
                  .d_factor
            : decoherence::dfactor_closed_high_t(drive, bath).d_factor;
    decoherence::SuperopCoefficients coeffs;
    if (dyn.toggles.d1 || dyn.toggles.d2 || dyn.toggles.lamb_shifts)
        coeffs = decoherence::superop_coefficients(drive, bath, c.quad());

    rabi::SpinState psi = rabi::SpinState::up();
    if (dyn.initial_state == "down") psi = rabi::SpinState::down();
    if (dyn.initial_state == "plus_x") psi = {cplx{1.0 / std::sqrt(2.0)}, cplx{1.0 / std::sqrt(2.0)}};
    const auto rho0 = dynamics::DensityMatrix2::from_state(psi);

    double t_final = 0.0;
    if (c.cfg.numerics.t_final_s) {
        t_final = *c.cfg.numerics.t_final_s;
    } else if (d_factor > 0.0) {
        t_final = 3.0 / (4.0 * d_factor);
    } else {
        throw ConfigError("missing required key 'numerics.t_final_s' (no decoherence to set a default)");
    }
    const double dt = default_dt(c.cfg, drive);
    const auto traj = dynamics::evolve_master(drive, coeffs, d_factor, rho0, t_final, dt, dyn.toggles,
                                              stride_for(t_final, dt, c.cfg.numerics.grid_points));
    dynamics::write_trajectory_csv(c.out, traj, c.fmt);

    note(c.err, "d_factor", d_factor);
    note(c.err, "offdiag_rate_double_commutator", 4.0 * d_factor);
    note(c.err, "offdiag_rate_printed", d_factor);
    if (coeffs.shift_z != 0.0 || std::abs(coeffs.kappa_x) > 0.0) {
        note(c.err, "shift_z", coeffs.shift_z);
        note(c.err, "shift_x", coeffs.shift_x);
        note(c.err, "shift_y", coeffs.shift_y);
        note(c.err, "kappa_x_abs", std::abs(coeffs.kappa_x));
        note(c.err, "kappa_y_abs", std::abs(coeffs.kappa_y));
    }
    note(c.err, "max_trace_drift", traj.max_trace_drift);
    note(c.err, "max_hermiticity_residue", traj.max_hermiticity_residue);
    note(c.err, "min_eigenvalue", traj.min_eigenvalue);
    try {
        note(c.err, "fitted_offdiag_rate", dynamics::extract_decay_rate(traj));
    } catch (const std::exception& e) {
        c.err << "# fitted_offdiag_rate unavailable: " << e.what() << '\n';
    }
}

void cmd_figure1(const Context& c) {
    const auto& s = c.cfg.sweep;
    const auto grid =
        analysis::logspace(s.k_over_lambda_min, s.k_over_lambda_max, static_cast<std::size_t>(s.k_over_lambda_points));
    const auto rows = analysis::sweep_figure1(c.cfg.omega0(), c.cfg.temperature(), s.omega0_over_gamma_list, grid);
    analysis::write_figure1_csv(c.out, rows, c.fmt);
    c.err << "# drive at resonance (omega = omega0); k = sqrt(gamma^2 + omega0^2); lambda = k / (k/lambda)\n"
          << "# tau_d = 1/D; tau_d_strict = 1/(4 D)\n";
    note(c.err, "prefactor", analysis::ratio_prefactor(c.cfg.omega0(), c.cfg.temperature()));
}

void cmd_crossing(const Context& c) {
    write_csv_header(c.out, {"omega0_over_gamma", "has_crossing", "k_over_lambda_star"});
    for (double r : c.cfg.sweep.omega0_over_gamma_list) {
        const auto x = analysis::crossing_point(r, c.cfg.omega0(), c.cfg.temperature());
        write_csv_row(c.out, {r, x ? 1.0 : 0.0, x.value_or(0.0)}, c.fmt);
    }
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Driven spin-1/2 in an ohmic bath: Rabi dynamics, decoherence factor and tau_d / tau sweeps",
                 "spinflop"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("-c,--config", config_path, "configuration file (section.key = value lines)");

    std::vector<std::string> values(known_keys().size());
    std::vector<CLI::Option*> options;
    for (std::size_t i = 0; i < known_keys().size(); ++i)
        options.push_back(app.add_option("--" + known_keys()[i], values[i]));

    const std::vector<std::pair<std::string, std::function<void(const Context&)>>> commands{
        {"rabi", cmd_rabi},       {"coeffs", cmd_coeffs},   {"kernels", cmd_kernels},   {"dfactor", cmd_dfactor},
        {"evolve", cmd_evolve},   {"figure1", cmd_figure1}, {"crossing", cmd_crossing},
    };
    const std::map<std::string, std::string> descriptions{
        {"rabi", "closed-form transition probability vs RK4 Schroedinger evolution"},
        {"coeffs", "printed a1..a4 vs the Heisenberg-picture oracle"},
        {"kernels", "noise and dissipation kernels on a time grid"},
        {"dfactor", "decoherence factor by every route"},
        {"evolve", "master-equation trajectory"},
        {"figure1", "tau_d / tau against k/lambda"},
        {"crossing", "k/lambda where tau_d / tau = 1"},
    };
    for (const auto& [name, fn] : commands) app.add_subcommand(name, descriptions.at(name))->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "ConfigError: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        std::map<std::string, std::string> overrides;
        for (std::size_t i = 0; i < options.size(); ++i)
            if (options[i]->count() > 0) overrides[known_keys()[i]] = values[i];
        const RunConfig cfg =
            resolve_config(config_path.empty() ? std::nullopt : std::optional<std::string>{config_path}, overrides);

        std::ofstream file;
        std::ostream* csv = &out;
        if (cfg.output.path != "-") {
            file.open(cfg.output.path, std::ios::binary);
            if (!file) throw ConfigError("cannot open output file '" + cfg.output.path + "'");
            csv = &file;
        }
        const Context ctx{cfg, *csv, err, CsvFormat{cfg.output.precision}};
        for (const auto& [name, fn] : commands)
            if (app.got_subcommand(name)) fn(ctx);
        csv->flush();
        if (!*csv) throw ConfigError("failed writing output");
    } catch (const ConfigError& e) {
        err << "ConfigError: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "NumericalError: " << e.what() << '\n';
        return kNumericalError;
    }
    return kOk;
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

} // namespace spinflop::cli
