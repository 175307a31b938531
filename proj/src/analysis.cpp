// analysis.cpp — Ratio formulas, sweeps and crossing search

#include "spinflop/analysis.hpp"
#include "spinflop/csv.hpp"
#include "spinflop/decoherence.hpp"
#include "spinflop/errors.hpp"
#include "spinflop/parallel.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace spinflop::analysis {

namespace {
constexpr double kPi = boost::math::constants::pi<double>();
}

double ratio_prefactor(double omega0, double temperature) {
    return 4.0 * kConstants.hbar * omega0 / (kPi * kPi * kConstants.k_boltzmann * temperature);
}

RatioPoint ratio_closed(const DriveParams& drive, const BathParams& bath) {
    drive.validate();
    bath.validate();
    if (drive.gamma == 0.0) throw ZeroDrive("tau_d / tau needs a nonzero drive");

    const double k = drive.k();
    const double bracket = -std::expm1(-k / bath.cutoff);
    const double ratio = ratio_prefactor(drive.omega0, bath.temperature) * (drive.omega0 / drive.gamma) / bracket;

    RatioPoint p;
    p.omega0_over_gamma = drive.omega0 / drive.gamma;
    p.k_over_lambda = k / bath.cutoff;
    p.temperature = bath.temperature;
    p.omega0 = drive.omega0;
    p.d_factor = decoherence::dfactor_closed_high_t(drive, bath).d_factor;
    p.tau_d = 1.0 / p.d_factor;
    p.tau = 2.0 * kPi / drive.gamma;
    p.ratio = p.tau_d / p.tau;
    p.tau_d_strict = 0.25 * p.tau_d;

    if (std::abs(p.ratio - ratio) > 1e-12 * std::abs(ratio))
        throw InvariantBreach("ratio routes disagree: " + std::to_string(p.ratio) + " vs " + std::to_string(ratio));
    return p;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi >= lo) || n == 0) throw std::invalid_argument("logspace: need 0 < lo <= hi and n > 0");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> default_k_over_lambda_grid() { return logspace(0.01, 10.0, 200); }

std::vector<RatioPoint> sweep_figure1(double omega0, double temperature, std::span<const double> omega0_over_gamma_list,
                                      std::span<const double> k_over_lambda_grid) {
    if (omega0_over_gamma_list.empty() || k_over_lambda_grid.empty())
        throw std::invalid_argument("sweep_figure1: grids must be non-empty");
    for (double x : k_over_lambda_grid)
        if (!(x > 0.0)) throw std::invalid_argument("sweep_figure1: k/lambda values must be > 0");
    for (double r : omega0_over_gamma_list)
        if (!(r > 0.0)) throw std::invalid_argument("sweep_figure1: omega0/gamma values must be > 0");

    const std::size_t n = k_over_lambda_grid.size();
    std::vector<RatioPoint> rows(omega0_over_gamma_list.size() * n);
    parallel_for(rows.size(), [&](std::size_t i) {
        const double r = omega0_over_gamma_list[i / n];
        const double x = k_over_lambda_grid[i % n];
        const DriveParams drive{omega0, omega0 / r, omega0};
        const BathParams bath{temperature, drive.k() / x, CothMode::high_t()};
        rows[i] = ratio_closed(drive, bath);
        rows[i].omega0_over_gamma = r;
        rows[i].k_over_lambda = x;
    });
    return rows;
}

std::optional<double> crossing_point(double omega0_over_gamma, double omega0, double temperature) {
    if (!(omega0_over_gamma > 0.0) || !(omega0 > 0.0) || !(temperature > 0.0))
        throw std::invalid_argument("crossing_point: inputs must be positive");
    const DriveParams drive{omega0, omega0 / omega0_over_gamma, omega0};
    const double k = drive.k();
    auto excess = [&](double x) {
        return ratio_closed(drive, BathParams{temperature, k / x, CothMode::high_t()}).ratio - 1.0;
    };
    double lo = 1e-6, hi = 50.0;
    if (excess(lo) < 0.0 || excess(hi) > 0.0) return std::nullopt;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        const double f = excess(mid);
        (f > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

void write_figure1_csv(std::ostream& os, std::span<const RatioPoint> rows, const CsvFormat& fmt) {
    write_csv_header(os, {"curve_omega0_over_gamma", "k_over_lambda", "d_factor_per_s", "tau_d_s", "tau_s", "ratio",
                          "tau_d_strict_s"});
    for (const auto& p : rows)
        write_csv_row(os, {p.omega0_over_gamma, p.k_over_lambda, p.d_factor, p.tau_d, p.tau, p.ratio, p.tau_d_strict},
                      fmt);
}

} // namespace spinflop::analysis
