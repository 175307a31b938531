// analysis.hpp — Decoherence time, the tau_d / tau ratio, the ratio sweep over k/lambda
// and the points where the ratio crosses one

#pragma once

#include "spinflop/core.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace spinflop {
struct CsvFormat;
}

namespace spinflop::analysis {

struct RatioPoint {
    double omega0_over_gamma{0.0};
    double k_over_lambda{0.0};
    double temperature{0.0}; // K
    double omega0{0.0};      // rad/s
    double d_factor{0.0};    // 1/s
    double tau_d{0.0};       // 1/d_factor
    double tau{0.0};         // 2 pi / gamma
    double ratio{0.0};       // tau_d / tau
    double tau_d_strict{0.0}; // 1/(4 d_factor), the e-folding time of the double commutator
};

/// 4 hbar omega0 / (pi^2 k_B T).
double ratio_prefactor(double omega0, double temperature);

/// tau_d / tau = prefactor (omega0/gamma) / (1 - exp(-k/lambda)), cross-checked against
/// (1/D) / (2 pi / gamma) from the closed high-temperature D. Throws ZeroDrive for gamma = 0.
RatioPoint ratio_closed(const DriveParams& drive, const BathParams& bath);

/// n log-spaced points from lo to hi inclusive.
std::vector<double> logspace(double lo, double hi, std::size_t n);

/// 200 log-spaced points over [0.01, 10].
std::vector<double> default_k_over_lambda_grid();

/// One row per (curve, grid point), ordered by curve then grid index. Drive at resonance with
/// gamma = omega0 / (omega0/gamma); lambda = k / (k/lambda).
std::vector<RatioPoint> sweep_figure1(double omega0, double temperature, std::span<const double> omega0_over_gamma_list,
                                      std::span<const double> k_over_lambda_grid);

/// k/lambda where the ratio equals one, by bisection over [1e-6, 50] to 1e-10. Below it the
/// ratio exceeds one. std::nullopt when the curve does not cross one inside the interval.
std::optional<double> crossing_point(double omega0_over_gamma, double omega0, double temperature);

/// Columns: curve_omega0_over_gamma, k_over_lambda, d_factor_per_s, tau_d_s, tau_s, ratio, tau_d_strict_s.
void write_figure1_csv(std::ostream& os, std::span<const RatioPoint> rows, const CsvFormat& fmt);

} // namespace spinflop::analysis
