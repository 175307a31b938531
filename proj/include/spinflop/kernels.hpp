// kernels.hpp — Ohmic spectral density, noise/dissipation kernels and the
// panelled Gauss-Kronrod engine used for every semi-infinite integral

#pragma once

#include "spinflop/core.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace spinflop {
struct CsvFormat;
}

namespace spinflop::kernels {

struct QuadratureSettings {
    double rel_tol{1e-9};
    /// Absolute tolerance in result units; when unset, 1e-12 times the integrand's L1 norm.
    std::optional<double> abs_tol{};
    int max_subdivisions{2000};
    /// Semi-infinite integrals are truncated at omega_upper_factor * decay scale.
    double omega_upper_factor{40.0};

    void validate() const;
};

struct QuadResult {
    double value{0.0};
    double error_estimate{0.0};
    double l1_norm{0.0};
    int subdivisions{0};
};

using Integrand = std::function<double(double)>;

/// Globally adaptive G7/K15 over the panels delimited by `edges` (sorted, >= 2 entries).
/// The worst panel is bisected until the summed error meets max(abs_tol, rel_tol |I|).
/// Throws QuadratureFailure when max_subdivisions bisections do not suffice.
QuadResult integrate_panels(const Integrand& f, std::span<const double> edges, const QuadratureSettings& q);

/// Integral over [0, inf) of an integrand that decays at least like exp(-x / decay_scale).
/// Truncates at omega_upper_factor * decay_scale; panel edges sit on half-periods when an
/// oscillation period is given. A tail bound from the cutoff is added to the error estimate.
QuadResult quad_semi_infinite(const Integrand& f, const QuadratureSettings& q, double decay_scale,
                              std::optional<double> oscillation_period = std::nullopt);

/// J(w) = w exp(-w / lambda).
double spectral_density(const BathParams& bath, double omega_e);

/// J(w) coth(hbar w / 2 k_B T) for the bath's coth mode, with the w -> 0 limit 2 k_B T / hbar.
double thermal_spectral_weight(const BathParams& bath, double omega_e);

/// thermal_spectral_weight minus its high-temperature part (2 k_B T / hbar) exp(-w / lambda),
/// evaluated without cancellation. Zero in HighT mode.
double thermal_weight_excess(const BathParams& bath, double omega_e);

/// nu(t) = int_0^inf J(w) coth(hbar w / 2 k_B T) cos(w t) dw.
/// HighT: (2 k_B T / hbar) lambda / (1 + lambda^2 t^2).
/// Series(n): term-by-term closed forms of the coth expansion; throws SeriesInvalid when
///            hbar (factor lambda) / 2 k_B T >= pi (expansion diverges inside the range).
/// ExactCoth: numerical quadrature.
double noise_kernel(const BathParams& bath, double t, const QuadratureSettings& q = {});

/// int_T^inf nu_HighT(t) dt.
double noise_kernel_high_t_tail(const BathParams& bath, double t_from);

/// eta(t) = 2 lambda^3 t / (1 + lambda^2 t^2)^2.
double dissipation_kernel(const BathParams& bath, double t);

/// int_T^inf eta(t) dt = lambda / (1 + lambda^2 T^2).
double dissipation_kernel_tail(const BathParams& bath, double t_from);

struct KernelSample {
    double t{0.0};
    double nu{0.0};
    double eta{0.0};
};

/// Kernel table over a t-grid; evaluated in parallel, ordered by grid index.
std::vector<KernelSample> kernel_table(const BathParams& bath, std::span<const double> t_grid,
                                       const QuadratureSettings& q = {});

/// Columns: t, nu, eta.
void write_kernel_csv(std::ostream& os, std::span<const KernelSample> table, const CsvFormat& fmt);

} // namespace spinflop::kernels
