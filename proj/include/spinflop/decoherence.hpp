// decoherence.hpp — The decoherence factor D by quadrature and by the closed
// high-temperature, Bernoulli-series and higher-order-in-gamma formulas, plus
// the constant coefficients of the master-equation superoperator

#pragma once

#include "spinflop/core.hpp"
#include "spinflop/kernels.hpp"

#include <array>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace spinflop {
struct CsvFormat;
}

namespace spinflop::decoherence {

enum class Method { Quadrature, ClosedHighT, SeriesT, HigherOrder };

std::string_view method_name(Method m);

struct DecoherenceResult {
    double d_factor{0.0}; // 1/s
    Method method{Method::ClosedHighT};
    double error_estimate{0.0}; // 1/s, quadrature only
    /// Set when the temperature-series bracket 1 - exp(-k/lambda) G turns negative.
    bool negative_d_factor{false};
};

/// Which a1(t) feeds the quadrature: the weak-drive series of a given order, or the printed closed form.
struct A1Mode {
    enum class Kind { Series, Exact };
    Kind kind{Kind::Series};
    int order{1};

    static constexpr A1Mode series(int n) { return {Kind::Series, n}; }
    static constexpr A1Mode exact() { return {Kind::Exact, 0}; }
};

inline constexpr std::array<double, 3> kDefaultEpsilons{1e-2, 5e-3, 2.5e-3};

/// D = (1/4) int_0^inf a1(t) nu(t) dt.
///
/// The high-temperature part of nu is integrated in t over whole a1 periods up to
/// t_upper = omega_upper_factor / min(lambda, k) * (1 + lambda / k), with the remaining
/// 1/t^2 tail added in closed form against the period mean of a1. In Series and
/// ExactCoth modes the excess of J coth over its high-temperature part is added with a
/// convergence factor exp(-eps k t): the t-integral is then done per Fourier harmonic of
/// a1, the w-integral numerically, and the result Richardson-extrapolated to eps = 0.
/// error_estimate is the quadrature error plus the last extrapolation increment.
DecoherenceResult dfactor_quadrature(const DriveParams& drive, const BathParams& bath, A1Mode a1_mode,
                                     const kernels::QuadratureSettings& q = {},
                                     std::span<const double> epsilons = kDefaultEpsilons);

/// (pi k_B T gamma^2) / (8 hbar omega0^2) (1 - exp(-k/lambda)).
DecoherenceResult dfactor_closed_high_t(const DriveParams& drive, const BathParams& bath);

struct GFunctions {
    double g{1.0};
    double g_prime{1.0}; // same series at 2x; meaningful only for x < pi/2
    double x{0.0};       // hbar k / 2 k_B T
};

/// G = sum_{n<=order} 2^{2n} B_{2n} / (2n)! x^{2n}, the Taylor series of x coth(x).
/// Throws SeriesInvalid when x >= pi.
GFunctions g_functions(const BathParams& bath, double k, int order);

/// (pi k_B T gamma^2) / (8 hbar omega0^2) (1 - exp(-k/lambda) G).
DecoherenceResult dfactor_series_t(const DriveParams& drive, const BathParams& bath, int order);

/// Higher order in gamma^2/omega0^2:
/// (pi k_B T / 8 hbar) [P1 (1 - e^{-k/l} G) + P2 (cosh(2k/l) G'/4 - cosh(k/l) G + 3/4)],
/// P1 = eps - eps^2 + ..., P2 = eps^2 - eps^3 + ..., both truncated at eps^gamma_order.
/// G, G' follow the bath's coth mode (1 for HighT, series for Series(n), x coth x for ExactCoth).
/// Throws SeriesInvalid unless gamma < omega0 and x < pi/2.
DecoherenceResult dfactor_higher_order(const DriveParams& drive, const BathParams& bath, int gamma_order);

struct HigherOrderReport {
    double higher_order{0.0};
    double quadrature_exact_a1{0.0};
    double quadrature_error{0.0};
    double abs_deviation{0.0};
    double rel_deviation{0.0};
};

/// Deviation of the higher-order formula from quadrature with the printed closed-form a1.
HigherOrderReport higher_order_report(const DriveParams& drive, const BathParams& bath, int gamma_order,
                                      const kernels::QuadratureSettings& q = {});

struct SuperopCoefficients {
    double shift_z{0.0}; // int nu(t) a4(t) dt
    double shift_x{0.0}; // int nu(t) a3(-t) dt
    double shift_y{0.0}; // int nu(t) a2(-t) dt
    cplx kappa_x{};      // (1/4) int a2(-t) (nu + i eta) dt
    cplx kappa_y{};      // (1/4) int a3(-t) (nu + i eta) dt
};

/// Constant coefficients of the Hamiltonian shifts and the D1/D2 terms, from the printed
/// closed-form a-coefficients and the high-temperature noise kernel.
SuperopCoefficients superop_coefficients(const DriveParams& drive, const BathParams& bath,
                                         const kernels::QuadratureSettings& q = {});

struct DFactorRow {
    DecoherenceResult result;
    DriveParams drive;
    BathParams bath;
};

/// Columns: method, omega0, gamma, omega, T, lambda, d_factor, error_estimate.
void write_dfactor_csv(std::ostream& os, std::span<const DFactorRow> rows, const CsvFormat& fmt);

} // namespace spinflop::decoherence
