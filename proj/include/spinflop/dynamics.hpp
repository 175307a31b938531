// dynamics.hpp — RK4 integration of the two-level master equation and the
// closed-form pure-dephasing solution

#pragma once

#include "spinflop/core.hpp"
#include "spinflop/decoherence.hpp"
#include "spinflop/rabi.hpp"

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace spinflop {
struct CsvFormat;
}

namespace spinflop::dynamics {

struct DensityMatrix2 {
    Mat2 m{};

    static DensityMatrix2 from_state(const rabi::SpinState& s);

    cplx rho01() const { return m(0, 1); }
    double trace() const { return m.trace().real(); }
    double purity() const;
    double min_eigenvalue() const;

    /// Throws std::invalid_argument unless Hermitian to 1e-10, unit trace to 1e-9 and
    /// eigenvalues >= -1e-6.
    void validate() const;
};

struct TermToggles {
    bool unitary{true};
    bool dephasing{true};
    bool d1{false};
    bool d2{false};
    bool lamb_shifts{false};

    static constexpr TermToggles none() { return {false, false, false, false, false}; }
};

struct TrajectorySample {
    double t{0.0};
    DensityMatrix2 rho;
};

struct Trajectory {
    std::vector<TrajectorySample> samples; // strictly increasing t, first at 0
    double dt{0.0};
    TermToggles toggles{};
    double d_factor{0.0}; // 0 when not known (closed-form or synthetic trajectories)
    double max_trace_drift{0.0};
    double max_hermiticity_residue{0.0};
    /// Smallest eigenvalue seen; the equation is not of Lindblad form, so this may dip below 0.
    double min_eigenvalue{0.0};
    std::size_t steps{0};
};

/// RK4 for
///   drho/dt = -i[H'(t), rho] - D [sz, [sz, rho]]
///             + (ky sy rho sz + ky* sz rho sy) + (kx sx rho sz + kx* sz rho sx),
///   H'(t) = (1/2)[(w0 - shift_z) sz + (g cos wt - shift_x) sx + (g sin wt + shift_y) sy].
/// Disabled terms are dropped. The step guard dt * rate < 0.05 covers the rates of the active terms
/// (StepTooLarge). Throws InvariantBreach when |Tr rho - 1| exceeds 1e-6 mid-run.
Trajectory evolve_master(const DriveParams& drive, const decoherence::SuperopCoefficients& coeffs, double d_factor,
                         const DensityMatrix2& rho0, double t_final, double dt, const TermToggles& toggles,
                         std::size_t sample_stride = 1);

enum class DephasingConvention {
    DoubleCommutator, // off-diagonal rate 4 D, the literal solution of the double commutator
    PrintedRate,      // off-diagonal rate D, as in tau_d = 1 / D
};

/// Off-diagonals times exp(-4 D t) (or exp(-D t) for PrintedRate); populations unchanged.
DensityMatrix2 evolve_dephasing_closed(double d_factor, const DensityMatrix2& rho0, double t,
                                       DephasingConvention convention = DephasingConvention::DoubleCommutator);

/// Least-squares slope of ln|rho01| over [0, min(t_final, 3 / (4 D))] (whole trajectory when D is
/// unknown), sign-flipped. With the unitary term active the local maxima of |rho01| are fitted
/// when there are at least ten of them. Throws InsufficientDecay when |rho01| changes by < 10%.
double extract_decay_rate(const Trajectory& traj);

/// Columns: t, rho00_re, rho00_im, rho01_re, rho01_im, rho10_re, rho10_im, rho11_re, rho11_im,
/// trace, purity, abs_rho01.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const CsvFormat& fmt);

} // namespace spinflop::dynamics
