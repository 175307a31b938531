// rabi.hpp — Closed-form Rabi flipping and a fixed-step Schrodinger integrator

#pragma once

#include "spinflop/core.hpp"

#include <cstddef>
#include <vector>

namespace spinflop::rabi {

/// Amplitudes on |+> (sz = +1) and |-> (sz = -1).
struct SpinState {
    cplx c_plus{1.0};
    cplx c_minus{0.0};

    double norm_squared() const { return std::norm(c_plus) + std::norm(c_minus); }
    SpinState normalized() const;

    static SpinState up() { return {cplx{1.0}, cplx{0.0}}; }
    static SpinState down() { return {cplx{0.0}, cplx{1.0}}; }
};

struct RetrievalPeriod {
    double tau{0.0}; // seconds
};

/// |C_-(t)|^2 = gamma^2/(gamma^2 + D^2) sin^2(sqrt(gamma^2 + D^2) t / 2), D = omega - omega0.
double transition_probability(const DriveParams& drive, double t);

/// tau = 2 pi / gamma. Throws ZeroDrive for gamma == 0.
RetrievalPeriod retrieval_period(const DriveParams& drive);

struct TdseSample {
    double t{0.0};
    SpinState state;
};

struct TdseResult {
    std::vector<TdseSample> samples; // raw, never renormalised
    SpinState final_state;           // last sample renormalised
    double peak_norm_drift{0.0};     // max_t | |psi|^2 - 1 |
    std::size_t steps{0};
};

/// Classical RK4 with fixed step dt for i d|psi>/dt = (H/hbar)|psi>.
/// Requires 0 < dt <= t_final and dt * k < 0.1 (StepTooLarge otherwise).
/// Every `sample_stride`-th step is recorded, plus t = 0 and t_final.
TdseResult evolve_tdse(const DriveParams& drive, const SpinState& initial, double t_final, double dt,
                       std::size_t sample_stride = 1);

} // namespace spinflop::rabi
