// rabi.cpp — Rabi formula and RK4 propagation of the driven spinor

#include "spinflop/rabi.hpp"
#include "spinflop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spinflop::rabi {

SpinState SpinState::normalized() const {
    const double n = std::sqrt(norm_squared());
    return {c_plus / n, c_minus / n};
}

double transition_probability(const DriveParams& drive, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("transition_probability: t must be >= 0");
    if (drive.gamma == 0.0) return 0.0;
    const double detuning = drive.omega - drive.omega0;
    const double g2 = drive.gamma * drive.gamma;
    const double rabi2 = g2 + detuning * detuning;
    const double s = std::sin(0.5 * std::sqrt(rabi2) * t);
    return g2 / rabi2 * s * s;
}

RetrievalPeriod retrieval_period(const DriveParams& drive) {
    if (drive.gamma == 0.0) throw ZeroDrive("retrieval period undefined without a drive");
    if (!(drive.gamma > 0.0)) throw std::invalid_argument("retrieval_period: gamma must be > 0");
    return {2.0 * std::numbers::pi / drive.gamma};
}

namespace {

// -i H(t)/hbar |psi> with H/hbar = (1/2)[w0 sz + g (cos wt sx + sin wt sy)]
SpinState rhs(const DriveParams& d, double cos_wt, double sin_wt, const SpinState& s) {
    const cplx mi{0.0, -1.0};
    const cplx off_lower = 0.5 * d.gamma * cplx{cos_wt, sin_wt}; // <-|H|+>
    const cplx off_upper = std::conj(off_lower);                 // <+|H|->
    const double diag = 0.5 * d.omega0;
    return {mi * (diag * s.c_plus + off_upper * s.c_minus), mi * (off_lower * s.c_plus - diag * s.c_minus)};
}

SpinState axpy(const SpinState& y, double h, const SpinState& k) {
    return {y.c_plus + h * k.c_plus, y.c_minus + h * k.c_minus};
}

} // namespace

TdseResult evolve_tdse(const DriveParams& drive, const SpinState& initial, double t_final, double dt,
                       std::size_t sample_stride) {
    drive.validate();
    if (!(dt > 0.0) || !(dt <= t_final))
        throw std::invalid_argument("evolve_tdse: need 0 < dt <= t_final");
    if (dt * drive.k() >= 0.1)
        throw StepTooLarge("dt * k = " + std::to_string(dt * drive.k()) + " must stay below 0.1");
    sample_stride = std::max<std::size_t>(sample_stride, 1);

    // Fixed step count; the final step is shortened to land on t_final.
    const double ratio = t_final / dt;
    const auto steps = static_cast<std::size_t>(std::ceil(ratio - 1e-9 * ratio));

    TdseResult out;
    out.steps = steps;
    SpinState y = initial;
    const double n0 = initial.norm_squared();
    out.samples.push_back({0.0, y});
    out.peak_norm_drift = std::abs(n0 - 1.0);

    for (std::size_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double h = (i + 1 == steps) ? t_final - t : dt;
        const double w = drive.omega;
        const double c0 = std::cos(w * t), s0 = std::sin(w * t);
        const double cm = std::cos(w * (t + 0.5 * h)), sm = std::sin(w * (t + 0.5 * h));
        const double c1 = std::cos(w * (t + h)), s1 = std::sin(w * (t + h));

        const SpinState k1 = rhs(drive, c0, s0, y);
        const SpinState k2 = rhs(drive, cm, sm, axpy(y, 0.5 * h, k1));
        const SpinState k3 = rhs(drive, cm, sm, axpy(y, 0.5 * h, k2));
        const SpinState k4 = rhs(drive, c1, s1, axpy(y, h, k3));
        y.c_plus += h / 6.0 * (k1.c_plus + 2.0 * k2.c_plus + 2.0 * k3.c_plus + k4.c_plus);
        y.c_minus += h / 6.0 * (k1.c_minus + 2.0 * k2.c_minus + 2.0 * k3.c_minus + k4.c_minus);

        out.peak_norm_drift = std::max(out.peak_norm_drift, std::abs(y.norm_squared() - 1.0));
        if ((i + 1) % sample_stride == 0 || i + 1 == steps) out.samples.push_back({t + h, y});
    }
    out.final_state = y.normalized();
    return out;
}

} // namespace spinflop::rabi
