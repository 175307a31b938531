// dynamics.cpp — Master-equation integrator and dephasing-rate fits

#include "spinflop/dynamics.hpp"
#include "spinflop/csv.hpp"
#include "spinflop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace spinflop::dynamics {

DensityMatrix2 DensityMatrix2::from_state(const rabi::SpinState& s) {
    const auto n = s.normalized();
    return {Mat2{{n.c_plus * std::conj(n.c_plus), n.c_plus * std::conj(n.c_minus),
                  n.c_minus * std::conj(n.c_plus), n.c_minus * std::conj(n.c_minus)}}};
}

double DensityMatrix2::purity() const { return (m * m).trace().real(); }

double DensityMatrix2::min_eigenvalue() const {
    // Hermitian part only: (tr/2) - sqrt(((a - d)/2)^2 + |b|^2)
    const double a = m(0, 0).real(), d = m(1, 1).real();
    const cplx b = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
    return 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
}

void DensityMatrix2::validate() const {
    if (!m.finite()) throw std::invalid_argument("density matrix has non-finite entries");
    if (m.hermiticity_residue() > 1e-10) throw std::invalid_argument("density matrix is not Hermitian");
    if (std::abs(m.trace() - 1.0) > 1e-9) throw std::invalid_argument("density matrix trace differs from 1");
    if (min_eigenvalue() < -1e-6) throw std::invalid_argument("density matrix has a negative eigenvalue");
}

namespace {

struct Generator {
    const DriveParams& drive;
    const decoherence::SuperopCoefficients& coeffs;
    double d_factor;
    TermToggles toggles;

    Mat2 operator()(double t, const Mat2& rho) const {
        const auto& p = pauli_basis();
        Mat2 out = Mat2::zero();
        if (toggles.unitary || toggles.lamb_shifts) {
            double hz = 0.0, hx = 0.0, hy = 0.0;
            if (toggles.unitary) {
                const double wt = drive.omega * t;
                hz += drive.omega0;
                hx += drive.gamma * std::cos(wt);
                hy += drive.gamma * std::sin(wt);
            }
            if (toggles.lamb_shifts) {
                hz -= coeffs.shift_z;
                hx -= coeffs.shift_x;
                hy += coeffs.shift_y;
            }
            const Mat2 h = cplx{0.5 * hz} * p.z + cplx{0.5 * hx} * p.x + cplx{0.5 * hy} * p.y;
            out += cplx{0.0, -1.0} * commutator(h, rho);
        }
        if (toggles.dephasing) out -= cplx{d_factor} * commutator(p.z, commutator(p.z, rho));
        if (toggles.d1) {
            out += coeffs.kappa_y * (p.y * rho * p.z) + std::conj(coeffs.kappa_y) * (p.z * rho * p.y);
        }
        if (toggles.d2) {
            out += coeffs.kappa_x * (p.x * rho * p.z) + std::conj(coeffs.kappa_x) * (p.z * rho * p.x);
        }
        return out;
    }
};

double max_rate(const DriveParams& drive, const decoherence::SuperopCoefficients& c, double d_factor,
                const TermToggles& tg) {
    double r = 0.0;
    if (tg.unitary) r = std::max(r, drive.k());
    if (tg.dephasing) r = std::max(r, d_factor);
    if (tg.d1) r = std::max(r, std::abs(c.kappa_y));
    if (tg.d2) r = std::max(r, std::abs(c.kappa_x));
    if (tg.lamb_shifts) r = std::max({r, std::abs(c.shift_z), std::abs(c.shift_x), std::abs(c.shift_y)});
    return r;
}

} // namespace

Trajectory evolve_master(const DriveParams& drive, const decoherence::SuperopCoefficients& coeffs, double d_factor,
                         const DensityMatrix2& rho0, double t_final, double dt, const TermToggles& toggles,
                         std::size_t sample_stride) {
    drive.validate();
    rho0.validate();
    if (!(dt > 0.0) || !(dt <= t_final)) throw std::invalid_argument("evolve_master: need 0 < dt <= t_final");
    if (!(d_factor >= 0.0) || !std::isfinite(d_factor))
        throw std::invalid_argument("evolve_master: d_factor must be finite and >= 0");
    const double rate = max_rate(drive, coeffs, d_factor, toggles);
    if (dt * rate >= 0.05)
        throw StepTooLarge("dt * max rate = " + std::to_string(dt * rate) + " must stay below 0.05");
    sample_stride = std::max<std::size_t>(sample_stride, 1);

    const Generator g{drive, coeffs, d_factor, toggles};
    const double ratio = t_final / dt;
    const auto steps = static_cast<std::size_t>(std::ceil(ratio - 1e-9 * ratio));

    Trajectory traj;
    traj.dt = dt;
    traj.toggles = toggles;
    traj.d_factor = d_factor;
    traj.steps = steps;
    traj.min_eigenvalue = rho0.min_eigenvalue();
    traj.max_hermiticity_residue = rho0.m.hermiticity_residue();
    traj.samples.push_back({0.0, rho0});

    const double trace0 = rho0.trace();
    Mat2 rho = rho0.m;
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double h = (i + 1 == steps) ? t_final - t : dt;
        const Mat2 k1 = g(t, rho);
        const Mat2 k2 = g(t + 0.5 * h, rho + cplx{0.5 * h} * k1);
        const Mat2 k3 = g(t + 0.5 * h, rho + cplx{0.5 * h} * k2);
        const Mat2 k4 = g(t + h, rho + cplx{h} * k3);
        rho += cplx{h / 6.0} * (k1 + cplx{2.0} * k2 + cplx{2.0} * k3 + k4);

        const DensityMatrix2 current{rho};
        const double drift = std::abs(current.trace() - trace0);
        if (drift > 1e-6)
            throw InvariantBreach("trace drifted by " + std::to_string(drift) + " at t = " + std::to_string(t + h));
        traj.max_trace_drift = std::max(traj.max_trace_drift, drift);
        traj.max_hermiticity_residue = std::max(traj.max_hermiticity_residue, rho.hermiticity_residue());
        traj.min_eigenvalue = std::min(traj.min_eigenvalue, current.min_eigenvalue());
        if ((i + 1) % sample_stride == 0 || i + 1 == steps) traj.samples.push_back({t + h, current});
    }
    return traj;
}

DensityMatrix2 evolve_dephasing_closed(double d_factor, const DensityMatrix2& rho0, double t,
                                       DephasingConvention convention) {
    if (!(t >= 0.0)) throw std::invalid_argument("evolve_dephasing_closed: t must be >= 0");
    const double rate = convention == DephasingConvention::DoubleCommutator ? 4.0 * d_factor : d_factor;
    const double f = std::exp(-rate * t);
    DensityMatrix2 out = rho0;
    out.m(0, 1) *= f;
    out.m(1, 0) *= f;
    return out;
}

double extract_decay_rate(const Trajectory& traj) {
    const auto& s = traj.samples;
    if (s.size() < 10) throw std::invalid_argument("extract_decay_rate: need at least 10 samples");
    double window = s.back().t;
    if (traj.d_factor > 0.0) window = std::min(window, 3.0 / (4.0 * traj.d_factor));

    std::vector<std::pair<double, double>> points; // (t, |rho01|)
    for (const auto& sample : s) {
        if (sample.t > window * (1.0 + 1e-12)) break;
        points.emplace_back(sample.t, std::abs(sample.rho.rho01()));
    }

    if (traj.toggles.unitary && points.size() >= 3) {
        std::vector<std::pair<double, double>> peaks;
        for (std::size_t i = 1; i + 1 < points.size(); ++i) {
            if (points[i].second >= points[i - 1].second && points[i].second >= points[i + 1].second)
                peaks.push_back(points[i]);
        }
        if (peaks.size() >= 10) points = std::move(peaks);
    }
    if (points.size() < 10) throw std::invalid_argument("extract_decay_rate: fewer than 10 samples in the window");

    double lo = points.front().second, hi = lo;
    for (const auto& [t, a] : points) {
        if (!(a > 1e-12)) throw std::invalid_argument("extract_decay_rate: |rho01| vanishes inside the window");
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    if (hi - lo < 0.1 * hi) throw InsufficientDecay("|rho01| varies by less than 10% over the fit window");

    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (const auto& [t, a] : points) {
        const double y = std::log(a);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double n = static_cast<double>(points.size());
    const double slope = (n * sty - st * sy) / (n * stt - st * st);
    return -slope;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const CsvFormat& fmt) {
    write_csv_header(os, {"t", "rho00_re", "rho00_im", "rho01_re", "rho01_im", "rho10_re", "rho10_im", "rho11_re",
                          "rho11_im", "trace", "purity", "abs_rho01"});
    for (const auto& s : traj.samples) {
        const auto& m = s.rho.m;
        write_csv_row(os,
                      {s.t, m(0, 0).real(), m(0, 0).imag(), m(0, 1).real(), m(0, 1).imag(), m(1, 0).real(),
                       m(1, 0).imag(), m(1, 1).real(), m(1, 1).imag(), s.rho.trace(), s.rho.purity(),
                       std::abs(s.rho.rho01())},
                      fmt);
    }
}

} // namespace spinflop::dynamics
