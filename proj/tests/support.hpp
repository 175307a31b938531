// support.hpp — Shared fixtures and comparison helpers for the unit tests

#pragma once

#include "spinflop/core.hpp"

#include <cmath>
#include <random>

namespace spinflop::test {

inline constexpr double kPi = 3.14159265358979323846;

// The operating point used throughout: X-band splitting, weak drive, room temperature.
inline DriveParams esr_drive(double gamma = 1e7) { return DriveParams{1e10, gamma, 1e10}; }
inline BathParams room_bath(double cutoff = 1e10, CothMode mode = CothMode::high_t()) {
    return BathParams{300.0, cutoff, mode};
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

inline Mat2 random_mat(std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Mat2 m;
    for (auto& e : m.e) e = cplx{u(rng), u(rng)};
    return m;
}

inline Mat2 random_hermitian(std::mt19937_64& rng, double scale = 1.0) {
    const Mat2 m = random_mat(rng, scale);
    return cplx{0.5} * (m + m.adjoint());
}

// exp(-i H) by scaling and squaring of the Taylor series; independent of the closed form.
inline Mat2 expm_taylor(const Mat2& h) {
    int squarings = 0;
    double norm = h.max_abs() * 2.0;
    while (norm > 0.25) {
        norm *= 0.5;
        ++squarings;
    }
    const Mat2 a = cplx{0.0, -std::ldexp(1.0, -squarings)} * h;
    Mat2 term = Mat2::identity(), sum = Mat2::identity();
    for (int n = 1; n <= 30; ++n) {
        term = cplx{1.0 / n} * (term * a);
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

} // namespace spinflop::test
