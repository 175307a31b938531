// core.hpp — Physical constants, parameter records and exact 2x2 complex algebra

#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace spinflop {

using cplx = std::complex<double>;

struct PhysicalConstants {
    double hbar{1.054571817e-34};       // J s
    double k_boltzmann{1.380649e-23};   // J / K
    double gyro_factor{1.75882001076e7}; // e / (m_e c), rad s^-1 G^-1 (Gaussian units)
};

inline constexpr PhysicalConstants kConstants{};

/// Driven spin: H = (hbar/2) [omega0 sz + gamma (cos(omega t) sx + sin(omega t) sy)].
struct DriveParams {
    double omega0{1.0}; // rad/s, level splitting
    double gamma{0.0};  // rad/s, drive coupling
    double omega{1.0};  // rad/s, field rotation frequency

    /// Generalised frequency sqrt(gamma^2 + omega0^2).
    double k() const { return std::hypot(gamma, omega0); }

    /// Throws std::invalid_argument when the record violates its invariants.
    void validate() const;
};

struct CothMode {
    enum class Kind { HighT, Series, ExactCoth };
    Kind kind{Kind::HighT};
    int order{0}; // Series only

    static constexpr CothMode high_t() { return {Kind::HighT, 0}; }
    static constexpr CothMode series(int n) { return {Kind::Series, n}; }
    static constexpr CothMode exact() { return {Kind::ExactCoth, 0}; }
};

inline constexpr int kMaxSeriesOrder = 20;

struct BathParams {
    double temperature{300.0}; // K
    double cutoff{1.0};        // rad/s (lambda)
    CothMode coth_mode{};

    void validate() const;

    /// 2 k_B T / hbar, the high-temperature limit of J(w) coth(hbar w / 2 k_B T) at w -> 0.
    double thermal_rate() const { return 2.0 * kConstants.k_boltzmann * temperature / kConstants.hbar; }
    /// hbar w / (2 k_B T).
    double coth_argument(double w) const { return w / thermal_rate(); }
};

/// Row-major 2x2 complex matrix.
struct Mat2 {
    std::array<cplx, 4> e{};

    constexpr cplx& operator()(int r, int c) { return e[static_cast<std::size_t>(2 * r + c)]; }
    constexpr const cplx& operator()(int r, int c) const { return e[static_cast<std::size_t>(2 * r + c)]; }

    static constexpr Mat2 identity() { return Mat2{{cplx{1.0}, cplx{}, cplx{}, cplx{1.0}}}; }
    static constexpr Mat2 zero() { return Mat2{}; }

    Mat2 adjoint() const;
    cplx trace() const { return e[0] + e[3]; }
    cplx det() const { return e[0] * e[3] - e[1] * e[2]; }
    bool finite() const;
    /// Largest entry modulus.
    double max_abs() const;
    /// max |m - m^dagger| entrywise.
    double hermiticity_residue() const;

    Mat2& operator+=(const Mat2& o);
    Mat2& operator-=(const Mat2& o);
    Mat2& operator*=(cplx s);
};

Mat2 operator+(Mat2 a, const Mat2& b);
Mat2 operator-(Mat2 a, const Mat2& b);
Mat2 operator*(const Mat2& a, const Mat2& b);
Mat2 operator*(cplx s, Mat2 a);
Mat2 operator*(Mat2 a, cplx s);
Mat2 commutator(const Mat2& a, const Mat2& b);
double max_abs_diff(const Mat2& a, const Mat2& b);

struct PauliBasis {
    Mat2 identity;
    Mat2 x;
    Mat2 y;
    Mat2 z;
};

/// Identity and the three Pauli matrices. Spin operators are hbar/2 times these.
const PauliBasis& pauli_basis();

struct PauliDecomposition {
    cplx c_identity;
    cplx c_x;
    cplx c_y;
    cplx c_z;

    Mat2 reconstruct() const;
};

/// Trace inner products c_a = Tr(sigma_a m) / 2.
PauliDecomposition decompose_pauli(const Mat2& m);

/// exp(-i H) for a 2x2 Hermitian H, in closed form.
/// Throws NonHermitianInput if H deviates from H^dagger by more than 1e-12 (scaled by |H|).
Mat2 expm_su2(const Mat2& hermitian_generator);

/// gamma = e B / (m_e c). Field in gauss, result in rad/s.
double gamma_from_field(double field_gauss, const PhysicalConstants& constants = kConstants);

} // namespace spinflop
