// core.cpp — Parameter validation and 2x2 complex algebra

#include "spinflop/core.hpp"
#include "spinflop/errors.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace spinflop {

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

} // namespace

void DriveParams::validate() const {
    if (!(std::isfinite(omega0) && omega0 > 0.0))
        throw std::invalid_argument("DriveParams: omega0 must be finite and > 0");
    if (!finite_nonneg(gamma))
        throw std::invalid_argument("DriveParams: gamma must be finite and >= 0");
    if (!finite_nonneg(omega))
        throw std::invalid_argument("DriveParams: omega must be finite and >= 0");
    if (!std::isfinite(k()))
        throw std::invalid_argument("DriveParams: k = sqrt(gamma^2 + omega0^2) overflows");
}

void BathParams::validate() const {
    if (!(std::isfinite(temperature) && temperature > 0.0))
        throw std::invalid_argument("BathParams: temperature must be finite and > 0");
    if (!(std::isfinite(cutoff) && cutoff > 0.0))
        throw std::invalid_argument("BathParams: cutoff must be finite and > 0");
    if (coth_mode.kind == CothMode::Kind::Series &&
        (coth_mode.order < 1 || coth_mode.order > kMaxSeriesOrder))
        throw std::invalid_argument("BathParams: series order must be in [1, " +
                                    std::to_string(kMaxSeriesOrder) + "]");
}

Mat2 Mat2::adjoint() const {
    return Mat2{{std::conj(e[0]), std::conj(e[2]), std::conj(e[1]), std::conj(e[3])}};
}

bool Mat2::finite() const {
    return std::all_of(e.begin(), e.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double Mat2::max_abs() const {
    double m = 0.0;
    for (const auto& z : e) m = std::max(m, std::abs(z));
    return m;
}

double Mat2::hermiticity_residue() const { return max_abs_diff(*this, adjoint()); }

Mat2& Mat2::operator+=(const Mat2& o) {
    for (std::size_t i = 0; i < 4; ++i) e[i] += o.e[i];
    return *this;
}

Mat2& Mat2::operator-=(const Mat2& o) {
    for (std::size_t i = 0; i < 4; ++i) e[i] -= o.e[i];
    return *this;
}

Mat2& Mat2::operator*=(cplx s) {
    for (auto& z : e) z *= s;
    return *this;
}

Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
Mat2 operator*(cplx s, Mat2 a) { return a *= s; }
Mat2 operator*(Mat2 a, cplx s) { return a *= s; }

Mat2 operator*(const Mat2& a, const Mat2& b) {
    return Mat2{{a.e[0] * b.e[0] + a.e[1] * b.e[2], a.e[0] * b.e[1] + a.e[1] * b.e[3],
                 a.e[2] * b.e[0] + a.e[3] * b.e[2], a.e[2] * b.e[1] + a.e[3] * b.e[3]}};
}

Mat2 commutator(const Mat2& a, const Mat2& b) { return a * b - b * a; }

double max_abs_diff(const Mat2& a, const Mat2& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < 4; ++i) m = std::max(m, std::abs(a.e[i] - b.e[i]));
    return m;
}

const PauliBasis& pauli_basis() {
    static const PauliBasis basis{
        Mat2::identity(),
        Mat2{{cplx{}, cplx{1.0}, cplx{1.0}, cplx{}}},
        Mat2{{cplx{}, cplx{0.0, -1.0}, cplx{0.0, 1.0}, cplx{}}},
        Mat2{{cplx{1.0}, cplx{}, cplx{}, cplx{-1.0}}},
    };
    return basis;
}

Mat2 PauliDecomposition::reconstruct() const {
    // c0 I + cx sx + cy sy + cz sz, written out entrywise
    const cplx i{0.0, 1.0};
    return Mat2{{c_identity + c_z, c_x - i * c_y, c_x + i * c_y, c_identity - c_z}};
}

PauliDecomposition decompose_pauli(const Mat2& m) {
    const cplx i{0.0, 1.0};
    return PauliDecomposition{
        0.5 * (m.e[0] + m.e[3]),
        0.5 * (m.e[1] + m.e[2]),
        0.5 * i * (m.e[1] - m.e[2]),
        0.5 * (m.e[0] - m.e[3]),
    };
}

Mat2 expm_su2(const Mat2& h) {
    const double scale = std::max(1.0, h.max_abs());
    if (!h.finite() || h.hermiticity_residue() > 1e-12 * scale)
        throw NonHermitianInput("expm_su2 generator deviates from its adjoint");

    const auto d = decompose_pauli(h);
    const double c0 = d.c_identity.real();
    const double vx = d.c_x.real();
    const double vy = d.c_y.real();
    const double vz = d.c_z.real();
    const double theta = std::sqrt(vx * vx + vy * vy + vz * vz);
    // sin(theta)/theta, series below 1e-4 where the quotient loses digits
    const double sinc = theta < 1e-4 ? 1.0 - theta * theta / 6.0 : std::sin(theta) / theta;
    const double c = std::cos(theta);

    const cplx i{0.0, 1.0};
    PauliDecomposition u{cplx{c}, -i * sinc * vx, -i * sinc * vy, -i * sinc * vz};
    return std::polar(1.0, -c0) * u.reconstruct();
}

double gamma_from_field(double field_gauss, const PhysicalConstants& constants) {
    if (!(std::isfinite(field_gauss) && field_gauss >= 0.0))
        throw std::invalid_argument("gamma_from_field: field must be finite and >= 0");
    return constants.gyro_factor * field_gauss;
}

} // namespace spinflop
