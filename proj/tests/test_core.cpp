// test_core.cpp — Pauli algebra, decomposition and the closed-form SU(2) exponential

#include "spinflop/core.hpp"
#include "spinflop/errors.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace spinflop;
using spinflop::test::kPi;

TEST_CASE("constants are stored verbatim") {
    CHECK(kConstants.hbar == 1.054571817e-34);
    CHECK(kConstants.k_boltzmann == 1.380649e-23);
    CHECK(std::abs(kConstants.gyro_factor / 1.7588e7 - 1.0) < 1e-3);
}

TEST_CASE("drive and bath records validate their invariants") {
    CHECK_NOTHROW(DriveParams(1.0, 0.0, 0.0).validate());
    CHECK_THROWS_AS(DriveParams(0.0, 1.0, 1.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(DriveParams(1.0, -1.0, 1.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(DriveParams(1.0, 1.0, -1.0).validate(), std::invalid_argument);
    CHECK(DriveParams{3.0, 4.0, 1.0}.k() == doctest::Approx(5.0));
    CHECK(DriveParams{1e10, 1e7, 1e10}.k() >= 1e10);

    CHECK_NOTHROW(BathParams(300.0, 1e10, CothMode::series(20)).validate());
    CHECK_THROWS_AS(BathParams(0.0, 1e10).validate(), std::invalid_argument);
    CHECK_THROWS_AS(BathParams(300.0, 0.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(BathParams(300.0, 1e10, CothMode::series(21)).validate(), std::invalid_argument);
}

TEST_CASE("Pauli algebra") {
    const auto& p = pauli_basis();
    CHECK(p.z(0, 0) == cplx{1.0});
    CHECK(p.z(1, 1) == cplx{-1.0});
    for (const Mat2* s : {&p.x, &p.y, &p.z}) CHECK(max_abs_diff(*s * *s, Mat2::identity()) == 0.0);
    const cplx i{0.0, 1.0};
    CHECK(max_abs_diff(p.x * p.y, i * p.z) == 0.0);
    CHECK(max_abs_diff(p.y * p.z, i * p.x) == 0.0);
    CHECK(max_abs_diff(p.z * p.x, i * p.y) == 0.0);
    CHECK(max_abs_diff(commutator(p.x, p.y), cplx{0.0, 2.0} * p.z) == 0.0);
}

TEST_CASE("decompose_pauli examples") {
    const auto& p = pauli_basis();
    auto check = [](const PauliDecomposition& d, cplx c0, cplx cx, cplx cy, cplx cz) {
        CHECK(std::abs(d.c_identity - c0) < 1e-15);
        CHECK(std::abs(d.c_x - cx) < 1e-15);
        CHECK(std::abs(d.c_y - cy) < 1e-15);
        CHECK(std::abs(d.c_z - cz) < 1e-15);
    };
    check(decompose_pauli(Mat2::identity()), 1.0, 0.0, 0.0, 0.0);
    check(decompose_pauli(p.z), 0.0, 0.0, 0.0, 1.0);
    check(decompose_pauli(p.y), 0.0, 0.0, 1.0, 0.0);
    check(decompose_pauli(Mat2{{cplx{2.0}, cplx{}, cplx{}, cplx{}}}), 1.0, 0.0, 0.0, 1.0);
}

TEST_CASE("decompose_pauli round trip and linearity on random matrices") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const Mat2 m1 = test::random_mat(rng, std::pow(10.0, u(rng)));
        const Mat2 m2 = test::random_mat(rng);
        const Mat2 back = decompose_pauli(m1).reconstruct();
        CHECK(max_abs_diff(back, m1) <= 1e-13 * m1.max_abs());

        const cplx a{u(rng), u(rng)};
        const auto lhs = decompose_pauli(a * m1 + m2);
        const auto d1 = decompose_pauli(m1), d2 = decompose_pauli(m2);
        const double scale = std::abs(a) * m1.max_abs() + m2.max_abs();
        CHECK(std::abs(lhs.c_identity - (a * d1.c_identity + d2.c_identity)) <= 1e-13 * scale);
        CHECK(std::abs(lhs.c_x - (a * d1.c_x + d2.c_x)) <= 1e-13 * scale);
        CHECK(std::abs(lhs.c_y - (a * d1.c_y + d2.c_y)) <= 1e-13 * scale);
        CHECK(std::abs(lhs.c_z - (a * d1.c_z + d2.c_z)) <= 1e-13 * scale);

        const auto h = decompose_pauli(test::random_hermitian(rng));
        for (cplx c : {h.c_identity, h.c_x, h.c_y, h.c_z}) CHECK(std::abs(c.imag()) <= 1e-12);
    }
}

TEST_CASE("expm_su2 examples") {
    const auto& p = pauli_basis();
    CHECK(max_abs_diff(expm_su2(Mat2::zero()), Mat2::identity()) == 0.0);
    CHECK(max_abs_diff(expm_su2(cplx{kPi / 2} * p.x), cplx{0.0, -1.0} * p.x) < 1e-15);
    const Mat2 d = expm_su2(Mat2{{cplx{0.3}, cplx{}, cplx{}, cplx{-0.3}}});
    CHECK(std::abs(d(0, 0) - std::exp(cplx{0.0, -0.3})) < 1e-15);
    CHECK(std::abs(d(1, 1) - std::exp(cplx{0.0, 0.3})) < 1e-15);
    CHECK(std::abs(d(0, 1)) == 0.0);
}

TEST_CASE("expm_su2 is unitary, has the right determinant and matches a Taylor oracle") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> decade(-9.0, 1.5);
    for (int trial = 0; trial < 500; ++trial) {
        const Mat2 h = test::random_hermitian(rng, std::pow(10.0, decade(rng)));
        const Mat2 u = expm_su2(h);
        CHECK(max_abs_diff(u * u.adjoint(), Mat2::identity()) <= 1e-12);
        CHECK(std::abs(u.det() - std::exp(cplx{0.0, -1.0} * h.trace())) <= 1e-12);
        CHECK(max_abs_diff(u, test::expm_taylor(h)) <= 1e-12);
    }
}

TEST_CASE("expm_su2 rejects non-Hermitian generators") {
    Mat2 h = pauli_basis().x;
    h(0, 1) = cplx{1.0, 0.5};
    CHECK_THROWS_AS(expm_su2(h), NonHermitianInput);
}

TEST_CASE("gamma_from_field") {
    CHECK(gamma_from_field(0.0) == 0.0);
    // e / (m_e c) from the Gaussian-unit constants
    const double oracle = 4.80320471e-10 / (9.1093837015e-28 * 2.99792458e10);
    CHECK(std::abs(gamma_from_field(1.0) / oracle - 1.0) < 1e-6);
    CHECK(gamma_from_field(10.0) == doctest::Approx(10.0 * gamma_from_field(1.0)).epsilon(1e-15));
    CHECK_THROWS_AS(gamma_from_field(-1.0), std::invalid_argument);
}
