// test_decoherence.cpp — Decoherence factor routes, G functions and superoperator coefficients

#include "spinflop/csv.hpp"
#include "spinflop/decoherence.hpp"
#include "spinflop/errors.hpp"
#include "spinflop/series.hpp"
#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace spinflop;
using namespace spinflop::decoherence;
using spinflop::test::kPi;

namespace {

// Bath at the given temperature with cutoff lambda = k / k_over_lambda.
BathParams bath_for(const DriveParams& d, double temperature, double k_over_lambda, CothMode mode = CothMode::high_t()) {
    return BathParams{temperature, d.k() / k_over_lambda, mode};
}

// Temperature at which hbar k / 2 k_B T = x.
double temperature_for_x(double k, double x) {
    return kConstants.hbar * k / (2.0 * kConstants.k_boltzmann * x);
}

double leading_bracket(const DriveParams& d, const BathParams& b) {
    const double x = b.coth_argument(d.k());
    const double eps = (d.gamma / d.omega0) * (d.gamma / d.omega0);
    return kPi * kConstants.k_boltzmann * b.temperature / (8.0 * kConstants.hbar) * eps *
           (1.0 - std::exp(-d.k() / b.cutoff) * x_coth_x(x));
}

} // namespace

TEST_CASE("every route vanishes without a drive") {
    const DriveParams d = test::esr_drive(0.0);
    const BathParams b = test::room_bath();
    CHECK(dfactor_quadrature(d, b, A1Mode::series(1)).d_factor == 0.0);
    CHECK(dfactor_quadrature(d, b, A1Mode::exact()).d_factor == 0.0);
    CHECK(dfactor_closed_high_t(d, b).d_factor == 0.0);
    CHECK(dfactor_series_t(d, b, 10).d_factor == 0.0);
    CHECK(dfactor_higher_order(d, b, 3).d_factor == 0.0);
}

TEST_CASE("closed high-temperature D at the operating point") {
    const DriveParams d = test::esr_drive();
    const auto r = dfactor_closed_high_t(d, bath_for(d, 300.0, 1.0));
    CHECK(r.method == Method::ClosedHighT);
    CHECK(r.d_factor == doctest::Approx(9.75e6).epsilon(1e-3));
    CHECK(kPi * kConstants.k_boltzmann * 300.0 == doctest::Approx(1.3013e-20).epsilon(1e-4));
    CHECK(kConstants.k_boltzmann * 300.0 == doctest::Approx(4.14e-21).epsilon(1e-3));

    // large cutoff: 1 - exp(-k/lambda) -> k/lambda
    const BathParams wide = bath_for(d, 300.0, 1e-7);
    const double limit = kPi * kConstants.k_boltzmann * 300.0 * 1e-6 * 1e-7 / (8.0 * kConstants.hbar);
    CHECK(dfactor_closed_high_t(d, wide).d_factor == doctest::Approx(limit).epsilon(1e-6));
    CHECK_THROWS_AS(dfactor_closed_high_t(DriveParams{1.0, 1.0, 1.0}, wide), SeriesInvalid);
}

TEST_CASE("closed D is linear in T and quadratic in gamma at fixed k/lambda") {
    for (double r : {0.3, 1.0, 4.0}) {
        const DriveParams d = test::esr_drive(1e7);
        const double base = dfactor_closed_high_t(d, bath_for(d, 300.0, r)).d_factor;
        CHECK(dfactor_closed_high_t(d, bath_for(d, 600.0, r)).d_factor == doctest::Approx(2.0 * base).epsilon(1e-14));
        const DriveParams d3 = test::esr_drive(3e7);
        CHECK(dfactor_closed_high_t(d3, bath_for(d3, 300.0, r)).d_factor ==
              doctest::Approx(9.0 * base).epsilon(1e-14));
        CHECK(base > 0.0);
    }
}

TEST_CASE("quadrature agrees with the closed form on the high-temperature grid") {
    for (double g : {1e-4, 1e-3, 1e-2}) {
        for (double r : {0.5, 1.0, 2.0}) {
            const DriveParams d = test::esr_drive(1e10 * g);
            const BathParams b = bath_for(d, 300.0, r);
            const auto q = dfactor_quadrature(d, b, A1Mode::series(1));
            const double closed = dfactor_closed_high_t(d, b).d_factor;
            CHECK(q.method == Method::Quadrature);
            CHECK(test::rel_diff(q.d_factor, closed) <= 1e-3);
            CHECK(std::abs(q.d_factor - closed) <= q.error_estimate);
        }
    }
}

TEST_CASE("doubling the truncation point moves the quadrature by less than rel_tol") {
    const DriveParams d = test::esr_drive();
    for (double r : {0.5, 1.0, 2.0}) {
        const BathParams b = bath_for(d, 300.0, r);
        kernels::QuadratureSettings q;
        const double a = dfactor_quadrature(d, b, A1Mode::series(1), q).d_factor;
        q.omega_upper_factor *= 2.0;
        const double c = dfactor_quadrature(d, b, A1Mode::series(1), q).d_factor;
        CHECK(test::rel_diff(a, c) < q.rel_tol);
    }
}

TEST_CASE("quadrature with the closed-form a1 reproduces the second-order expansion") {
    // a1 = u S - u^2 S^2 + O(u^3) with u = eps / (1 + eps), S = sin^2(kt/2); term-by-term against the
    // Lorentzian kernel this gives (pi k_B T / 8 hbar)[u (1 - e^-r) - u^2 (3/4 - e^-r + e^-2r / 4)].
    for (double g : {1e-3, 1e-2}) {
        for (double r : {0.5, 2.0}) {
            const DriveParams d = test::esr_drive(1e10 * g);
            const BathParams b = bath_for(d, 300.0, r);
            const double eps = g * g, u = eps / (1.0 + eps), e1 = std::exp(-r);
            const double expected = kPi * kConstants.k_boltzmann * 300.0 / (8.0 * kConstants.hbar) *
                                    (u * (1.0 - e1) - u * u * (0.75 - e1 + 0.25 * e1 * e1));
            const auto q = dfactor_quadrature(d, b, A1Mode::exact());
            // the closed form cancels O(1) terms down to O(u), so its rounding floor is ~1e-16 / u
            CHECK(test::rel_diff(q.d_factor, expected) <= 4.0 * u * u + 1e-15 / u);
        }
    }
}

TEST_CASE("exact-coth quadrature reproduces the bracket 1 - exp(-k/lambda) x coth x") {
    const DriveParams d = test::esr_drive();
    for (double x : {1.3e-4, 0.05, 0.3, 1.0}) {
        for (double r : {0.5, 1.0, 2.0}) {
            const BathParams b = bath_for(d, temperature_for_x(d.k(), x), r, CothMode::exact());
            const auto q = dfactor_quadrature(d, b, A1Mode::series(1));
            const double expected = leading_bracket(d, b);
            CHECK(test::rel_diff(q.d_factor, expected) <= 1e-3);
            CHECK(std::abs(q.d_factor - expected) <= q.error_estimate);
            CHECK(test::rel_diff(q.d_factor, dfactor_series_t(d, b, 20).d_factor) <= 1e-3);
        }
    }
}

TEST_CASE("series-mode quadrature agrees with exact-coth quadrature where the series converges") {
    const DriveParams d = test::esr_drive();
    // hbar * 40 lambda / 2 k_B T must stay below pi; take x = 1e-3 and lambda = k
    const double t = temperature_for_x(d.k(), 1e-3);
    const auto ser = dfactor_quadrature(d, bath_for(d, t, 1.0, CothMode::series(10)), A1Mode::series(1));
    const auto ex = dfactor_quadrature(d, bath_for(d, t, 1.0, CothMode::exact()), A1Mode::series(1));
    CHECK(test::rel_diff(ser.d_factor, ex.d_factor) <= 1e-8);
}

TEST_CASE("G functions") {
    const DriveParams d = test::esr_drive();
    auto g_at = [&](double x, int order) { return g_functions(bath_for(d, temperature_for_x(d.k(), x), 1.0), d.k(), order); };

    const auto tiny = g_at(1e-9, 10);
    CHECK(tiny.g == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(tiny.g_prime == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g_at(0.1, 5).g == doctest::Approx(1.003330).epsilon(1e-6));
    CHECK(g_at(0.1, 5).x == doctest::Approx(0.1).epsilon(1e-14));
    for (double x = 1e-4; x <= 1.0; x *= 1.5) CHECK(std::abs(g_at(x, 10).g - x_coth_x(x)) <= 1e-10);
    CHECK(std::abs(g_at(0.6, 12).g_prime - x_coth_x(1.2)) <= 1e-10);
    CHECK(g_at(3.0, 20).g > 0.0);
    CHECK_THROWS_AS(g_at(3.2, 10), SeriesInvalid);
}

TEST_CASE("temperature-series D") {
    const DriveParams d = test::esr_drive();
    const BathParams room = bath_for(d, 300.0, 1.0);
    const double closed = dfactor_closed_high_t(d, room).d_factor;
    CHECK(dfactor_series_t(d, room, 0).d_factor == closed);
    const double shifted = dfactor_series_t(d, room, 10).d_factor;
    CHECK(std::abs(shifted / closed - 1.0) < 1e-8);
    CHECK(shifted < closed);

    // high-temperature limit: the gap closes like x^2
    double prev = 1.0;
    for (double t : {1e3, 1e4, 1e5, 1e6, 1e8}) {
        const BathParams hot = bath_for(d, t, 1.0);
        const double gap = test::rel_diff(dfactor_series_t(d, hot, 10).d_factor, dfactor_closed_high_t(d, hot).d_factor);
        const double x = hot.coth_argument(d.k());
        CHECK(gap <= x * x / 3.0 + 1e-15);
        CHECK(gap <= prev);
        if (t >= 1e5) CHECK(gap <= 1e-12);
        prev = gap;
    }
}

TEST_CASE("negative-D flag is raised exactly when exp(-k/lambda) g > 1") {
    const DriveParams d = test::esr_drive();
    for (double x : {0.1, 1.0, 2.0, 3.0}) {
        for (double r : {0.05, 0.5, 1.0, 2.0}) {
            const BathParams b = bath_for(d, temperature_for_x(d.k(), x), r);
            const auto res = dfactor_series_t(d, b, 20);
            const double g = g_functions(b, d.k(), 20).g;
            CHECK(res.negative_d_factor == (std::exp(-r) * g > 1.0));
            CHECK(res.negative_d_factor == (res.d_factor < 0.0));
        }
    }
}

TEST_CASE("higher-order D") {
    const DriveParams d = test::esr_drive();
    const BathParams b = bath_for(d, 300.0, 1.0, CothMode::series(10));
    CHECK(dfactor_higher_order(d, b, 1).d_factor == doctest::Approx(dfactor_series_t(d, b, 10).d_factor).epsilon(1e-15));
    const double ho = dfactor_higher_order(d, b, 3).d_factor;
    CHECK(test::rel_diff(ho, dfactor_series_t(d, b, 10).d_factor) <= 3e-6);
    CHECK_THROWS_AS(dfactor_higher_order(DriveParams{1.0, 1.0, 1.0}, b, 2), SeriesInvalid);
    CHECK_THROWS_AS(dfactor_higher_order(d, bath_for(d, temperature_for_x(d.k(), 1.6), 1.0), 2), SeriesInvalid);
}

TEST_CASE("higher-order report is deterministic and self-consistent") {
    const DriveParams d = test::esr_drive(1e8);
    const BathParams b = bath_for(d, 300.0, 1.0);
    const auto a = higher_order_report(d, b, 3);
    const auto c = higher_order_report(d, b, 3);
    CHECK(a.higher_order == c.higher_order);
    CHECK(a.quadrature_exact_a1 == c.quadrature_exact_a1);
    CHECK(a.abs_deviation == a.higher_order - a.quadrature_exact_a1);
    CHECK(a.rel_deviation == doctest::Approx(a.abs_deviation / a.quadrature_exact_a1).epsilon(1e-15));
    CHECK(std::isfinite(a.quadrature_error));
}

TEST_CASE("superoperator coefficients without a drive") {
    const DriveParams d = test::esr_drive(0.0);
    const BathParams b = test::room_bath();
    const auto c = superop_coefficients(d, b);
    CHECK(c.shift_x == 0.0);
    CHECK(c.shift_y == 0.0);
    CHECK(c.kappa_x == cplx{});
    CHECK(c.kappa_y == cplx{});
    CHECK(c.shift_z == doctest::Approx(kPi * kConstants.k_boltzmann * 300.0 / kConstants.hbar).epsilon(1e-3));
}

TEST_CASE("superoperator coefficients are finite on the sweep grid") {
    for (double ratio : {10.0, 100.0, 1000.0}) {
        for (double r : {0.01, 0.1, 1.0, 10.0}) {
            const DriveParams d = test::esr_drive(1e10 / ratio);
            const auto c = superop_coefficients(d, bath_for(d, 300.0, r));
            for (double v : {c.shift_z, c.shift_x, c.shift_y, c.kappa_x.real(), c.kappa_x.imag(), c.kappa_y.real(),
                             c.kappa_y.imag()})
                CHECK(std::isfinite(v));
        }
    }
}

TEST_CASE("D table serialisation") {
    const DriveParams d = test::esr_drive();
    const BathParams b = test::room_bath();
    const std::vector<DFactorRow> rows{{dfactor_closed_high_t(d, b), d, b}, {dfactor_series_t(d, b, 4), d, b}};
    std::ostringstream os;
    write_dfactor_csv(os, rows, CsvFormat{});
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "method,omega0,gamma,omega,T,lambda,d_factor,error_estimate");
    std::getline(in, line);
    CHECK(line.rfind("ClosedHighT,", 0) == 0);
    CHECK(split_csv_line(line).size() == 8);
    std::getline(in, line);
    CHECK(line.rfind("SeriesT,", 0) == 0);
}

TEST_CASE("input checks") {
    const DriveParams d = test::esr_drive();
    const BathParams b = test::room_bath();
    CHECK_THROWS_AS(dfactor_quadrature(DriveParams(1.0, 2.0, 1.0), b, A1Mode::series(1)), SeriesInvalid);
    const std::vector<double> none;
    CHECK_THROWS_AS(dfactor_quadrature(d, b, A1Mode::series(1), {}, none), std::invalid_argument);
    CHECK(method_name(Method::HigherOrder) == "HigherOrder");
}
