// test_dynamics.cpp — Master-equation integrator, closed-form dephasing and decay-rate fits

#include "spinflop/csv.hpp"
#include "spinflop/dynamics.hpp"
#include "spinflop/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace spinflop;
using namespace spinflop::dynamics;

namespace {

const rabi::SpinState kPlusX{cplx{1.0 / std::sqrt(2.0)}, cplx{1.0 / std::sqrt(2.0)}};

TermToggles only(bool unitary, bool dephasing) {
    TermToggles t = TermToggles::none();
    t.unitary = unitary;
    t.dephasing = dephasing;
    return t;
}

} // namespace

TEST_CASE("density matrix helpers and validation") {
    const auto rho = DensityMatrix2::from_state(kPlusX);
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rho.purity() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(rho.rho01() - 0.5) < 1e-15);
    CHECK(std::abs(rho.min_eigenvalue()) < 1e-15);
    CHECK_NOTHROW(rho.validate());

    DensityMatrix2 bad = rho;
    bad.m(0, 1) += cplx{0.0, 1e-6};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = rho;
    bad.m(0, 0) += 1e-6;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = DensityMatrix2{Mat2{{cplx{1.5}, cplx{}, cplx{}, cplx{-0.5}}}};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("unitary-only evolution reproduces the Schroedinger populations") {
    const DriveParams d{1e10, 1e8, 1e10};
    const double dt = 1e-12, t_final = 2.0 * test::kPi / d.gamma;
    const auto traj = evolve_master(d, {}, 0.0, DensityMatrix2::from_state(rabi::SpinState::up()), t_final, dt,
                                    only(true, false), 50);
    const auto psi = rabi::evolve_tdse(d, rabi::SpinState::up(), t_final, dt, 50);
    REQUIRE(traj.samples.size() == psi.samples.size());
    double worst = 0.0, purity = 0.0;
    for (std::size_t i = 0; i < psi.samples.size(); ++i) {
        CHECK(traj.samples[i].t == psi.samples[i].t);
        worst = std::max(worst, std::abs(traj.samples[i].rho.m(1, 1).real() - std::norm(psi.samples[i].state.c_minus)));
        purity = std::max(purity, std::abs(traj.samples[i].rho.purity() - 1.0));
    }
    CHECK(worst <= 1e-6);
    CHECK(purity <= 1e-8);
}

TEST_CASE("dephasing-only evolution follows exp(-4 D t)") {
    const double dfac = 9.75e6;
    const DriveParams d = test::esr_drive();
    const auto rho0 = DensityMatrix2::from_state(kPlusX);
    const auto traj = evolve_master(d, {}, dfac, rho0, 1e-7, 1e-10, only(false, true), 10);
    for (const auto& s : traj.samples) {
        CHECK(std::abs(s.rho.rho01() - 0.5 * std::exp(-4.0 * dfac * s.t)) <= 1e-9);
        CHECK(s.rho.m(0, 0).real() == doctest::Approx(0.5).epsilon(1e-15));
    }
}

TEST_CASE("with every term off the state is frozen") {
    const auto rho0 = DensityMatrix2::from_state(rabi::SpinState{cplx{0.6}, cplx{0.0, 0.8}});
    const auto traj = evolve_master(test::esr_drive(), {}, 1e7, rho0, 1e-9, 1e-12, TermToggles::none(), 100);
    for (const auto& s : traj.samples) CHECK(max_abs_diff(s.rho.m, rho0.m) == 0.0);
}

TEST_CASE("trace and Hermiticity are preserved over 1e5 steps") {
    const DriveParams d = test::esr_drive();
    const double dt = 0.01 / d.k();
    const auto traj = evolve_master(d, {}, 9.75e6, DensityMatrix2::from_state(kPlusX), 1e5 * dt, dt,
                                    only(true, true), 1000);
    CHECK(traj.steps == 100000);
    CHECK(traj.max_trace_drift <= 1e-9);
    CHECK(traj.max_hermiticity_residue <= 1e-10);
    CHECK(traj.samples.front().t == 0.0);
    for (std::size_t i = 1; i < traj.samples.size(); ++i) CHECK(traj.samples[i].t > traj.samples[i - 1].t);
}

TEST_CASE("closed-form dephasing") {
    const auto rho0 = DensityMatrix2::from_state(kPlusX);
    CHECK(max_abs_diff(evolve_dephasing_closed(9.75e6, rho0, 0.0).m, rho0.m) == 0.0);
    const auto late = evolve_dephasing_closed(9.75e6, rho0, 1.0);
    CHECK(std::abs(late.rho01()) == 0.0);
    CHECK(late.m(0, 0) == rho0.m(0, 0));
    const double t_half = std::log(2.0) / (4.0 * 9.75e6);
    CHECK(std::abs(evolve_dephasing_closed(9.75e6, rho0, t_half).rho01() - 0.25) < 1e-15);
    const auto printed = evolve_dephasing_closed(9.75e6, rho0, 4.0 * t_half, DephasingConvention::PrintedRate);
    CHECK(std::abs(printed.rho01() - 0.25) < 1e-15);
    CHECK_THROWS_AS(evolve_dephasing_closed(1.0, rho0, -1.0), std::invalid_argument);
}

TEST_CASE("decay-rate fit on an exact exponential") {
    const double dfac = 1e6;
    Trajectory traj;
    traj.d_factor = dfac;
    traj.toggles = only(false, true);
    const auto rho0 = DensityMatrix2::from_state(kPlusX);
    for (int i = 0; i <= 200; ++i) {
        const double t = 1e-6 * i / 200.0;
        traj.samples.push_back({t, evolve_dephasing_closed(dfac, rho0, t)});
    }
    CHECK(extract_decay_rate(traj) == doctest::Approx(4e6).epsilon(1e-6));
}

TEST_CASE("decay-rate fit on integrated dephasing runs") {
    const auto rho0 = DensityMatrix2::from_state(kPlusX);
    for (double dfac : {1e4, 1e6, 1e8}) {
        const double dt = 1e-3 / dfac;
        const auto traj =
            evolve_master(test::esr_drive(), {}, dfac, rho0, 3.0 / (4.0 * dfac), dt, only(false, true), 10);
        CHECK(extract_decay_rate(traj) == doctest::Approx(4.0 * dfac).epsilon(1e-3));
    }
}

TEST_CASE("decay-rate fit with the drive on uses the envelope") {
    const DriveParams d{1e10, 1e5, 1e10};
    const double dfac = 1e8, dt = 0.01 / d.k();
    const auto traj = evolve_master(d, {}, dfac, DensityMatrix2::from_state(kPlusX), 3.0 / (4.0 * dfac), dt,
                                    only(true, true), 7);
    CHECK(extract_decay_rate(traj) == doctest::Approx(4.0 * dfac).epsilon(1e-3));
}

TEST_CASE("decay-rate fit failures") {
    const auto rho0 = DensityMatrix2::from_state(kPlusX);
    const auto frozen = evolve_master(test::esr_drive(), {}, 0.0, rho0, 1e-9, 1e-11, TermToggles::none());
    CHECK_THROWS_AS(extract_decay_rate(frozen), InsufficientDecay);
    Trajectory few;
    few.samples.push_back({0.0, rho0});
    CHECK_THROWS_AS(extract_decay_rate(few), std::invalid_argument);
    const auto dead = evolve_master(test::esr_drive(), {}, 1.0, DensityMatrix2::from_state(rabi::SpinState::up()),
                                    1e-9, 1e-11, only(false, true));
    CHECK_THROWS_AS(extract_decay_rate(dead), std::invalid_argument);
}

TEST_CASE("step guard and trace guard") {
    const DriveParams d = test::esr_drive();
    const auto rho0 = DensityMatrix2::from_state(kPlusX);
    CHECK_THROWS_AS(evolve_master(d, {}, 0.0, rho0, 1e-9, 1e-11, only(true, false)), StepTooLarge);
    CHECK_NOTHROW(evolve_master(d, {}, 0.0, rho0, 1e-9, 1e-11, only(false, false)));

    decoherence::SuperopCoefficients c;
    c.shift_z = 1e14;
    TermToggles shifts = TermToggles::none();
    shifts.lamb_shifts = true;
    CHECK_THROWS_AS(evolve_master(d, c, 0.0, rho0, 1e-9, 1e-12, shifts), StepTooLarge);

    // an imaginary kappa feeds 2 Im(kappa) <sx> into the trace
    c = {};
    c.kappa_y = cplx{0.0, 1e6};
    TermToggles d1 = TermToggles::none();
    d1.d1 = true;
    CHECK_THROWS_AS(evolve_master(d, c, 0.0, rho0, 1e-9, 1e-12, d1), InvariantBreach);
    CHECK_THROWS_AS(evolve_master(d, {}, -1.0, rho0, 1e-9, 1e-12, d1), std::invalid_argument);
}

TEST_CASE("trajectory CSV") {
    const auto traj = evolve_master(test::esr_drive(), {}, 1e7, DensityMatrix2::from_state(kPlusX), 1e-10, 1e-12,
                                    only(true, true), 10);
    std::ostringstream os;
    write_trajectory_csv(os, traj, CsvFormat{});
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,rho00_re,rho00_im,rho01_re,rho01_im,rho10_re,rho10_im,rho11_re,rho11_im,trace,purity,abs_rho01");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const auto cells = split_csv_line(line);
        REQUIRE(cells.size() == 12);
        for (const auto& c : cells) CHECK(std::isfinite(std::stod(c)));
        ++rows;
    }
    CHECK(rows == traj.samples.size());
}
