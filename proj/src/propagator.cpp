// propagator.cpp — Closed-form a-coefficients and their unitary oracle

#include "spinflop/propagator.hpp"
#include "spinflop/csv.hpp"
#include "spinflop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace spinflop::propagator {

cplx disentangling_denominator(const DriveParams& drive, double t) {
    const double k = drive.k();
    const double half = 0.5 * k * t;
    return {std::cos(half), -drive.omega0 / k * std::sin(half)};
}

DisentanglingFunctions disentangle(const DriveParams& drive, double t) {
    drive.validate();
    const double k = drive.k();
    const cplx den = disentangling_denominator(drive, t);
    if (std::abs(den) <= 1e-12) throw DenominatorSingular("|cos(kt/2) - i(w0/k) sin(kt/2)| <= 1e-12");

    const cplx i{0.0, 1.0};
    const cplx common = i * drive.gamma / k * std::sin(0.5 * k * t) / den;
    const double wt = drive.omega * t;
    return {
        common * std::polar(1.0, -wt),
        common * std::polar(1.0, wt),
        -2.0 * std::log(den),
    };
}

ACoefficients a_coeffs_exact(const DriveParams& drive, double t) {
    drive.validate();
    const double k = drive.k();
    const double s = std::sin(0.5 * k * t);
    const double c = std::cos(0.5 * k * t);
    const double s2 = s * s;
    const double c2 = c * c;
    const double r0 = (drive.omega0 / k) * (drive.omega0 / k);
    const double rg = (drive.gamma / k) * (drive.gamma / k);

    const double den = c2 + r0 * s2; // D(t)
    if (!(den > 1e-12)) throw DenominatorSingular("cos^2(kt/2) + (w0/k)^2 sin^2(kt/2) <= 1e-12");

    const double x = rg * s2 / den;                 // X
    const double bracket = c2 + s2 * (r0 - rg);     // common inner bracket
    const double regular = x * (bracket - 2.0) + 1.0 / den;

    const double wt = drive.omega * t;
    const double sw = std::sin(wt), cw = std::cos(wt);
    const double g_over_k = drive.gamma / k;
    const double w0_over_k = drive.omega0 / k;

    ACoefficients a;
    a.a1 = 0.5 * (regular - bracket);
    a.a2 = g_over_k * s * ((sw * c - w0_over_k * cw * s) / den) * (bracket - 1.0);
    a.a3 = g_over_k * s * ((cw * c + w0_over_k * sw * s) / den) * (bracket + 1.0);
    a.a4 = 0.5 * (regular + bracket);
    return a;
}

double a1_series(const DriveParams& drive, double t, int order) {
    drive.validate();
    if (!(drive.gamma < drive.omega0)) throw SeriesInvalid("weak-drive series needs gamma < omega0");
    if (order < 1) throw std::invalid_argument("a1_series: order must be >= 1");

    const double eps = (drive.gamma / drive.omega0) * (drive.gamma / drive.omega0);
    // eps - eps^2 + ... (+/-) eps^order, and eps^2 - eps^3 + ... up to eps^order
    double first = 0.0;
    double second = 0.0;
    double p = 1.0;
    for (int j = 1; j <= order; ++j) {
        p *= eps;
        const double term = (j % 2 == 1) ? p : -p;
        first += term;
        if (j >= 2) second -= term;
    }
    const double s = std::sin(0.5 * drive.k() * t);
    const double s2 = s * s;
    return first * s2 - second * s2 * s2;
}

Mat2 propagator_matrix(const DriveParams& drive, double t) {
    drive.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("propagator_matrix: t must be >= 0");
    const auto& p = pauli_basis();
    const double wt = drive.omega * t;
    const Mat2 h = cplx{0.5 * drive.omega0 * t} * p.z +
                   cplx{0.5 * drive.gamma * t} * (cplx{std::cos(wt)} * p.x + cplx{std::sin(wt)} * p.y);
    return expm_su2(h);
}

ACoefficients heisenberg_sz_oracle(const DriveParams& drive, double t) {
    const Mat2 u = propagator_matrix(drive, t);
    const auto d = decompose_pauli(u.adjoint() * pauli_basis().z * u);
    return {d.c_z.real(), d.c_x.real(), d.c_y.real(), d.c_identity.real()};
}

ConsistencyReport consistency_report(const DriveParams& drive, std::span<const double> t_grid) {
    if (t_grid.empty()) throw std::invalid_argument("consistency_report: empty grid");
    ConsistencyReport r;
    r.rows.reserve(t_grid.size());
    double prev_arg = 0.0;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        ConsistencyRow row;
        row.t = t;
        row.printed = a_coeffs_exact(drive, t);
        row.oracle = heisenberg_sz_oracle(drive, t);
        row.abs_diff = {std::abs(row.printed.a1 - row.oracle.a1), std::abs(row.printed.a2 - row.oracle.a2),
                        std::abs(row.printed.a3 - row.oracle.a3), std::abs(row.printed.a4 - row.oracle.a4)};

        r.max_abs_diff.a1 = std::max(r.max_abs_diff.a1, row.abs_diff.a1);
        r.max_abs_diff.a2 = std::max(r.max_abs_diff.a2, row.abs_diff.a2);
        r.max_abs_diff.a3 = std::max(r.max_abs_diff.a3, row.abs_diff.a3);
        r.max_abs_diff.a4 = std::max(r.max_abs_diff.a4, row.abs_diff.a4);
        r.max_oracle_a4 = std::max(r.max_oracle_a4, std::abs(row.oracle.a4));
        const auto& o = row.oracle;
        r.max_oracle_norm_defect =
            std::max(r.max_oracle_norm_defect, std::abs(o.a1 * o.a1 + o.a2 * o.a2 + o.a3 * o.a3 - 1.0));

        const double arg = std::arg(disentangling_denominator(drive, t));
        if (i > 0 && std::abs(arg - prev_arg) > std::numbers::pi) r.branch_crossings.push_back(i);
        prev_arg = arg;
        r.rows.push_back(row);
    }
    return r;
}

void write_consistency_csv(std::ostream& os, const ConsistencyReport& report, const CsvFormat& fmt) {
    write_csv_header(os, {"t", "a1_printed", "a2_printed", "a3_printed", "a4_printed", "a1_oracle", "a2_oracle",
                          "a3_oracle", "a4_oracle", "d1", "d2", "d3", "d4"});
    for (const auto& r : report.rows) {
        write_csv_row(os,
                      {r.t, r.printed.a1, r.printed.a2, r.printed.a3, r.printed.a4, r.oracle.a1, r.oracle.a2,
                       r.oracle.a3, r.oracle.a4, r.abs_diff.a1, r.abs_diff.a2, r.abs_diff.a3, r.abs_diff.a4},
                      fmt);
    }
}

} // namespace spinflop::propagator
