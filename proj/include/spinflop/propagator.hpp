// propagator.hpp — Disentangling functions, interaction-picture a-coefficients,
// and the matrix-exponential oracle they are checked against

#pragma once

#include "spinflop/core.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace spinflop {
struct CsvFormat;
}

namespace spinflop::propagator {

/// f+, f-, f_z of the ordered factorisation exp(f+ S+) exp(f_z Sz) exp(f- S-).
struct DisentanglingFunctions {
    cplx f_plus;
    cplx f_minus;
    cplx f_z;
};

/// Coefficients of U^dagger Sz U = a1 Sz + a2 Sx + a3 Sy + a4 I.
struct ACoefficients {
    double a1{0.0};
    double a2{0.0};
    double a3{0.0};
    double a4{0.0};
};

/// cos(kt/2) - i (omega0/k) sin(kt/2); shared by f+, f- and f_z.
cplx disentangling_denominator(const DriveParams& drive, double t);

/// Throws DenominatorSingular when |denominator| <= 1e-12.
DisentanglingFunctions disentangle(const DriveParams& drive, double t);

/// The printed closed forms, with X (k^2/gamma^2) / sin^2(kt/2) replaced by 1/D(t) so t = 0 is regular.
/// Defined for all real t (negative t is used by the superoperator integrals).
ACoefficients a_coeffs_exact(const DriveParams& drive, double t);

/// Weak-drive series for a1. order = 1 gives (gamma/omega0)^2 sin^2(kt/2); higher orders add
/// the alternating geometric sums in gamma^2/omega0^2 and the -sin^4 term, truncated at the
/// requested power. Throws SeriesInvalid when gamma >= omega0.
double a1_series(const DriveParams& drive, double t, int order);

/// exp(-i [(omega0 t/2) sz + (gamma t/2)(cos(omega t) sx + sin(omega t) sy)]).
Mat2 propagator_matrix(const DriveParams& drive, double t);

/// Decomposes U^dagger sz U with U = propagator_matrix; (c_z, c_x, c_y, c_identity) -> (a1..a4).
ACoefficients heisenberg_sz_oracle(const DriveParams& drive, double t);

struct ConsistencyRow {
    double t{0.0};
    ACoefficients printed;
    ACoefficients oracle;
    ACoefficients abs_diff;
};

struct ConsistencyReport {
    std::vector<ConsistencyRow> rows;
    ACoefficients max_abs_diff;
    double max_oracle_a4{0.0};        // sup |oracle a4|
    double max_oracle_norm_defect{0.0}; // sup |a1^2 + a2^2 + a3^2 - 1| of the oracle
    /// Grid indices i where arg(denominator) jumps by more than pi between samples i-1 and i,
    /// i.e. where the principal branch of f_z is discontinuous.
    std::vector<std::size_t> branch_crossings;
};

/// Printed vs oracle coefficients on a grid. Makes no pass/fail judgement.
ConsistencyReport consistency_report(const DriveParams& drive, std::span<const double> t_grid);

/// Columns: t, a1_printed..a4_printed, a1_oracle..a4_oracle, d1..d4.
void write_consistency_csv(std::ostream& os, const ConsistencyReport& report, const CsvFormat& fmt);

} // namespace spinflop::propagator
