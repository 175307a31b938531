// series.hpp — Bernoulli numbers and the x coth(x) Taylor series

#pragma once

namespace spinflop {

/// Even-index Bernoulli number B_{2n} (modern convention: B_2 = 1/6, B_4 = -1/30), n in [0, 20].
double bernoulli_even(int n);

/// Taylor coefficient of x coth(x) at x^{2n}: 2^{2n} B_{2n} / (2n)!, n in [0, 20].
/// c_0 = 1, c_1 = 1/3, c_2 = -1/45, c_3 = 2/945.
double coth_series_coefficient(int n);

/// sum_{n=0}^{order} c_n x^{2n}; converges to x coth(x) for |x| < pi.
double x_coth_x_series(double x, int order);

/// x coth(x), with x -> 0 limit 1.
double x_coth_x(double x);

/// x coth(x) - 1 without cancellation at small x.
double x_coth_x_minus_one(double x);

} // namespace spinflop
