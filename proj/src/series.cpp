// series.cpp — Exact rational Bernoulli recurrence, tabulated once

#include "spinflop/series.hpp"
#include "spinflop/core.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cmath>
#include <stdexcept>

namespace spinflop {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

struct SeriesTables {
    std::array<double, kMaxSeriesOrder + 1> bernoulli_even{};
    std::array<double, kMaxSeriesOrder + 1> coth_coeff{};
};

// B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j, carried out in exact rationals.
SeriesTables build_tables() {
    constexpr int max_index = 2 * kMaxSeriesOrder;
    std::array<cpp_rational, max_index + 1> b;
    b[0] = 1;
    for (int m = 1; m <= max_index; ++m) {
        cpp_rational acc = 0;
        cpp_int binom = 1; // C(m+1, 0)
        for (int j = 0; j < m; ++j) {
            acc += cpp_rational(binom) * b[static_cast<std::size_t>(j)];
            binom = binom * (m + 1 - j) / (j + 1);
        }
        b[static_cast<std::size_t>(m)] = -acc / (m + 1);
    }

    SeriesTables t;
    cpp_int factorial = 1;
    cpp_int pow4 = 1;
    for (int n = 0; n <= kMaxSeriesOrder; ++n) {
        if (n > 0) {
            factorial *= cpp_int(2 * n - 1) * (2 * n);
            pow4 *= 4;
        }
        const auto& b2n = b[static_cast<std::size_t>(2 * n)];
        t.bernoulli_even[static_cast<std::size_t>(n)] = static_cast<double>(b2n);
        t.coth_coeff[static_cast<std::size_t>(n)] =
            static_cast<double>(cpp_rational(pow4) * b2n / cpp_rational(factorial));
    }
    return t;
}

const SeriesTables& tables() {
    static const SeriesTables t = build_tables();
    return t;
}

void check_index(int n) {
    if (n < 0 || n > kMaxSeriesOrder)
        throw std::out_of_range("series index must lie in [0, 20]");
}

} // namespace

double bernoulli_even(int n) {
    check_index(n);
    return tables().bernoulli_even[static_cast<std::size_t>(n)];
}

double coth_series_coefficient(int n) {
    check_index(n);
    return tables().coth_coeff[static_cast<std::size_t>(n)];
}

double x_coth_x_series(double x, int order) {
    check_index(order);
    const double x2 = x * x;
    // Horner from the top coefficient down
    double acc = 0.0;
    for (int n = order; n >= 0; --n) acc = acc * x2 + coth_series_coefficient(n);
    return acc;
}

double x_coth_x(double x) { return 1.0 + x_coth_x_minus_one(x); }

double x_coth_x_minus_one(double x) {
    const double ax = std::abs(x);
    if (ax < 0.5) {
        // c_n x^{2n} shrinks by ~(x/pi)^2 per term; 20 terms reach double precision at 0.5
        const double x2 = x * x;
        double acc = 0.0;
        for (int n = kMaxSeriesOrder; n >= 1; --n) acc = acc * x2 + coth_series_coefficient(n);
        return acc * x2;
    }
    return ax / std::tanh(ax) - 1.0;
}

} // namespace spinflop
