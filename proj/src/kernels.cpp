// kernels.cpp — Bath kernels and the panelled adaptive quadrature behind them

#include "spinflop/kernels.hpp"
#include "spinflop/csv.hpp"
#include "spinflop/errors.hpp"
#include "spinflop/parallel.hpp"
#include "spinflop/series.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <queue>
#include <stdexcept>

namespace spinflop::kernels {

void QuadratureSettings::validate() const {
    if (!(rel_tol > 0.0)) throw std::invalid_argument("QuadratureSettings: rel_tol must be > 0");
    if (abs_tol && !(*abs_tol > 0.0)) throw std::invalid_argument("QuadratureSettings: abs_tol must be > 0");
    if (max_subdivisions < 0) throw std::invalid_argument("QuadratureSettings: max_subdivisions must be >= 0");
    if (!(omega_upper_factor >= 20.0))
        throw std::invalid_argument("QuadratureSettings: omega_upper_factor must be >= 20");
}

namespace {

struct Panel {
    double a{0.0};
    double b{0.0};
    double value{0.0};
    double error{0.0};
    double l1{0.0};

    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const Integrand& f, double a, double b) {
    using kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
    using gauss = boost::math::quadrature::gauss<double, 7>;
    const auto& x = kronrod::abscissa();
    const auto& wk = kronrod::weights();
    const auto& wg = gauss::weights();

    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f0 = f(mid);
    double k = f0 * wk[0];
    double g = f0 * wg[0];
    double l1 = std::abs(f0) * wk[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double fp = f(mid + half * x[i]);
        const double fm = f(mid - half * x[i]);
        k += (fp + fm) * wk[i];
        l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
        if (i % 2 == 0) g += (fp + fm) * wg[i / 2];
    }
    Panel p{a, b, k * half, std::abs(k - g) * half, l1 * half};
    p.error = std::max(p.error, 4.0 * std::numeric_limits<double>::epsilon() * p.l1);
    if (!std::isfinite(p.value)) throw QuadratureFailure("integrand is not finite on the panel");
    return p;
}

} // namespace

QuadResult integrate_panels(const Integrand& f, std::span<const double> edges, const QuadratureSettings& q) {
    q.validate();
    if (edges.size() < 2) throw std::invalid_argument("integrate_panels: need at least two edges");

    std::priority_queue<Panel> heap;
    double value = 0.0, error = 0.0, l1 = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (!(edges[i + 1] > edges[i])) continue;
        const Panel p = gk15(f, edges[i], edges[i + 1]);
        value += p.value;
        error += p.error;
        l1 += p.l1;
        heap.push(p);
    }

    int subdivisions = 0;
    const auto tolerance = [&] { return std::max(q.abs_tol.value_or(1e-12 * l1), q.rel_tol * std::abs(value)); };
    while (!heap.empty() && error > tolerance()) {
        if (subdivisions >= q.max_subdivisions)
            throw QuadratureFailure("tolerance not met after " + std::to_string(subdivisions) +
                                    " subdivisions (error " + std::to_string(error) + ")");
        const Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = gk15(f, worst.a, mid);
        const Panel right = gk15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }

    // Re-sum from the final panel set so incremental drift does not leak into the result.
    QuadResult r;
    r.subdivisions = subdivisions;
    while (!heap.empty()) {
        r.value += heap.top().value;
        r.error_estimate += heap.top().error;
        r.l1_norm += heap.top().l1;
        heap.pop();
    }
    r.error_estimate += 50.0 * std::numeric_limits<double>::epsilon() * r.l1_norm;
    return r;
}

QuadResult quad_semi_infinite(const Integrand& f, const QuadratureSettings& q, double decay_scale,
                              std::optional<double> oscillation_period) {
    q.validate();
    if (!(decay_scale > 0.0)) throw std::invalid_argument("quad_semi_infinite: decay_scale must be > 0");
    const double upper = q.omega_upper_factor * decay_scale;

    std::vector<double> edges;
    if (oscillation_period && *oscillation_period > 0.0) {
        const double half = 0.5 * *oscillation_period;
        const auto n = static_cast<std::size_t>(std::ceil(upper / half));
        constexpr std::size_t max_panels = 1u << 20;
        const std::size_t panels = std::min(n, max_panels);
        const double width = n > max_panels ? upper / static_cast<double>(max_panels) : half;
        for (std::size_t i = 0; i < panels; ++i) edges.push_back(static_cast<double>(i) * width);
    } else {
        edges.push_back(0.0);
        for (double x = decay_scale / 16.0; x < upper; x *= 2.0) edges.push_back(x);
    }
    edges.push_back(upper);

    QuadResult r = integrate_panels(f, edges, q);

    // |f| decays at least like exp(-x/scale) beyond the cut, so the tail is ~ scale * |f(upper)|.
    const double window = std::min(decay_scale, upper - edges[edges.size() - 2]);
    double envelope = 0.0;
    for (int i = 0; i < 8; ++i) envelope = std::max(envelope, std::abs(f(upper - window * i / 8.0)));
    r.error_estimate += 2.0 * decay_scale * envelope;
    return r;
}

double spectral_density(const BathParams& bath, double omega_e) {
    if (!(omega_e >= 0.0)) throw std::invalid_argument("spectral_density: omega_e must be >= 0");
    return omega_e * std::exp(-omega_e / bath.cutoff);
}

double thermal_spectral_weight(const BathParams& bath, double omega_e) {
    const double rate = bath.thermal_rate();
    const double envelope = rate * std::exp(-omega_e / bath.cutoff);
    const double x = omega_e / rate;
    switch (bath.coth_mode.kind) {
    case CothMode::Kind::HighT:
        return envelope;
    case CothMode::Kind::Series:
        return envelope * x_coth_x_series(x, bath.coth_mode.order);
    case CothMode::Kind::ExactCoth:
        return envelope * x_coth_x(x);
    }
    return envelope;
}

double thermal_weight_excess(const BathParams& bath, double omega_e) {
    const double rate = bath.thermal_rate();
    const double envelope = rate * std::exp(-omega_e / bath.cutoff);
    const double x = omega_e / rate;
    switch (bath.coth_mode.kind) {
    case CothMode::Kind::HighT:
        return 0.0;
    case CothMode::Kind::Series: {
        const double x2 = x * x;
        double acc = 0.0;
        for (int n = bath.coth_mode.order; n >= 1; --n) acc = acc * x2 + coth_series_coefficient(n);
        return envelope * acc * x2;
    }
    case CothMode::Kind::ExactCoth:
        return envelope * x_coth_x_minus_one(x);
    }
    return 0.0;
}

namespace {

double noise_high_t(const BathParams& bath, double t) {
    const double lt = bath.cutoff * t;
    return bath.thermal_rate() * bath.cutoff / (1.0 + lt * lt);
}

// Each coth-series term integrates in closed form:
// int_0^inf w^{2j} e^{-w/l} cos(wt) dw = (2j)! Re[(1/l - i t)^{-(2j+1)}].
double noise_series(const BathParams& bath, double t, const QuadratureSettings& q) {
    const double rate = bath.thermal_rate();
    const double bl = bath.cutoff / rate; // hbar lambda / 2 k_B T
    if (q.omega_upper_factor * bl >= std::numbers::pi)
        throw SeriesInvalid("coth expansion diverges inside the integration range (hbar w_max / 2 k_B T >= pi)");

    const cplx base = 1.0 / cplx{1.0, -bath.cutoff * t};
    const cplx base2 = base * base;
    cplx power = base; // (1 - i l t)^{-(2j+1)}
    double scale = 1.0; // (2j)! (bl)^{2j}
    double sum = 0.0;
    for (int j = 0; j <= bath.coth_mode.order; ++j) {
        if (j > 0) {
            scale *= (2.0 * j - 1.0) * (2.0 * j) * bl * bl;
            power *= base2;
        }
        sum += coth_series_coefficient(j) * scale * power.real();
    }
    return rate * bath.cutoff * sum;
}

} // namespace

double noise_kernel(const BathParams& bath, double t, const QuadratureSettings& q) {
    bath.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("noise_kernel: t must be >= 0");
    switch (bath.coth_mode.kind) {
    case CothMode::Kind::HighT:
        return noise_high_t(bath, t);
    case CothMode::Kind::Series:
        return noise_series(bath, t, q);
    case CothMode::Kind::ExactCoth: {
        const auto integrand = [&](double w) { return thermal_spectral_weight(bath, w) * std::cos(w * t); };
        std::optional<double> period;
        if (t > 0.0) period = 2.0 * std::numbers::pi / t;
        return quad_semi_infinite(integrand, q, bath.cutoff, period).value;
    }
    }
    return 0.0;
}

double noise_kernel_high_t_tail(const BathParams& bath, double t_from) {
    // pi/2 - atan(x) = atan(1/x) for x > 0, which keeps digits at large x
    const double x = bath.cutoff * t_from;
    const double rest = x > 0.0 ? std::atan(1.0 / x) : 0.5 * std::numbers::pi;
    return bath.thermal_rate() * rest;
}

double dissipation_kernel(const BathParams& bath, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("dissipation_kernel: t must be >= 0");
    const double l = bath.cutoff;
    const double d = 1.0 + l * l * t * t;
    return 2.0 * l * l * l * t / (d * d);
}

double dissipation_kernel_tail(const BathParams& bath, double t_from) {
    const double l = bath.cutoff;
    return l / (1.0 + l * l * t_from * t_from);
}

std::vector<KernelSample> kernel_table(const BathParams& bath, std::span<const double> t_grid,
                                       const QuadratureSettings& q) {
    std::vector<KernelSample> out(t_grid.size());
    parallel_for(t_grid.size(), [&](std::size_t i) {
        const double t = t_grid[i];
        out[i] = {t, noise_kernel(bath, t, q), dissipation_kernel(bath, t)};
    });
    return out;
}

void write_kernel_csv(std::ostream& os, std::span<const KernelSample> table, const CsvFormat& fmt) {
    write_csv_header(os, {"t", "nu", "eta"});
    for (const auto& s : table) write_csv_row(os, {s.t, s.nu, s.eta}, fmt);
}

} // namespace spinflop::kernels
