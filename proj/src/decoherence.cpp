// decoherence.cpp — Four routes to the decoherence factor, and the superoperator coefficients

#include "spinflop/decoherence.hpp"
#include "spinflop/csv.hpp"
#include "spinflop/errors.hpp"
#include "spinflop/propagator.hpp"
#include "spinflop/series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace spinflop::decoherence {

using kernels::QuadratureSettings;

std::string_view method_name(Method m) {
    switch (m) {
    case Method::Quadrature: return "Quadrature";
    case Method::ClosedHighT: return "ClosedHighT";
    case Method::SeriesT: return "SeriesT";
    case Method::HigherOrder: return "HigherOrder";
    }
    return "Unknown";
}

namespace {

constexpr double kPi = std::numbers::pi;

void require_weak_drive(const DriveParams& drive) {
    if (!(drive.gamma < drive.omega0)) throw SeriesInvalid("expansion in gamma/omega0 needs gamma < omega0");
}

// pi k_B T / (8 hbar)
double thermal_prefactor(const BathParams& bath) {
    return kPi * kConstants.k_boltzmann * bath.temperature / (8.0 * kConstants.hbar);
}

double drive_ratio_sq(const DriveParams& drive) {
    const double r = drive.gamma / drive.omega0;
    return r * r;
}

// Upper limit of the t-integrals, rounded up to a whole number of `period`s.
double t_upper(const DriveParams& drive, const BathParams& bath, const QuadratureSettings& q, double period) {
    const double k = drive.k();
    const double lambda = bath.cutoff;
    const double raw = q.omega_upper_factor / std::min(lambda, k) * (1.0 + lambda / k);
    return std::ceil(raw / period) * period;
}

std::vector<double> uniform_edges(double upper, double width) {
    const auto n = static_cast<std::size_t>(std::llround(upper / width));
    std::vector<double> edges(n + 1);
    for (std::size_t i = 0; i <= n; ++i) edges[i] = upper * static_cast<double>(i) / static_cast<double>(n);
    return edges;
}

struct TailedIntegral {
    double value{0.0};
    double error{0.0};
};

// int_0^inf f(t) kernel(t) dt: panels up to T, then mean(f over [T - window, T]) * int_T^inf kernel.
// The neglected piece is the zero-mean part of f against a slowly varying kernel. Integrating by
// parts twice bounds it by max|f| * window^2 * |kernel'(T)| when f is even about the period edges;
// the first-order term survives for other f and is bounded by max|f| * window * kernel(T).
template <class F, class K>
TailedIntegral integrate_with_tail(const F& f, const K& kernel, double kernel_tail, std::span<const double> edges,
                                   double window, const QuadratureSettings& q) {
    const double upper = edges.back();
    const auto body = kernels::integrate_panels([&](double t) { return f(t) * kernel(t); }, edges, q);
    const std::array<double, 3> last{upper - window, upper - 0.5 * window, upper};
    const auto mean = kernels::integrate_panels(f, last, q);
    const double f_mean = mean.value / window;
    double f_max = 0.0, asym = 0.0;
    for (int i = 0; i <= 16; ++i) {
        const double s = window * i / 32.0;
        f_max = std::max({f_max, std::abs(f(upper - s)), std::abs(f(upper - window + s))});
        asym = std::max(asym, std::abs(f(upper - s) - f(upper - window + s)));
    }
    // sum over harmonics m of b_m kernel'(T) / (m k)^2, with sum |b_m| / m^2 <= f_max pi^2 / 3
    const double slope_term = f_max * window * std::abs(kernel(upper - window) - kernel(upper)) / 12.0;
    const double first_order = asym > 1e-12 * f_max ? f_max * window * std::abs(kernel(upper)) : 0.0;
    return {body.value + f_mean * kernel_tail,
            body.error_estimate + std::abs(kernel_tail) * mean.error_estimate / window + slope_term + first_order};
}

// Cosine coefficients b_m of an even function with period P: f(t) = sum_m b_m cos(m 2pi t / P).
std::vector<double> cosine_coefficients(const std::function<double(double)>& f, double period, int harmonics) {
    constexpr int samples = 128;
    std::vector<double> values(samples);
    for (int j = 0; j < samples; ++j) values[static_cast<std::size_t>(j)] = f(period * j / samples);
    std::vector<double> b(static_cast<std::size_t>(harmonics) + 1, 0.0);
    for (int m = 0; m <= harmonics; ++m) {
        double acc = 0.0;
        for (int j = 0; j < samples; ++j) acc += values[static_cast<std::size_t>(j)] * std::cos(2.0 * kPi * m * j / samples);
        b[static_cast<std::size_t>(m)] = (m == 0 ? 1.0 : 2.0) * acc / samples;
    }
    return b;
}

// n-th derivative of the high-temperature noise kernel: R Re[n! (i lambda)^n (1 - i lambda t)^{-(n+1)}].
double high_t_noise_derivative(const BathParams& bath, int n, double t) {
    const double lambda = bath.cutoff;
    const cplx base = 1.0 / cplx{1.0, -lambda * t};
    cplx v = base;
    for (int j = 1; j <= n; ++j) v *= cplx{0.0, lambda * j} * base;
    return bath.thermal_rate() * lambda * v.real();
}

// int_T^inf (sum_m b_m cos(m k t)) nu_HighT(t) dt. The m = 0 term is closed form; the others use
// the asymptotic expansion from repeated integration by parts,
//   int_T^inf cos(w t) f dt = -sum_j (-1)^j [sin(wT) f^(2j)(T) / w^(2j+1) + cos(wT) f^(2j+1)(T) / w^(2j+2)],
// whose terms shrink like (n / wT)^2. The last term kept is returned as the error.
TailedIntegral high_t_cosine_tail(const BathParams& bath, std::span<const double> b, double k, double upper) {
    constexpr int kTerms = 4;
    TailedIntegral out{b[0] * kernels::noise_kernel_high_t_tail(bath, upper), 0.0};
    for (std::size_t m = 1; m < b.size(); ++m) {
        const double w = static_cast<double>(m) * k;
        const double sn = std::sin(w * upper), cs = std::cos(w * upper);
        double sum = 0.0, last = 0.0, sign = 1.0, wp = w;
        for (int j = 0; j < kTerms; ++j) {
            last = sign * (sn * high_t_noise_derivative(bath, 2 * j, upper) / wp +
                           cs * high_t_noise_derivative(bath, 2 * j + 1, upper) / (wp * w));
            sum -= last;
            sign = -sign;
            wp *= w * w;
        }
        out.value += b[m] * sum;
        out.error += std::abs(b[m] * last);
    }
    return out;
}

// Polynomial (Neville) extrapolation of values(eps) to eps = 0.
// Returns the estimate from all points and the one from all but the largest eps.
std::pair<double, double> extrapolate_to_zero(std::span<const double> eps, std::span<const double> values) {
    const std::size_t n = eps.size();
    std::vector<double> p(values.begin(), values.end());
    double without_first = p.back();
    for (std::size_t level = 1; level < n; ++level) {
        for (std::size_t i = 0; i + level < n; ++i) {
            const double xi = eps[i], xj = eps[i + level];
            p[i] = (xi * p[i + 1] - xj * p[i]) / (xi - xj);
        }
        if (level == n - 2) without_first = p[1];
    }
    return {p[0], without_first};
}

// (1/4) sum_m b_m int_0^U excess(w) (1/2)[L(w - mk) + L(w + mk)] dw, L(x) = a / (a^2 + x^2), a = eps k.
double lorentzian_smoothed_excess(const BathParams& bath, double k, std::span<const double> b, double eps,
                                  const QuadratureSettings& q, double& error) {
    const double a = eps * k;
    const double lambda = bath.cutoff;
    double b_max = 0.0;
    for (double v : b) b_max = std::max(b_max, std::abs(v));

    double total = 0.0;
    for (std::size_t m = 0; m < b.size(); ++m) {
        if (std::abs(b[m]) <= 1e-15 * b_max) continue;
        const double centre = static_cast<double>(m) * k;
        const double upper = q.omega_upper_factor * lambda + centre;
        std::vector<double> edges{0.0, upper};
        for (double x = lambda / 16.0; x < upper; x *= 2.0) edges.push_back(x);
        for (double w = a; w < upper; w *= 4.0) {
            if (centre - w > 0.0) edges.push_back(centre - w);
            if (centre + w < upper) edges.push_back(centre + w);
        }
        if (centre > 0.0 && centre < upper) edges.push_back(centre);
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

        const auto integrand = [&](double w) {
            const double dm = w - centre, dp = w + centre;
            const double lor = 0.5 * (a / (a * a + dm * dm) + a / (a * a + dp * dp));
            return kernels::thermal_weight_excess(bath, w) * lor;
        };
        const auto r = kernels::integrate_panels(integrand, edges, q);
        total += b[m] * r.value;
        error += std::abs(b[m]) * r.error_estimate * 0.25;
    }
    return 0.25 * total;
}

} // namespace

DecoherenceResult dfactor_quadrature(const DriveParams& drive, const BathParams& bath, A1Mode a1_mode,
                                     const QuadratureSettings& q, std::span<const double> epsilons) {
    drive.validate();
    bath.validate();
    q.validate();
    require_weak_drive(drive);
    if (epsilons.empty()) throw std::invalid_argument("dfactor_quadrature: epsilon list is empty");

    DecoherenceResult out;
    out.method = Method::Quadrature;
    if (drive.gamma == 0.0) return out;

    const std::function<double(double)> a1 = [&](double t) {
        return a1_mode.kind == A1Mode::Kind::Exact ? propagator::a_coeffs_exact(drive, t).a1
                                                   : propagator::a1_series(drive, t, a1_mode.order);
    };

    const double k = drive.k();
    const double period = 2.0 * kPi / k;
    const double upper = t_upper(drive, bath, q, period);
    const auto edges = uniform_edges(upper, 0.5 * period);
    const auto b = cosine_coefficients(a1, period, a1_mode.kind == A1Mode::Kind::Exact ? 16 : 2);

    BathParams high_t = bath;
    high_t.coth_mode = CothMode::high_t();
    const auto body = kernels::integrate_panels([&](double t) { return a1(t) * kernels::noise_kernel(high_t, t); },
                                                edges, q);
    const auto tail = high_t_cosine_tail(high_t, b, k, upper);
    out.d_factor = 0.25 * (body.value + tail.value);
    out.error_estimate = 0.25 * (body.error_estimate + tail.error);

    if (bath.coth_mode.kind != CothMode::Kind::HighT) {
        std::vector<double> values;
        values.reserve(epsilons.size());
        for (double eps : epsilons) {
            if (!(eps > 0.0)) throw std::invalid_argument("dfactor_quadrature: epsilons must be > 0");
            values.push_back(lorentzian_smoothed_excess(bath, k, b, eps, q, out.error_estimate));
        }
        const auto [limit, previous] = extrapolate_to_zero(epsilons, values);
        out.d_factor += limit;
        out.error_estimate += epsilons.size() > 1 ? std::abs(limit - previous) : std::abs(limit);
    }
    return out;
}

DecoherenceResult dfactor_closed_high_t(const DriveParams& drive, const BathParams& bath) {
    drive.validate();
    bath.validate();
    require_weak_drive(drive);
    const double r = drive.k() / bath.cutoff;
    return {thermal_prefactor(bath) * drive_ratio_sq(drive) * -std::expm1(-r), Method::ClosedHighT, 0.0, false};
}

GFunctions g_functions(const BathParams& bath, double k, int order) {
    bath.validate();
    if (order < 0 || order > kMaxSeriesOrder) throw std::invalid_argument("g_functions: order must be in [0, 20]");
    const double x = bath.coth_argument(k);
    if (!(x < kPi)) throw SeriesInvalid("hbar k / 2 k_B T must stay below pi");
    return {x_coth_x_series(x, order), x_coth_x_series(2.0 * x, order), x};
}

DecoherenceResult dfactor_series_t(const DriveParams& drive, const BathParams& bath, int order) {
    drive.validate();
    require_weak_drive(drive);
    const double k = drive.k();
    const auto g = g_functions(bath, k, order);
    const double damped = std::exp(-k / bath.cutoff) * g.g;
    DecoherenceResult out{thermal_prefactor(bath) * drive_ratio_sq(drive) * (1.0 - damped), Method::SeriesT, 0.0,
                          damped > 1.0};
    return out;
}

DecoherenceResult dfactor_higher_order(const DriveParams& drive, const BathParams& bath, int gamma_order) {
    drive.validate();
    bath.validate();
    require_weak_drive(drive);
    if (gamma_order < 1) throw std::invalid_argument("dfactor_higher_order: gamma_order must be >= 1");

    const double k = drive.k();
    const double x = bath.coth_argument(k);
    if (!(x < 0.5 * kPi)) throw SeriesInvalid("G' needs hbar k / 2 k_B T < pi/2");

    double g = 1.0, g_prime = 1.0;
    switch (bath.coth_mode.kind) {
    case CothMode::Kind::HighT:
        break;
    case CothMode::Kind::Series: {
        const auto gf = g_functions(bath, k, bath.coth_mode.order);
        g = gf.g;
        g_prime = gf.g_prime;
        break;
    }
    case CothMode::Kind::ExactCoth:
        g = x_coth_x(x);
        g_prime = x_coth_x(2.0 * x);
        break;
    }

    const double eps = drive_ratio_sq(drive);
    double p1 = 0.0, p2 = 0.0, p = 1.0;
    for (int j = 1; j <= gamma_order; ++j) {
        p *= eps;
        const double term = (j % 2 == 1) ? p : -p;
        p1 += term;
        if (j >= 2) p2 -= term;
    }
    const double r = k / bath.cutoff;
    const double first = p1 * (1.0 - std::exp(-r) * g);
    const double second = p2 * (0.25 * std::cosh(2.0 * r) * g_prime - std::cosh(r) * g + 0.75);
    return {thermal_prefactor(bath) * (first + second), Method::HigherOrder, 0.0, false};
}

HigherOrderReport higher_order_report(const DriveParams& drive, const BathParams& bath, int gamma_order,
                                      const QuadratureSettings& q) {
    HigherOrderReport r;
    r.higher_order = dfactor_higher_order(drive, bath, gamma_order).d_factor;
    const auto quad = dfactor_quadrature(drive, bath, A1Mode::exact(), q);
    r.quadrature_exact_a1 = quad.d_factor;
    r.quadrature_error = quad.error_estimate;
    r.abs_deviation = r.higher_order - r.quadrature_exact_a1;
    r.rel_deviation = r.quadrature_exact_a1 != 0.0 ? r.abs_deviation / r.quadrature_exact_a1 : 0.0;
    return r;
}

SuperopCoefficients superop_coefficients(const DriveParams& drive, const BathParams& bath,
                                         const QuadratureSettings& q) {
    drive.validate();
    bath.validate();
    q.validate();
    if (!(drive.gamma < drive.omega0)) throw std::invalid_argument("superop_coefficients: need gamma < omega0");

    BathParams high_t = bath;
    high_t.coth_mode = CothMode::high_t();
    const double k = drive.k();
    const double period = 2.0 * kPi / k;
    const double upper = t_upper(drive, bath, q, period);
    const auto edges = uniform_edges(upper, kPi / (k + drive.omega));

    const auto nu = [&](double t) { return kernels::noise_kernel(high_t, t); };
    const auto eta = [&](double t) { return kernels::dissipation_kernel(bath, t); };
    const double nu_tail = kernels::noise_kernel_high_t_tail(bath, upper);
    const double eta_tail = kernels::dissipation_kernel_tail(bath, upper);

    const auto a4 = [&](double t) { return propagator::a_coeffs_exact(drive, t).a4; };
    const auto a2_rev = [&](double t) { return propagator::a_coeffs_exact(drive, -t).a2; };
    const auto a3_rev = [&](double t) { return propagator::a_coeffs_exact(drive, -t).a3; };

    SuperopCoefficients c;
    c.shift_z = integrate_with_tail(a4, nu, nu_tail, edges, period, q).value;
    c.shift_x = integrate_with_tail(a3_rev, nu, nu_tail, edges, period, q).value;
    c.shift_y = integrate_with_tail(a2_rev, nu, nu_tail, edges, period, q).value;
    const double a2_eta = integrate_with_tail(a2_rev, eta, eta_tail, edges, period, q).value;
    const double a3_eta = integrate_with_tail(a3_rev, eta, eta_tail, edges, period, q).value;
    c.kappa_x = 0.25 * cplx{c.shift_y, a2_eta};
    c.kappa_y = 0.25 * cplx{c.shift_x, a3_eta};
    return c;
}

void write_dfactor_csv(std::ostream& os, std::span<const DFactorRow> rows, const CsvFormat& fmt) {
    write_csv_header(os, {"method", "omega0", "gamma", "omega", "T", "lambda", "d_factor", "error_estimate"});
    for (const auto& r : rows) {
        os << method_name(r.result.method);
        for (double v : {r.drive.omega0, r.drive.gamma, r.drive.omega, r.bath.temperature, r.bath.cutoff,
                         r.result.d_factor, r.result.error_estimate})
            os << ',' << format_number(v, fmt);
        os << '\n';
    }
}

} // namespace spinflop::decoherence
