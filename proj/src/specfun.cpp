#include "fracl1/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "fracl1/errors.hpp"
#include "fracl1/quadrature.hpp"

namespace fracl1 {

namespace {

constexpr double pi = std::numbers::pi;

constexpr std::array<double, 9> lanczos_coeffs = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

/// Neumaier-compensated accumulator.
template <typename T>
struct CompensatedSum {
    T sum{};
    T carry{};

    void add(T term) {
        const T s = sum + term;
        carry += compensation(s, term);
        sum = s;
    }
    T value() const { return sum + carry; }

private:
    double compensation(double s, double term) const {
        return std::abs(sum) >= std::abs(term) ? (sum - s) + term : (term - s) + sum;
    }
    std::complex<double> compensation(std::complex<double> s, std::complex<double> term) const {
        return {compensation_real(sum.real(), s.real(), term.real()),
                compensation_real(sum.imag(), s.imag(), term.imag())};
    }
    static double compensation_real(double old, double s, double term) {
        return std::abs(old) >= std::abs(term) ? (old - s) + term : (term - s) + old;
    }
};

/// Accept the asymptotic value only if its error estimate is tiny.
constexpr double asymptotic_acceptance = 1e-14;
constexpr double asymptotic_start = 10.0;

bool asymptotic_accepted(const detail::AsymptoticValue& a) {
    return std::isfinite(a.value) && a.error_estimate <= asymptotic_acceptance * std::abs(a.value);
}

/// 1/(4 sinh^2(y/2)) - 1/y^2, analytic at y = 0.
std::complex<double> bose_regular(std::complex<double> y) {
    if (std::abs(y) < 0.5) {
        // -sum_{n>=1} (2n-1) B_{2n} y^{2n-2} / (2n)!
        static constexpr std::array<double, 8> c = {
            -1.0 / 12.0,
            1.0 / 240.0,
            -1.0 / 6048.0,
            1.0 / 172800.0,
            -1.0 / 5322240.0,
            11.0 * 691.0 / (2730.0 * 479001600.0),
            -13.0 * 7.0 / (6.0 * 87178291200.0),
            15.0 * 3617.0 / (510.0 * 20922789888000.0)};
        const std::complex<double> y2 = y * y;
        std::complex<double> acc = c[7];
        for (int n = 6; n >= 0; --n) acc = acc * y2 + c[static_cast<std::size_t>(n)];
        return acc;
    }
    const std::complex<double> s = std::sinh(0.5 * y);
    return 1.0 / (4.0 * s * s) - 1.0 / (y * y);
}

}  // namespace

double gamma_fn(double x) {
    if (std::isnan(x) || is_nonpositive_integer(x)) {
        throw DomainError("gamma_fn: pole at non-positive integer argument");
    }
    if (x < 0.5) {
        return pi / (std::sin(pi * x) * gamma_fn(1.0 - x));
    }
    if (x <= 23.0 && x == std::floor(x)) {
        double f = 1.0;
        for (double k = 2.0; k < x; k += 1.0) f *= k;
        return f;
    }
    const double xm = x - 1.0;
    double a = lanczos_coeffs[0];
    for (std::size_t i = 1; i < lanczos_coeffs.size(); ++i) {
        a += lanczos_coeffs[i] / (xm + static_cast<double>(i));
    }
    const double t = xm + 7.5;
    // t^(xm+0.5) split in two halves so the product survives up to x ~ 171.
    const double half_pow = std::pow(t, 0.5 * (xm + 0.5));
    return std::sqrt(2.0 * pi) * half_pow * (half_pow * std::exp(-t)) * a;
}

namespace detail {

double ml_series(MLParams params, double z) {
    const double alpha = params.alpha;
    const double beta = params.beta;
    if (z == 0.0) return 1.0 / gamma_fn(beta);
    const double logz = std::log(std::abs(z));
    CompensatedSum<double> acc;
    double largest = 0.0;
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 100000; ++k) {
        const double arg = alpha * k + beta;
        const double sign = (z < 0.0 && (k % 2 == 1)) ? -1.0 : 1.0;
        double term;
        if (arg < 170.0 && k * logz < 700.0) {
            term = std::pow(z, k) / gamma_fn(arg);
        } else {
            term = sign * std::exp(k * logz - std::lgamma(arg));
        }
        acc.add(term);
        const double mag = std::abs(term);
        largest = std::max(largest, mag);
        const double total = std::abs(acc.value());
        if (k > 2 && mag < previous && mag <= 1e-17 * total) break;
        if (k > 2 && mag == 0.0) break;
        previous = mag;
    }
    const double value = acc.value();
    if (!std::isfinite(value) || !std::isfinite(largest) || largest * 1e-16 > 1e-10 * std::abs(value)) {
        throw DomainError("mittag_leffler: series cancellation exceeds accuracy budget for |z| = " +
                          std::to_string(std::abs(z)));
    }
    return value;
}

double ml_integral(double alpha, double z) {
    const double x = std::abs(z);
    const double c = std::sin(alpha * pi) / (alpha * pi);
    const double ca = std::cos(alpha * pi);
    const double sgn = z < 0.0 ? 1.0 : -1.0;
    const double inv_alpha = 1.0 / alpha;
    auto f = [&](double u) {
        return std::exp(-std::pow(x * u, inv_alpha)) / (u * u + 2.0 * sgn * u * ca + 1.0);
    };
    const double u_max = std::pow(60.0, alpha) / x;
    std::vector<double> breaks = {0.0, u_max};
    if (1.0 / x < u_max) breaks.push_back(1.0 / x);
    const double peak = -sgn * ca;
    if (peak > 0.0 && peak < u_max) breaks.push_back(peak);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    quad::Tolerance tol;
    tol.absolute = 1e-300;
    tol.relative = 1e-14;
    const auto r = quad::integrate_adaptive<double>(f, std::span<const double>(breaks), tol);
    if (z < 0.0) return c * r.value;
    return inv_alpha * std::exp(std::pow(x, inv_alpha)) - c * r.value;
}

AsymptoticValue ml_asymptotic(double alpha, double x) {
    const double logx = std::log(x);
    CompensatedSum<double> acc;
    double previous_envelope = std::numeric_limits<double>::infinity();
    double omitted = 0.0;
    for (int k = 1; k < 2000; ++k) {
        const double y = alpha * k;
        // |Gamma(y)| / (pi x^k) bounds |x^{-k} / Gamma(1 - y)|.
        const double log_env = std::lgamma(y) - std::log(pi) - k * logx;
        const double envelope = std::exp(log_env);
        if (envelope > previous_envelope) {
            omitted = envelope;
            break;
        }
        previous_envelope = envelope;
        const double s = std::sin(pi * y);
        const double term = ((k % 2 == 1) ? 1.0 : -1.0) * envelope * s;
        if (std::abs(y - std::round(y)) > 1e-12) acc.add(term);
        if (envelope <= 1e-18 * std::abs(acc.value())) {
            omitted = envelope;
            break;
        }
    }
    AsymptoticValue out;
    out.value = acc.value();
    const double sa = std::max(std::sin(alpha * pi), 1e-300);
    out.error_estimate = omitted * (1.0 + 1.0 / sa) +
                         std::exp(-std::pow(x, 1.0 / alpha)) / (alpha * sa);
    return out;
}

double ml_asymptotic_threshold(double alpha) {
    for (int m = 0; m < 400; ++m) {
        const double x = asymptotic_start * std::pow(1.05, m);
        if (x > 1e7) break;
        if (asymptotic_accepted(ml_asymptotic(alpha, x))) return x;
    }
    return std::numeric_limits<double>::infinity();
}

std::complex<double> polylog_exp_regular_part(double p, std::complex<double> w) {
    const double alpha = p + 1.0;
    const double T = 40.0 + std::max(0.0, -w.real());
    const double inv_alpha = 1.0 / alpha;
    auto f = [&](double u) { return bose_regular(std::pow(u, inv_alpha) + w); };
    std::vector<double> breaks = {0.0};
    for (double t : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) breaks.push_back(std::pow(t, alpha));
    if (-w.real() > 0.0) breaks.push_back(std::pow(-w.real(), alpha));
    breaks.push_back(std::pow(T, alpha));
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    quad::Tolerance tol;
    tol.absolute = 1e-16;
    tol.relative = 1e-14;
    const auto body =
        quad::integrate_adaptive<std::complex<double>>(f, std::span<const double>(breaks), tol);

    // int_T^inf t^{alpha-1} (-1/(t+w)^2) dt, expanded in w/T.
    std::complex<double> tail = 0.0;
    std::complex<double> wpow = 1.0;
    for (int m = 0; m < 200; ++m) {
        const std::complex<double> term = ((m % 2 == 0) ? 1.0 : -1.0) * (m + 1.0) * wpow *
                                          std::pow(T, alpha - 2.0 - m) / (m + 2.0 - alpha);
        tail -= term;
        if (std::abs(term) < 1e-18 * (std::abs(tail) + 1e-300)) break;
        wpow *= w;
    }
    return (body.value * inv_alpha + tail) / gamma_fn(alpha);
}

}  // namespace detail

double mittag_leffler(MLParams params, double z) {
    const double alpha = params.alpha;
    const double beta = params.beta;
    if (!(alpha > 0.0 && alpha <= 2.0) || !(beta > 0.0) || !std::isfinite(z)) {
        throw DomainError("mittag_leffler: unsupported parameters (alpha in (0,2], beta > 0, finite z)");
    }
    if (z == 0.0) return 1.0 / gamma_fn(beta);
    if (alpha == 1.0 && beta == 1.0) return std::exp(z);
    if (beta == 1.0 && alpha < 1.0) {
        if (std::abs(z) <= 1.0) return detail::ml_series(params, z);
        if (z <= -asymptotic_start) {
            const auto a = detail::ml_asymptotic(alpha, -z);
            if (asymptotic_accepted(a)) return a.value;
        }
        return detail::ml_integral(alpha, z);
    }
    return detail::ml_series(params, z);
}

std::complex<double> polylog(double p, std::complex<double> z) {
    if (!std::isfinite(p) || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw DomainError("polylog: non-finite argument");
    }
    const double r = std::abs(z);
    if (!(r <= 1.0 - 1e-8)) {
        throw DomainError("polylog: |z| must not exceed 1 - 1e-8 (no analytic continuation)");
    }
    if (r == 0.0) return 0.0;
    CompensatedSum<std::complex<double>> acc;
    std::complex<double> zpow = z;
    constexpr long long max_terms = 1'000'000'000LL;
    for (long long j = 1; j <= max_terms; ++j) {
        const double jd = static_cast<double>(j);
        const std::complex<double> term = zpow * std::pow(jd, -p);
        acc.add(term);
        const double mag = std::abs(term);
        const double scale = std::abs(acc.value()) + 1.0;
        if (mag < 1e-16 * scale) {
            const double ratio = r * std::pow((jd + 1.0) / jd, -p);
            if (ratio < 1.0 && mag * ratio / (1.0 - ratio) < 1e-15 * scale) return acc.value();
        }
        zpow *= z;
        if (zpow == 0.0) return acc.value();
    }
    throw NumericalError("polylog: series did not converge within the iteration cap");
}

std::complex<double> polylog_exp(double p, std::complex<double> w) {
    if (!(p > -1.0 && p < 0.0)) {
        throw DomainError("polylog_exp: order p must lie in (-1, 0)");
    }
    const double y = std::remainder(w.imag(), 2.0 * pi);
    const std::complex<double> wr(w.real(), y);
    if (y == 0.0 && wr.real() <= 0.0) {
        throw DomainError("polylog_exp: e^{-w} lies on the branch cut [1, inf)");
    }
    if (wr.real() >= std::numbers::ln2) return polylog(p, std::exp(-wr));
    return gamma_fn(1.0 - p) * std::pow(wr, p - 1.0) + detail::polylog_exp_regular_part(p, wr);
}

}  // namespace fracl1
