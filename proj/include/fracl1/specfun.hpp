#pragma once

#include <complex>

namespace fracl1 {

/// Euler's Gamma function. Lanczos approximation (g = 7, 9 terms) with the
/// reflection formula below 1/2. Throws DomainError at the poles 0, -1, -2, ...
double gamma_fn(double x);

/// Parameters of the two-parameter Mittag-Leffler function E_{alpha,beta}.
struct MLParams {
    double alpha = 1.0;  // in (0, 2]
    double beta = 1.0;   // > 0
};

/// E_{alpha,beta}(z) for real z.
///
/// For beta = 1 and alpha in (0, 1) three branches are used:
///   |z| <= 1            Taylor series sum z^k / Gamma(alpha k + 1)
///   z <= -10            algebraic asymptotic expansion, accepted only when its
///                       truncation estimate is below 1e-14 relative
///   otherwise           real-axis integral representation evaluated by
///                       adaptive Gauss-Kronrod quadrature
/// alpha = 1, beta = 1 is exp(z). Any other (alpha, beta) pair is evaluated
/// by the Taylor series only, and a DomainError is raised when cancellation
/// would destroy more than ~1e-10 relative accuracy.
double mittag_leffler(MLParams params, double z);

/// Polylogarithm Li_p(z) = sum_{j>=1} z^j / j^p by direct (compensated)
/// summation. Requires |z| <= 1 - 1e-8; no analytic continuation.
std::complex<double> polylog(double p, std::complex<double> z);

/// Li_p(e^{-w}) for p in (-1, 0), valid on the whole plane cut along
/// e^{-w} in [1, inf). Inside |e^{-w}| <= 1/2 this is `polylog`; elsewhere the
/// singular part Gamma(1-p) w^{p-1} is split off and the regular remainder is
/// computed from the differentiated Bose-Einstein integral.
std::complex<double> polylog_exp(double p, std::complex<double> w);

namespace detail {

double ml_series(MLParams params, double z);

/// beta = 1, alpha in (0, 1), z != 0.
double ml_integral(double alpha, double z);

struct AsymptoticValue {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// E_{alpha,1}(-x) ~ sum_{k>=1} (-1)^{k+1} x^{-k} / Gamma(1 - alpha k), truncated
/// at the smallest term.
AsymptoticValue ml_asymptotic(double alpha, double x);

/// Smallest x on the grid 10 * 1.05^m at which the asymptotic branch is
/// accepted by `mittag_leffler`.
double ml_asymptotic_threshold(double alpha);

/// Li_p(e^{-w}) - Gamma(1-p) w^{p-1}, p in (-1, 0), by quadrature.
std::complex<double> polylog_exp_regular_part(double p, std::complex<double> w);

}  // namespace detail

}  // namespace fracl1
