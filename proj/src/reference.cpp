#include "fracl1/reference.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "fracl1/errors.hpp"
#include "fracl1/quadrature.hpp"
#include "fracl1/specfun.hpp"

namespace fracl1 {

namespace {

constexpr double pi = std::numbers::pi;
const double sqrt2 = std::sqrt(2.0);

/// int_0^1 x^{-1/4} sin(w x) dx = int_0^inf - int_1^inf, the second piece on
/// the rotated path x = 1 + i s / w.
double xnegquarter_sine_integral(double w) {
    const double whole = gamma_fn(0.75) * std::sin(3.0 * pi / 8.0) / std::pow(w, 0.75);
    auto f = [w](double s) {
        return std::pow(std::complex<double>(1.0, s / w), -0.25) * std::exp(-s);
    };
    quad::Tolerance tol;
    tol.absolute = 1e-17;
    tol.relative = 1e-15;
    const auto r = quad::integrate_adaptive<std::complex<double>>(f, {0.0, 1.0, 5.0, 15.0, 45.0}, tol);
    const std::complex<double> tail =
        std::complex<double>(0.0, 1.0) * std::exp(std::complex<double>(0.0, w)) / w * r.value;
    return whole - tail.imag();
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

double EigenExpansion::lambda(std::size_t k) const {
    const double kp = static_cast<double>(k) * pi;
    return kp * kp;
}

double sine_coefficient(InitialCondition ic, std::size_t k) {
    if (k < 1) throw ArgumentError("sine_coefficient: k must be at least 1");
    const double kp = static_cast<double>(k) * pi;
    switch (ic) {
        case InitialCondition::sin2pix: return k == 2 ? 1.0 / sqrt2 : 0.0;
        case InitialCondition::xoneminusx:
            return k % 2 == 1 ? 4.0 * sqrt2 / (kp * kp * kp) : 0.0;
        case InitialCondition::indicator_half: {
            // 1 - cos(k pi / 2) taken exactly from k mod 4
            static constexpr double one_minus_cos[4] = {0.0, 1.0, 2.0, 1.0};
            return sqrt2 * one_minus_cos[k % 4] / kp;
        }
        case InitialCondition::xnegquarter: return sqrt2 * xnegquarter_sine_integral(kp);
    }
    return 0.0;
}

Vector sine_coefficients(InitialCondition ic, std::size_t K) {
    if (K < 1) throw ArgumentError("sine_coefficients: K must be at least 1");
    Vector c(K);
    for (std::size_t k = 1; k <= K; ++k) c[k - 1] = sine_coefficient(ic, k);
    return c;
}

std::size_t default_truncation(InitialCondition ic, std::size_t M) {
    if (ic == InitialCondition::sin2pix) return 2;
    return std::max<std::size_t>(2000, 2 * M);
}

EigenExpansion make_expansion(double alpha, InitialCondition ic, std::size_t K) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ArgumentError("make_expansion: alpha must lie in (0, 1]");
    EigenExpansion e;
    e.alpha = alpha;
    e.ic = ic;
    e.K = K;
    e.coeff = sine_coefficients(ic, K);
    e.norm_squared = exact_norm_squared(ic);
    // Sum the squares smallest-first.
    double captured = 0.0;
    for (std::size_t k = K; k-- > 0;) captured += e.coeff[k] * e.coeff[k];
    const double missing = e.norm_squared - captured;
    e.tail = missing > 64.0 * std::numeric_limits<double>::epsilon() * e.norm_squared ? std::sqrt(missing) : 0.0;
    return e;
}

Vector exact_subdiffusion(const EigenExpansion& expansion, double t, const Vector& x_points) {
    if (!(t >= 0.0)) throw ArgumentError("exact_subdiffusion: t must be nonnegative");
    const double ta = std::pow(t, expansion.alpha);
    Vector amp(expansion.K, 0.0);
    for (std::size_t k = 1; k <= expansion.K; ++k) {
        const double c = expansion.coeff[k - 1];
        if (c == 0.0) continue;
        amp[k - 1] = c * sqrt2 * mittag_leffler({expansion.alpha, 1.0}, -expansion.lambda(k) * ta);
    }
    Vector u(x_points.size(), 0.0);
    for (std::size_t p = 0; p < x_points.size(); ++p) {
        double acc = 0.0;
        for (std::size_t k = expansion.K; k >= 1; --k) {
            if (amp[k - 1] != 0.0) acc += amp[k - 1] * std::sin(static_cast<double>(k) * pi * x_points[p]);
        }
        u[p] = acc;
    }
    return u;
}

namespace {

/// sum_k a_k sin(k pi x_i) at interior nodes x_i = i/M.
Vector nodal_sine_sum(const Vector& amp, std::size_t M) {
    const std::size_t period = 2 * M;
    Vector table(period);
    for (std::size_t m = 0; m < period; ++m) {
        table[m] = std::sin(pi * static_cast<double>(m) / static_cast<double>(M));
    }
    Vector u(M - 1, 0.0);
    for (std::size_t i = 1; i < M; ++i) {
        double acc = 0.0;
        for (std::size_t k = amp.size(); k >= 1; --k) {
            const double a = amp[k - 1];
            if (a != 0.0) acc += a * table[(k * i) % period];
        }
        u[i - 1] = acc;
    }
    return u;
}

}  // namespace

Vector exact_subdiffusion_nodal(const EigenExpansion& expansion, double t, const Mesh& mesh) {
    if (!(t >= 0.0)) throw ArgumentError("exact_subdiffusion: t must be nonnegative");
    const double ta = std::pow(t, expansion.alpha);
    Vector amp(expansion.K, 0.0);
    for (std::size_t k = 1; k <= expansion.K; ++k) {
        const double c = expansion.coeff[k - 1];
        if (c == 0.0) continue;
        amp[k - 1] = c * sqrt2 * mittag_leffler({expansion.alpha, 1.0}, -expansion.lambda(k) * ta);
    }
    return nodal_sine_sum(amp, mesh.M);
}

double truncation_bound(const EigenExpansion& expansion, double t) {
    if (!(t >= 0.0)) throw ArgumentError("truncation_bound: t must be nonnegative");
    if (expansion.tail == 0.0) return 0.0;
    const double next = expansion.lambda(expansion.K + 1);
    return expansion.tail * mittag_leffler({expansion.alpha, 1.0}, -next * std::pow(t, expansion.alpha));
}

Vector exact_time_discrete(const EigenExpansion& expansion, const TimeGrid& grid, const Mesh& mesh) {
    Vector amp(expansion.K, 0.0);
    for (std::size_t k = 1; k <= expansion.K; ++k) {
        const double c = expansion.coeff[k - 1];
        if (c == 0.0) continue;
        const auto u = solve_scalar_ode(expansion.alpha, expansion.lambda(k), grid, 1.0);
        amp[k - 1] = c * sqrt2 * u.back();
    }
    return nodal_sine_sum(amp, mesh.M);
}

Vector self_reference(const SpatialDiscretization& disc, double alpha, const Vector& v_h, double t_target,
                      std::size_t N_ref) {
    const TimeGrid grid = make_time_grid(t_target, N_ref);
    return march(disc, l1_weights(alpha, N_ref), v_h, grid).final_level();
}

double error_at(const SpatialDiscretization& disc, const Vector& numeric, const Vector& exact,
                std::optional<double> normalize_by) {
    if (numeric.size() != exact.size()) throw ArgumentError("error_at: length mismatch");
    Vector diff(numeric.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = exact[i] - numeric[i];
    const double e = l2_norm(disc, diff);
    if (normalize_by) {
        if (!(*normalize_by > 0.0)) throw ArgumentError("error_at: normalization must be positive");
        return e / *normalize_by;
    }
    return e;
}

Vector empirical_rates(const Vector& errors, double grid_factor) {
    if (!(grid_factor > 0.0) || grid_factor == 1.0) {
        throw ArgumentError("empirical_rates: grid factor must be positive and different from 1");
    }
    for (double e : errors) {
        if (!(e > 0.0)) throw ArgumentError("empirical_rates: errors must be positive");
    }
    Vector r;
    if (errors.size() < 2) return r;
    const double lf = std::log(grid_factor);
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) r.push_back(std::log(errors[i] / errors[i + 1]) / lf);
    return r;
}

double summary_rate(const Vector& rates) {
    if (rates.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (rates.size() == 1) return rates[0];
    return 0.5 * (rates[rates.size() - 1] + rates[rates.size() - 2]);
}

std::string_view to_string(Problem p) {
    return p == Problem::subdiffusion ? "subdiffusion" : "space_time_fractional";
}

Problem parse_problem(std::string_view s) {
    const std::string l = lowercase(s);
    if (l == "subdiffusion") return Problem::subdiffusion;
    if (l == "space_time_fractional" || l == "space-time-fractional" || l == "rl") {
        return Problem::space_time_fractional;
    }
    throw ArgumentError("unknown problem '" + std::string(s) + "' (expected subdiffusion or space_time_fractional)");
}

std::string_view to_string(Normalization n) { return n == Normalization::raw ? "raw" : "normalized"; }

Normalization parse_normalization(std::string_view s) {
    const std::string l = lowercase(s);
    if (l == "raw") return Normalization::raw;
    if (l == "normalized") return Normalization::normalized;
    throw ArgumentError("unknown normalization '" + std::string(s) + "' (expected raw or normalized)");
}

Vector ConvergenceReport::rates() const {
    Vector r;
    for (std::size_t i = 1; i < rows.size(); ++i) r.push_back(rows[i].rate);
    return r;
}

Vector ConvergenceReport::errors() const {
    Vector e;
    for (const auto& row : rows) {
        e.push_back(normalization == Normalization::raw ? row.error_raw : row.error_normalized);
    }
    return e;
}

}  // namespace fracl1
