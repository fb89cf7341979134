#include "fracl1/kernelcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fracl1/errors.hpp"
#include "fracl1/specfun.hpp"

namespace fracl1 {

namespace {

constexpr double pi = std::numbers::pi;
using cplx = std::complex<double>;

/// e^w - 1 without cancellation for small |w|.
cplx expm1_c(cplx w) {
    const double x = w.real();
    const double y = w.imag();
    const double s = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

/// 1 - e^{-w}.
cplx one_minus_exp_neg(cplx w) { return -expm1_c(-w); }

/// 4 sinh^2(w/2) - w^2 = sum_{m>=2} 2 w^{2m} / (2m)!.
cplx sinh_defect(cplx w) {
    if (std::abs(w) < 1.0) {
        const cplx w2 = w * w;
        cplx term = w2 * w2 / 12.0;  // m = 2
        cplx acc = term;
        for (int m = 3; m < 30; ++m) {
            term *= w2 / ((2.0 * m - 1.0) * (2.0 * m));
            acc += term;
            if (std::abs(term) < 1e-18 * std::abs(acc)) break;
        }
        return acc;
    }
    const cplx s = std::sinh(0.5 * w);
    return 4.0 * s * s - w * w;
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ArgumentError("kernelcheck: alpha must lie in (0, 1]");
}

/// (1 - e^{-w}) psi(w), the scaled symbol chi_1 tau^alpha.
cplx scaled_symbol(cplx w, double alpha) {
    return one_minus_exp_neg(w) * psi_eval(w, alpha);
}

}  // namespace

void validate(const ContourSpec& spec) {
    if (!(spec.theta > pi / 2.0 && spec.theta < 5.0 * pi / 6.0)) {
        throw ArgumentError("contour angle theta must lie in (pi/2, 5pi/6)");
    }
    if (!(spec.tau > 0.0)) throw ArgumentError("contour: tau must be positive");
    if (!(spec.delta > 0.0 && spec.delta < pi / (2.0 * spec.tau))) {
        throw ArgumentError("contour: delta must lie in (0, pi/(2 tau))");
    }
    if (spec.samples_per_branch < 2) throw ArgumentError("contour: need at least two samples per branch");
}

std::vector<ContourSample> contour_samples(const ContourSpec& spec) {
    validate(spec);
    const std::size_t n = spec.samples_per_branch;
    const double rho_max = pi / (spec.tau * std::sin(spec.theta));
    const double lr0 = std::log(spec.delta);
    const double lr1 = std::log(rho_max);
    std::vector<ContourSample> out;
    out.reserve(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rho = std::exp(lr0 + (lr1 - lr0) * static_cast<double>(i) / static_cast<double>(n - 1));
        out.push_back({std::polar(rho, spec.theta), Branch::upper_ray});
        out.push_back({std::polar(rho, -spec.theta), Branch::lower_ray});
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double phi = -spec.theta + 2.0 * spec.theta * static_cast<double>(i) / static_cast<double>(n - 1);
        out.push_back({std::polar(spec.delta, phi), Branch::arc});
    }
    return out;
}

cplx psi_eval(cplx zt, double alpha) {
    check_alpha(alpha);
    if (alpha == 1.0) return 1.0;
    return expm1_c(zt) * polylog_exp(alpha - 1.0, zt) / gamma_fn(2.0 - alpha);
}

cplx chi_eval(cplx z, double tau) { return one_minus_exp_neg(z * tau) / tau; }

cplx chi1_eval(cplx z, double tau, double alpha) {
    return scaled_symbol(z * tau, alpha) / std::pow(tau, alpha);
}

cplx chi1_defect_scaled(cplx w, double alpha) {
    check_alpha(alpha);
    if (alpha == 1.0) return one_minus_exp_neg(w) - w;
    const double p = alpha - 1.0;
    const double y = std::remainder(w.imag(), 2.0 * pi);
    if (w.real() >= std::numbers::ln2 || y != w.imag()) {
        return scaled_symbol(w, alpha) - std::pow(w, alpha);
    }
    const cplx s4 = sinh_defect(w);
    const cplx sinh2 = s4 + w * w;
    return std::pow(w, alpha - 2.0) * s4 +
           sinh2 * detail::polylog_exp_regular_part(p, w) / gamma_fn(2.0 - alpha);
}

LemmaScan lemma_scan(const ContourSpec& spec, double alpha) {
    check_alpha(alpha);
    const auto samples = contour_samples(spec);
    LemmaScan r;
    r.samples = samples.size();
    r.min_re_psi = r.min_abs_psi = r.min_chi_ratio = r.min_chi_ratio_rays = std::numeric_limits<double>::infinity();
    const double ta = std::pow(spec.tau, alpha);
    for (const auto& s : samples) {
        const cplx w = s.z * spec.tau;
        const cplx psi = psi_eval(w, alpha);
        const cplx psi_conj = psi_eval(std::conj(w), alpha);
        r.max_conjugate_asymmetry = std::max(r.max_conjugate_asymmetry, std::abs(psi_conj - std::conj(psi)));
        r.min_re_psi = std::min(r.min_re_psi, psi.real());
        r.min_abs_psi = std::min(r.min_abs_psi, std::abs(psi));

        const double chi_ratio = std::abs(one_minus_exp_neg(w)) / std::abs(w);
        r.min_chi_ratio = std::min(r.min_chi_ratio, chi_ratio);
        r.max_chi_ratio = std::max(r.max_chi_ratio, chi_ratio);
        if (s.branch != Branch::arc) r.min_chi_ratio_rays = std::min(r.min_chi_ratio_rays, chi_ratio);

        const cplx chi1 = one_minus_exp_neg(w) * psi / ta;
        r.max_abs_arg_chi1 = std::max(r.max_abs_arg_chi1, std::abs(std::arg(chi1)));

        const cplx defect = chi1_defect_scaled(w, alpha);
        r.max_chi1_ratio = std::max(r.max_chi1_ratio, std::abs(defect) / std::norm(w));
        if (s.branch == Branch::arc) {
            r.max_arc_chi1_deviation =
                std::max(r.max_arc_chi1_deviation, std::abs(defect / std::pow(w, alpha)));
        }
    }
    return r;
}

double kernel_diff(cplx z, double lambda, double tau, double alpha) {
    if (!(lambda > 0.0)) throw ArgumentError("kernel_diff: lambda must be positive");
    const cplx w = z * tau;
    const double mu = lambda * std::pow(tau, alpha);
    const cplx wa = std::pow(w, alpha);
    const cplx x = wa + chi1_defect_scaled(w, alpha);
    const cplx k1 = -(1.0 / w) * mu / (wa + mu);
    const cplx k2 = -(1.0 / one_minus_exp_neg(w)) * mu / (x + mu);
    return tau * std::abs(k1 - k2);
}

std::vector<double> default_lambda_grid() {
    std::vector<double> g;
    for (int e = -8; e <= 24; ++e) g.push_back(std::pow(10.0, 0.25 * e));
    return g;
}

KernelScan kernel_scan(const ContourSpec& spec, double alpha, const std::vector<double>& lambdas) {
    check_alpha(alpha);
    const auto samples = contour_samples(spec);
    KernelScan r;
    const double ta = std::pow(spec.tau, alpha);
    for (const auto& s : samples) {
        const cplx w = s.z * spec.tau;
        const cplx wa = std::pow(w, alpha);
        const cplx x = wa + chi1_defect_scaled(w, alpha);
        const cplx inv_w = 1.0 / w;
        const cplx inv_chi = 1.0 / one_minus_exp_neg(w);
        for (double lambda : lambdas) {
            const double mu = lambda * ta;
            const cplx k1 = -inv_w * mu / (wa + mu);
            const cplx k2 = -inv_chi * mu / (x + mu);
            r.max_ratio = std::max(r.max_ratio, std::abs(k1 - k2));
            ++r.evaluations;
        }
    }
    return r;
}

double polylog_singular_remainder(double alpha, double s) {
    check_alpha(alpha);
    if (!(s > 0.0)) throw ArgumentError("polylog_singular_remainder: s must be positive");
    const double li = polylog(alpha - 1.0, std::exp(-s)).real();
    return li - gamma_fn(2.0 - alpha) * std::pow(s, alpha - 2.0);
}

double max_relative_drift(const std::vector<double>& values) {
    double d = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        d = std::max(d, std::abs(values[i + 1] - values[i]) / std::abs(values[i]));
    }
    return d;
}

}  // namespace fracl1
