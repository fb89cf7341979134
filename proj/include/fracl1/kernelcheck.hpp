#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace fracl1 {

/// Truncated contour Gamma_tau: rays rho e^{+-i theta}, delta <= rho <= pi/(tau sin theta),
/// joined by the arc |z| = delta, |arg z| <= theta.
struct ContourSpec {
    double theta = 0.51 * 3.14159265358979323846;
    double delta = 1.0;
    double tau = 1e-3;
    std::size_t samples_per_branch = 200;
};

enum class Branch { upper_ray, lower_ray, arc };

struct ContourSample {
    std::complex<double> z;
    Branch branch;
};

void validate(const ContourSpec& spec);
std::vector<ContourSample> contour_samples(const ContourSpec& spec);

/// psi(w) = (e^w - 1) Li_{alpha-1}(e^{-w}) / Gamma(2-alpha), w = z tau.
std::complex<double> psi_eval(std::complex<double> zt, double alpha);

/// chi(z) = (1 - e^{-z tau}) / tau.
std::complex<double> chi_eval(std::complex<double> z, double tau);

/// chi_1(z) = (1 - e^{-z tau}) psi(z tau) / tau^alpha.
std::complex<double> chi1_eval(std::complex<double> z, double tau, double alpha);

/// (1 - e^{-w}) psi(w) - w^alpha, with the w^{alpha-2} singularity of the
/// polylogarithm cancelled analytically.
std::complex<double> chi1_defect_scaled(std::complex<double> w, double alpha);

struct LemmaScan {
    std::size_t samples = 0;
    double max_chi1_ratio = 0.0;       // max |chi_1(z) - z^alpha| / (|z|^2 tau^{2-alpha})
    double min_re_psi = 0.0;
    double min_abs_psi = 0.0;
    double min_chi_ratio = 0.0;        // min |chi(z)| / |z|
    double max_chi_ratio = 0.0;
    double min_chi_ratio_rays = 0.0;   // same, ray samples only
    double max_abs_arg_chi1 = 0.0;     // max |arg chi_1(z)|
    double max_arc_chi1_deviation = 0.0;  // max |chi_1(z) / z^alpha - 1| on the arc
    double max_conjugate_asymmetry = 0.0; // max |psi(conj w) - conj psi(w)|
};

LemmaScan lemma_scan(const ContourSpec& spec, double alpha);

/// |k_1 - k_2| with k_1 = -z^{-1} lambda / (z^alpha + lambda) and
/// k_2 = -(tau / (1 - e^{-z tau})) lambda / (chi_1(z) + lambda).
double kernel_diff(std::complex<double> z, double lambda, double tau, double alpha);

struct KernelScan {
    std::size_t evaluations = 0;
    double max_ratio = 0.0;  // max |k_1 - k_2| / tau
};

std::vector<double> default_lambda_grid();
KernelScan kernel_scan(const ContourSpec& spec, double alpha, const std::vector<double>& lambdas);

/// Li_{alpha-1}(e^{-s}) - Gamma(2-alpha) s^{alpha-2} for real s > 0, from the
/// direct series. Tends to a finite limit as s -> 0+.
double polylog_singular_remainder(double alpha, double s);

/// Largest relative change between successive entries.
double max_relative_drift(const std::vector<double>& values);

}  // namespace fracl1
