#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fracl1/fem1d.hpp"
#include "fracl1/l1stepper.hpp"

namespace fracl1 {

/// Truncated eigen-expansion u(x,t) = sum_{k<=K} E_{alpha,1}(-k^2 pi^2 t^alpha) c_k sqrt(2) sin(k pi x).
struct EigenExpansion {
    double alpha = 0.5;
    InitialCondition ic = InitialCondition::sin2pix;
    std::size_t K = 0;
    Vector coeff;        // coeff[k-1] = c_k
    double norm_squared = 0.0;
    double tail = 0.0;   // sqrt(||v||^2 - sum c_k^2), clipped at zero

    double lambda(std::size_t k) const;
};

/// c_k = (v, sqrt(2) sin(k pi x)) for a single mode.
double sine_coefficient(InitialCondition ic, std::size_t k);
Vector sine_coefficients(InitialCondition ic, std::size_t K);

/// Default truncation: exact for sin2pix, otherwise max(2000, 2M).
std::size_t default_truncation(InitialCondition ic, std::size_t M);

EigenExpansion make_expansion(double alpha, InitialCondition ic, std::size_t K);

/// u(x, t) at arbitrary points.
Vector exact_subdiffusion(const EigenExpansion& expansion, double t, const Vector& x_points);

/// u(x_i, t) at the interior mesh nodes, via a sine table.
Vector exact_subdiffusion_nodal(const EigenExpansion& expansion, double t, const Mesh& mesh);

/// L2 bound on the discarded modes at time t: tail * E_{alpha,1}(-(K+1)^2 pi^2 t^alpha).
double truncation_bound(const EigenExpansion& expansion, double t);

/// Space-exact, time-discrete solution at t_N: every sine mode advanced by the
/// scalar L1 recursion with lambda_k = k^2 pi^2. Cost O(K N^2).
Vector exact_time_discrete(const EigenExpansion& expansion, const TimeGrid& grid, const Mesh& mesh);

/// Fine-step L1 solution on the same spatial discretization.
Vector self_reference(const SpatialDiscretization& disc, double alpha, const Vector& v_h, double t_target,
                      std::size_t N_ref);

/// Mass-norm of numeric - exact, optionally divided by normalize_by.
double error_at(const SpatialDiscretization& disc, const Vector& numeric, const Vector& exact,
                std::optional<double> normalize_by = std::nullopt);

/// rate_i = log(e_i / e_{i+1}) / log(grid_factor).
Vector empirical_rates(const Vector& errors, double grid_factor = 2.0);

/// Mean of the last two pairwise rates (the single rate of a table row).
double summary_rate(const Vector& rates);

enum class Problem { subdiffusion, space_time_fractional };
enum class Sweep { time_steps, target_time };
enum class Normalization { raw, normalized };

std::string_view to_string(Problem p);
Problem parse_problem(std::string_view s);
std::string_view to_string(Normalization n);
Normalization parse_normalization(std::string_view s);

struct ConvergenceRow {
    double t = 0.0;
    std::size_t N = 0;
    double error_raw = 0.0;
    double error_normalized = 0.0;
    double rate = 0.0;              // pairwise rate against the previous row; NaN on the first
    double stability_ratio = 0.0;   // max_n ||U^n|| / ||U^0||
};

struct ConvergenceReport {
    Problem problem = Problem::subdiffusion;
    double alpha = 0.5;
    std::optional<double> beta;
    InitialCondition ic = InitialCondition::sin2pix;
    std::size_t M = 0;
    Sweep sweep = Sweep::time_steps;
    Normalization normalization = Normalization::normalized;
    std::vector<ConvergenceRow> rows;
    std::vector<std::string> notes;

    /// Pairwise rates (length rows - 1).
    Vector rates() const;
    double rate() const { return summary_rate(rates()); }
    Vector errors() const;  // in the selected normalization
};

}  // namespace fracl1
