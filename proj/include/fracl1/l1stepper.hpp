#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "fracl1/fem1d.hpp"

namespace fracl1 {

/// L1 weights b_j = ((j+1)^{1-alpha} - j^{1-alpha}) / Gamma(2-alpha), j = 0..N-1.
struct L1Weights {
    double alpha = 1.0;
    Vector b;
};

L1Weights l1_weights(double alpha, std::size_t N);

/// Uniform grid t_n = n tau on [0, t_target].
struct TimeGrid {
    double t_target = 0.0;
    std::size_t N = 0;
    double tau = 0.0;

    double t(std::size_t n) const { return n == N ? t_target : static_cast<double>(n) * tau; }
};

TimeGrid make_time_grid(double t_target, std::size_t N);

/// Coefficient vectors U^0 .. U^N on the interior nodes.
struct SolutionHistory {
    std::vector<Vector> levels;
    TimeGrid grid;

    const Vector& final_level() const { return levels.back(); }
};

enum class HistoryOrder { forward, reverse };

/// Source term f(x, t).
using Forcing = std::function<double(double, double)>;

struct MarchOptions {
    HistoryOrder order = HistoryOrder::forward;
    Forcing forcing;  // empty means f = 0
};

/// Fully discrete L1 Galerkin scheme: for n = 1..N solve
///   (b_0 M + tau^alpha S) U^n = M (b_{n-1} U^0 + sum_{j=1}^{n-1} (b_{j-1} - b_j) U^{n-j})
///                               + tau^alpha (f(t_n), phi)
/// with the system matrix factored once.
SolutionHistory march(const SpatialDiscretization& disc, const L1Weights& weights, const Vector& v_h,
                      const TimeGrid& grid, const MarchOptions& options = {});

/// The same recursion with the operator replaced by the scalar lambda.
std::vector<double> solve_scalar_ode(double alpha, double lambda, const TimeGrid& grid, double u0);

}  // namespace fracl1
