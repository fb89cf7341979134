#include "fracl1/l1stepper.hpp"

#include <cmath>
#include <string>
#include <type_traits>
#include <variant>

#include "fracl1/errors.hpp"
#include "fracl1/specfun.hpp"

namespace fracl1 {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ArgumentError("fractional order alpha must lie in (0, 1], got " + std::to_string(alpha));
    }
}

/// d_j = b_{j-1} - b_j, j = 1..N-1 (index 0 unused).
Vector weight_differences(const L1Weights& w) {
    Vector d(w.b.size(), 0.0);
    for (std::size_t j = 1; j < w.b.size(); ++j) d[j] = w.b[j - 1] - w.b[j];
    return d;
}

/// Linear solver for b_0 M + tau^alpha S.
class SystemSolver {
public:
    SystemSolver(const SpatialDiscretization& disc, double b0, double ta) {
        if (const auto* s = std::get_if<SymTridiagonal>(&disc.stiffness)) {
            SymTridiagonal a;
            a.diag.resize(s->diag.size());
            a.off.resize(s->off.size());
            for (std::size_t i = 0; i < a.diag.size(); ++i) a.diag[i] = b0 * disc.mass.diag[i] + ta * s->diag[i];
            for (std::size_t i = 0; i < a.off.size(); ++i) a.off[i] = b0 * disc.mass.off[i] + ta * s->off[i];
            solver_.emplace<TridiagonalFactorization>(a);
        } else {
            const auto& sd = std::get<DenseMatrix>(disc.stiffness);
            const std::size_t n = sd.size();
            DenseMatrix a(n);
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c < n; ++c) a(r, c) = ta * sd(r, c);
            }
            for (std::size_t r = 0; r < n; ++r) {
                a(r, r) += b0 * disc.mass.diag[r];
                if (r + 1 < n) {
                    a(r, r + 1) += b0 * disc.mass.off[r];
                    a(r + 1, r) += b0 * disc.mass.off[r];
                }
            }
            solver_.emplace<LuFactorization>(std::move(a));
        }
    }

    void solve_in_place(Vector& b) const {
        std::visit(
            [&](const auto& s) {
                if constexpr (!std::is_same_v<std::decay_t<decltype(s)>, std::monostate>) s.solve_in_place(b);
            },
            solver_);
    }

private:
    std::variant<std::monostate, TridiagonalFactorization, LuFactorization> solver_;
};

}  // namespace

L1Weights l1_weights(double alpha, std::size_t N) {
    check_alpha(alpha);
    if (N < 1) throw ArgumentError("l1_weights: N must be positive");
    L1Weights w;
    w.alpha = alpha;
    w.b.resize(N);
    const double e = 1.0 - alpha;
    const double g = gamma_fn(2.0 - alpha);
    w.b[0] = 1.0 / g;
    for (std::size_t j = 1; j < N; ++j) {
        const double jd = static_cast<double>(j);
        // (j+1)^e - j^e = j^e (exp(e log(1 + 1/j)) - 1)
        w.b[j] = std::pow(jd, e) * std::expm1(e * std::log1p(1.0 / jd)) / g;
    }
    return w;
}

TimeGrid make_time_grid(double t_target, std::size_t N) {
    if (!(t_target > 0.0) || !std::isfinite(t_target)) {
        throw ArgumentError("time grid: target time must be positive and finite");
    }
    if (N < 1) throw ArgumentError("time grid: N must be positive");
    return {t_target, N, t_target / static_cast<double>(N)};
}

SolutionHistory march(const SpatialDiscretization& disc, const L1Weights& weights, const Vector& v_h,
                      const TimeGrid& grid, const MarchOptions& options) {
    const std::size_t n_dofs = disc.mesh.interior();
    if (v_h.size() != n_dofs) throw ArgumentError("march: initial vector has the wrong length");
    if (weights.b.size() < grid.N) throw ArgumentError("march: fewer weights than time steps");

    const double ta = std::pow(grid.tau, weights.alpha);
    const SystemSolver solver(disc, weights.b[0], ta);
    const Vector d = weight_differences(weights);

    SolutionHistory hist;
    hist.grid = grid;
    hist.levels.reserve(grid.N + 1);
    hist.levels.push_back(v_h);

    Vector combo(n_dofs);
    Vector rhs(n_dofs);
    for (std::size_t n = 1; n <= grid.N; ++n) {
        const double bn = weights.b[n - 1];
        const Vector& u0 = hist.levels[0];
        for (std::size_t i = 0; i < n_dofs; ++i) combo[i] = bn * u0[i];
        auto accumulate = [&](std::size_t j) {
            const double dj = d[j];
            const Vector& u = hist.levels[n - j];
            for (std::size_t i = 0; i < n_dofs; ++i) combo[i] += dj * u[i];
        };
        if (options.order == HistoryOrder::forward) {
            for (std::size_t j = 1; j < n; ++j) accumulate(j);
        } else {
            for (std::size_t j = n - 1; j >= 1; --j) accumulate(j);
        }
        // Solve for the increment over y = combo / b_0 to avoid cancellation in b_0 M + tau^alpha S.
        const double inv_b0 = 1.0 / weights.b[0];
        for (double& v : combo) v *= inv_b0;
        rhs = disc.apply_stiffness(combo);
        for (double& v : rhs) v *= -ta;
        if (options.forcing) {
            const double tn = grid.t(n);
            const auto& f = options.forcing;
            const Vector fl = load_vector(disc.mesh, [&](double x) { return f(x, tn); });
            for (std::size_t i = 0; i < n_dofs; ++i) rhs[i] += ta * fl[i];
        }
        try {
            solver.solve_in_place(rhs);
        } catch (const NumericalError& e) {
            throw NumericalError(e.what(), n);
        }
        for (std::size_t i = 0; i < n_dofs; ++i) {
            rhs[i] += combo[i];
            if (!std::isfinite(rhs[i])) throw NumericalError("march: non-finite value in solution", n);
        }
        hist.levels.push_back(rhs);
    }
    return hist;
}

std::vector<double> solve_scalar_ode(double alpha, double lambda, const TimeGrid& grid, double u0) {
    if (!(lambda > 0.0)) throw ArgumentError("solve_scalar_ode: lambda must be positive");
    const L1Weights w = l1_weights(alpha, grid.N);
    const Vector d = weight_differences(w);
    const double ta = std::pow(grid.tau, alpha);
    const double denom = w.b[0] + ta * lambda;
    std::vector<double> u(grid.N + 1);
    u[0] = u0;
    for (std::size_t n = 1; n <= grid.N; ++n) {
        double acc = w.b[n - 1] * u0;
        for (std::size_t j = 1; j < n; ++j) acc += d[j] * u[n - j];
        u[n] = acc / denom;
    }
    return u;
}

}  // namespace fracl1
