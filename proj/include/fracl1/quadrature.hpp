#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <queue>
#include <span>
#include <vector>

namespace fracl1::quad {

/// Fixed n-point Gauss-Legendre rule on [-1, 1].
class GaussLegendre {
public:
    explicit GaussLegendre(std::size_t n);

    std::size_t size() const noexcept { return nodes_.size(); }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }

    /// Integral of f over [a, b].
    template <typename F>
    auto integrate(F&& f, double a, double b) const {
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        using R = decltype(f(a));
        R sum{};
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            sum += weights_[i] * f(mid + half * nodes_[i]);
        }
        return sum * half;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Cached 32-point rule.
const GaussLegendre& gauss_legendre_32();

struct Tolerance {
    double absolute = 1e-14;
    double relative = 1e-13;
    std::size_t max_intervals = 4000;
};

template <typename T>
struct QuadResult {
    T value{};
    double error = 0.0;
    bool converged = false;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T>
struct Segment {
    double a;
    double b;
    T value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename T, typename F>
Segment<T> kronrod15(F& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const T fc = f(mid);
    T kronrod = fc * kronrod_weights[7];
    T gauss = fc * gauss_weights[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        const T f1 = f(mid - dx);
        const T f2 = f(mid + dx);
        kronrod += kronrod_weights[j] * (f1 + f2);
        if (j % 2 == 1) gauss += gauss_weights[j / 2] * (f1 + f2);
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over the
/// consecutive pieces delimited by `breaks` (at least two points). The
/// interval with the largest error estimate is bisected until the summed
/// estimate meets max(absolute, relative * |value|).
///
/// T may be double or std::complex<double>.
template <typename T, typename F>
QuadResult<T> integrate_adaptive(F&& f, std::span<const double> breaks, Tolerance tol = {}) {
    std::priority_queue<detail::Segment<T>> heap;
    T total{};
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        auto s = detail::kronrod15<T>(f, breaks[i], breaks[i + 1]);
        total += s.value;
        err += s.error;
        heap.push(s);
    }
    std::size_t count = heap.size();
    auto done = [&] { return err <= std::max(tol.absolute, tol.relative * std::abs(total)); };
    while (!heap.empty() && !done() && count < tol.max_intervals) {
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Interval no longer splittable in double precision.
            break;
        }
        auto left = detail::kronrod15<T>(f, worst.a, mid);
        auto right = detail::kronrod15<T>(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    // Re-sum to shed the drift of incremental updates.
    T value{};
    double error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    return {value, error, error <= std::max(tol.absolute, tol.relative * std::abs(value))};
}

template <typename T, typename F>
QuadResult<T> integrate_adaptive(F&& f, std::initializer_list<double> breaks, Tolerance tol = {}) {
    std::vector<double> b(breaks);
    return integrate_adaptive<T>(std::forward<F>(f), std::span<const double>(b), tol);
}

}  // namespace fracl1::quad
