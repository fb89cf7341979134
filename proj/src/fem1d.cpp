#include "fracl1/fem1d.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "fracl1/errors.hpp"
#include "fracl1/quadrature.hpp"
#include "fracl1/specfun.hpp"

namespace fracl1 {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double omega = 2.0 * pi;

/// (b^p - a^p) / p for 0 <= a < b, without cancellation when b - a << a.
double power_increment(double a, double b, double p) {
    if (a == 0.0) return std::pow(b, p) / p;
    return std::pow(a, p) * std::expm1(p * std::log1p((b - a) / a)) / p;
}

/// Integral of the hat centred at c with half-width h over (-inf, cut].
double hat_integral_upto(double c, double h, double cut) {
    const double lo = c - h;
    const double hi = c + h;
    if (cut <= lo) return 0.0;
    if (cut >= hi) return h;
    if (cut <= c) {
        const double d = cut - lo;
        return d * d / (2.0 * h);
    }
    const double d = hi - cut;
    return h - d * d / (2.0 * h);
}

/// (x+h)^q - 2 x^q + (x-h)^q for x >= h > 0.
double second_difference_power(double x, double h, double q) {
    const double r = h / x;
    if (r > 0.5) {
        return std::pow(x + h, q) - 2.0 * std::pow(x, q) + std::pow(std::max(x - h, 0.0), q);
    }
    // x^q * 2 * sum_{m>=1} binom(q, 2m) r^{2m}
    double coeff = 1.0;  // binom(q, n)
    double rn = 1.0;
    double sum = 0.0;
    for (int n = 0; n < 400; ++n) {
        coeff *= (q - n) / (n + 1.0);
        rn *= r;
        if (n % 2 == 1) {
            const double term = coeff * rn;
            sum += term;
            if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
        }
    }
    return 2.0 * std::pow(x, q) * sum;
}

void check_beta(double beta, const RlOptions& options) {
    const bool ok = options.allow_outside_theory ? (beta > 1.0 && beta < 2.0) : (beta >= 1.5 && beta < 2.0);
    if (!ok) {
        throw ArgumentError("Riemann-Liouville order beta must lie in " +
                            std::string(options.allow_outside_theory ? "(1, 2)" : "[3/2, 2)") + ", got " +
                            std::to_string(beta));
    }
}

DenseMatrix assemble_rl_exact(const Mesh& mesh, double beta) {
    const std::size_t n = mesh.interior();
    const double q = 3.0 - beta;
    const double scale = -std::pow(mesh.h, 1.0 - beta) / gamma_fn(4.0 - beta);
    static constexpr double c[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
    // Toeplitz in d = j - i, nonzero for d >= -1.
    Vector by_offset(n + 1, 0.0);
    for (std::size_t d1 = 0; d1 <= n; ++d1) {
        const double d = static_cast<double>(d1) - 1.0;
        double acc = 0.0;
        for (int k = -2; k <= 2; ++k) {
            const double arg = d + k;
            if (arg > 0.0) acc += c[k + 2] * std::pow(arg, q);
        }
        by_offset[d1] = scale * acc;
    }
    // Far from the diagonal the fifth difference cancels; replace by its
    // asymptotic series in 1/d to keep full relative accuracy.
    for (std::size_t d1 = 0; d1 <= n; ++d1) {
        const double d = static_cast<double>(d1) - 1.0;
        if (d < 40.0) continue;
        // sum_k C_k (d+k)^q = d^q * sum_m binom(q,m) d^{-m} sum_k C_k k^m; the
        // inner sums vanish for m < 4.
        double coeff = 1.0;
        double total = 0.0;
        for (int m = 0; m < 60; ++m) {
            if (m > 0) coeff *= (q - (m - 1)) / m;
            if (m < 4) continue;
            double moment = 0.0;
            for (int k = -2; k <= 2; ++k) moment += c[k + 2] * std::pow(static_cast<double>(k), m);
            const double term = coeff * moment * std::pow(d, q - m);
            total += term;
            if (std::abs(term) <= 1e-18 * std::abs(total)) break;
        }
        by_offset[d1] = scale * total;
    }
    DenseMatrix s(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i <= j + 1) s(j, i) = by_offset[j + 1 - i];
        }
    }
    return s;
}

DenseMatrix assemble_rl_gauss(const Mesh& mesh, double beta) {
    const std::size_t n = mesh.interior();
    const double s = 0.5 * beta;
    const auto& gl = quad::gauss_legendre_32();
    constexpr double grading = 0.1;
    constexpr int levels = 12;
    DenseMatrix out(n);
    for (std::size_t jj = 0; jj < n; ++jj) {
        const std::size_t j = jj + 1;
        for (std::size_t ii = 0; ii < n; ++ii) {
            const std::size_t i = ii + 1;
            if (i > j + 1) continue;  // supports of D_L phi_i and D_R phi_j do not meet
            auto f = [&](double x) {
                return rl_derivative_hat(mesh, s, i, Side::left, x) *
                       rl_derivative_hat(mesh, s, j, Side::right, x);
            };
            double total = 0.0;
            for (std::size_t e = i - 1; e <= j && e < mesh.M; ++e) {
                const double a = mesh.nodes[e];
                const double b = mesh.nodes[e + 1];
                const double m = 0.5 * (a + b);
                const double half = m - a;
                // Geometric grading toward both element ends.
                double prev_left = m;
                double prev_right = m;
                for (int l = 1; l <= levels; ++l) {
                    const double off = half * std::pow(grading, l);
                    total += gl.integrate(f, a + off, prev_left);
                    total += gl.integrate(f, prev_right, b - off);
                    prev_left = a + off;
                    prev_right = b - off;
                }
                total += gl.integrate(f, a, prev_left);
                total += gl.integrate(f, prev_right, b);
            }
            out(jj, ii) = -total;
        }
    }
    return out;
}

/// g(y) = sum_k (-1)^k w^{2k+1} y^{2k+3-beta} / Gamma(2k+4-beta); its second
/// difference over h gives -A(sin(w x), phi_i).
Vector rl_sine_ritz_load(const Mesh& mesh, double beta) {
    const std::size_t n = mesh.interior();
    const double h = mesh.h;
    Vector load(n, 0.0);
    constexpr int terms = 70;
    std::vector<double> coeff(terms);
    for (int k = 0; k < terms; ++k) {
        const double q = 2.0 * k + 3.0 - beta;
        const double logc = (2.0 * k + 1.0) * std::log(omega) - std::lgamma(q + 1.0);
        coeff[static_cast<std::size_t>(k)] = ((k % 2 == 0) ? 1.0 : -1.0) * std::exp(logc);
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double x = mesh.interior_node(k);
        double acc = 0.0;
        for (int t = 0; t < terms; ++t) {
            const double q = 2.0 * t + 3.0 - beta;
            const double term = coeff[static_cast<std::size_t>(t)] * second_difference_power(x, h, q);
            acc += term;
            if (t > 10 && std::abs(term) < 1e-20 * std::abs(acc)) break;
        }
        load[k] = -acc / h;
    }
    return load;
}

}  // namespace

Mesh make_mesh(std::size_t M) {
    if (M < 2) throw ArgumentError("make_mesh: M must be at least 2, got " + std::to_string(M));
    Mesh mesh;
    mesh.M = M;
    mesh.h = 1.0 / static_cast<double>(M);
    mesh.nodes.resize(M + 1);
    for (std::size_t i = 0; i <= M; ++i) mesh.nodes[i] = static_cast<double>(i) / static_cast<double>(M);
    return mesh;
}

Vector SymTridiagonal::apply(const Vector& x) const {
    Vector y(x.size());
    apply_into(x, y);
    return y;
}

void SymTridiagonal::apply_into(const Vector& x, Vector& y) const {
    const std::size_t n = diag.size();
    if (x.size() != n) throw ArgumentError("SymTridiagonal::apply: size mismatch");
    y.resize(n);
    if (n == 0) return;
    if (n == 1) {
        y[0] = diag[0] * x[0];
        return;
    }
    y[0] = diag[0] * x[0] + off[0] * x[1];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        y[i] = off[i - 1] * x[i - 1] + diag[i] * x[i] + off[i] * x[i + 1];
    }
    y[n - 1] = off[n - 2] * x[n - 2] + diag[n - 1] * x[n - 1];
}

Vector DenseMatrix::apply(const Vector& x) const {
    if (x.size() != n_) throw ArgumentError("DenseMatrix::apply: size mismatch");
    Vector y(n_, 0.0);
    for (std::size_t r = 0; r < n_; ++r) {
        const double* row = &data_[r * n_];
        double acc = 0.0;
        for (std::size_t c = 0; c < n_; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
    return y;
}

Vector SpatialDiscretization::apply_stiffness(const Vector& x) const {
    return std::visit([&](const auto& a) { return a.apply(x); }, stiffness);
}

std::string_view to_string(InitialCondition ic) {
    switch (ic) {
        case InitialCondition::sin2pix: return "sin2pix";
        case InitialCondition::xnegquarter: return "xnegquarter";
        case InitialCondition::indicator_half: return "indicator_half";
        case InitialCondition::xoneminusx: return "xoneminusx";
    }
    return "unknown";
}

InitialCondition parse_initial_condition(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (auto ic : {InitialCondition::sin2pix, InitialCondition::xnegquarter,
                    InitialCondition::indicator_half, InitialCondition::xoneminusx}) {
        if (lower == to_string(ic)) return ic;
    }
    if (lower == "a" || lower == "sin") return InitialCondition::sin2pix;
    if (lower == "b") return InitialCondition::xnegquarter;
    throw ArgumentError("unknown initial condition '" + std::string(name) +
                        "' (expected sin2pix, xnegquarter, indicator_half or xoneminusx)");
}

double evaluate(InitialCondition ic, double x) {
    switch (ic) {
        case InitialCondition::sin2pix: return std::sin(omega * x);
        case InitialCondition::xnegquarter:
            return x == 0.0 ? std::numeric_limits<double>::infinity() : std::pow(x, -0.25);
        case InitialCondition::indicator_half:
            if (x < 0.5) return 1.0;
            return x == 0.5 ? 0.5 : 0.0;
        case InitialCondition::xoneminusx: return x * (1.0 - x);
    }
    return 0.0;
}

double exact_norm_squared(InitialCondition ic) {
    switch (ic) {
        case InitialCondition::sin2pix: return 0.5;
        case InitialCondition::xnegquarter: return 2.0;
        case InitialCondition::indicator_half: return 0.5;
        case InitialCondition::xoneminusx: return 1.0 / 30.0;
    }
    return 0.0;
}

double rl_derivative_hat(const Mesh& mesh, double s, std::size_t i, Side side, double x) {
    if (!(s > 0.5 && s < 1.0)) {
        throw ArgumentError("rl_derivative_hat: order s must lie in (1/2, 1)");
    }
    if (i < 1 || i + 1 > mesh.M) throw ArgumentError("rl_derivative_hat: node index out of range");
    const double e = 1.0 - s;
    auto tp = [e](double d) { return d > 0.0 ? std::pow(d, e) : 0.0; };
    const double xm = mesh.nodes[i - 1];
    const double xc = mesh.nodes[i];
    const double xp = mesh.nodes[i + 1];
    const double scale = 1.0 / (mesh.h * gamma_fn(2.0 - s));
    if (side == Side::left) return scale * (tp(x - xm) - 2.0 * tp(x - xc) + tp(x - xp));
    return scale * (tp(xp - x) - 2.0 * tp(xc - x) + tp(xm - x));
}

SymTridiagonal assemble_mass(const Mesh& mesh) {
    const std::size_t n = mesh.interior();
    SymTridiagonal m;
    m.diag.assign(n, 2.0 * mesh.h / 3.0);
    m.off.assign(n - 1, mesh.h / 6.0);
    return m;
}

SymTridiagonal assemble_stiff_laplace(const Mesh& mesh) {
    const std::size_t n = mesh.interior();
    SymTridiagonal s;
    s.diag.assign(n, 2.0 / mesh.h);
    s.off.assign(n - 1, -1.0 / mesh.h);
    return s;
}

DenseMatrix assemble_stiff_rl(const Mesh& mesh, double beta, RlOptions options) {
    check_beta(beta, options);
    if (options.method == RlAssembly::gauss_legendre) return assemble_rl_gauss(mesh, beta);
    return assemble_rl_exact(mesh, beta);
}

SpatialDiscretization make_laplace_discretization(const Mesh& mesh) {
    SpatialDiscretization d;
    d.mesh = mesh;
    d.kind = OperatorKind::laplacian;
    d.beta = 2.0;
    d.mass = assemble_mass(mesh);
    d.stiffness = assemble_stiff_laplace(mesh);
    return d;
}

SpatialDiscretization make_rl_discretization(const Mesh& mesh, double beta, RlOptions options) {
    SpatialDiscretization d;
    d.mesh = mesh;
    d.kind = OperatorKind::riemann_liouville;
    d.beta = beta;
    d.mass = assemble_mass(mesh);
    d.stiffness = assemble_stiff_rl(mesh, beta, options);
    return d;
}

Vector load_vector(const Mesh& mesh, InitialCondition ic) {
    const std::size_t n = mesh.interior();
    const double h = mesh.h;
    Vector load(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double xi = mesh.interior_node(k);
        const double xm = mesh.nodes[k];
        const double xp = mesh.nodes[k + 2];
        switch (ic) {
            case InitialCondition::sin2pix: {
                const double sh = std::sin(0.5 * omega * h);
                load[k] = 4.0 * sh * sh / (omega * omega * h) * std::sin(omega * xi);
                break;
            }
            case InitialCondition::xoneminusx:
                load[k] = h * xi - h * xi * xi - h * h * h / 6.0;
                break;
            case InitialCondition::indicator_half:
                load[k] = hat_integral_upto(xi, h, 0.5);
                break;
            case InitialCondition::xnegquarter: {
                const double i1 = power_increment(xm, xi, 1.75) - xm * power_increment(xm, xi, 0.75);
                const double i2 = xp * power_increment(xi, xp, 0.75) - power_increment(xi, xp, 1.75);
                load[k] = (i1 + i2) / h;
                break;
            }
        }
    }
    return load;
}

Vector load_vector(const Mesh& mesh, const std::function<double(double)>& f) {
    const std::size_t n = mesh.interior();
    const auto& gl = quad::gauss_legendre_32();
    Vector load(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double xm = mesh.nodes[k];
        const double xi = mesh.nodes[k + 1];
        const double xp = mesh.nodes[k + 2];
        load[k] = gl.integrate([&](double x) { return f(x) * (x - xm) / mesh.h; }, xm, xi) +
                  gl.integrate([&](double x) { return f(x) * (xp - x) / mesh.h; }, xi, xp);
    }
    return load;
}

Vector interpolate(const Mesh& mesh, const std::function<double(double)>& f) {
    Vector v(mesh.interior());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(mesh.interior_node(k));
    return v;
}

Vector l2_project(const SpatialDiscretization& disc, InitialCondition ic) {
    return linear_solve(disc.mass, load_vector(disc.mesh, ic));
}

Vector ritz_load(const SpatialDiscretization& disc, InitialCondition ic) {
    const Mesh& mesh = disc.mesh;
    if (disc.is_laplacian()) {
        if (ic == InitialCondition::sin2pix) {
            Vector load = load_vector(mesh, ic);
            for (double& v : load) v *= omega * omega;
            return load;
        }
        if (ic == InitialCondition::xoneminusx) return Vector(mesh.interior(), 2.0 * mesh.h);
    } else if (ic == InitialCondition::sin2pix) {
        return rl_sine_ritz_load(mesh, disc.beta);
    }
    throw ArgumentError("ritz_project: no closed form for A v with initial condition '" +
                        std::string(to_string(ic)) + "' under this operator; use l2_project");
}

Vector ritz_project(const SpatialDiscretization& disc, InitialCondition ic) {
    const Vector load = ritz_load(disc, ic);
    if (disc.is_laplacian()) return linear_solve(std::get<SymTridiagonal>(disc.stiffness), load);
    return linear_solve(std::get<DenseMatrix>(disc.stiffness), load);
}

TridiagonalFactorization::TridiagonalFactorization(const SymTridiagonal& a)
    : off_(a.off), pivot_(a.diag.size()) {
    const std::size_t n = a.diag.size();
    for (std::size_t i = 0; i < n; ++i) {
        double p = a.diag[i];
        if (i > 0) p -= off_[i - 1] * off_[i - 1] / pivot_[i - 1];
        if (!(std::abs(p) >= 1e-300) || !std::isfinite(p)) {
            throw NumericalError("tridiagonal elimination: pivot " + std::to_string(i) + " is singular");
        }
        pivot_[i] = p;
    }
}

void TridiagonalFactorization::solve_in_place(Vector& b) const {
    const std::size_t n = pivot_.size();
    if (b.size() != n) throw ArgumentError("TridiagonalFactorization::solve: size mismatch");
    for (std::size_t i = 1; i < n; ++i) b[i] -= off_[i - 1] / pivot_[i - 1] * b[i - 1];
    if (n == 0) return;
    b[n - 1] /= pivot_[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) b[i] = (b[i] - off_[i] * b[i + 1]) / pivot_[i];
}

Vector TridiagonalFactorization::solve(const Vector& b) const {
    Vector x = b;
    solve_in_place(x);
    return x;
}

LuFactorization::LuFactorization(DenseMatrix a) : lu_(std::move(a)), perm_(lu_.size()) {
    const std::size_t n = lu_.size();
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::abs(lu_(r, k)) > best) {
                best = std::abs(lu_(r, k));
                piv = r;
            }
        }
        if (!(best >= 1e-300) || !std::isfinite(best)) {
            throw NumericalError("LU factorization: matrix is singular at column " + std::to_string(k));
        }
        if (piv != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(lu_(k, c), lu_(piv, c));
            std::swap(perm_[k], perm_[piv]);
        }
        const double inv = 1.0 / lu_(k, k);
        double* rowk = lu_.row(k);
        for (std::size_t r = k + 1; r < n; ++r) {
            double* rowr = lu_.row(r);
            const double l = rowr[k] * inv;
            rowr[k] = l;
            if (l == 0.0) continue;
            for (std::size_t c = k + 1; c < n; ++c) rowr[c] -= l * rowk[c];
        }
    }
}

void LuFactorization::solve_in_place(Vector& b) const {
    const std::size_t n = lu_.size();
    if (b.size() != n) throw ArgumentError("LuFactorization::solve: size mismatch");
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = b[perm_[i]];
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = lu_.row(i);
        double acc = y[i];
        for (std::size_t c = 0; c < i; ++c) acc -= row[c] * y[c];
        y[i] = acc;
    }
    for (std::size_t i = n; i-- > 0;) {
        const double* row = lu_.row(i);
        double acc = y[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= row[c] * y[c];
        y[i] = acc / row[i];
    }
    b = std::move(y);
}

Vector LuFactorization::solve(const Vector& b) const {
    Vector x = b;
    solve_in_place(x);
    return x;
}

Vector linear_solve(const SymTridiagonal& a, const Vector& b) {
    return TridiagonalFactorization(a).solve(b);
}

Vector linear_solve(const DenseMatrix& a, const Vector& b) { return LuFactorization(a).solve(b); }

double mass_norm(const SymTridiagonal& mass, const Vector& c) {
    const Vector mc = mass.apply(c);
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) acc += c[i] * mc[i];
    return std::sqrt(std::max(acc, 0.0));
}

double l2_norm(const SpatialDiscretization& disc, const Vector& c) { return mass_norm(disc.mass, c); }

}  // namespace fracl1
