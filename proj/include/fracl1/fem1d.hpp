#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fracl1 {

using Vector = std::vector<double>;

/// Uniform mesh of [0, 1] with M subintervals; unknowns live on the M-1
/// interior nodes.
struct Mesh {
    std::size_t M = 0;
    double h = 0.0;
    Vector nodes;  // x_0 .. x_M

    std::size_t interior() const noexcept { return M - 1; }
    /// Coordinate of interior unknown k (k = 0 is node x_1).
    double interior_node(std::size_t k) const { return nodes[k + 1]; }
};

Mesh make_mesh(std::size_t M);

/// Symmetric tridiagonal matrix: `diag` has n entries, `off` has n-1.
struct SymTridiagonal {
    Vector diag;
    Vector off;

    std::size_t size() const noexcept { return diag.size(); }
    Vector apply(const Vector& x) const;
    void apply_into(const Vector& x, Vector& y) const;
};

/// Row-major dense square matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
    double* row(std::size_t r) { return data_.data() + r * n_; }
    const double* row(std::size_t r) const { return data_.data() + r * n_; }
    Vector apply(const Vector& x) const;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

enum class OperatorKind { laplacian, riemann_liouville };

/// Mesh plus assembled mass and stiffness matrices. The stiffness is
/// tridiagonal for the Laplacian and dense for the Riemann-Liouville operator.
struct SpatialDiscretization {
    Mesh mesh;
    OperatorKind kind = OperatorKind::laplacian;
    double beta = 2.0;
    SymTridiagonal mass;
    std::variant<SymTridiagonal, DenseMatrix> stiffness;

    bool is_laplacian() const noexcept { return kind == OperatorKind::laplacian; }
    Vector apply_stiffness(const Vector& x) const;
};

/// Initial data used in the experiments.
enum class InitialCondition {
    sin2pix,         // sin(2 pi x)
    xnegquarter,     // x^{-1/4}
    indicator_half,  // indicator of (0, 1/2)
    xoneminusx,      // x (1 - x)
};

std::string_view to_string(InitialCondition ic);
InitialCondition parse_initial_condition(std::string_view name);

/// Pointwise value; x^{-1/4} returns +inf at 0 and the indicator is 1/2 at x = 1/2.
double evaluate(InitialCondition ic, double x);

/// Exact squared L2(0,1) norm.
double exact_norm_squared(InitialCondition ic);

enum class Side { left, right };

/// Order-s Riemann-Liouville derivative of the hat function phi_i at x,
/// s in (1/2, 1). Left-sided:
///   (1/(h Gamma(2-s))) [(x-x_{i-1})_+^{1-s} - 2(x-x_i)_+^{1-s} + (x-x_{i+1})_+^{1-s}]
/// and the right-sided form mirrored about x.
double rl_derivative_hat(const Mesh& mesh, double s, std::size_t i, Side side, double x);

enum class RlAssembly {
    exact,           // closed-form Beta integrals of the truncated powers
    gauss_legendre,  // composite 32-point Gauss-Legendre on node-graded pieces
};

struct RlOptions {
    RlAssembly method = RlAssembly::exact;
    /// Permit beta in (1, 3/2], where coercivity is not covered by the theory.
    bool allow_outside_theory = false;
};

SymTridiagonal assemble_mass(const Mesh& mesh);
SymTridiagonal assemble_stiff_laplace(const Mesh& mesh);

/// S(j, i) = A(phi_i, phi_j) = -(D_L^{beta/2} phi_i, D_R^{beta/2} phi_j).
DenseMatrix assemble_stiff_rl(const Mesh& mesh, double beta, RlOptions options = {});

SpatialDiscretization make_laplace_discretization(const Mesh& mesh);
SpatialDiscretization make_rl_discretization(const Mesh& mesh, double beta, RlOptions options = {});

/// Entries (v, phi_i), i = 1..M-1, from exact element integrals.
Vector load_vector(const Mesh& mesh, InitialCondition ic);

/// Entries (f, phi_i) for a general function by 32-point Gauss-Legendre per element.
Vector load_vector(const Mesh& mesh, const std::function<double(double)>& f);

/// Interior nodal interpolant.
Vector interpolate(const Mesh& mesh, const std::function<double(double)>& f);

Vector l2_project(const SpatialDiscretization& disc, InitialCondition ic);

/// Ritz projection A(R_h v, chi) = A(v, chi). Supported pairs: Laplacian with
/// sin2pix or xoneminusx, Riemann-Liouville with sin2pix.
Vector ritz_project(const SpatialDiscretization& disc, InitialCondition ic);

/// Loads A(v, phi_i) used by `ritz_project`.
Vector ritz_load(const SpatialDiscretization& disc, InitialCondition ic);

/// Thomas elimination for a symmetric tridiagonal matrix, factored once.
class TridiagonalFactorization {
public:
    explicit TridiagonalFactorization(const SymTridiagonal& a);
    Vector solve(const Vector& b) const;
    void solve_in_place(Vector& b) const;

private:
    Vector off_;
    Vector pivot_;
};

/// LU with partial pivoting, factored once.
class LuFactorization {
public:
    explicit LuFactorization(DenseMatrix a);
    Vector solve(const Vector& b) const;
    void solve_in_place(Vector& b) const;

private:
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;
};

Vector linear_solve(const SymTridiagonal& a, const Vector& b);
Vector linear_solve(const DenseMatrix& a, const Vector& b);

/// sqrt(c^T mass c).
double l2_norm(const SpatialDiscretization& disc, const Vector& c);
double mass_norm(const SymTridiagonal& mass, const Vector& c);

}  // namespace fracl1
