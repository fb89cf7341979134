#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <doctest.h>

#include "fracl1/errors.hpp"
#include "fracl1/reference.hpp"
#include "fracl1/specfun.hpp"

using namespace fracl1;

namespace {

constexpr double pi = std::numbers::pi;
const double sqrt2 = std::sqrt(2.0);

/// (v, sqrt 2 sin k pi x) by tanh-sinh, split at the zeros of the sine.
double coefficient_oracle(InitialCondition ic, std::size_t k) {
    boost::math::quadrature::tanh_sinh<double> ts;
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        double a = static_cast<double>(j) / static_cast<double>(k);
        double b = static_cast<double>(j + 1) / static_cast<double>(k);
        auto f = [&](double x) { return evaluate(ic, x) * sqrt2 * std::sin(static_cast<double>(k) * pi * x); };
        if (ic == InitialCondition::indicator_half && a < 0.5 && b > 0.5) {
            acc += ts.integrate(f, a, 0.5);
            continue;
        }
        if (ic == InitialCondition::indicator_half && a >= 0.5) continue;
        acc += ts.integrate(f, a, b);
    }
    return acc;
}

}  // namespace

TEST_SUITE("reference") {

TEST_CASE("sine coefficients in closed form") {
    const Vector s = sine_coefficients(InitialCondition::sin2pix, 6);
    for (std::size_t k = 1; k <= 6; ++k) CHECK(s[k - 1] == doctest::Approx(k == 2 ? 1.0 / sqrt2 : 0.0));
    for (std::size_t k = 1; k <= 9; ++k) {
        const double kp = static_cast<double>(k) * pi;
        const double q = k % 2 == 1 ? 4.0 * sqrt2 / (kp * kp * kp) : 0.0;
        CHECK(sine_coefficient(InitialCondition::xoneminusx, k) == doctest::Approx(q).epsilon(1e-14));
        const double ind = sqrt2 * (1.0 - std::cos(kp / 2.0)) / kp;
        CHECK(std::abs(sine_coefficient(InitialCondition::indicator_half, k) - ind) <= 1e-15);
    }
}

TEST_CASE("sine coefficients against quadrature") {
    for (auto ic : {InitialCondition::sin2pix, InitialCondition::xnegquarter, InitialCondition::indicator_half,
                    InitialCondition::xoneminusx}) {
        for (std::size_t k = 1; k <= 20; ++k) {
            CAPTURE(to_string(ic));
            CAPTURE(k);
            CHECK(std::abs(sine_coefficient(ic, k) - coefficient_oracle(ic, k)) <= 1e-11);
        }
    }
}

TEST_CASE("Parseval and monotone tail") {
    for (auto ic : {InitialCondition::xnegquarter, InitialCondition::indicator_half, InitialCondition::xoneminusx}) {
        double previous = std::numeric_limits<double>::infinity();
        for (std::size_t K : {10u, 100u, 1000u, 4000u}) {
            const auto e = make_expansion(0.5, ic, K);
            double sum = 0.0;
            for (double c : e.coeff) sum += c * c;
            CHECK(sum <= exact_norm_squared(ic) * (1.0 + 1e-14));
            CHECK(e.tail <= previous);
            previous = e.tail;
        }
    }
    // Tails of the rough data decay like K^{-1/4} and K^{-1/2}.
    CHECK(make_expansion(0.5, InitialCondition::indicator_half, 4000).tail < 0.02);
    CHECK(make_expansion(0.5, InitialCondition::xnegquarter, 4000).tail < 0.2);
    CHECK(make_expansion(0.5, InitialCondition::sin2pix, 2).tail <= 1e-8);
}

TEST_CASE("default truncation") {
    CHECK(default_truncation(InitialCondition::sin2pix, 8192) == 2);
    CHECK(default_truncation(InitialCondition::xnegquarter, 512) == 2000);
    CHECK(default_truncation(InitialCondition::indicator_half, 4096) == 8192);
}

TEST_CASE("exact solution for a single mode") {
    const auto e = make_expansion(0.3, InitialCondition::sin2pix, 2);
    const Vector x{0.1, 0.25, 0.6, 0.9};
    for (double t : {0.0, 1e-6, 0.1, 1.0}) {
        const Vector u = exact_subdiffusion(e, t, x);
        const double decay = mittag_leffler({0.3, 1.0}, -4.0 * pi * pi * std::pow(t, 0.3));
        for (std::size_t i = 0; i < x.size(); ++i)
            CHECK(u[i] == doctest::Approx(decay * std::sin(2.0 * pi * x[i])).epsilon(1e-13).scale(1e-16));
    }
    const auto heat = make_expansion(1.0, InitialCondition::sin2pix, 2);
    const Vector u = exact_subdiffusion(heat, 0.1, x);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(u[i] == doctest::Approx(std::exp(-4.0 * pi * pi * 0.1) * std::sin(2.0 * pi * x[i])).epsilon(1e-13));
    CHECK_THROWS_AS(exact_subdiffusion(e, -1.0, x), ArgumentError);
}

TEST_CASE("exact solution at t = 0 is the partial Fourier sum") {
    const auto e = make_expansion(0.5, InitialCondition::xoneminusx, 41);
    const Vector x{0.2, 0.5, 0.7};
    const Vector u = exact_subdiffusion(e, 0.0, x);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(u[i] == doctest::Approx(x[i] * (1.0 - x[i])).epsilon(1e-5));
}

TEST_CASE("nodal evaluation matches pointwise evaluation") {
    const Mesh m = make_mesh(64);
    const auto e = make_expansion(0.7, InitialCondition::indicator_half, 300);
    Vector x(m.interior());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = m.interior_node(k);
    const Vector a = exact_subdiffusion(e, 1e-3, x);
    const Vector b = exact_subdiffusion_nodal(e, 1e-3, m);
    for (std::size_t k = 0; k < x.size(); ++k) CHECK(b[k] == doctest::Approx(a[k]).epsilon(1e-12).scale(1e-14));
}

TEST_CASE("exact solution decays in L2") {
    const Mesh m = make_mesh(512);
    const auto disc = make_laplace_discretization(m);
    for (double alpha : {0.1, 0.5, 0.9}) {
        const auto e = make_expansion(alpha, InitialCondition::indicator_half, 1000);
        double previous = std::numeric_limits<double>::infinity();
        for (double t : {1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 0.1, 1.0}) {
            // Parseval for the truncated series.
            double s = 0.0;
            for (std::size_t k = 1; k <= e.K; ++k) {
                const double f = mittag_leffler({alpha, 1.0}, -e.lambda(k) * std::pow(t, alpha)) * e.coeff[k - 1];
                s += f * f;
            }
            CHECK(std::sqrt(s) <= previous);
            previous = std::sqrt(s);
            const double nodal = l2_norm(disc, exact_subdiffusion_nodal(e, t, m));
            CHECK(nodal <= std::sqrt(exact_norm_squared(InitialCondition::indicator_half)) * 1.01);
        }
        CHECK(truncation_bound(e, 1.0) <= truncation_bound(e, 1e-4));
    }
}

TEST_CASE("time-discrete spectral solution matches the stepper on one mode") {
    const Mesh m = make_mesh(32);
    const auto e = make_expansion(0.5, InitialCondition::sin2pix, 2);
    const auto grid = make_time_grid(0.1, 40);
    const Vector u = exact_time_discrete(e, grid, m);
    const auto scalar = solve_scalar_ode(0.5, 4.0 * pi * pi, grid, 1.0);
    for (std::size_t k = 0; k < u.size(); ++k)
        CHECK(u[k] == doctest::Approx(scalar.back() * std::sin(2.0 * pi * m.interior_node(k))).epsilon(1e-12).scale(1e-15));
}

TEST_CASE("self-reference against the eigen-expansion") {
    const Mesh m = make_mesh(256);
    const auto disc = make_laplace_discretization(m);
    const double alpha = 0.5, t = 0.1;
    const Vector v = ritz_project(disc, InitialCondition::sin2pix);
    const auto e = make_expansion(alpha, InitialCondition::sin2pix, 2);
    const Vector exact = exact_subdiffusion_nodal(e, t, m);
    const Vector r1000 = self_reference(disc, alpha, v, t, 1000);
    const Vector r100 = self_reference(disc, alpha, v, t, 100);
    const double e1000 = error_at(disc, r1000, exact, std::sqrt(0.5));
    const double e100 = error_at(disc, r100, exact, std::sqrt(0.5));
    // First order in time on top of a small spatial error.
    CHECK(e1000 < 0.2 * e100);
    CHECK(e1000 < 5e-5);
    CHECK(error_at(disc, self_reference(disc, alpha, v, t, 10), self_reference(disc, alpha, v, t, 10)) == 0.0);
}

TEST_CASE("error_at examples") {
    const Mesh m = make_mesh(16);
    const auto disc = make_laplace_discretization(m);
    const Vector a = interpolate(m, [](double x) { return std::exp(x) * x * (1.0 - x); });
    CHECK(error_at(disc, a, a) == 0.0);
    Vector unit = interpolate(m, [](double x) { return std::sin(3.0 * x); });
    const double n = l2_norm(disc, unit);
    for (auto& u : unit) u /= n;
    Vector b = a;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += 1e-3 * unit[i];
    CHECK(error_at(disc, b, a) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(error_at(disc, b, a, 0.5) == doctest::Approx(2e-3).epsilon(1e-12));
    CHECK_THROWS_AS(error_at(disc, b, Vector(3, 0.0)), ArgumentError);
}

TEST_CASE("normalized single-mode error for a table row") {
    // alpha = 0.1, sin(2 pi x), t = 0.1, M = 8192, N = 10: 1.46e-4.
    const Mesh m = make_mesh(8192);
    const auto disc = make_laplace_discretization(m);
    const auto e = make_expansion(0.1, InitialCondition::sin2pix, 2);
    const Vector v = ritz_project(disc, InitialCondition::sin2pix);
    const auto grid = make_time_grid(0.1, 10);
    const Vector u = march(disc, l1_weights(0.1, grid.N), v, grid).final_level();
    const double err = error_at(disc, u, exact_subdiffusion_nodal(e, 0.1, m), std::sqrt(0.5));
    CHECK(err == doctest::Approx(1.46e-4).epsilon(0.005));
}

TEST_CASE("empirical rates") {
    const Vector r = empirical_rates({4e-3, 2e-3, 1e-3});
    REQUIRE(r.size() == 2);
    CHECK(r[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(empirical_rates({1e-2, 2.5e-3})[0] == doctest::Approx(2.0).epsilon(1e-14));
    for (double factor : {1.5, 2.0, 3.0, 10.0}) {
        for (double p : {0.25, 0.5, 1.0, 1.7}) {
            Vector e;
            for (int i = 0; i < 6; ++i) e.push_back(0.3 * std::pow(factor, -p * i));
            for (double x : empirical_rates(e, factor)) CHECK(x == doctest::Approx(p).epsilon(1e-12));
        }
    }
    CHECK(empirical_rates({1e-3}).empty());
    CHECK_THROWS_AS(empirical_rates({1e-3, 0.0}), ArgumentError);
    CHECK_THROWS_AS(empirical_rates({1e-3, -1e-4}), ArgumentError);
    CHECK_THROWS_AS(empirical_rates({1e-3, 1e-4}, 1.0), ArgumentError);
}

TEST_CASE("summary rate is the mean of the last two pairwise rates") {
    CHECK(summary_rate({1.2, 1.1, 1.05, 1.01}) == doctest::Approx(1.03));
    CHECK(summary_rate({0.7}) == 0.7);
    CHECK(std::isnan(summary_rate({})));
}

TEST_CASE("problem and normalization names") {
    CHECK(parse_problem(to_string(Problem::subdiffusion)) == Problem::subdiffusion);
    CHECK(parse_problem(to_string(Problem::space_time_fractional)) == Problem::space_time_fractional);
    CHECK(parse_normalization(to_string(Normalization::raw)) == Normalization::raw);
    CHECK(parse_normalization(to_string(Normalization::normalized)) == Normalization::normalized);
    CHECK_THROWS_AS(parse_problem("wave"), ArgumentError);
    CHECK_THROWS_AS(parse_normalization("scaled"), ArgumentError);
}

}
