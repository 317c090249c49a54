#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hcflow/grid.hpp"
#include "support/oracles.hpp"

using namespace hcflow;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double eps = std::numeric_limits<double>::epsilon();

PeriodicGridFunction unit_circle(std::size_t n, double r = 1.0) {
    PeriodicGridFunction x(n);
    const double h = x.spacing();
    for (std::size_t k = 0; k < n; ++k) {
        const double u = two_pi * static_cast<double>(k + 1) * h;
        x[k] = {r * std::cos(u), r * std::sin(u)};
    }
    return x;
}

}  // namespace

TEST_SUITE_BEGIN("grid");

TEST_CASE("backward difference of a constant vanishes") {
    PeriodicGridFunction v(8, {1.0, 0.0});
    const auto d = backward_difference(v);
    for (std::size_t k = 0; k < 8; ++k) {
        CHECK(d[k].x == 0.0);
        CHECK(d[k].y == 0.0);
    }
}

TEST_CASE("backward difference of the J=4 circle at j=1") {
    const auto d = backward_difference(unit_circle(4));
    // (cos(pi/2) - cos(2pi))/h, (sin(pi/2) - sin(2pi))/h with h = 1/4.
    CHECK(d[0].x == doctest::Approx(-4.0).epsilon(1e-14));
    CHECK(d[0].y == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("backward difference of the alternating function") {
    PeriodicGridFunction v(4);
    for (std::size_t k = 0; k < 4; ++k) {
        v[k] = {(k + 1) % 2 == 0 ? 1.0 : -1.0, 0.0};
    }
    const auto d = backward_difference(v);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(std::fabs(d[k].x) == doctest::Approx(8.0));
        CHECK(d[k].y == 0.0);
    }
}

TEST_CASE("norm_0h of constants") {
    CHECK(norm_0h(PeriodicGridFunction(8, {1.0, 0.0})) == doctest::Approx(1.0));
    CHECK(norm_0h(PeriodicGridFunction(16, {3.0, 4.0})) == doctest::Approx(5.0));
    CHECK(norm_0h(unit_circle(64)) == doctest::Approx(1.0));
}

TEST_CASE("norm_1h basics and the circle value") {
    CHECK(norm_1h(PeriodicGridFunction(8, {1.0, 0.0})) == doctest::Approx(1.0));
    CHECK(norm_1h(PeriodicGridFunction(8)) == 0.0);

    // |delta v_j| = 2 sin(pi h)/h on the circle, so
    // ||v||_1h = sqrt(1 + (2 sin(pi h)/h)^2).
    const std::size_t n = 256;
    const double h = 1.0 / n;
    const double chord = 2.0 * std::sin(std::numbers::pi * h) / h;
    const double expected = std::sqrt(1.0 + chord * chord);
    CHECK(norm_1h(unit_circle(n)) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(expected == doctest::Approx(6.3624).epsilon(1e-4));

    // Direct-summation oracle.
    const auto v = unit_circle(n);
    const auto d = backward_difference(v);
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) sum += norm_sq(v[k]) + norm_sq(d[k]);
    CHECK(norm_1h(v) == doctest::Approx(std::sqrt(h * sum)).epsilon(1e-15));
}

TEST_CASE("norm_0h <= norm_1h") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto v = testsupport::random_smooth_curve(rng, 32);
        CHECK(norm_0h(v) <= norm_1h(v) * (1 + 1e-15));
    }
}

TEST_CASE("geometry of the uniformly sampled circle") {
    const std::size_t n = 16;
    const double h = 1.0 / n;
    const auto g = compute_geometry(unit_circle(n));
    const double q_expected = 2.0 * std::sin(std::numbers::pi * h) / h;
    CHECK(q_expected == doctest::Approx(6.2429).epsilon(1e-4));
    for (std::size_t k = 0; k < n; ++k) {
        CHECK(g.q[k] == doctest::Approx(q_expected).epsilon(1e-14));
        REQUIRE(g.theta[k].has_value());
        const double u = two_pi * static_cast<double>(k + 1) * h;
        CHECK(g.theta[k]->x == doctest::Approx(-std::sin(u)).epsilon(1e-12));
        CHECK(g.theta[k]->y == doctest::Approx(std::cos(u)).epsilon(1e-12));
    }
}

TEST_CASE("geometry of the square") {
    PeriodicGridFunction x(4);
    x[0] = {1.0, 1.0};
    x[1] = {-1.0, 1.0};
    x[2] = {-1.0, -1.0};
    x[3] = {1.0, -1.0};
    const auto g = compute_geometry(x);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(g.q[k] == doctest::Approx(8.0));
        CHECK(norm(g.tau[k]) == doctest::Approx(1.0));
        REQUIRE(g.theta[k].has_value());
        CHECK(std::fabs(g.theta[k]->x) == doctest::Approx(inv_sqrt2));
        CHECK(std::fabs(g.theta[k]->y) == doctest::Approx(inv_sqrt2));
    }
    CHECK(g.tau[0].x == doctest::Approx(0.0));
    CHECK(g.tau[0].y == doctest::Approx(1.0));  // from (1,-1) to (1,1)
}

TEST_CASE("antipodal hairpin marks theta undefined") {
    PeriodicGridFunction x(4);
    x[0] = {0.0, 0.0};
    x[1] = {1.0, 0.0};
    x[2] = {2.0, 0.0};
    x[3] = {1.0, 0.0};
    const auto g = compute_geometry(x);
    CHECK_FALSE(g.theta[0].has_value());  // tau_1 = -tau_2
    CHECK(g.theta[1].has_value());
    CHECK_FALSE(g.theta[2].has_value());
    CHECK(g.theta[3].has_value());
    CHECK_FALSE(g.theta_defined_everywhere());
    CHECK(g.first_undefined_theta().value() == 0);
}

TEST_CASE("degenerate segment is rejected") {
    PeriodicGridFunction x(4);
    x[0] = {0.0, 0.0};
    x[1] = {0.0, 0.0};  // coincides with x[0]
    x[2] = {1.0, 0.0};
    x[3] = {1.0, 1.0};
    CHECK_THROWS_AS(compute_geometry(x), DegenerateSegment);
}

TEST_CASE("grid count below 4 is rejected") {
    CHECK_THROWS_AS(PeriodicGridFunction(3), ConfigError);
}

TEST_CASE("theta orthogonality identity on random geometries") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = testsupport::random_smooth_curve(rng, 64);
        const auto g = compute_geometry(x);
        for (std::size_t k = 0; k < g.size(); ++k) {
            REQUIRE(g.theta[k].has_value());
            CHECK(norm(g.tau[k]) == doctest::Approx(1.0).epsilon(4 * eps));
            CHECK(norm(*g.theta[k]) == doctest::Approx(1.0).epsilon(4 * eps));
            const Vec2 dtau = g.tau[(k + 1) % g.size()] - g.tau[k];
            CHECK(std::fabs(dot(dtau, *g.theta[k])) <= 16 * eps);
        }
    }
}

TEST_CASE("geometry equivariance under translation, rotation, scaling") {
    std::mt19937 rng(3);
    const auto x = testsupport::random_smooth_curve(rng, 48);
    const auto g = compute_geometry(x);

    PeriodicGridFunction shifted(x.size()), rotated_x(x.size()), scaled(x.size());
    const Vec2 c{0.7, -0.3};
    const double angle = 0.9, lambda = 2.5;
    for (std::size_t k = 0; k < x.size(); ++k) {
        shifted[k] = x[k] + c;
        rotated_x[k] = rotated(x[k], angle);
        scaled[k] = lambda * x[k];
    }
    const auto gs = compute_geometry(shifted);
    const auto gr = compute_geometry(rotated_x);
    const auto gl = compute_geometry(scaled);
    for (std::size_t k = 0; k < x.size(); ++k) {
        CHECK(gs.q[k] == doctest::Approx(g.q[k]).epsilon(1e-14));
        CHECK(norm(gs.tau[k] - g.tau[k]) <= 1e-14);
        CHECK(norm(*gs.theta[k] - *g.theta[k]) <= 1e-14);
        CHECK(norm(gr.tau[k] - rotated(g.tau[k], angle)) <= 1e-13);
        CHECK(norm(*gr.theta[k] - rotated(*g.theta[k], angle)) <= 1e-13);
        CHECK(gl.q[k] == doctest::Approx(lambda * g.q[k]).epsilon(1e-14));
        CHECK(norm(gl.tau[k] - g.tau[k]) <= 1e-14);
    }
}

TEST_CASE("curvature proxy of circles") {
    for (std::size_t n : {4UL, 16UL, 256UL}) {
        const auto g = compute_geometry(unit_circle(n));
        CHECK(curvature_sup(g) == doctest::Approx(1.0).epsilon(1e-12));
    }
    const auto g2 = compute_geometry(unit_circle(64, 2.0));
    CHECK(curvature_sup(g2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("polygon length") {
    CHECK(polygon_length(compute_geometry(unit_circle(4))) ==
          doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-14));
    const std::size_t n = 1024;
    CHECK(polygon_length(compute_geometry(unit_circle(n))) ==
          doctest::Approx(2.0 * n * std::sin(std::numbers::pi / n)).epsilon(1e-14));
    // homogeneity
    std::mt19937 rng(5);
    const auto x = testsupport::random_smooth_curve(rng, 40);
    PeriodicGridFunction doubled(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) doubled[k] = 2.0 * x[k];
    CHECK(polygon_length(compute_geometry(doubled)) ==
          doctest::Approx(2.0 * polygon_length(compute_geometry(x))).epsilon(1e-14));
}

TEST_CASE("discrete energy") {
    const std::size_t n = 128;
    const auto x = unit_circle(n);
    const auto g = compute_geometry(x);
    const double length = polygon_length(g);

    CHECK(discrete_energy(g, PeriodicGridFunction(n)) ==
          doctest::Approx(length).epsilon(1e-14));
    CHECK(discrete_energy(g, PeriodicGridFunction(n, {1.0, 0.0})) ==
          doctest::Approx(1.5 * length).epsilon(1e-14));
}

TEST_CASE("discrete consistency of geometry against a smooth curve") {
    // Ellipse with analytic |x_rho|, tau, tau_rho.
    const double a = 1.5, b = 1.0;
    const auto xrho = [&](double rho) -> Vec2 {
        const double u = two_pi * rho;
        return {-a * two_pi * std::sin(u), b * two_pi * std::cos(u)};
    };
    const auto xrhorho = [&](double rho) -> Vec2 {
        const double u = two_pi * rho;
        return {-a * two_pi * two_pi * std::cos(u), -b * two_pi * two_pi * std::sin(u)};
    };

    double prev_max = 0.0;
    for (std::size_t n : {64UL, 128UL, 256UL, 512UL}) {
        const double h = 1.0 / n;
        PeriodicGridFunction x(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double u = two_pi * static_cast<double>(k + 1) * h;
            x[k] = {a * std::cos(u), b * std::sin(u)};
        }
        const auto g = compute_geometry(x);
        double worst = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double rho = static_cast<double>(k + 1) * h;
            const Vec2 xr = xrho(rho);
            const double speed = norm(xr);
            const Vec2 tau = xr / speed;
            const Vec2 xrr = xrhorho(rho);
            const Vec2 tau_rho = (xrr - dot(xrr, tau) * tau) / speed;

            const std::size_t k1 = (k + 1) % n;
            worst = std::max(worst, std::fabs(0.5 * (g.q[k] + g.q[k1]) - speed));
            worst = std::max(worst, norm(g.tau[k] + g.tau[k1] - 2.0 * tau));
            worst = std::max(worst, norm((g.tau[k1] - g.tau[k]) / h - tau_rho));
        }
        if (prev_max > 0.0) {
            const double ratio = prev_max / worst;
            CHECK(ratio >= 3.6);
            CHECK(ratio <= 4.4);
        }
        prev_max = worst;
    }
}

TEST_SUITE_END();
