#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "hcflow/diagnostics.hpp"
#include "hcflow/grid.hpp"
#include "hcflow/model.hpp"
#include "hcflow/solver.hpp"
#include "support/oracles.hpp"

using namespace hcflow;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

FlowParams quick_params(std::size_t n, double dt, double beta = 0.0, double v0 = 0.0) {
    FlowParams p;
    p.grid_count = n;
    p.dt = dt;
    p.final_time = 1.0;
    p.beta = beta;
    p.v0 = v0;
    return p;
}

double max_vertex_distance(const PeriodicGridFunction& a, const PeriodicGridFunction& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, norm(a[k] - b[k]));
    return worst;
}

}  // namespace

TEST_SUITE_BEGIN("solver");

TEST_CASE("initial data for the circle, V0 = 0") {
    const auto params = quick_params(16, 1e-3);
    const auto state = init_states(Circle{1.0}, params);
    CHECK(state.step_index == 0);

    // x^{-1} = x^0 + dt^2/2 w with w the discrete curvature vector:
    // radially inward, |w_j| = 1 exactly for the uniformly sampled unit circle.
    // Recovering w from x^{-1} - x^0 divides rounding error by dt^2, so the
    // tolerances here are cancellation-limited, not formula-limited.
    double w_norm_min = 1e300, w_norm_max = 0.0;
    for (std::size_t k = 0; k < 16; ++k) {
        const Vec2 w = (state.x_prev[k] - state.x_curr[k]) * (2.0 / (params.dt * params.dt));
        const Vec2 inward = -1.0 * state.x_curr[k];
        CHECK(dot(w, inward) > 0.0);
        CHECK(std::fabs(cross(w, inward)) <= 1e-9);
        w_norm_min = std::min(w_norm_min, norm(w));
        w_norm_max = std::max(w_norm_max, norm(w));
    }
    CHECK(w_norm_max - w_norm_min <= 1e-9);
    CHECK(w_norm_max == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("initial data is independent of beta when V0 = 0") {
    const auto a = init_states(Ellipse{}, quick_params(24, 1e-3, 0.0));
    const auto b = init_states(Ellipse{}, quick_params(24, 1e-3, 3.7));
    CHECK(max_vertex_distance(a.x_prev, b.x_prev) == 0.0);
}

TEST_CASE("initial data displaces inward against an outward velocity") {
    const double dt = 1e-3;
    const auto params = quick_params(32, dt, 0.0, 1.0);
    const auto state = init_states(Circle{1.0}, params);
    const auto g = compute_geometry(state.x_curr);
    for (std::size_t k = 0; k < 32; ++k) {
        const Vec2 theta_perp = perp(*g.theta[k]);
        CHECK(dot(theta_perp, state.x_curr[k]) > 0.0);  // outward for ccw curves
        const Vec2 w = (g.tau[(k + 1) % 32] - g.tau[k]) *
                       (2.0 / ((g.q[k] + g.q[(k + 1) % 32]) * g.h));
        const Vec2 expected =
            state.x_curr[k] - dt * theta_perp + 0.5 * dt * dt * w;
        CHECK(norm(state.x_prev[k] - expected) <= 1e-15);
    }
}

TEST_CASE("hairpin initial data fails fast only when V0 != 0") {
    // Collinear spike: theta undefined at two vertices.
    const auto weird = [](std::size_t n) {
        PeriodicGridFunction x(n);
        x[0] = {0.0, 0.0};
        x[1] = {1.0, 0.0};
        x[2] = {2.0, 0.0};
        x[3] = {1.0, 0.5};
        return x;
    };
    // Build a curve spec stand-in by sampling; easiest is to call the pieces
    // directly: compute_geometry accepts the polygon, init_states needs a spec.
    // A 4-point dumbbell-like hairpin is not expressible as a spec, so check
    // the underlying contract through normal_initial_velocity instead.
    auto x = weird(4);
    x[3] = {1.0, 0.0};  // exact hairpin
    CHECK_THROWS_AS(normal_initial_velocity(x, 1.0), HairpinSingularity);
    CHECK_NOTHROW(normal_initial_velocity(x, 0.0));
}

TEST_CASE("assembled system structure") {
    const auto params = quick_params(16, 1e-3, 2.0);
    const auto state = init_states(Circle{1.0}, params);
    const auto sys = assemble_step_system(state);

    // Regular polygon: circulant matrix.
    for (std::size_t k = 1; k < 16; ++k) {
        CHECK(sys.matrix.diag[k] == doctest::Approx(sys.matrix.diag[0]).epsilon(1e-13));
        CHECK(sys.matrix.lower[k] == doctest::Approx(sys.matrix.lower[0]).epsilon(1e-13));
        CHECK(sys.matrix.upper[k] == doctest::Approx(sys.matrix.upper[0]).epsilon(1e-13));
    }

    // Dominance margin equals the mass + damping diagonal part.
    const auto g = compute_geometry(state.x_curr);
    for (std::size_t k = 0; k < 16; ++k) {
        const double qsum = g.q[k] + g.q[(k + 1) % 16];
        const double expected_margin = 0.5 * qsum * g.h / (params.dt * params.dt) +
                                       0.25 * params.beta * qsum * g.h / params.dt;
        const double margin = sys.matrix.diag[k] - std::fabs(sys.matrix.lower[k]) -
                              std::fabs(sys.matrix.upper[k]);
        CHECK(margin == doctest::Approx(expected_margin).epsilon(1e-12));
        CHECK(margin > 0.0);
    }

    // beta = 0 drops the damping contribution.
    const auto state0 = init_states(Circle{1.0}, quick_params(16, 1e-3, 0.0));
    const auto sys0 = assemble_step_system(state0);
    const double qsum = g.q[0] + g.q[1];
    CHECK(sys.matrix.diag[0] - sys0.matrix.diag[0] ==
          doctest::Approx(0.25 * 2.0 * qsum * g.h / params.dt).epsilon(1e-12));
}

TEST_CASE("a regular polygon stays regular and shrinks") {
    auto state = init_states(Circle{1.0}, quick_params(16, 1e-3));
    const double r_before = norm(state.x_curr[0]);
    for (int i = 0; i < 10; ++i) state = step(state);
    const auto g = compute_geometry(state.x_curr);
    double q_min = 1e300, q_max = 0.0;
    for (double q : g.q) {
        q_min = std::min(q_min, q);
        q_max = std::max(q_max, q);
    }
    CHECK((q_max - q_min) / q_max <= 1e-12);
    CHECK(norm(state.x_curr[0]) < r_before);
}

TEST_CASE("step is translation equivariant") {
    auto base = init_states(Ellipse{}, quick_params(24, 5e-3));
    const auto stepped = step(base);

    const Vec2 c{0.7, -0.3};
    SolverState shifted = base;
    for (std::size_t k = 0; k < 24; ++k) {
        shifted.x_curr[k] += c;
        shifted.x_prev[k] += c;
    }
    const auto stepped_shifted = step(shifted);
    for (std::size_t k = 0; k < 24; ++k) {
        CHECK(norm(stepped_shifted.x_curr[k] - stepped.x_curr[k] - c) <= 1e-12);
    }
}

TEST_CASE("step is rotation equivariant") {
    auto base = init_states(Ellipse{}, quick_params(24, 5e-3));
    const auto stepped = step(base);

    const double angle = 0.83;
    SolverState turned = base;
    for (std::size_t k = 0; k < 24; ++k) {
        turned.x_curr[k] = rotated(base.x_curr[k], angle);
        turned.x_prev[k] = rotated(base.x_prev[k], angle);
    }
    const auto stepped_turned = step(turned);
    for (std::size_t k = 0; k < 24; ++k) {
        CHECK(norm(stepped_turned.x_curr[k] - rotated(stepped.x_curr[k], angle)) <= 1e-12);
    }
}

TEST_CASE("step is deterministic") {
    const auto s0 = init_states(PerturbedCircle{}, quick_params(32, 1e-3));
    const auto a = step(step(s0));
    const auto b = step(step(s0));
    CHECK(std::memcmp(a.x_curr.values().data(), b.x_curr.values().data(),
                      a.x_curr.size() * sizeof(Vec2)) == 0);
}

TEST_CASE("stepping a hairpin state raises HairpinSingularity") {
    auto params = quick_params(4, 1e-4);
    params.curvature_cap = 1e300;  // let the hairpin be reached, not the cap
    params.min_segment_rel = 1e-300;
    auto state = init_states(Circle{1.0}, params);
    state.x_curr[0] = {0.0, 0.0};
    state.x_curr[1] = {1.0, 0.0};
    state.x_curr[2] = {2.0, 0.0};
    state.x_curr[3] = {1.0, 0.0};
    state.x_prev = state.x_curr;
    CHECK_THROWS_AS(step(state), HairpinSingularity);
}

TEST_CASE("stopping thresholds trip with the right reasons") {
    // Tiny circle: K_inf = 1/r above the cap.
    {
        auto params = quick_params(16, 1e-5);
        params.curvature_cap = 1e4;
        auto state = init_states(Circle{1.0}, params);
        state.initial_length = 1.0;  // keep the length floor quiet
        for (std::size_t k = 0; k < 16; ++k) state.x_curr[k] *= 0.5e-4;
        for (std::size_t k = 0; k < 16; ++k) state.x_prev[k] *= 0.5e-4;
        state.step_index = 7;
        try {
            step(state);
            FAIL("expected BlowUpDetected");
        } catch (const BlowUpDetected& e) {
            CHECK(e.reason == StopReason::CurvatureCap);
            CHECK(e.time == doctest::Approx(7e-5));
            CHECK(e.step == 7);
        }
    }
    // Short polygon against the initial length.
    {
        auto params = quick_params(16, 1e-5);
        params.curvature_cap = 1e12;
        auto state = init_states(Circle{1.0}, params);
        state.initial_length = 1e6;
        CHECK_THROWS_AS(step(state), BlowUpDetected);
        try {
            step(state);
        } catch (const BlowUpDetected& e) {
            CHECK(e.reason == StopReason::LengthFloor);
        }
    }
    // One collapsed-but-positive segment trips the relative minimum.
    {
        auto params = quick_params(16, 1e-5);
        params.curvature_cap = 1e12;
        auto state = init_states(Circle{1.0}, params);
        state.x_curr[1] = state.x_curr[0] + 1e-8 * (state.x_curr[1] - state.x_curr[0]);
        try {
            step(state);
            FAIL("expected BlowUpDetected");
        } catch (const BlowUpDetected& e) {
            CHECK(e.reason == StopReason::SegmentCollapse);
        }
    }
}

TEST_CASE("discrete energy decays for the shrinking circle") {
    auto params = quick_params(64, 1e-3);
    auto state = init_states(Circle{1.0}, params);
    const double h = state.x_curr.spacing();
    double prev_energy = record_step(state).energy;
    const double slack = 10.0 * (params.dt * params.dt + h * h) * prev_energy;
    for (int i = 0; i < 200; ++i) {
        state = step(state);
        const double energy = record_step(state).energy;
        CHECK(energy <= prev_energy + slack);
        prev_energy = energy;
    }
}

TEST_CASE("semidiscrete right side on the regular polygon") {
    const std::size_t n = 32;
    SemidiscreteState s{PeriodicGridFunction(n), PeriodicGridFunction(n), 0.0};
    const double h = s.x.spacing();
    for (std::size_t k = 0; k < n; ++k) {
        const double u = two_pi * static_cast<double>(k + 1) * h;
        s.x[k] = {std::cos(u), std::sin(u)};
    }
    const auto [vel, accel] = semidiscrete_rhs(s, 0.0);
    CHECK(norm_0h(vel) == 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        CHECK(norm(accel[k]) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(dot(accel[k], s.x[k]) < 0.0);  // radially inward
    }
}

TEST_CASE("projection term vanishes for zero velocity on any curve") {
    const std::size_t n = 40;
    SemidiscreteState s{sample_initial_curve(Ellipse{}, n), PeriodicGridFunction(n), 0.0};
    const auto [vel, accel] = semidiscrete_rhs(s, 0.0);
    const auto g = compute_geometry(s.x);
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 elliptic = (g.tau[(k + 1) % n] - g.tau[k]) *
                              (2.0 / ((g.q[k] + g.q[(k + 1) % n]) * g.h));
        CHECK(norm(accel[k] - elliptic) <= 1e-14);
    }
}

TEST_CASE("semidiscrete right side is affine in beta") {
    const std::size_t n = 24;
    std::mt19937 rng(17);
    SemidiscreteState s{testsupport::random_smooth_curve(rng, n), PeriodicGridFunction(n),
                        0.0};
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    for (std::size_t k = 0; k < n; ++k) s.v[k] = {dist(rng), dist(rng)};
    const auto a0 = semidiscrete_rhs(s, 0.0).second;
    const auto a1 = semidiscrete_rhs(s, 1.0).second;
    for (std::size_t k = 0; k < n; ++k) {
        CHECK(norm(a1[k] - a0[k] + s.v[k]) <= 1e-14);
    }
}

TEST_CASE("semidiscrete identities hold along oracle trajectories") {
    const double tol = 1e-10;
    const struct {
        InitialCurveSpec spec;
        double v0, beta;
    } cases[] = {
        {Circle{1.0}, 0.0, 0.0},
        {Ellipse{}, 0.5, 0.2},
    };
    for (const auto& c : cases) {
        const std::size_t n = 24;
        const auto x0 = sample_initial_curve(c.spec, n);
        const auto v0 = normal_initial_velocity(x0, c.v0);
        const auto traj = integrate_semidiscrete(x0, v0, c.beta, 0.3, tol);
        REQUIRE(traj.size() > 50);
        for (const auto& s : traj) {
            const auto g = compute_geometry(s.x);
            const auto accel = semidiscrete_rhs(s, c.beta).second;
            for (std::size_t k = 0; k < n; ++k) {
                // normality (discrete)
                CHECK(std::fabs(dot(s.v[k], *g.theta[k])) <= 100 * tol);
                // length-element law: qdot + quarter terms = 0
                const std::size_t k1 = (k + 1) % n;
                const std::size_t km = (k + n - 1) % n;
                const Vec2 dv = (s.v[k] - s.v[km]) * (1.0 / g.h);
                const double qdot = dot(dv, g.tau[k]);
                const double term_m =
                    dot(s.v[km], accel[km]) + c.beta * norm_sq(s.v[km]);
                const double term_k = dot(s.v[k], accel[k]) + c.beta * norm_sq(s.v[k]);
                const double combo = qdot + 0.25 * (g.q[km] + g.q[k]) * term_m +
                                     0.25 * (g.q[k] + g.q[k1]) * term_k;
                CHECK(std::fabs(combo) <= 100 * tol);
            }
        }
    }
}

TEST_CASE("fully discrete scheme converges to the semidiscrete oracle in time") {
    // Measured against the method-of-lines oracle at fixed J.  Radial data:
    // the tangential projection term of the scheme is evaluated at the
    // backward half-step, so its time offset only cancels where the term
    // itself vanishes (theta is stationary for radial motion).
    const std::size_t n = 64;
    const auto x0 = sample_initial_curve(Circle{1.0}, n);
    const auto v0 = PeriodicGridFunction(n);
    const double t_end = 0.5;
    const auto oracle =
        integrate_semidiscrete(x0, v0, 0.0, t_end, 1e-11, {t_end});
    const auto& x_ref = oracle.back().x;

    std::vector<double> gaps;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
        auto params = quick_params(n, dt);
        params.final_time = t_end;
        auto state = init_states(Circle{1.0}, params);
        const long steps = params.step_count();
        for (long m = 0; m < steps; ++m) state = step(state);
        gaps.push_back(max_vertex_distance(state.x_curr, x_ref));
    }
    for (std::size_t i = 1; i < gaps.size(); ++i) {
        const double order = std::log2(gaps[i - 1] / gaps[i]);
        CHECK(order >= 1.7);
        CHECK(order <= 2.3);
    }
}

TEST_CASE("symmetric first step reproduces the Taylor state to higher order") {
    auto sym = quick_params(32, 1.0 / 32.0);
    sym.first_step = FirstStep::SymmetricSolve;
    const auto state_sym = init_states(PerturbedCircle{}, sym);
    const auto state_tay = init_states(PerturbedCircle{}, quick_params(32, 1.0 / 32.0));
    // Same construction target: x^{-1} agrees with the Taylor formula to O(dt^4).
    const double d = max_vertex_distance(state_sym.x_prev, state_tay.x_prev);
    CHECK(d <= 5.0 * std::pow(1.0 / 32.0, 4));
    CHECK(d > 0.0);
}

TEST_SUITE_END();
