#include "hcflow/solver.hpp"

#include <algorithm>
#include <cmath>

#include "hcflow/ode.hpp"

namespace hcflow {

namespace {

/// Discrete curvature vector (2/(q_j+q_{j+1})) (tau_{j+1}-tau_j)/h.
Vec2 curvature_vector(const CurveGeometry& g, std::size_t k) {
    const std::size_t n = g.q.size();
    const Vec2 dtau = g.tau[(k + 1) % n] - g.tau[k];
    return dtau * (2.0 / ((g.q[k] + g.q[(k + 1) % n]) * g.h));
}

/// x^{-1} = x^1 from the m = 0 system under the constraint x^{-1} = x^1:
///   (mass_j/dt^2) x^1_j - [elliptic x^1]_j = (mass_j/dt^2) x^0_j.
/// Valid for V0 = 0, beta = 0, where the solution is even in time; the
/// projection term is O(dt^2) there and drops out of the startup system.
PeriodicGridFunction symmetric_first_state(const PeriodicGridFunction& x0,
                                           const CurveGeometry& g, double dt) {
    const std::size_t n = x0.size();
    const double h = g.h;

    CyclicTridiagonalSystem sys;
    sys.diag.resize(n);
    sys.lower.resize(n);
    sys.upper.resize(n);
    std::vector<double> rhs_x(n), rhs_y(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double q_k = g.q[k];
        const double q_k1 = g.q[(k + 1) % n];
        const double mass = 0.5 * (q_k + q_k1) * h;
        sys.diag[k] = mass / (dt * dt) + 1.0 / (2.0 * h * q_k) + 1.0 / (2.0 * h * q_k1);
        sys.lower[k] = -1.0 / (2.0 * h * q_k);
        sys.upper[k] = -1.0 / (2.0 * h * q_k1);
        rhs_x[k] = mass / (dt * dt) * x0[k].x;
        rhs_y[k] = mass / (dt * dt) * x0[k].y;
    }
    const CyclicTridiagonalSolver solver(sys);
    const auto sol_x = solver.solve(rhs_x);
    const auto sol_y = solver.solve(rhs_y);
    PeriodicGridFunction x1(n);
    for (std::size_t k = 0; k < n; ++k) x1[k] = {sol_x[k], sol_y[k]};
    return x1;
}

StepSystem assemble_with_geometry(const SolverState& state, const CurveGeometry& g_curr) {
    const CurveGeometry g_prev = compute_geometry(state.x_prev);
    if (auto k = g_curr.first_undefined_theta()) throw HairpinSingularity(*k + 1);
    if (auto k = g_prev.first_undefined_theta()) throw HairpinSingularity(*k + 1);

    const std::size_t n = state.x_curr.size();
    const double h = g_curr.h;
    const double dt = state.params.dt;
    const double beta = state.params.beta;
    const double inv_h = 1.0 / h;

    StepSystem out;
    out.matrix.diag.resize(n);
    out.matrix.lower.resize(n);
    out.matrix.upper.resize(n);
    out.rhs_x.resize(n);
    out.rhs_y.resize(n);

    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t k1 = (k + 1) % n;
        const double q_k = g_curr.q[k];
        const double q_k1 = g_curr.q[k1];
        const double mass = 0.5 * (q_k + q_k1) * h;
        const double damping = 0.25 * beta * (q_k + q_k1) * h / dt;

        out.matrix.diag[k] =
            mass / (dt * dt) + damping + 1.0 / (2.0 * h * q_k) + 1.0 / (2.0 * h * q_k1);
        out.matrix.lower[k] = -1.0 / (2.0 * h * q_k);
        out.matrix.upper[k] = -1.0 / (2.0 * h * q_k1);

        // x^{m-1} half of the semi-implicit elliptic operator, with the
        // length elements frozen at level m.
        const Vec2 dprev_k = (state.x_prev[k] - state.x_prev.wrap(static_cast<std::ptrdiff_t>(k) - 1)) * inv_h;
        const Vec2 dprev_k1 = (state.x_prev[k1] - state.x_prev[k]) * inv_h;
        const Vec2 elliptic_prev = dprev_k1 / (2.0 * q_k1) - dprev_k / (2.0 * q_k);

        const Vec2 u = (state.x_curr[k] - state.x_prev[k]) / dt;
        const Vec2 w = (*g_curr.theta[k] - *g_prev.theta[k]) / dt;
        const Vec2 projection = mass * dot(u, w) * (*g_curr.theta[k]);

        const Vec2 rhs = mass / (dt * dt) * (2.0 * state.x_curr[k] - state.x_prev[k]) +
                         damping * state.x_prev[k] + elliptic_prev - projection;
        out.rhs_x[k] = rhs.x;
        out.rhs_y[k] = rhs.y;
    }
    return out;
}

}  // namespace

SolverState init_states(const InitialCurveSpec& spec, const FlowParams& params) {
    params.validate();
    PeriodicGridFunction x0 = sample_initial_curve(spec, params.grid_count);
    const CurveGeometry g = compute_geometry(x0);
    const double initial_length = polygon_length(g);

    if (params.first_step == FirstStep::SymmetricSolve) {
        PeriodicGridFunction x1 = symmetric_first_state(x0, g, params.dt);
        return {std::move(x0), std::move(x1), 0, params, initial_length};
    }

    if (params.v0 != 0.0) {
        if (auto k = g.first_undefined_theta()) throw HairpinSingularity(*k + 1);
    }

    const std::size_t n = x0.size();
    const double dt = params.dt;
    PeriodicGridFunction x_prev(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 w = curvature_vector(g, k);
        const Vec2 theta_perp =
            params.v0 != 0.0 ? perp(*g.theta[k]) : Vec2{0.0, 0.0};
        x_prev[k] = x0[k] - dt * params.v0 * theta_perp +
                    0.5 * dt * dt * (w - params.beta * params.v0 * theta_perp);
    }
    return {std::move(x0), std::move(x_prev), 0, params, initial_length};
}

StepSystem assemble_step_system(const SolverState& state) {
    return assemble_with_geometry(state, compute_geometry(state.x_curr));
}

SolverState step(const SolverState& state) {
    const CurveGeometry g = compute_geometry(state.x_curr);

    const double kinf = curvature_sup(g);
    if (kinf > state.params.curvature_cap) {
        throw BlowUpDetected(StopReason::CurvatureCap, state.time(), state.step_index);
    }
    const double length = polygon_length(g);
    if (length < state.params.length_floor_rel * state.initial_length) {
        throw BlowUpDetected(StopReason::LengthFloor, state.time(), state.step_index);
    }
    const double min_q = *std::min_element(g.q.begin(), g.q.end());
    const double mean_q = length / g.h / static_cast<double>(g.q.size());
    if (min_q < state.params.min_segment_rel * mean_q) {
        throw BlowUpDetected(StopReason::SegmentCollapse, state.time(), state.step_index);
    }

    const StepSystem sys = assemble_with_geometry(state, g);
    const CyclicTridiagonalSolver solver(sys.matrix);
    const auto sol_x = solver.solve(sys.rhs_x);
    const auto sol_y = solver.solve(sys.rhs_y);

    const std::size_t n = state.x_curr.size();
    PeriodicGridFunction x_next(n);
    for (std::size_t k = 0; k < n; ++k) x_next[k] = {sol_x[k], sol_y[k]};

    return {std::move(x_next), state.x_curr, state.step_index + 1, state.params,
            state.initial_length};
}

std::pair<PeriodicGridFunction, PeriodicGridFunction> semidiscrete_rhs(
    const SemidiscreteState& s, double beta) {
    const CurveGeometry g = compute_geometry(s.x);
    if (auto k = g.first_undefined_theta()) throw HairpinSingularity(*k + 1);

    const std::size_t n = s.x.size();
    const double inv_h = 1.0 / g.h;

    // taudot_j = (delta v_j - (delta v_j . tau_j) tau_j) / q_j
    std::vector<Vec2> taudot(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 dv = (s.v[k] - s.v.wrap(static_cast<std::ptrdiff_t>(k) - 1)) * inv_h;
        taudot[k] = (dv - dot(dv, g.tau[k]) * g.tau[k]) / g.q[k];
    }

    PeriodicGridFunction accel(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t k1 = (k + 1) % n;
        const Vec2 theta = *g.theta[k];
        // Exact derivative of the normalized tangent sum.
        const Vec2 sdot = taudot[k] + taudot[k1];
        const double sn = norm(g.tau[k] + g.tau[k1]);
        const Vec2 thetadot = (sdot - dot(sdot, theta) * theta) / sn;
        accel[k] = curvature_vector(g, k) - dot(s.v[k], thetadot) * theta - beta * s.v[k];
    }
    return {s.v, std::move(accel)};
}

PeriodicGridFunction normal_initial_velocity(const PeriodicGridFunction& x0, double v0) {
    const std::size_t n = x0.size();
    PeriodicGridFunction v(n);
    if (v0 == 0.0) return v;
    const CurveGeometry g = compute_geometry(x0);
    if (auto k = g.first_undefined_theta()) throw HairpinSingularity(*k + 1);
    for (std::size_t k = 0; k < n; ++k) {
        v[k] = v0 * perp(*g.theta[k]);
    }
    return v;
}

std::vector<SemidiscreteState> integrate_semidiscrete(
    const PeriodicGridFunction& x0, const PeriodicGridFunction& v0, double beta,
    double t_end, double tol, const std::vector<double>& sample_times) {
    const std::size_t n = x0.size();

    const auto pack = [n](const PeriodicGridFunction& x, const PeriodicGridFunction& v) {
        std::vector<double> y(4 * n);
        for (std::size_t k = 0; k < n; ++k) {
            y[2 * k] = x[k].x;
            y[2 * k + 1] = x[k].y;
            y[2 * n + 2 * k] = v[k].x;
            y[2 * n + 2 * k + 1] = v[k].y;
        }
        return y;
    };
    const auto unpack = [n](const std::vector<double>& y, double t) {
        SemidiscreteState s{PeriodicGridFunction(n), PeriodicGridFunction(n), t};
        for (std::size_t k = 0; k < n; ++k) {
            s.x[k] = {y[2 * k], y[2 * k + 1]};
            s.v[k] = {y[2 * n + 2 * k], y[2 * n + 2 * k + 1]};
        }
        return s;
    };

    OdeOptions opts;
    opts.abs_tol = opts.rel_tol = tol;
    Dp54Integrator integrator(
        [n, beta, &unpack](double t, const std::vector<double>& y,
                           std::vector<double>& dydt) {
            const SemidiscreteState s = unpack(y, t);
            const auto [vel, accel] = semidiscrete_rhs(s, beta);
            for (std::size_t k = 0; k < n; ++k) {
                dydt[2 * k] = vel[k].x;
                dydt[2 * k + 1] = vel[k].y;
                dydt[2 * n + 2 * k] = accel[k].x;
                dydt[2 * n + 2 * k + 1] = accel[k].y;
            }
        },
        opts);

    std::vector<double> y = pack(x0, v0);
    double t = 0.0;
    std::vector<SemidiscreteState> out;
    out.push_back(unpack(y, 0.0));
    for (double ts : sample_times) {
        if (ts <= 0.0) continue;
        if (ts > t_end) break;
        integrator.advance(y, t, ts);
        out.push_back(unpack(y, t));
    }
    return out;
}

std::vector<SemidiscreteState> integrate_semidiscrete(
    const PeriodicGridFunction& x0, const PeriodicGridFunction& v0, double beta,
    double t_end, double tol) {
    std::vector<double> times;
    const int count = 100;
    times.reserve(count);
    for (int i = 1; i <= count; ++i) {
        times.push_back(t_end * static_cast<double>(i) / count);
    }
    return integrate_semidiscrete(x0, v0, beta, t_end, tol, times);
}

}  // namespace hcflow
