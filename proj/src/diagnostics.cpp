#include "hcflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hcflow {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

DiagnosticsRecord record_step(const SolverState& state) {
    const CurveGeometry g = compute_geometry(state.x_curr);
    const std::size_t n = state.x_curr.size();

    PeriodicGridFunction velocity(n);
    for (std::size_t k = 0; k < n; ++k) {
        velocity[k] = (state.x_curr[k] - state.x_prev[k]) / state.params.dt;
    }

    DiagnosticsRecord rec;
    rec.m = state.step_index;
    rec.t = state.time();
    rec.length = polygon_length(g);
    rec.kinf = curvature_sup(g);
    rec.inv_kinf = rec.kinf > 0.0 ? 1.0 / rec.kinf : 0.0;
    rec.energy = discrete_energy(g, velocity);
    rec.min_q = *std::min_element(g.q.begin(), g.q.end());
    return rec;
}

double eoc(double err_coarse, double err_fine, double h_coarse, double h_fine) {
    return std::log(err_coarse / err_fine) / std::log(h_coarse / h_fine);
}

void ShrinkingCircleReference::refresh(double t) const {
    if (t == cached_t_) return;
    cached_r_ = circle_radius_exact_v0(r0_, t);
    cached_rdot_ = circle_radius_rate_v0(r0_, t);
    cached_t_ = t;
}

Vec2 ShrinkingCircleReference::position(double rho, double t) const {
    refresh(t);
    const double u = two_pi * rho;
    const double gu = u + eps_ * std::sin(u);
    return {cached_r_ * std::cos(gu), cached_r_ * std::sin(gu)};
}

Vec2 ShrinkingCircleReference::velocity(double rho, double t) const {
    refresh(t);
    const double u = two_pi * rho;
    const double gu = u + eps_ * std::sin(u);
    return {cached_rdot_ * std::cos(gu), cached_rdot_ * std::sin(gu)};
}

double ShrinkingCircleReference::valid_until() const {
    return circle_extinction_time(r0_);
}

namespace {

PeriodicGridFunction sample_reference_position(const ReferenceCurve& ref,
                                               std::size_t n, double t) {
    PeriodicGridFunction out(n);
    const double h = out.spacing();
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = ref.position(static_cast<double>(k + 1) * h, t);
    }
    return out;
}

}  // namespace

double error_position(const ReferenceCurve& reference, const FlowTrajectory& traj) {
    const long last = traj.last_step();
    const double t_last = static_cast<double>(last) * traj.params.dt;
    if (t_last >= reference.valid_until()) throw BeyondExtinction(t_last);

    const std::size_t n = traj.states.front().size();
    double worst = 0.0;
    for (long m = 0; m <= last; ++m) {
        const double t = static_cast<double>(m) * traj.params.dt;
        PeriodicGridFunction diff = sample_reference_position(reference, n, t);
        for (std::size_t k = 0; k < n; ++k) {
            diff[k] -= traj.states[static_cast<std::size_t>(m)][k];
        }
        worst = std::max(worst, norm_1h(diff));
    }
    return worst;
}

double error_velocity(const ReferenceCurve& reference, const FlowTrajectory& traj) {
    const long last = traj.last_step();
    const double t_last = static_cast<double>(last) * traj.params.dt;
    if (t_last >= reference.valid_until()) throw BeyondExtinction(t_last);

    const std::size_t n = traj.states.front().size();
    const double h = traj.states.front().spacing();
    const double dt = traj.params.dt;
    double worst = 0.0;
    for (long m = 1; m + 1 <= last; ++m) {
        const double t = static_cast<double>(m) * dt;
        PeriodicGridFunction diff(n);
        const auto& next = traj.states[static_cast<std::size_t>(m + 1)];
        const auto& prev = traj.states[static_cast<std::size_t>(m - 1)];
        for (std::size_t k = 0; k < n; ++k) {
            const Vec2 central = (next[k] - prev[k]) / (2.0 * dt);
            diff[k] = reference.velocity(static_cast<double>(k + 1) * h, t) - central;
        }
        worst = std::max(worst, norm_0h(diff));
    }
    return worst;
}

ConsistencyFields consistency_residual_fields(const ConsistencySampler& sampler,
                                              std::size_t grid_count, double beta) {
    const std::size_t n = grid_count;
    const double h = 1.0 / static_cast<double>(n);
    const double inv_h = static_cast<double>(n);

    std::vector<ConsistencySample> s(n);
    PeriodicGridFunction x(n);
    for (std::size_t k = 0; k < n; ++k) {
        s[k] = sampler(static_cast<double>(k + 1) * h);
        x[k] = s[k].x;
    }
    // Discrete q and tau from the sampled positions.
    const CurveGeometry g = compute_geometry(x);

    ConsistencyFields out;
    out.r.resize(n);
    out.r_tilde.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t k1 = (k + 1) % n;
        const std::size_t km = (k + n - 1) % n;
        const Vec2 elliptic =
            (g.tau[k1] - g.tau[k]) * (2.0 / ((g.q[k] + g.q[k1]) * h));
        out.r[k] = s[k].xddot + beta * s[k].xdot - elliptic +
                   dot(s[k].xdot, s[k].tau_t) * s[k].tau;

        // qdot_j = delta xdot_j . tau_j from sampled velocities.
        const Vec2 dxdot = (s[k].xdot - s[km].xdot) * inv_h;
        const double qdot = dot(dxdot, g.tau[k]);
        const double term_m =
            dot(s[km].xdot, s[km].xddot) + beta * norm_sq(s[km].xdot);
        const double term_k = dot(s[k].xdot, s[k].xddot) + beta * norm_sq(s[k].xdot);
        out.r_tilde[k] = qdot + 0.25 * (g.q[km] + g.q[k]) * term_m +
                         0.25 * (g.q[k] + g.q[k1]) * term_k;
    }
    return out;
}

ConsistencyResiduals consistency_residuals(const ConsistencySampler& sampler,
                                           std::size_t grid_count, double beta) {
    const ConsistencyFields fields =
        consistency_residual_fields(sampler, grid_count, beta);
    ConsistencyResiduals out;
    for (const Vec2& r : fields.r) out.max_r = std::max(out.max_r, norm(r));
    for (double rt : fields.r_tilde)
        out.max_r_tilde = std::max(out.max_r_tilde, std::fabs(rt));
    return out;
}

ConsistencySampler solxpi_sampler(double r0, double eps, double t) {
    const double r = circle_radius_exact_v0(r0, t);
    const double rdot = circle_radius_rate_v0(r0, t);
    const double rddot = -1.0 / r;
    return [=](double rho) {
        const double u = two_pi * rho;
        const double gu = u + eps * std::sin(u);
        const Vec2 e{std::cos(gu), std::sin(gu)};
        ConsistencySample s;
        s.x = r * e;
        s.xdot = rdot * e;
        s.xddot = rddot * e;
        s.tau = {-std::sin(gu), std::cos(gu)};
        s.tau_t = {0.0, 0.0};
        return s;
    };
}

ConsistencySampler stationary_circle_sampler(double r0) {
    return [=](double rho) {
        const double u = two_pi * rho;
        ConsistencySample s;
        s.x = {r0 * std::cos(u), r0 * std::sin(u)};
        s.xdot = {0.0, 0.0};
        s.xddot = {0.0, 0.0};
        s.tau = {-std::sin(u), std::cos(u)};
        s.tau_t = {0.0, 0.0};
        return s;
    };
}

}  // namespace hcflow
