#include "hcflow/model.hpp"

#include <cmath>
#include <numbers>

#include "hcflow/ode.hpp"

namespace hcflow {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

void FlowParams::validate() const {
    if (beta < 0.0) throw ConfigError("beta must be >= 0");
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    if (grid_count < PeriodicGridFunction::min_grid_count)
        throw ConfigError("grid count J must be >= 4");
    if (final_time < dt) throw ConfigError("T must be >= dt");
    if (snapshot_stride == 0) throw ConfigError("snapshot_stride must be positive");
    if (!(curvature_cap > 0.0) || !(length_floor_rel > 0.0) || !(min_segment_rel > 0.0))
        throw ConfigError("stopping thresholds must be positive");
    if (first_step == FirstStep::SymmetricSolve && (v0 != 0.0 || beta != 0.0))
        throw ConfigError("symmetric first step requires V0 = 0 and beta = 0");
}

long FlowParams::step_count() const { return std::llround(final_time / dt); }

Vec2 eval_initial_curve(const InitialCurveSpec& spec, double rho) {
    const double u = two_pi * rho;
    return std::visit(
        [u](const auto& s) -> Vec2 {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Circle>) {
                return {s.r0 * std::cos(u), s.r0 * std::sin(u)};
            } else if constexpr (std::is_same_v<T, Ellipse>) {
                return {s.a * std::cos(u), s.b * std::sin(u)};
            } else if constexpr (std::is_same_v<T, PerturbedCircle>) {
                const double gu = u + s.eps * std::sin(u);
                return {s.r0 * std::cos(gu), s.r0 * std::sin(gu)};
            } else {
                static_assert(std::is_same_v<T, Dumbbell>);
                const double c = std::cos(u);
                return {0.5 * s.scale * (1.0 + c * c) * c,
                        0.5 * s.scale * (s.neck + c * c) * std::sin(u)};
            }
        },
        spec);
}

PeriodicGridFunction sample_initial_curve(const InitialCurveSpec& spec,
                                          std::size_t grid_count) {
    PeriodicGridFunction x(grid_count);
    const double h = x.spacing();
    for (std::size_t k = 0; k < grid_count; ++k) {
        x[k] = eval_initial_curve(spec, static_cast<double>(k + 1) * h);
    }
    return x;
}

double circle_extinction_time(double r0) {
    return std::sqrt(std::numbers::pi / 2.0) * r0;
}

double circle_radius_exact_v0(double r0, double t) {
    if (t < 0.0 || t >= circle_extinction_time(r0)) throw BeyondExtinction(t);
    if (t == 0.0) return r0;

    const double c = std::sqrt(std::numbers::pi / 2.0) * r0;
    const auto f = [&](double r) { return c * std::erf(std::sqrt(std::log(r0 / r))) - t; };

    // f is decreasing in r; root bracketed by (lo, hi] with f(lo) > 0 > f(hi).
    double lo = r0 * 1e-300, hi = r0;
    double f_lo = c - t, f_hi = -t;
    for (int it = 0; it < 200 && (hi - lo) > 1e-16 * r0; ++it) {
        // Secant candidate, safeguarded by bisection.
        double mid = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        const double lo_guard = lo + 0.01 * (hi - lo);
        const double hi_guard = hi - 0.01 * (hi - lo);
        if (!(mid > lo_guard) || !(mid < hi_guard)) mid = 0.5 * (lo + hi);
        const double f_mid = f(mid);
        if (f_mid > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    return 0.5 * (lo + hi);
}

double circle_radius_rate_v0(double r0, double t) {
    if (t == 0.0) return 0.0;
    const double r = circle_radius_exact_v0(r0, t);
    return -std::sqrt(2.0 * std::log(r0 / r));
}

RadiusTrajectory circle_radius_ode(double r0, double v0, double t_end, double max_dt) {
    if (!(r0 > 0.0)) throw ConfigError("r0 must be positive");
    RadiusTrajectory traj;
    traj.samples.push_back({r0, v0, 0.0});
    if (t_end <= 0.0) return traj;

    const double r_extinct = 1e-6 * r0;
    OdeOptions opts;
    opts.abs_tol = opts.rel_tol = 1e-12;
    if (max_dt > 0.0) opts.max_dt = max_dt;

    Dp54Integrator integrator(
        [](double, const std::vector<double>& y, std::vector<double>& dydt) {
            dydt[0] = y[1];
            dydt[1] = -1.0 / y[0];
        },
        opts);

    std::vector<double> y = {r0, v0};
    double t = 0.0;
    try {
        integrator.advance(y, t, t_end, [&](double tk, const std::vector<double>& yk) {
            traj.samples.push_back({yk[0], yk[1], tk});
            if (yk[0] <= r_extinct) {
                traj.extinction_time = tk;
                return false;
            }
            return true;
        });
    } catch (const StepSizeUnderflow& e) {
        // The singular 1/r stalls the integrator right at collapse.
        traj.extinction_time = e.time;
    }
    return traj;
}

ReferencePoint reference_solution(double r0, double t, double rho, double eps) {
    const double r = circle_radius_exact_v0(r0, t);
    const double rdot = circle_radius_rate_v0(r0, t);
    const double u = two_pi * rho;
    const double gu = u + eps * std::sin(u);
    const Vec2 e{std::cos(gu), std::sin(gu)};
    return {r * e, rdot * e};
}

}  // namespace hcflow
