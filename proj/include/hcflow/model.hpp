#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "hcflow/errors.hpp"
#include "hcflow/grid.hpp"
#include "hcflow/vec2.hpp"

namespace hcflow {

/// How the two-step scheme is seeded.
///   Taylor         - x^{-1} from the second-order Taylor construction.
///   SymmetricSolve - x^{-1} := x^{1} obtained from the m=0 system with the
///                    time-reflection constraint; valid only for V0 = 0 and
///                    beta = 0, where the solution is even in time.  This is
///                    what the convergence benchmark uses.
enum class FirstStep { Taylor, SymmetricSolve };

/// Physical and discretization parameters of a run.
struct FlowParams {
    double beta = 0.0;           // kinetic coefficient, >= 0
    double v0 = 0.0;             // constant initial normal speed
    std::size_t grid_count = 256;  // J
    double dt = 1e-4;
    double final_time = 1.0;     // T
    std::size_t snapshot_stride = 1000;

    // Stopping thresholds.
    double curvature_cap = 1e4;       // K_inf above this trips BlowUpDetected
    double length_floor_rel = 1e-4;   // vs. initial polygon length
    double min_segment_rel = 1e-6;    // min q vs. mean q

    FirstStep first_step = FirstStep::Taylor;

    /// Throws ConfigError on violated invariants.
    void validate() const;

    /// M = T / dt, rounded to the nearest integer.
    long step_count() const;
};

struct Circle {
    double r0 = 1.0;
};
struct Ellipse {
    double a = 1.5;
    double b = 1.0;
};
/// x(rho) = r0 (cos g(2 pi rho), sin g(2 pi rho)), g(u) = u + eps sin u.
struct PerturbedCircle {
    double r0 = 1.0;
    double eps = 0.1;
};
/// Smooth nonconvex closed curve with a thin waist of half-width
/// scale*neck/2 at rho = 1/4, 3/4.
struct Dumbbell {
    double neck = 0.12;
    double scale = 2.0;
};

using InitialCurveSpec = std::variant<Circle, Ellipse, PerturbedCircle, Dumbbell>;

/// x_0(rho); every curve variant is regular, counterclockwise and closed.
Vec2 eval_initial_curve(const InitialCurveSpec& spec, double rho);

/// Samples x_0 at rho_j = j*h, j = 1..J.
PeriodicGridFunction sample_initial_curve(const InitialCurveSpec& spec, std::size_t grid_count);

/// Extinction time sqrt(pi/2) * r0 of the V0 = 0 shrinking circle.
double circle_extinction_time(double r0);

/// Closed-form radius r(t) for V0 = 0, solving
/// t = sqrt(pi/2) r0 erf(sqrt(ln(r0/r))) by bracketed bisection+secant on r.
/// Throws BeyondExtinction for t >= extinction time.
double circle_radius_exact_v0(double r0, double t);

/// rdot(t) = -sqrt(2 ln(r0/r(t))) for V0 = 0 (nonpositive branch; 0 at t=0).
double circle_radius_rate_v0(double r0, double t);

struct CircleRadiusState {
    double r = 1.0;
    double rdot = 0.0;
    double t = 0.0;
};

/// Accepted-step samples of the radius ODE; if the radius dropped below
/// r_extinct = 1e-6 * r0 before t_end, extinction_time is set and the
/// samples end there.
struct RadiusTrajectory {
    std::vector<CircleRadiusState> samples;
    std::optional<double> extinction_time;
};

/// Integrates rddot = -1/r, r(0) = r0, rdot(0) = v0 with the adaptive
/// DP5(4) oracle at tolerance 1e-12.  max_dt caps step sizes when dense
/// sampling is wanted.
RadiusTrajectory circle_radius_ode(double r0, double v0, double t_end,
                                   double max_dt = 0.0);

struct ReferencePoint {
    Vec2 position;
    Vec2 velocity;
};

/// The closed-form shrinking perturbed circle (V0 = 0):
/// x(rho,t) = r(t) (cos g(2 pi rho), sin g(2 pi rho)), g(u) = u + eps sin(u).
ReferencePoint reference_solution(double r0, double t, double rho, double eps = 0.1);

}  // namespace hcflow
