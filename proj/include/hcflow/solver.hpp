#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hcflow/grid.hpp"
#include "hcflow/model.hpp"
#include "hcflow/tridiag.hpp"

namespace hcflow {

/// Full state of the two-step scheme: (x^m, x^{m-1}) plus the step index.
struct SolverState {
    PeriodicGridFunction x_curr;  // x^m
    PeriodicGridFunction x_prev;  // x^{m-1}
    long step_index = 0;          // m
    FlowParams params;
    double initial_length = 0.0;  // |Gamma^0|, for the length-floor threshold

    double time() const { return static_cast<double>(step_index) * params.dt; }
};

/// Builds (x^0, x^{-1}) from the sampled initial curve.
///
/// For FirstStep::Taylor,
///   x^{-1}_j = x^0_j - dt V0 theta^{0,perp}_j
///            + dt^2/2 [ (2/(q^0_j+q^0_{j+1})) (tau^0_{j+1}-tau^0_j)/h
///                       - beta V0 theta^{0,perp}_j ],
/// the second-order backward Taylor construction with the discrete
/// curvature vector.  For FirstStep::SymmetricSolve (V0 = 0, beta = 0
/// only), x^{-1} is instead the solution x^1 of the m = 0 system under the
/// time-reflection constraint x^{-1} = x^1.
///
/// Throws HairpinSingularity if V0 != 0 and theta^0 is undefined anywhere.
SolverState init_states(const InitialCurveSpec& spec, const FlowParams& params);

/// The per-step linear system: one scalar cyclic tridiagonal matrix shared
/// by both coordinates, and one right-hand side per coordinate.
struct StepSystem {
    CyclicTridiagonalSystem matrix;
    std::vector<double> rhs_x;
    std::vector<double> rhs_y;
};

/// Assembles the scheme's system at the state's time level:
///   diag_j  = (q_j+q_{j+1}) h / (2 dt^2) + beta (q_j+q_{j+1}) h / (4 dt)
///           + 1/(2 h q_j) + 1/(2 h q_{j+1})
///   lower_j = -1/(2 h q_j),  upper_j = -1/(2 h q_{j+1})
/// with the explicit terms (mass history, x^{m-1} half of the elliptic
/// operator, tangential projection with theta^m, theta^{m-1}) collected on
/// the right side.  Throws HairpinSingularity if theta is undefined at
/// either time level.
StepSystem assemble_step_system(const SolverState& state);

/// Advances one step: checks the stopping thresholds on x^m (throwing
/// BlowUpDetected when one trips), then solves for x^{m+1}.  Deterministic:
/// identical inputs give bit-identical outputs.
SolverState step(const SolverState& state);

/// Space-discrete, time-continuous state of the method-of-lines oracle.
struct SemidiscreteState {
    PeriodicGridFunction x;
    PeriodicGridFunction v;  // xdot
    double t = 0.0;
};

/// Right side of the semidiscrete system:
///   xddot_j = (2/(q_j+q_{j+1})) (tau_{j+1}-tau_j)/h
///           - (xdot_j . thetadot_j) theta_j - beta xdot_j
/// with taudot_j = (delta xdot_j - (delta xdot_j . tau_j) tau_j)/q_j and
/// thetadot the exact derivative of the normalized tangent sum.
/// Returns (velocity, acceleration).
std::pair<PeriodicGridFunction, PeriodicGridFunction> semidiscrete_rhs(
    const SemidiscreteState& s, double beta);

/// xdot^h_j(0) = V0 theta^{h,perp}_j(0).
PeriodicGridFunction normal_initial_velocity(const PeriodicGridFunction& x0, double v0);

/// Integrates the semidiscrete system with the DP5(4) oracle to local
/// tolerance tol, emitting states at the requested sample times
/// (strictly increasing, first >= 0; time 0 is always included).
std::vector<SemidiscreteState> integrate_semidiscrete(
    const PeriodicGridFunction& x0, const PeriodicGridFunction& v0, double beta,
    double t_end, double tol, const std::vector<double>& sample_times);

/// Convenience overload: ~100 uniform samples on [0, t_end].
std::vector<SemidiscreteState> integrate_semidiscrete(
    const PeriodicGridFunction& x0, const PeriodicGridFunction& v0, double beta,
    double t_end, double tol = 1e-10);

}  // namespace hcflow
