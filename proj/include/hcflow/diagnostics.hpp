#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "hcflow/grid.hpp"
#include "hcflow/model.hpp"
#include "hcflow/solver.hpp"

namespace hcflow {

/// Per-step monitor values.
struct DiagnosticsRecord {
    long m = 0;
    double t = 0.0;
    double length = 0.0;    // |Gamma^m|
    double kinf = 0.0;      // K^m_inf
    double inv_kinf = 0.0;  // 1/K^m_inf
    double energy = 0.0;
    double min_q = 0.0;
};

/// Computes all monitors from x^m; the velocity entering the energy is the
/// backward difference (x^m - x^{m-1})/dt so every alive step has a record.
DiagnosticsRecord record_step(const SolverState& state);

/// One row of the convergence table.
struct ConvergenceRow {
    std::size_t grid_count = 0;
    double pos_err = 0.0;  // max_m ||x(t_m) - x^m||_{1,h}
    double vel_err = 0.0;  // max_{1<=m<=M-1} ||xdot(t_m) - (x^{m+1}-x^{m-1})/(2 dt)||_{0,h}
    std::optional<double> eoc_pos;
    std::optional<double> eoc_vel;
};

/// ln(e_coarse/e_fine) / ln(h_coarse/h_fine).
double eoc(double err_coarse, double err_fine, double h_coarse, double h_fine);

/// A time-dependent exact solution that can be sampled on the grid.
class ReferenceCurve {
public:
    virtual ~ReferenceCurve() = default;
    virtual Vec2 position(double rho, double t) const = 0;
    virtual Vec2 velocity(double rho, double t) const = 0;
    /// Largest time at which the reference is valid (extinction time or inf).
    virtual double valid_until() const = 0;
};

/// The closed-form shrinking perturbed circle (V0 = 0, beta = 0).
///
/// Caches (r, rdot) for the most recent t, since the error norms sample a
/// whole grid level at each time; do not share one instance across threads.
class ShrinkingCircleReference final : public ReferenceCurve {
public:
    explicit ShrinkingCircleReference(double r0 = 1.0, double eps = 0.1)
        : r0_(r0), eps_(eps) {}
    Vec2 position(double rho, double t) const override;
    Vec2 velocity(double rho, double t) const override;
    double valid_until() const override;

private:
    void refresh(double t) const;
    double r0_, eps_;
    mutable double cached_t_ = -1.0;
    mutable double cached_r_ = 0.0;
    mutable double cached_rdot_ = 0.0;
};

/// A complete fully discrete run: x^0 .. x^M.
struct FlowTrajectory {
    FlowParams params;
    std::vector<PeriodicGridFunction> states;

    long last_step() const { return static_cast<long>(states.size()) - 1; }
};

/// max over m = 0..M of ||x(.,t_m) - x^m||_{1,h}, sampling the reference at
/// the grid points.  Throws BeyondExtinction if the trajectory's final time
/// exceeds the reference validity.
double error_position(const ReferenceCurve& reference, const FlowTrajectory& traj);

/// max over m = 1..M-1 of ||xdot(.,t_m) - (x^{m+1}-x^{m-1})/(2 dt)||_{0,h}.
double error_velocity(const ReferenceCurve& reference, const FlowTrajectory& traj);

/// Pointwise data a consistency sampler must provide at a fixed time:
/// position, velocity, acceleration, and the continuous tangent and its
/// time derivative at that parameter.
struct ConsistencySample {
    Vec2 x;
    Vec2 xdot;
    Vec2 xddot;
    Vec2 tau;
    Vec2 tau_t;
};

using ConsistencySampler = std::function<ConsistencySample(double rho)>;

/// Fields of the two consistency residuals on a J-point grid:
///   R_j      = xddot_j + beta xdot_j - (2/(q_j+q_{j+1})) (tau_{j+1}-tau_j)/h
///            + (xdot_j . tau_t(rho_j)) tau(rho_j)
///   Rtilde_j = qdot_j + (q_{j-1}+q_j)/4 (xdot . xddot + beta |xdot|^2)_{j-1}
///            + (q_j+q_{j+1})/4 (xdot . xddot + beta |xdot|^2)_j
/// with q, tau discrete from the sampled positions and qdot_j = delta xdot_j . tau_j.
struct ConsistencyFields {
    std::vector<Vec2> r;
    std::vector<double> r_tilde;
};

ConsistencyFields consistency_residual_fields(const ConsistencySampler& sampler,
                                              std::size_t grid_count, double beta);

struct ConsistencyResiduals {
    double max_r = 0.0;
    double max_r_tilde = 0.0;
};

/// Max norms of the residual fields.
ConsistencyResiduals consistency_residuals(const ConsistencySampler& sampler,
                                           std::size_t grid_count, double beta);

/// Sampler for the shrinking perturbed circle at a fixed time t.
ConsistencySampler solxpi_sampler(double r0, double eps, double t);

/// Sampler for a stationary circle (xdot = xddot = 0); its residual R is
/// minus the discrete curvature vector, |R| -> 1/r0: a stationary circle
/// does not solve the flow.
ConsistencySampler stationary_circle_sampler(double r0);

}  // namespace hcflow
