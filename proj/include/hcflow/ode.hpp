#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "hcflow/errors.hpp"

namespace hcflow {

/// Options for the embedded Dormand-Prince 5(4) integrator.
struct OdeOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    double max_dt = std::numeric_limits<double>::infinity();
    double initial_dt = 0.0;  // 0 = choose automatically
};

/// dy/dt = f(t, y); f writes into dydt (same size as y).
using OdeRhs = std::function<void(double t, const std::vector<double>& y,
                                  std::vector<double>& dydt)>;

/// Called after each accepted step; return false to stop the integration.
using OdeObserver = std::function<bool(double t, const std::vector<double>& y)>;

/// Adaptive Dormand-Prince 5(4) with PI step-size control and FSAL.
///
/// Keeps its step-size state between advance() calls so a trajectory can be
/// driven segment by segment (for dense output at sample times) without
/// restarting the controller.  Throws StepSizeUnderflow when no acceptable
/// step can be found.
class Dp54Integrator {
public:
    Dp54Integrator(OdeRhs rhs, OdeOptions options = {});

    /// Advance y in place from t to t_target (t_target > t), landing on
    /// t_target exactly.  The observer sees every accepted step.
    void advance(std::vector<double>& y, double& t, double t_target,
                 const OdeObserver& observer = nullptr);

    double suggested_dt() const { return dt_; }

private:
    double error_norm(const std::vector<double>& y, const std::vector<double>& y_new,
                      const std::vector<double>& err) const;

    OdeRhs rhs_;
    OdeOptions opts_;
    double dt_ = 0.0;
    double err_prev_ = 1.0;
    bool have_k1_ = false;
    std::vector<double> k_[7];
    std::vector<double> y_tmp_, y_new_, y_err_;
};

}  // namespace hcflow
