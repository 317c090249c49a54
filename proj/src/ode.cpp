#include "hcflow/ode.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace hcflow {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
// 5th-order weights (also the last stage: FSAL).
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Difference to the embedded 4th-order weights.
constexpr double e1 = b1 - 5179.0 / 57600;
constexpr double e3 = b3 - 7571.0 / 16695;
constexpr double e4 = b4 - 393.0 / 640;
constexpr double e5 = b5 + 92097.0 / 339200;
constexpr double e6 = b6 - 187.0 / 2100;
constexpr double e7 = -1.0 / 40;

constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9, safety = 0.9;
// PI controller exponents for a 5th-order pair.
constexpr double pi_alpha = 0.7 / 5.0, pi_beta = 0.4 / 5.0;

}  // namespace

Dp54Integrator::Dp54Integrator(OdeRhs rhs, OdeOptions options)
    : rhs_(std::move(rhs)), opts_(options) {}

double Dp54Integrator::error_norm(const std::vector<double>& y,
                                  const std::vector<double>& y_new,
                                  const std::vector<double>& err) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double scale =
            opts_.abs_tol + opts_.rel_tol * std::max(std::fabs(y[i]), std::fabs(y_new[i]));
        const double r = err[i] / scale;
        sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(y.size()));
}

void Dp54Integrator::advance(std::vector<double>& y, double& t, double t_target,
                             const OdeObserver& observer) {
    const std::size_t n = y.size();
    for (auto& k : k_) k.resize(n);
    y_tmp_.resize(n);
    y_new_.resize(n);
    y_err_.resize(n);

    if (!have_k1_) {
        rhs_(t, y, k_[0]);
        have_k1_ = true;
    }
    if (dt_ <= 0.0) {
        dt_ = std::min({opts_.max_dt, (t_target - t),
                        std::max(1e-6 * std::max(std::fabs(t_target), 1.0), 1e-12)});
    }

    while (t < t_target) {
        double dt = std::min(dt_, opts_.max_dt);
        // Land on t_target exactly; without the snap, rounding in t += dt can
        // leave a one-ulp gap that masquerades as step-size underflow.
        bool landing = false;
        if (dt >= (t_target - t) * (1.0 - 1e-12)) {
            dt = t_target - t;
            landing = true;
        }
        bool accepted = false;
        while (!accepted) {
            if (!(dt > std::fabs(t) * 1e-14 + 1e-300) || !(t + dt > t)) {
                throw StepSizeUnderflow(t);
            }
            for (std::size_t i = 0; i < n; ++i)
                y_tmp_[i] = y[i] + dt * a21 * k_[0][i];
            rhs_(t + c2 * dt, y_tmp_, k_[1]);
            for (std::size_t i = 0; i < n; ++i)
                y_tmp_[i] = y[i] + dt * (a31 * k_[0][i] + a32 * k_[1][i]);
            rhs_(t + c3 * dt, y_tmp_, k_[2]);
            for (std::size_t i = 0; i < n; ++i)
                y_tmp_[i] = y[i] + dt * (a41 * k_[0][i] + a42 * k_[1][i] + a43 * k_[2][i]);
            rhs_(t + c4 * dt, y_tmp_, k_[3]);
            for (std::size_t i = 0; i < n; ++i)
                y_tmp_[i] = y[i] + dt * (a51 * k_[0][i] + a52 * k_[1][i] + a53 * k_[2][i] +
                                         a54 * k_[3][i]);
            rhs_(t + c5 * dt, y_tmp_, k_[4]);
            for (std::size_t i = 0; i < n; ++i)
                y_tmp_[i] = y[i] + dt * (a61 * k_[0][i] + a62 * k_[1][i] + a63 * k_[2][i] +
                                         a64 * k_[3][i] + a65 * k_[4][i]);
            rhs_(t + dt, y_tmp_, k_[5]);
            for (std::size_t i = 0; i < n; ++i)
                y_new_[i] = y[i] + dt * (b1 * k_[0][i] + b3 * k_[2][i] + b4 * k_[3][i] +
                                         b5 * k_[4][i] + b6 * k_[5][i]);
            rhs_(t + dt, y_new_, k_[6]);
            for (std::size_t i = 0; i < n; ++i)
                y_err_[i] = dt * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] +
                                  e5 * k_[4][i] + e6 * k_[5][i] + e7 * k_[6][i]);

            const double err = std::max(error_norm(y, y_new_, y_err_), 1e-30);
            if (err <= 1.0) {
                accepted = true;
                t = landing ? t_target : t + dt;
                y.swap(y_new_);
                k_[0].swap(k_[6]);  // FSAL
                const double factor =
                    std::clamp(safety * std::pow(err, -pi_alpha) * std::pow(err_prev_, pi_beta),
                               0.2, 5.0);
                err_prev_ = err;
                dt_ = dt * factor;
                if (observer && !observer(t, y)) return;
            } else {
                landing = false;
                const double shrink = safety * std::pow(err, -pi_alpha);
                dt *= std::isfinite(shrink) ? std::clamp(shrink, 0.1, 0.9) : 0.1;
            }
        }
    }
}

}  // namespace hcflow
