#include "hcflow/tridiag.hpp"

#include <cmath>

namespace hcflow {

namespace {
constexpr double pivot_floor = 1e-280;
}

CyclicTridiagonalSolver::CyclicTridiagonalSolver(const CyclicTridiagonalSystem& sys) {
    n_ = sys.size();
    if (n_ < 4 || sys.lower.size() != n_ || sys.upper.size() != n_) {
        throw ConfigError("cyclic tridiagonal system needs J >= 4 consistent bands");
    }
    for (std::size_t j = 0; j < n_; ++j) {
        if (!(sys.diag[j] > std::fabs(sys.lower[j]) + std::fabs(sys.upper[j]))) {
            throw NotDiagonallyDominant(j + 1);
        }
    }

    // A = T + u v^T with u = (gamma, 0, .., 0, upper_{n-1})^T and
    // v = (1, 0, .., 0, lower_0/gamma)^T; T is A with the two corner
    // entries removed and the (0,0), (n-1,n-1) diagonal entries adjusted.
    gamma_ = -sys.diag[0];
    corner_lower_ = sys.lower[0];
    diag_ = sys.diag;
    lower_ = sys.lower;
    upper_ = sys.upper;

    std::vector<double> t_diag = sys.diag;
    t_diag[0] -= gamma_;
    t_diag[n_ - 1] -= sys.upper[n_ - 1] * sys.lower[0] / gamma_;

    // Thomas forward elimination of T, keeping the multipliers.
    inv_pivot_.resize(n_);
    double pivot = t_diag[0];
    if (std::fabs(pivot) < pivot_floor) throw SingularSystem(1);
    inv_pivot_[0] = 1.0 / pivot;
    for (std::size_t j = 1; j < n_; ++j) {
        pivot = t_diag[j] - lower_[j] * inv_pivot_[j - 1] * upper_[j - 1];
        if (std::fabs(pivot) < pivot_floor) throw SingularSystem(j + 1);
        inv_pivot_[j] = 1.0 / pivot;
    }

    std::vector<double> u(n_, 0.0);
    u[0] = gamma_;
    u[n_ - 1] = sys.upper[n_ - 1];
    z_.resize(n_);
    thomas_solve(u, z_);
    v_dot_z_denom_ = 1.0 + z_[0] + corner_lower_ / gamma_ * z_[n_ - 1];
    if (std::fabs(v_dot_z_denom_) < pivot_floor) throw SingularSystem(n_);
}

double CyclicTridiagonalSolver::apply_row(std::size_t j, const std::vector<double>& x) const {
    return diag_[j] * x[j] + lower_[j] * x[(j + n_ - 1) % n_] +
           upper_[j] * x[(j + 1) % n_];
}

void CyclicTridiagonalSolver::thomas_solve(const std::vector<double>& rhs,
                                           std::vector<double>& out) const {
    out.resize(n_);
    out[0] = rhs[0];
    for (std::size_t j = 1; j < n_; ++j) {
        out[j] = rhs[j] - lower_[j] * inv_pivot_[j - 1] * out[j - 1];
    }
    out[n_ - 1] *= inv_pivot_[n_ - 1];
    for (std::size_t j = n_ - 1; j-- > 0;) {
        out[j] = (out[j] - upper_[j] * out[j + 1]) * inv_pivot_[j];
    }
}

std::vector<double> CyclicTridiagonalSolver::solve(const std::vector<double>& rhs) const {
    std::vector<double> x = solve_once(rhs);

    // One step of iterative refinement keeps the residual at rounding level
    // even over long runs where per-step solver noise would otherwise
    // accumulate in the geometry.
    std::vector<double> residual(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        residual[j] = rhs[j] - apply_row(j, x);
    }
    const std::vector<double> correction = solve_once(residual);
    for (std::size_t j = 0; j < n_; ++j) x[j] += correction[j];
    return x;
}

std::vector<double> CyclicTridiagonalSolver::solve_once(const std::vector<double>& rhs) const {
    std::vector<double> y;
    thomas_solve(rhs, y);
    const double v_dot_y = y[0] + corner_lower_ / gamma_ * y[n_ - 1];
    const double factor = v_dot_y / v_dot_z_denom_;
    for (std::size_t j = 0; j < n_; ++j) {
        y[j] -= factor * z_[j];
    }
    return y;
}

std::vector<double> solve_cyclic_tridiagonal(const CyclicTridiagonalSystem& sys,
                                             const std::vector<double>& rhs) {
    return CyclicTridiagonalSolver(sys).solve(rhs);
}

}  // namespace hcflow
