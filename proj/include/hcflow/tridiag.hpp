#pragma once

#include <cstddef>
#include <vector>

#include "hcflow/errors.hpp"

namespace hcflow {

/// Cyclic tridiagonal system: row j couples x_{j-1}, x_j, x_{j+1} with
/// periodic wrap, so entry (1,J) holds lower_1 and entry (J,1) holds
/// upper_J.  lower[k] multiplies x_{k-1}, upper[k] multiplies x_{k+1}
/// (0-based storage, same wrap convention as PeriodicGridFunction).
struct CyclicTridiagonalSystem {
    std::vector<double> diag;
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t size() const { return diag.size(); }
};

/// Thomas elimination plus a rank-one Sherman-Morrison correction for the
/// periodic corners.  The factorization is done once; solve() may then be
/// called for any number of right-hand sides (the flow solver reuses one
/// factorization for both coordinates).
///
/// Requires strict diagonal dominance (guaranteed for the flow by the
/// positive mass term); throws NotDiagonallyDominant otherwise, and
/// SingularSystem if a pivot underflows.
class CyclicTridiagonalSolver {
public:
    explicit CyclicTridiagonalSolver(const CyclicTridiagonalSystem& sys);

    std::vector<double> solve(const std::vector<double>& rhs) const;

private:
    std::vector<double> solve_once(const std::vector<double>& rhs) const;
    double apply_row(std::size_t j, const std::vector<double>& x) const;
    void thomas_solve(const std::vector<double>& rhs, std::vector<double>& out) const;

    std::size_t n_;
    std::vector<double> diag_, lower_, upper_;  // original bands and corners
    std::vector<double> inv_pivot_;       // 1 / eliminated diagonal
    std::vector<double> z_;               // T^{-1} u for the rank-one update
    double v_dot_z_denom_ = 1.0;          // 1 + v . z
    double gamma_ = 0.0;
    double corner_lower_ = 0.0;           // entry (1,J)
};

/// One-shot convenience wrapper.
std::vector<double> solve_cyclic_tridiagonal(const CyclicTridiagonalSystem& sys,
                                             const std::vector<double>& rhs);

}  // namespace hcflow
