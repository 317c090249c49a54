#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hcflow/errors.hpp"
#include "hcflow/vec2.hpp"

namespace hcflow {

/// J planar values on the uniform periodic grid rho_j = j*h, h = 1/J.
///
/// Values are stored flat; entry k (0-based) holds v_{k+1} of the 1-based
/// grid convention, and all index arithmetic wraps (v_0 = v_J,
/// v_{J+1} = v_1).  J >= 4 is required so the cyclic tridiagonal systems
/// of the solver stay uniform.
class PeriodicGridFunction {
public:
    static constexpr std::size_t min_grid_count = 4;

    explicit PeriodicGridFunction(std::size_t grid_count)
        : values_(check_count(grid_count)) {}
    PeriodicGridFunction(std::size_t grid_count, Vec2 fill)
        : values_(check_count(grid_count), fill) {}
    explicit PeriodicGridFunction(std::vector<Vec2> values)
        : values_(std::move(values)) { check_count(values_.size()); }

    std::size_t size() const { return values_.size(); }
    double spacing() const { return 1.0 / static_cast<double>(values_.size()); }

    Vec2& operator[](std::size_t k) { return values_[k]; }
    const Vec2& operator[](std::size_t k) const { return values_[k]; }

    /// Periodic access for any signed offset arithmetic.
    const Vec2& wrap(std::ptrdiff_t k) const {
        const auto n = static_cast<std::ptrdiff_t>(values_.size());
        return values_[static_cast<std::size_t>(((k % n) + n) % n)];
    }

    const std::vector<Vec2>& values() const { return values_; }
    std::vector<Vec2>& values() { return values_; }

    bool operator==(const PeriodicGridFunction&) const = default;

private:
    static std::size_t check_count(std::size_t n);
    std::vector<Vec2> values_;
};

/// Derived discrete geometry of a closed polygon: length elements
/// q_j = |delta x_j|, segment tangents tau_j, and averaged vertex
/// tangents theta_j (undefined where |tau_j + tau_{j+1}| < theta_min).
struct CurveGeometry {
    std::vector<double> q;
    std::vector<Vec2> tau;
    std::vector<std::optional<Vec2>> theta;
    double h = 0.0;

    std::size_t size() const { return q.size(); }

    /// Entry k holds the quantity at 1-based index j = k+1.
    const std::optional<Vec2>& theta_at(std::size_t k) const { return theta[k]; }
    bool theta_defined_everywhere() const;
    /// Index of the first undefined theta, if any.
    std::optional<std::size_t> first_undefined_theta() const;
};

/// Definedness threshold for theta: below this |tau_j + tau_{j+1}| the
/// averaged vertex tangent is marked undefined and stepping aborts.
inline constexpr double theta_min = 1e-8;

/// Practical degeneracy floor: q_j <= q_floor_rel * polygon_length signals
/// vertex collision rather than rounding.
inline constexpr double q_floor_rel = 1e-14;

/// Backward difference quotient, (v_j - v_{j-1})/h with periodic wrap.
PeriodicGridFunction backward_difference(const PeriodicGridFunction& v);

/// ( h sum |v_j|^2 )^{1/2}
double norm_0h(const PeriodicGridFunction& v);

/// ( h sum (|v_j|^2 + |delta v_j|^2) )^{1/2}
double norm_1h(const PeriodicGridFunction& v);

/// Length elements, tangents and averaged vertex tangents of the polygon.
/// Throws DegenerateSegment if some q_j falls below the practical floor.
CurveGeometry compute_geometry(const PeriodicGridFunction& x);

/// K_inf = max_j |delta tau_j| / q_j, the discrete proxy for max |kappa|.
double curvature_sup(const CurveGeometry& g);

/// |Gamma| = h sum q_j = sum of chord lengths.
double polygon_length(const CurveGeometry& g);

/// (1/2) h sum (q_j + q_{j+1})/2 * (|v_j|^2 + 2), the discrete energy.
double discrete_energy(const CurveGeometry& g, const PeriodicGridFunction& v);

}  // namespace hcflow
