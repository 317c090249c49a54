#include "hcflow/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace hcflow {

std::size_t PeriodicGridFunction::check_count(std::size_t n) {
    if (n < min_grid_count) {
        throw ConfigError("grid count J must be >= 4, got " + std::to_string(n));
    }
    return n;
}

bool CurveGeometry::theta_defined_everywhere() const {
    for (const auto& th : theta) {
        if (!th) return false;
    }
    return true;
}

std::optional<std::size_t> CurveGeometry::first_undefined_theta() const {
    for (std::size_t k = 0; k < theta.size(); ++k) {
        if (!theta[k]) return k;
    }
    return std::nullopt;
}

PeriodicGridFunction backward_difference(const PeriodicGridFunction& v) {
    const std::size_t n = v.size();
    const double inv_h = static_cast<double>(n);
    PeriodicGridFunction out(n);
    out[0] = (v[0] - v[n - 1]) * inv_h;
    for (std::size_t k = 1; k < n; ++k) {
        out[k] = (v[k] - v[k - 1]) * inv_h;
    }
    return out;
}

double norm_0h(const PeriodicGridFunction& v) {
    double sum = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        sum += norm_sq(v[k]);
    }
    return std::sqrt(v.spacing() * sum);
}

double norm_1h(const PeriodicGridFunction& v) {
    const std::size_t n = v.size();
    const double inv_h = static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 d = (v[k] - v[k == 0 ? n - 1 : k - 1]) * inv_h;
        sum += norm_sq(v[k]) + norm_sq(d);
    }
    return std::sqrt(v.spacing() * sum);
}

CurveGeometry compute_geometry(const PeriodicGridFunction& x) {
    const std::size_t n = x.size();
    const double inv_h = static_cast<double>(n);

    CurveGeometry g;
    g.h = x.spacing();
    g.q.resize(n);
    g.tau.resize(n);
    g.theta.resize(n);

    double length = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 d = (x[k] - x[k == 0 ? n - 1 : k - 1]) * inv_h;
        g.q[k] = norm(d);
        length += g.h * g.q[k];
        if (g.q[k] > 0.0) {
            g.tau[k] = d / g.q[k];
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (g.q[k] <= q_floor_rel * length) {
            throw DegenerateSegment(k + 1);
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 s = g.tau[k] + g.tau[(k + 1) % n];
        const double sn = norm(s);
        if (sn < theta_min) {
            g.theta[k] = std::nullopt;
        } else {
            g.theta[k] = s / sn;
        }
    }
    return g;
}

double curvature_sup(const CurveGeometry& g) {
    const std::size_t n = g.q.size();
    const double inv_h = 1.0 / g.h;
    double sup = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 dtau = (g.tau[k] - g.tau[k == 0 ? n - 1 : k - 1]) * inv_h;
        const double value = norm(dtau) / g.q[k];
        if (value > sup) sup = value;
    }
    return sup;
}

double polygon_length(const CurveGeometry& g) {
    double sum = 0.0;
    for (double qk : g.q) sum += qk;
    return g.h * sum;
}

double discrete_energy(const CurveGeometry& g, const PeriodicGridFunction& v) {
    const std::size_t n = g.q.size();
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double q_avg = 0.5 * (g.q[k] + g.q[(k + 1) % n]);
        sum += q_avg * (norm_sq(v[k]) + 2.0);
    }
    return 0.5 * g.h * sum;
}

}  // namespace hcflow
