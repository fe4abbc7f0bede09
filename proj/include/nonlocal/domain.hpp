#ifndef NONLOCAL_DOMAIN_HPP
#define NONLOCAL_DOMAIN_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nonlocal/vec.hpp"

namespace nonlocal {

enum class PointClass { kInterior, kBoundaryProximal, kExterior };

// One boundary sample: point x on the boundary with inward unit normal n.
// The exterior tangent ball of radius r is centered at x - r n.
struct BoundarySample {
    Vec x;
    Vec inward_normal;
    Vec exterior_center(double r) const { return x - r * inward_normal; }
};

// Bounded open set with a uniform exterior-ball radius. Geometry is held as
// an indicator plus boundary samples; concrete factories cover balls,
// intervals and CSV point clouds.
struct Domain {
    int dim = 1;
    std::function<bool(const Vec&)> inside;          // open-set membership
    std::function<double(const Vec&)> boundary_dist; // distance to the boundary (>=0)
    double r_Omega = 0.5;                            // uniform exterior-ball radius, < 1
    double R0 = 1.0;                                 // Omega within {|y_1| < R0}
    double R1 = 2.0;                                 // Omega within B_{R1 - 1}
    std::vector<BoundarySample> boundary_samples;
    std::string label;

    PointClass classify(const Vec& y, double collar) const {
        if (!inside(y)) return PointClass::kExterior;
        return boundary_dist(y) <= collar ? PointClass::kBoundaryProximal : PointClass::kInterior;
    }

    void validate() const {
        if (!(r_Omega > 0.0 && r_Omega < 1.0))
            throw std::invalid_argument("Domain: r_Omega must lie in (0,1)");
        if (boundary_samples.empty()) throw std::invalid_argument("Domain: no boundary samples");
    }
};

// Omega = B_radius(center). Exterior tangent balls of every radius exist.
inline Domain make_ball_domain(const Vec& center, double radius, double r_omega,
                               int n_boundary_samples) {
    if (!(radius > 0.0)) throw std::invalid_argument("make_ball_domain: radius must be positive");
    Domain d;
    d.dim = center.dim();
    d.label = "ball";
    d.r_Omega = r_omega;
    d.inside = [center, radius](const Vec& y) { return norm(y - center) < radius; };
    d.boundary_dist = [center, radius](const Vec& y) {
        return std::fabs(radius - norm(y - center));
    };
    double c1 = std::fabs(center[0]);
    d.R0 = c1 + radius + 0.5;
    d.R1 = norm(center) + radius + 1.5;
    const int m = std::max(d.dim == 1 ? 2 : 8, n_boundary_samples);
    if (d.dim == 1) {
        BoundarySample a, b;
        a.x = Vec{center[0] - radius};
        a.inward_normal = Vec{1.0};
        b.x = Vec{center[0] + radius};
        b.inward_normal = Vec{-1.0};
        d.boundary_samples = {a, b};
    } else if (d.dim == 2) {
        for (int j = 0; j < m; ++j) {
            const double th = j * 2.0 * M_PI / m;
            const Vec out{std::cos(th), std::sin(th)};
            BoundarySample s;
            s.x = center + radius * out;
            s.inward_normal = -out;
            d.boundary_samples.push_back(s);
        }
    } else {
        // latitude rings
        const int rings = std::max(3, m / 6);
        for (int i = 1; i < rings; ++i) {
            const double th = i * M_PI / rings;
            const int mph = std::max(4, static_cast<int>(std::lround(m * std::sin(th))));
            for (int j = 0; j < mph; ++j) {
                const double ph = j * 2.0 * M_PI / mph;
                const Vec out{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                              std::cos(th)};
                BoundarySample s;
                s.x = center + radius * out;
                s.inward_normal = -out;
                d.boundary_samples.push_back(s);
            }
        }
    }
    return d;
}

// Omega = (a, b) on the line.
inline Domain make_interval_domain(double a, double b, double r_omega) {
    if (!(a < b)) throw std::invalid_argument("make_interval_domain: need a < b");
    Domain d;
    d.dim = 1;
    d.label = "interval";
    d.r_Omega = r_omega;
    d.inside = [a, b](const Vec& y) { return y[0] > a && y[0] < b; };
    d.boundary_dist = [a, b](const Vec& y) {
        return std::min(std::fabs(y[0] - a), std::fabs(y[0] - b));
    };
    d.R0 = std::max(std::fabs(a), std::fabs(b)) + 0.5;
    d.R1 = d.R0 + 1.5;
    BoundarySample sa, sb;
    sa.x = Vec{a};
    sa.inward_normal = Vec{1.0};
    sb.x = Vec{b};
    sb.inward_normal = Vec{-1.0};
    d.boundary_samples = {sa, sb};
    return d;
}

// Exterior-ball verification on a point cloud: for each sample and radius,
// no cloud point inside Omega may lie in the open tangent ball.
struct ExteriorBallCheck {
    bool pass = true;
    std::size_t violations = 0;
    double worst_penetration = 0.0;  // how deep a domain point entered a tangent ball
};

inline ExteriorBallCheck verify_exterior_balls(const Domain& d, const std::vector<Vec>& cloud,
                                               const std::vector<double>& radii) {
    ExteriorBallCheck out;
    for (const auto& s : d.boundary_samples) {
        for (double r : radii) {
            if (!(r > 0.0 && r <= d.r_Omega)) continue;
            const Vec c = s.exterior_center(r);
            for (const Vec& y : cloud) {
                if (!d.inside(y)) continue;
                const double pen = r - norm(y - c);
                if (pen > 1e-12 * std::max(1.0, r)) {
                    out.pass = false;
                    ++out.violations;
                    out.worst_penetration = std::max(out.worst_penetration, pen);
                }
            }
        }
    }
    return out;
}

}  // namespace nonlocal

#endif  // NONLOCAL_DOMAIN_HPP
