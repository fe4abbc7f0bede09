#ifndef NONLOCAL_KERNEL_CHECKS_HPP
#define NONLOCAL_KERNEL_CHECKS_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "nonlocal/domain.hpp"
#include "nonlocal/kernels.hpp"
#include "nonlocal/quadrature.hpp"
#include "nonlocal/vec.hpp"

namespace nonlocal {

// Numerical certificate for one annulus B_{2delta} \ B_delta:
// (H1) mass <= (2-sigma) Lambda delta^{-sigma},
// (H2) |first moment| <= Lambda |1-sigma| delta^{1-sigma},
// (H3) a symmetric subset of measure fraction >= mu carries the pointwise
//      lower bound (2-sigma) lambda delta^{-n-sigma}.
struct AnnulusReport {
    double delta = 0.0;
    double mass = 0.0;
    double mass_bound = 0.0;
    double first_moment = 0.0;
    double moment_bound = 0.0;
    double lower_set_fraction = 0.0;
    double fraction_stderr = 0.0;
    double quad_tol = 0.0;
    bool integrable = true;
    bool pass_H1 = false;
    bool pass_H2 = false;
    bool pass_H3 = false;
};

// Boundary-cone certificate: kernel mass over the inward-degenerate cone
// annulus versus the implied lower bound (2-sigma) lambda (rs)^{-n-sigma} mu |B_rs|.
struct ConeReport {
    Vec x;          // boundary point
    double r = 0.0; // exterior-ball radius
    Vec y;          // probe in Omega near the ball
    double s = 0.0; // |y - y^r|/r - 1
    double cone_mass = 0.0;
    double required_mass = 0.0;
    bool pass = false;
    bool skipped = false;  // probe below the s floor
    std::string note;
};

struct LowerSetGrid {
    int radial = 24;
    int angular = 64;
};

// Measure fraction of the symmetric subset of {K >= (2-sigma) lambda delta^{-n-sigma}}
// inside B_{2delta} \ B_delta, estimated on a polar sampling grid (the
// super-level set intersected with its reflection). The standard error is the
// binomial proxy for the measure-weighted cell count.
inline AnnulusReport find_symmetric_lower_set(const Kernel& K, const Vec& x, double delta,
                                              const LowerSetGrid& grid = {},
                                              double lambda_override = 0.0) {
    if (!(delta > 0.0)) throw std::invalid_argument("find_symmetric_lower_set: delta > 0 required");
    const int dim = K.dim;
    const double lambda = lambda_override > 0.0 ? lambda_override : K.params.lambda;
    const double threshold =
        (2.0 - K.params.sigma) * lambda *
        std::pow(delta, -(static_cast<double>(dim) + K.params.sigma));

    AnnulusReport rep;
    rep.delta = delta;

    const quad::DirectionSet ds = quad::make_directions(dim, grid.angular);
    // stratified polar cells: radial bins equal in r^n (equal measure per bin)
    const int nr = std::max(4, grid.radial);
    double hit = 0.0, total = 0.0;
    std::size_t cells = 0;
    for (int ir = 0; ir < nr; ++ir) {
        // bin midpoint in the measure coordinate t = r^n
        const double t0 = std::pow(delta, dim), t1 = std::pow(2.0 * delta, dim);
        const double t = t0 + (ir + 0.5) * (t1 - t0) / nr;
        const double r = std::pow(t, 1.0 / dim);
        const double wbin = (t1 - t0) / nr;  // proportional cell measure
        for (std::size_t id = 0; id < ds.dirs.size(); ++id) {
            const Vec z = r * ds.dirs[id];
            const double w = wbin * ds.weights[id];
            const bool both = K(x, z) >= threshold && K(x, -z) >= threshold;
            total += 2.0 * w;
            if (both) hit += 2.0 * w;
            ++cells;
        }
    }
    rep.lower_set_fraction = total > 0.0 ? hit / total : 0.0;
    const double p = rep.lower_set_fraction;
    rep.fraction_stderr = cells > 0 ? std::sqrt(std::max(0.0, p * (1.0 - p)) /
                                                static_cast<double>(2 * cells))
                                    : 0.0;
    rep.pass_H3 = rep.lower_set_fraction + rep.fraction_stderr >= K.params.mu - 1e-9;
    return rep;
}

// Mass, first moment and lower-set fraction per annulus, with pass flags.
inline std::vector<AnnulusReport> check_annulus_bounds(const Kernel& K, const Vec& x,
                                                       const std::vector<double>& deltas,
                                                       const QuadratureParams& q = {},
                                                       const LowerSetGrid& grid = {}) {
    const EllipticityParams& ep = K.params;
    const int dim = K.dim;
    std::vector<AnnulusReport> out;
    out.reserve(deltas.size());
    for (double delta : deltas) {
        if (!(delta > 0.0)) throw std::invalid_argument("check_annulus_bounds: deltas must be > 0");
        AnnulusReport rep = find_symmetric_lower_set(K, x, delta, grid);
        rep.mass_bound = (2.0 - ep.sigma) * ep.Lambda * std::pow(delta, -ep.sigma);
        rep.moment_bound = ep.Lambda * std::fabs(1.0 - ep.sigma) * std::pow(delta, 1.0 - ep.sigma);
        double mass = 0.0;
        Vec moment(dim);
        bool finite = true;
        try {
            mass = quad::annulus_integral(dim, delta, 2.0 * delta, q,
                                          [&](const Vec& z) { return K(x, z); });
            for (int i = 0; i < dim; ++i)
                moment[i] = quad::annulus_integral(dim, delta, 2.0 * delta, q,
                                                   [&](const Vec& z) { return z[i] * K(x, z); });
            if (!std::isfinite(mass) || !std::isfinite(norm(moment))) finite = false;
        } catch (const std::exception&) {
            finite = false;
        }
        rep.integrable = finite;
        rep.mass = mass;
        rep.first_moment = norm(moment);
        rep.quad_tol = 1e-8 * std::max(1.0, rep.mass_bound);
        rep.pass_H1 = finite && rep.mass <= rep.mass_bound + rep.quad_tol;
        rep.pass_H2 = finite && rep.first_moment <= rep.moment_bound + rep.quad_tol;
        out.push_back(rep);
    }
    return out;
}

// Default certification range: dyadic annuli spanning [h, R].
inline std::vector<double> dyadic_deltas(double h, double R, int count = 16) {
    if (!(h > 0.0 && R > h)) throw std::invalid_argument("dyadic_deltas: need 0 < h < R");
    std::vector<double> out;
    const double ratio = std::pow(R / h, 1.0 / std::max(1, count - 1));
    for (int k = 0; k < count; ++k) out.push_back(h * std::pow(ratio, k));
    return out;
}

// Largest measured (H1) constant over a delta range: mass * delta^sigma / (2-sigma).
// Used to make tail bounds sound for kernels whose declared Lambda is the
// pointwise amplitude rather than the integral constant.
inline double effective_H1_Lambda(const Kernel& K, const Vec& x, const std::vector<double>& deltas,
                                  const QuadratureParams& q = {}) {
    double lam = 0.0;
    for (double delta : deltas) {
        const double mass = quad::annulus_integral(K.dim, delta, 2.0 * delta, q,
                                                   [&](const Vec& z) { return K(x, z); });
        lam = std::max(lam, mass * std::pow(delta, K.params.sigma) / (2.0 - K.params.sigma));
    }
    return lam * 1.05;  // headroom for quadrature of the worst annulus
}

// Kernel mass over the cone-annulus {z . n_y^r < -r s} cap (B_{C4 r s} \ B_{r s})
// versus the implied lower bound (2-sigma) lambda (rs)^{-n-sigma} mu |B_{rs}|.
inline ConeReport check_boundary_cone(const Kernel& K, const Domain& domain, const Vec& x,
                                      double r, const Vec& y, double C4,
                                      const QuadratureParams& q = {}, double s_min = 1e-3,
                                      double lambda_override = 0.0, double mu_override = 0.0) {
    ConeReport rep;
    rep.x = x;
    rep.r = r;
    rep.y = y;
    if (!(C4 > 1.0)) throw std::invalid_argument("check_boundary_cone: C4 must exceed 1");

    // locate the exterior center for this boundary point
    const BoundarySample* smp = nullptr;
    for (const auto& s : domain.boundary_samples)
        if (norm(s.x - x) <= 1e-9 * std::max(1.0, norm(x))) smp = &s;
    if (!smp) throw std::invalid_argument("check_boundary_cone: x is not a boundary sample");
    const Vec yc = smp->exterior_center(r);

    if (!domain.inside(y) || norm(y - yc) >= 2.0 * r)
        throw std::invalid_argument("check_boundary_cone: probe must lie in Omega within B_2r(y^r)");

    const Vec dy = y - yc;
    const double dist = norm(dy);
    rep.s = dist / r - 1.0;
    if (rep.s < s_min) {
        rep.skipped = true;
        rep.note = "probe below the s floor (" + std::to_string(s_min) + "); not assessed";
        return rep;
    }
    const Vec n_y = (1.0 / dist) * dy;
    const double rs = r * rep.s;
    const int dim = K.dim;

    QuadratureParams qc = q;
    qc.angular_nodes = std::max(q.angular_nodes, 64);
    qc.radial_nodes = std::max(q.radial_nodes, 8);
    rep.cone_mass = quad::annulus_integral(dim, rs, C4 * rs, qc, [&](const Vec& z) {
        return dot(z, n_y) < -rs ? K(y, z) : 0.0;
    });

    const double lambda = lambda_override > 0.0 ? lambda_override : K.params.lambda;
    const double mu = mu_override > 0.0 ? mu_override : K.params.mu;
    rep.required_mass = (2.0 - K.params.sigma) * lambda *
                        std::pow(rs, -(static_cast<double>(dim) + K.params.sigma)) * mu *
                        unit_ball_volume(dim) * std::pow(rs, dim);
    rep.pass = rep.cone_mass >= rep.required_mass * (1.0 - 1e-6);
    return rep;
}

// Smallest C4 in {2,4,8,...} for which the slab fraction
// |annulus cap {|z.n| <= rs}| / |annulus| drops below mu/2, the geometric step
// that turns a symmetric annular lower set into a boundary cone.
inline double sufficient_C4(int dim, double mu) {
    auto slab_fraction = [&](double c4) {
        // fraction of B_{c4} \ B_{c4/2} lying in {|z_1| <= 1}; rotation invariant
        if (dim == 1) return c4 / 2.0 > 1.0 ? 0.0 : 1.0;
        const int nr = 400, na = 400;
        double hit = 0.0, tot = 0.0;
        for (int ir = 0; ir < nr; ++ir) {
            const double t0 = std::pow(c4 / 2.0, dim), t1 = std::pow(c4, dim);
            const double t = t0 + (ir + 0.5) * (t1 - t0) / nr;
            const double rr = std::pow(t, 1.0 / dim);
            for (int ia = 0; ia < na; ++ia) {
                double z1;
                if (dim == 2) {
                    const double th = (ia + 0.5) * M_PI / na;  // half circle, symmetric
                    z1 = rr * std::cos(th);
                    const double w = 1.0;
                    tot += w;
                    if (std::fabs(z1) <= 1.0) hit += w;
                    continue;
                }
                const double u = -1.0 + (ia + 0.5) * 2.0 / na;  // cos(theta), uniform measure
                z1 = rr * u;
                tot += 1.0;
                if (std::fabs(z1) <= 1.0) hit += 1.0;
            }
        }
        return hit / tot;
    };
    for (double c4 = 2.0; c4 <= 4096.0; c4 *= 2.0)
        if (slab_fraction(c4) < 0.5 * mu) return c4;
    throw std::runtime_error("sufficient_C4: no C4 up to 4096 worked");
}

}  // namespace nonlocal

#endif  // NONLOCAL_KERNEL_CHECKS_HPP
