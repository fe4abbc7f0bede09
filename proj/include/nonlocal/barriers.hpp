#ifndef NONLOCAL_BARRIERS_HPP
#define NONLOCAL_BARRIERS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nonlocal/domain.hpp"
#include "nonlocal/fields.hpp"
#include "nonlocal/grid.hpp"
#include "nonlocal/kernel_checks.hpp"
#include "nonlocal/operators.hpp"

namespace nonlocal {

// Certification record for one barrier inequality. `epsilon` is the certified
// rate constant of the barrier at hand (eps5 for the half-space decay, eps6/7
// for the boundary bump, eps8 for the degenerate cone barrier); for the radial
// barrier it is the certified depth below zero (>= 1 on pass).
struct BarrierReport {
    std::string kind;
    bool pass = false;
    double alpha = 0.0;
    double r0 = 0.0;
    double s0 = 0.0;
    double epsilon = 0.0;
    double expected_epsilon = 0.0;
    double worst_slack = 0.0;
    std::size_t probes = 0;
    std::string note;
};

// v_alpha(x) = ((x_1 - 1)^+)^alpha
inline AnalyticField half_space_barrier(double alpha, int dim = 1) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("half_space_barrier: alpha must lie in (0,1)");
    auto f = [alpha](const Vec& y) {
        const double t = y[0] - 1.0;
        return t > 0.0 ? std::pow(t, alpha) : 0.0;
    };
    auto grad = [alpha, dim](const Vec& y) {
        Vec g(dim);
        const double t = y[0] - 1.0;
        if (t > 0.0) g[0] = alpha * std::pow(t, alpha - 1.0);
        return g;
    };
    return AnalyticField(f, grad, quad::Growth{0.0, 1.0, alpha});
}

// u_alpha(x) = ((|x| - 1)^+)^alpha
inline AnalyticField radial_barrier(double alpha, int dim = 1) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("radial_barrier: alpha must lie in (0,1)");
    auto f = [alpha](const Vec& y) {
        const double t = norm(y) - 1.0;
        return t > 0.0 ? std::pow(t, alpha) : 0.0;
    };
    auto grad = [alpha, dim](const Vec& y) {
        Vec g(dim);
        const double r = norm(y);
        const double t = r - 1.0;
        if (t > 0.0 && r > 0.0) {
            const double m = alpha * std::pow(t, alpha - 1.0) / r;
            for (int i = 0; i < dim; ++i) g[i] = m * y[i];
        }
        return g;
    };
    return AnalyticField(f, grad, quad::Growth{0.0, 1.0, alpha});
}

// u_alpha^r(y) = (( |y - y^r| / r - 1 )^+)^alpha
inline AnalyticField radial_barrier_scaled(double alpha, const Vec& center, double r) {
    if (!(alpha > 0.0 && alpha < 1.0) || !(r > 0.0))
        throw std::invalid_argument("radial_barrier_scaled: invalid alpha or r");
    const int dim = center.dim();
    auto f = [alpha, center, r](const Vec& y) {
        const double t = norm(y - center) / r - 1.0;
        return t > 0.0 ? std::pow(t, alpha) : 0.0;
    };
    auto grad = [alpha, center, r, dim](const Vec& y) {
        Vec g(dim);
        const Vec d = y - center;
        const double rr = norm(d);
        const double t = rr / r - 1.0;
        if (t > 0.0 && rr > 0.0) {
            const double m = alpha * std::pow(t, alpha - 1.0) / (r * rr);
            for (int i = 0; i < dim; ++i) g[i] = m * d[i];
        }
        return g;
    };
    const double cn = norm(center);
    quad::Growth gw{std::pow(2.0 * std::max(1.0, cn) / r, alpha),
                    std::pow(2.0 / r, alpha), alpha};
    return AnalyticField(f, grad, gw);
}

// v_alpha^r(y) = (( (y - y^r).n / r - 1 )^+)^alpha with the sample's fixed n
inline AnalyticField halfspace_barrier_scaled(double alpha, const Vec& center, const Vec& n,
                                              double r) {
    if (!(alpha > 0.0 && alpha < 1.0) || !(r > 0.0))
        throw std::invalid_argument("halfspace_barrier_scaled: invalid alpha or r");
    const int dim = center.dim();
    auto f = [alpha, center, n, r](const Vec& y) {
        const double t = dot(y - center, n) / r - 1.0;
        return t > 0.0 ? std::pow(t, alpha) : 0.0;
    };
    auto grad = [alpha, center, n, r, dim](const Vec& y) {
        Vec g(dim);
        const double t = dot(y - center, n) / r - 1.0;
        if (t > 0.0) {
            const double m = alpha * std::pow(t, alpha - 1.0) / r;
            for (int i = 0; i < dim; ++i) g[i] = m * n[i];
        }
        return g;
    };
    const double cn = norm(center);
    quad::Growth gw{std::pow(2.0 * std::max(1.0, cn) / r, alpha),
                    std::pow(2.0 / r, alpha), alpha};
    return AnalyticField(f, grad, gw);
}

namespace detail {

// per-probe quadrature tuned to a barrier probe at kink distance `d`
inline QuadratureParams probe_quadrature(const QuadratureParams& base, double d,
                                         std::vector<double> breakpoints, double R_scale) {
    QuadratureParams q = base;
    q.inner_radius = d / 8.0;
    q.truncation = std::max(base.truncation, R_scale);
    q.radial_breakpoints = std::move(breakpoints);
    return q;
}

}  // namespace detail

// Largest tested alpha with M^+ v_alpha((1+r)e_1) <= -eps r^{alpha-sigma} at
// every r in the grid; eps5 is half the worst certified margin.
inline BarrierReport certify_halfspace_decay(const std::vector<Kernel>& family,
                                             const std::vector<double>& alpha_grid,
                                             const std::vector<double>& r_grid,
                                             const QuadratureParams& q) {
    if (family.empty()) throw std::invalid_argument("certify_halfspace_decay: empty family");
    const int dim = family[0].dim;
    const double sigma = family[0].params.sigma;

    std::vector<double> alphas = alpha_grid;
    std::sort(alphas.rbegin(), alphas.rend());  // largest first

    BarrierReport rep;
    rep.kind = "halfspace_decay";
    for (double alpha : alphas) {
        if (!(alpha > 0.0 && alpha < 1.0)) continue;
        double worst = std::numeric_limits<double>::infinity();
        bool feasible = true;
        for (double r : r_grid) {
            const Vec probe = (1.0 + r) * unit(dim, 0);
            const QuadratureParams qp = detail::probe_quadrature(
                q, r, {r}, 1.0e4 * std::max(1.0, r));
            double val;
            try {
                const AnalyticField v = half_space_barrier(alpha, dim);
                const OpValue m = extremal_plus(family, v, probe, qp);
                val = m.value + m.tail_up;
            } catch (const std::domain_error&) {
                feasible = false;  // growth at or above the order: integral diverges
                break;
            }
            const double margin = -val / std::pow(r, alpha - sigma);
            worst = std::min(worst, margin);
            if (!(margin > 0.0)) {
                feasible = false;
                break;
            }
        }
        if (feasible && worst > 0.0) {
            rep.pass = true;
            rep.alpha = alpha;
            rep.epsilon = 0.5 * worst;
            rep.worst_slack = worst;
            rep.probes = r_grid.size();
            return rep;
        }
    }
    rep.note = "no alpha in the grid certified the decay; family too degenerate or grid too coarse";
    return rep;
}

// Validity range r0 of M^+ u_alpha((1+r)e_1) + C0 |grad u_alpha| <= -1;
// epsilon is the certified depth (>= 1 on pass) over the validated prefix.
inline BarrierReport certify_radial_barrier(const std::vector<Kernel>& family, double alpha,
                                            double C0, const std::vector<double>& r_grid,
                                            const QuadratureParams& q) {
    if (family.empty()) throw std::invalid_argument("certify_radial_barrier: empty family");
    const int dim = family[0].dim;
    std::vector<double> rs = r_grid;
    std::sort(rs.begin(), rs.end());

    BarrierReport rep;
    rep.kind = "radial_barrier";
    rep.alpha = alpha;
    double depth = std::numeric_limits<double>::infinity();
    const AnalyticField u = radial_barrier(alpha, dim);
    for (double r : rs) {
        const Vec probe = (1.0 + r) * unit(dim, 0);
        const QuadratureParams qp = detail::probe_quadrature(
            q, r, {r, 2.0 + r}, 1.0e4 * std::max(1.0, r));
        const OpValue m = extremal_plus(family, u, probe, qp);
        const double total = m.value + m.tail_up + C0 * norm(u.gradient(probe, r / 16.0));
        if (total <= -1.0) {
            rep.r0 = r;
            depth = std::min(depth, -total);
            ++rep.probes;
        } else {
            break;  // validity is a prefix in r
        }
    }
    rep.pass = rep.probes > 0;
    if (rep.pass) {
        rep.epsilon = depth;
        rep.worst_slack = depth - 1.0;
    } else {
        rep.note = "no r in the grid satisfied the unit decay";
    }
    return rep;
}

// Boundary bump phi_{x,r}(y) = min{ ramp(y_1), C3 u_alpha((y - y^r)/r) }, with
// ramp = 2 below R0, 1 above R0+1, linear between.
struct BumpBarrier {
    AnalyticField field;
    std::function<double(const Vec&)> ramp;
    std::function<double(const Vec&)> scaled_branch;  // C3 u_alpha((y-y^r)/r)
    std::function<Vec(const Vec&)> grad_ramp;
    std::function<Vec(const Vec&)> grad_scaled;
    Vec center;  // y^r
    double r = 0.0;

    // worse (larger) one-sided gradient norm near the min kink
    double worst_grad_norm(const Vec& y, double tie_tol = 1e-9) const {
        const double a = ramp(y), b = scaled_branch(y);
        if (std::fabs(a - b) <= tie_tol * std::max(1.0, std::fabs(a)))
            return std::max(norm(grad_ramp(y)), norm(grad_scaled(y)));
        return a < b ? norm(grad_ramp(y)) : norm(grad_scaled(y));
    }
};

inline BumpBarrier boundary_bump(const Domain& domain, const BoundarySample& sample, double r,
                                 double C3, double alpha, double r0) {
    if (!(r > 0.0 && r < domain.r_Omega))
        throw std::invalid_argument("boundary_bump: need 0 < r < r_Omega");
    if (!(C3 > 2.0 / std::pow(r0, alpha)))
        throw std::invalid_argument("boundary_bump: C3 too small (needs C3 > 2 / r0^alpha)");
    const Vec yc = sample.exterior_center(r);
    const double R0 = domain.R0;
    const int dim = domain.dim;

    auto ramp = [R0](const Vec& y) {
        if (y[0] <= R0) return 2.0;
        if (y[0] > R0 + 1.0) return 1.0;
        return 2.0 - (y[0] - R0);
    };
    auto grad_ramp = [R0, dim](const Vec& y) {
        Vec g(dim);
        if (y[0] > R0 && y[0] <= R0 + 1.0) g[0] = -1.0;
        return g;
    };
    const AnalyticField u_scaled_unit = radial_barrier(alpha, dim);
    auto scaled = [C3, yc, r, alpha](const Vec& y) {
        const double t = norm(y - yc) / r - 1.0;
        return t > 0.0 ? C3 * std::pow(t, alpha) : 0.0;
    };
    auto grad_scaled = [C3, yc, r, alpha, dim](const Vec& y) {
        Vec g(dim);
        const Vec d = y - yc;
        const double rr = norm(d);
        const double t = rr / r - 1.0;
        if (t > 0.0 && rr > 0.0) {
            const double m = C3 * alpha * std::pow(t, alpha - 1.0) / (r * rr);
            for (int i = 0; i < dim; ++i) g[i] = m * d[i];
        }
        return g;
    };

    BumpBarrier out;
    out.center = yc;
    out.r = r;
    out.ramp = ramp;
    out.scaled_branch = scaled;
    out.grad_ramp = grad_ramp;
    out.grad_scaled = grad_scaled;
    auto f = [ramp, scaled](const Vec& y) { return std::min(ramp(y), scaled(y)); };
    // bounded by 2; the gradient handle reports the active branch
    auto grad = [ramp, scaled, grad_ramp, grad_scaled](const Vec& y) {
        return ramp(y) < scaled(y) ? grad_ramp(y) : grad_scaled(y);
    };
    out.field = AnalyticField(f, grad, quad::Growth{2.0, 0.0, 0.0, 0.0, 2.0});
    return out;
}

// Far-field mass constant eps6 = inf over the family of the kernel mass on
// {z_1 > 2 R0 + 1}; a truncated quadrature of the nonnegative integrand, so a
// certified lower bound.
inline double bump_mass_constant(const std::vector<Kernel>& family, double R0,
                                 const QuadratureParams& q) {
    double eps6 = std::numeric_limits<double>::infinity();
    const double a = 2.0 * R0 + 1.0;
    for (const Kernel& k : family) {
        QuadratureParams qm = q;
        qm.radial_nodes = std::max(q.radial_nodes, 8);
        const double mass = quad::annulus_integral(
            k.dim, a, 400.0 * a, qm,
            [&](const Vec& z) { return z[0] > a ? k(Vec(k.dim), z) : 0.0; });
        eps6 = std::min(eps6, mass);
    }
    return eps6;
}

// M^+ phi_{x,r} + C0 |grad phi_{x,r}| <= -eps7 on the probe set, with
// eps7 = min(C3, eps6) the expected rate.
inline BarrierReport certify_boundary_bump(const std::vector<Kernel>& family,
                                           const Domain& domain, const BoundarySample& sample,
                                           double r, double C3, double alpha, double r0,
                                           const std::vector<Vec>& probes,
                                           const QuadratureParams& q) {
    const BumpBarrier bump = boundary_bump(domain, sample, r, C3, alpha, r0);
    const double C0 = family[0].params.C0;
    const double eps6 = bump_mass_constant(family, domain.R0, q);

    BarrierReport rep;
    rep.kind = "boundary_bump";
    rep.alpha = alpha;
    rep.r0 = r0;
    rep.expected_epsilon = std::min(C3, eps6);
    double worst = std::numeric_limits<double>::infinity();
    for (const Vec& y : probes) {
        if (!domain.inside(y)) continue;  // probes on the tangent ball are outside Omega
        const double dball = std::fabs(norm(y - bump.center) - r);
        const double dmin = std::max(1e-6, std::min(dball, 0.25));
        const QuadratureParams qp = detail::probe_quadrature(
            q, dmin, {dball, norm(y - bump.center) + r}, 64.0 * std::max(1.0, domain.R1));
        const OpValue m = extremal_plus(family, bump.field, y, qp);
        const double total = m.value + m.tail_up + C0 * bump.worst_grad_norm(y);
        worst = std::min(worst, -total);
        ++rep.probes;
        if (!(total < 0.0)) {
            rep.note = "positive value at probe (" + std::to_string(y[0]) + ", ...)";
            rep.pass = false;
            rep.worst_slack = -total;
            return rep;
        }
    }
    rep.pass = rep.probes > 0;
    rep.epsilon = worst;
    rep.worst_slack = worst;
    if (!rep.pass) rep.note = "no admissible probes";
    return rep;
}

// psi_r(y) = min{ (sup||f|| + 1)/gamma, C5 u_alpha^r(y) } for the coercive case.
struct DegenerateBarrier {
    AnalyticField field;
    AnalyticField scaled;  // u_alpha^r
    double plateau = 0.0;
    double C5 = 0.0;
    double s0 = 0.0;
    Vec center;
    double r = 0.0;
};

inline DegenerateBarrier degenerate_barrier(const BellmanProblem& P,
                                            const BoundarySample& sample, double r, double C5,
                                            double alpha, double s0) {
    if (!(P.gamma > 0.0))
        throw std::invalid_argument("degenerate_barrier: coercivity gamma > 0 required");
    const double plateau = (P.f_sup + 1.0) / P.gamma;
    if (!(C5 > (P.f_sup + 1.0) / (std::pow(s0, alpha) * P.gamma)))
        throw std::invalid_argument(
            "degenerate_barrier: C5 must exceed (sup||f||+1) / (s0^alpha gamma)");
    DegenerateBarrier out;
    out.center = sample.exterior_center(r);
    out.r = r;
    out.plateau = plateau;
    out.C5 = C5;
    out.s0 = s0;
    out.scaled = radial_barrier_scaled(alpha, out.center, r);
    auto uf = out.scaled.fn();
    const int dim = P.domain.dim;
    const Vec yc = out.center;
    auto f = [uf, plateau, C5](const Vec& y) { return std::min(plateau, C5 * uf(y)); };
    auto grad = [uf, plateau, C5, alpha, yc, r, dim](const Vec& y) {
        Vec g(dim);
        if (C5 * uf(y) >= plateau) return g;  // plateau branch
        const Vec d = y - yc;
        const double rr = norm(d);
        const double t = rr / r - 1.0;
        if (t > 0.0 && rr > 0.0) {
            const double m = C5 * alpha * std::pow(t, alpha - 1.0) / (r * rr);
            for (int i = 0; i < dim; ++i) g[i] = m * d[i];
        }
        return g;
    };
    out.field = AnalyticField(f, grad, quad::Growth{plateau, 0.0, 0.0, 0.0, plateau});
    return out;
}

// Certifies, per index pair: the unit lower bound on the ring
// -I_ab[y, u_alpha^r] + b_ab . grad u_alpha^r >= 1, the supersolution
// inequality of the C5 branch, and the plateau branch via c_ab >= gamma.
// eps8 is measured from the fixed-direction barrier decay on the outward ray.
inline BarrierReport certify_degenerate_barrier(const BellmanProblem& P,
                                                const BoundarySample& sample, double r,
                                                double C5, double alpha, double s0,
                                                const std::vector<Vec>& probes,
                                                const QuadratureParams& q) {
    const DegenerateBarrier psi = degenerate_barrier(P, sample, r, C5, alpha, s0);
    const Vec yc = psi.center;
    const double sigma = P.params.sigma;

    BarrierReport rep;
    rep.kind = "degenerate_barrier";
    rep.alpha = alpha;
    rep.s0 = s0;
    rep.expected_epsilon = 0.5 * (2.0 - sigma) * P.params.lambda * P.params.mu *
                           unit_ball_volume(P.domain.dim);

    double worst = std::numeric_limits<double>::infinity();
    double eps8 = std::numeric_limits<double>::infinity();

    // fixed-direction decay on the outward ray (measures eps8)
    const AnalyticField v = halfspace_barrier_scaled(alpha, yc, sample.inward_normal, r);
    for (int j = 1; j <= 4; ++j) {
        const double s = s0 * j / 4.0;
        const Vec y = yc + (1.0 + s) * r * sample.inward_normal;
        if (!P.domain.inside(y)) continue;
        const QuadratureParams qp =
            detail::probe_quadrature(q, r * s, {r * s}, 1.0e4 * std::max(1.0, r));
        for (const auto& p : P.pairs) {
            const OpValue lin = evaluate_linear(p.kernel, v, y, qp);
            const double measured = -(lin.value + lin.tail_up) * std::pow(r, sigma) *
                                    std::pow(s, sigma - alpha);
            eps8 = std::min(eps8, measured);
        }
    }

    // ring probes: Lemma-style unit bound and the C5-branch supersolution sign
    const AnalyticField u_scaled = radial_barrier_scaled(alpha, yc, r);
    auto c5_field = [&]() {
        auto uf = u_scaled.fn();
        const double C5c = C5;
        quad::Growth gw = u_scaled.growth();
        gw.c0 *= C5c;
        gw.c1 *= C5c;
        return AnalyticField([uf, C5c](const Vec& y) { return C5c * uf(y); }, gw);
    }();

    for (const Vec& y : probes) {
        const double dist = norm(y - yc);
        const double s = dist / r - 1.0;
        if (!P.domain.inside(y)) continue;
        const QuadratureParams qp = detail::probe_quadrature(
            q, std::max(1e-6, std::fabs(dist - r)), {std::fabs(dist - r), dist + r},
            1.0e4 * std::max(1.0, r));
        if (s > 0.0 && s <= s0 + 1e-12) {
            const Vec gimg = u_scaled.gradient(y, r * s / 8.0);
            for (const auto& p : P.pairs) {
                const OpValue lin = evaluate_linear(p.kernel, u_scaled, y, qp);
                double ring = -(lin.value + lin.tail_up);
                if (p.drift) ring += dot(p.drift(y), gimg);
                worst = std::min(worst, ring - 1.0);

                const OpValue lin5 = evaluate_linear(p.kernel, c5_field, y, qp);
                double sup58 = -(lin5.value + lin5.tail_up) + p.c(y) * C5 * u_scaled.value(y) +
                               p.f(y);
                if (p.drift) sup58 += C5 * dot(p.drift(y), gimg);
                worst = std::min(worst, sup58);
                if (!(ring >= 1.0) || !(sup58 >= 0.0))
                    rep.note = "violation by pair (" + std::to_string(p.a) + "," +
                               std::to_string(p.b) + ") at s=" + std::to_string(s);
            }
            ++rep.probes;
        } else if (s > s0) {
            // plateau branch: quadrature sign check of the full expression
            for (const auto& p : P.pairs) {
                const OpValue lin = evaluate_linear(p.kernel, psi.field, y, qp);
                const double val = -(lin.value + lin.tail_up) + p.c(y) * psi.plateau + p.f(y);
                worst = std::min(worst, val);
                if (!(val >= 0.0))
                    rep.note = "plateau violation by pair (" + std::to_string(p.a) + "," +
                               std::to_string(p.b) + ")";
            }
            ++rep.probes;
        }
    }

    rep.epsilon = std::isfinite(eps8) ? eps8 : 0.0;
    rep.worst_slack = std::isfinite(worst) ? worst : 0.0;
    rep.pass = rep.probes > 0 && rep.worst_slack >= 0.0 && rep.epsilon > 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// Sub/supersolution assembly

enum class BarrierKind { kUniform, kDegenerate };

struct UniformCertificates {
    bool pass = false;
    double alpha = 0.0;
    double r0 = 0.0;
    double C3 = 0.0;
    double eps7 = 0.0;
};

struct DegenerateCertificates {
    bool pass = false;
    double alpha = 0.0;
    double s0 = 0.0;
    double C5 = 0.0;
};

struct BoundarySampling {
    std::vector<double> radii;  // r-grid, all < r_Omega
};

// max over probe points of |I(x, r_const, 0)| + tail
inline double operator_norm_on_constant(const BellmanProblem& P, double r_const,
                                        const std::vector<Vec>& points,
                                        const QuadratureParams& q) {
    const AnalyticField zero([](const Vec&) { return 0.0; }, quad::Growth{0.0, 0.0, 0.0});
    double worst = 0.0;
    for (const Vec& x : points) {
        const BellmanValue v = bellman_isaacs(P, zero, x, r_const, q);
        worst = std::max(worst, std::fabs(v.value) + v.tail);
    }
    return worst;
}

namespace detail {

template <class PerSample>
GridFunction assemble_envelope(const BellmanProblem& P, const Box& box, double h, bool upper,
                               const BoundarySampling& sampling, PerSample&& term) {
    GridFunction out(box, h, P.domain.inside, P.g, 0.0);
    double bound = P.g_bound;
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (!out.node_interior(k)) continue;  // exterior nodes stay at the datum
        const Vec y = out.node(k);
        double best = upper ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
        for (const auto& smp : P.domain.boundary_samples) {
            for (double r : sampling.radii) {
                const double v = term(smp, r, y);
                best = upper ? std::min(best, v) : std::max(best, v);
            }
        }
        out.set_value(k, best);
        bound = std::max(bound, std::fabs(best));
    }
    out.set_bound(bound);
    return out;
}

}  // namespace detail

// Pointwise infimum over (x, r) of
//   rho(3r) + g(x) + max{2||g||, ||I(.,-||g||,0)|| / eps7} phi_{x,r}
// (uniform case), equal to the datum outside the domain.
inline GridFunction build_supersolution(const BellmanProblem& P, const UniformCertificates& cert,
                                        const BoundarySampling& sampling, const Box& box,
                                        double h, const QuadratureParams& q,
                                        const std::vector<Vec>& norm_probes) {
    if (!cert.pass)
        throw std::runtime_error("build_supersolution: barrier certification missing or failed");
    const double inorm = operator_norm_on_constant(P, -P.g_bound, norm_probes, q);
    const double mult = std::max(2.0 * P.g_bound, inorm / cert.eps7);
    return detail::assemble_envelope(
        P, box, h, /*upper=*/true, sampling, [&](const BoundarySample& smp, double r, const Vec& y) {
            const BumpBarrier bump = boundary_bump(P.domain, smp, r, cert.C3, cert.alpha, cert.r0);
            return P.modulus_g(3.0 * r) + P.g(smp.x) + mult * bump.field.value(y);
        });
}

inline GridFunction build_subsolution(const BellmanProblem& P, const UniformCertificates& cert,
                                      const BoundarySampling& sampling, const Box& box, double h,
                                      const QuadratureParams& q,
                                      const std::vector<Vec>& norm_probes) {
    if (!cert.pass)
        throw std::runtime_error("build_subsolution: barrier certification missing or failed");
    const double inorm = operator_norm_on_constant(P, P.g_bound, norm_probes, q);
    const double mult = std::max(2.0 * P.g_bound, inorm / cert.eps7);
    return detail::assemble_envelope(
        P, box, h, /*upper=*/false, sampling, [&](const BoundarySample& smp, double r, const Vec& y) {
            const BumpBarrier bump = boundary_bump(P.domain, smp, r, cert.C3, cert.alpha, cert.r0);
            return -P.modulus_g(3.0 * r) + P.g(smp.x) - mult * bump.field.value(y);
        });
}

// Degenerate (coercive) case: rho(3r) + g(x) + (2||g|| gamma/(sup||f||+1) + 1) psi_r.
inline GridFunction build_supersolution_degenerate(const BellmanProblem& P,
                                                   const DegenerateCertificates& cert,
                                                   const BoundarySampling& sampling,
                                                   const Box& box, double h) {
    if (!cert.pass)
        throw std::runtime_error(
            "build_supersolution_degenerate: barrier certification missing or failed");
    const double coef = 2.0 * P.g_bound * P.gamma / (P.f_sup + 1.0) + 1.0;
    return detail::assemble_envelope(
        P, box, h, /*upper=*/true, sampling, [&](const BoundarySample& smp, double r, const Vec& y) {
            const DegenerateBarrier psi = degenerate_barrier(P, smp, r, cert.C5, cert.alpha, cert.s0);
            return P.modulus_g(3.0 * r) + P.g(smp.x) + coef * psi.field.value(y);
        });
}

inline GridFunction build_subsolution_degenerate(const BellmanProblem& P,
                                                 const DegenerateCertificates& cert,
                                                 const BoundarySampling& sampling, const Box& box,
                                                 double h) {
    if (!cert.pass)
        throw std::runtime_error(
            "build_subsolution_degenerate: barrier certification missing or failed");
    const double coef = 2.0 * P.g_bound * P.gamma / (P.f_sup + 1.0) + 1.0;
    return detail::assemble_envelope(
        P, box, h, /*upper=*/false, sampling, [&](const BoundarySample& smp, double r, const Vec& y) {
            const DegenerateBarrier psi = degenerate_barrier(P, smp, r, cert.C5, cert.alpha, cert.s0);
            return -P.modulus_g(3.0 * r) + P.g(smp.x) - coef * psi.field.value(y);
        });
}

}  // namespace nonlocal

#endif  // NONLOCAL_BARRIERS_HPP
