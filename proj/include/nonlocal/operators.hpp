#ifndef NONLOCAL_OPERATORS_HPP
#define NONLOCAL_OPERATORS_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nonlocal/domain.hpp"
#include "nonlocal/ellipticity.hpp"
#include "nonlocal/fields.hpp"
#include "nonlocal/grid.hpp"
#include "nonlocal/kernels.hpp"
#include "nonlocal/quadrature.hpp"
#include "nonlocal/vec.hpp"

namespace nonlocal {

// Operator evaluations return the quadrature value plus a certified half-width
// covering the truncated tail |z| > R.
struct OpValue {
    double value = 0.0;
    double tail = 0.0;     // symmetric half-width: max(tail_up, tail_dn)
    double tail_up = 0.0;  // discarded tail <= tail_up
    double tail_dn = 0.0;  // discarded tail >= -tail_dn
};

template <class Field>
concept GridBacked = requires(const Field& f) { f.grid(); };

// sigma-regime increment delta_z u(x); the gradient uses centered lattice
// differences.
inline double delta_u(const GridFunction& u, const Vec& x, const Vec& z, double sigma) {
    if (!u.in_domain(x)) throw std::invalid_argument("delta_u: x must lie in the domain");
    const double base = u.eval(x + z) - u.eval(x);
    const double cw = comp_weight(comp_regime(sigma), norm(z));
    if (cw == 0.0) return base;
    return base - cw * dot(u.gradient(x), z);
}

// L u(x) = int delta_z u(x) K(x,z) dz.
//
// Near field |z| < rho: the paired second-difference model. On the lattice the
// paired difference of a smooth function is its quadratic model, so the near
// field contributes 0.5 <H, M2> (plus grad.m1 below order one) with M2, m1 the
// kernel moments over B_rho. Far field [rho, R]: annular quadrature of the
// +/-z paired integrand. Tail |z| > R: certified interval from the class decay.
template <class Field>
OpValue evaluate_linear(const Kernel& K, const Field& u, const Vec& x, const QuadratureParams& q,
                        const quad::NearFieldMoments* cached_moments = nullptr) {
    const EllipticityParams& ep = K.params;
    const int dim = K.dim;
    const CompRegime regime = comp_regime(ep.sigma);
    const double R = q.truncation;

    if constexpr (GridBacked<Field>) {
        if (!u.grid().in_domain(x))
            throw std::invalid_argument("evaluate_linear: x must lie in the domain");
    }

    double rho = q.inner_radius;
    if (rho <= 0.0) {
        const double ns = u.natural_step();
        rho = ns > 0.0 ? 2.0 * ns : std::max(1e-6, 1e-4 * std::min(1.0, R));
    }
    if (ep.sigma == 1.0) rho = std::min(rho, 0.5);
    if (!(rho < R)) throw std::invalid_argument("evaluate_linear: need rho < R");

    const double uc = u.value(x);
    const Vec grad = u.gradient(x, 0.5 * rho);

    // near field from kernel moments (cache hook: moments depend only on the
    // kernel, the base point and rho)
    const quad::NearFieldMoments mom =
        cached_moments ? *cached_moments : quad::kernel_moments(K, x, rho, q);
    const Mat hess = u.hessian(x, 0.5 * rho);
    double near = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) near += 0.5 * hess(i, j) * mom.m2(i, j);
    if (regime == CompRegime::kNone) near += dot(grad, mom.m1);

    // far field
    const quad::DirectionSet ds = quad::make_directions(dim, q.angular_nodes);
    const quad::GaussLegendre& gl = quad::gauss_legendre(std::max(2, q.radial_nodes));
    const auto intervals = quad::radial_intervals(rho, R, q, ep.sigma);
    double far = 0.0;
    for (const auto& [a, b] : intervals) {
        double acc = 0.0;
        for (std::size_t ir = 0; ir < gl.x.size(); ++ir) {
            const double r = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[ir];
            const double wr = 0.5 * (b - a) * gl.w[ir] * std::pow(r, dim - 1);
            const double cw = comp_weight(regime, r);
            for (std::size_t id = 0; id < ds.dirs.size(); ++id) {
                const Vec z = r * ds.dirs[id];
                const double up = u.value(x + z);
                const double um = u.value(x - z);
                const double d2 = up + um - 2.0 * uc;
                double odd = up - um;
                if (cw != 0.0) odd -= 2.0 * cw * dot(grad, z);
                const double kp = K(x, z);
                const double km = K(x, -z);
                acc += wr * ds.weights[id] * 0.5 * (d2 * (kp + km) + odd * (kp - km));
            }
        }
        far += acc;
    }

    OpValue out;
    out.value = near + far;
    if (q.tail_mode == TailMode::kBound) {
        const double H1L = q.tail_Lambda > 0.0 ? q.tail_Lambda : ep.Lambda;
        const quad::TailBounds tb =
            quad::tail_bounds(ep, H1L, R, x, uc, norm(grad), u.growth(), regime);
        out.tail = tb.half_width();
        out.tail_up = tb.up;
        out.tail_dn = tb.dn;
    }
    return out;
}

// sup / inf of evaluate_linear over a finite kernel family; ties keep the
// first index. The family is an envelope approximation of the full class.
template <class Field>
OpValue extremal_plus(const std::vector<Kernel>& family, const Field& u, const Vec& x,
                      const QuadratureParams& q) {
    if (family.empty()) throw std::invalid_argument("extremal_plus: empty family");
    OpValue best;
    bool first = true;
    for (const Kernel& k : family) {
        const OpValue v = evaluate_linear(k, u, x, q);
        if (first || v.value > best.value) {
            best = v;
            first = false;
        }
    }
    return best;
}

template <class Field>
OpValue extremal_minus(const std::vector<Kernel>& family, const Field& u, const Vec& x,
                       const QuadratureParams& q) {
    if (family.empty()) throw std::invalid_argument("extremal_minus: empty family");
    OpValue best;
    bool first = true;
    for (const Kernel& k : family) {
        const OpValue v = evaluate_linear(k, u, x, q);
        if (first || v.value < best.value) {
            best = v;
            first = false;
        }
    }
    return best;
}

// Exact extremal over the pointwise-bounded sub-class
//   (2-sigma) lambda |z|^{-n-sigma} <= K <= (2-sigma) Lambda |z|^{-n-sigma}:
//   int [ Lambda (delta_z u)^+ - lambda (delta_z u)^- ] (2-sigma)|z|^{-n-sigma} dz.
// For finite families drawn from that sub-class this is an upper bound.
template <class Field>
OpValue strong_pucci_plus(const EllipticityParams& ep, int dim, const Field& u, const Vec& x,
                          const QuadratureParams& q) {
    ep.validate();
    const CompRegime regime = comp_regime(ep.sigma);
    const double R = q.truncation;
    double rho = q.inner_radius;
    if (rho <= 0.0) {
        const double ns = u.natural_step();
        rho = ns > 0.0 ? 2.0 * ns : std::max(1e-6, 1e-4 * std::min(1.0, R));
    }
    if (ep.sigma == 1.0) rho = std::min(rho, 0.5);

    const double uc = u.value(x);
    const Vec grad = u.gradient(x, 0.5 * rho);
    const Mat hess = u.hessian(x, 0.5 * rho);
    const quad::DirectionSet ds = quad::make_directions(dim, q.angular_nodes);
    const quad::GaussLegendre& gl = quad::gauss_legendre(std::max(2, q.radial_nodes));

    auto split = [&](double v) { return v >= 0.0 ? ep.Lambda * v : ep.lambda * v; };

    double near = 0.0;
    if (regime != CompRegime::kNone) {
        // quadratic model integrates in closed radial form
        double dirsum = 0.0;
        for (std::size_t id = 0; id < ds.dirs.size(); ++id) {
            const double g2 = 0.5 * quad_form(hess, ds.dirs[id]);
            dirsum += ds.weights[id] * 2.0 * split(g2);
        }
        near = std::pow(rho, 2.0 - ep.sigma) * dirsum;
    } else {
        // gradient term survives below order one: geometric sub-annuli
        double acc = 0.0;
        for (int level = 0; level < q.moment_max_levels; ++level) {
            const double b = rho * std::pow(0.5, level);
            const double a = 0.5 * b;
            double lv = 0.0;
            for (std::size_t ir = 0; ir < gl.x.size(); ++ir) {
                const double r = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[ir];
                const double wr =
                    0.5 * (b - a) * gl.w[ir] * std::pow(r, dim - 1) * (2.0 - ep.sigma) *
                    std::pow(r, -(static_cast<double>(dim) + ep.sigma));
                for (std::size_t id = 0; id < ds.dirs.size(); ++id) {
                    const Vec& d = ds.dirs[id];
                    const double lin = r * dot(grad, d);
                    const double quadm = 0.5 * r * r * quad_form(hess, d);
                    lv += wr * ds.weights[id] * (split(lin + quadm) + split(-lin + quadm));
                }
            }
            acc += lv;
            if (level > 2 && std::fabs(lv) <= q.moment_rel_tol * std::max(1e-300, std::fabs(acc)))
                break;
        }
        near = acc;
    }

    double far = 0.0;
    const auto intervals = quad::radial_intervals(rho, R, q, ep.sigma);
    for (const auto& [a, b] : intervals) {
        for (std::size_t ir = 0; ir < gl.x.size(); ++ir) {
            const double r = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[ir];
            const double wr = 0.5 * (b - a) * gl.w[ir] * std::pow(r, dim - 1) * (2.0 - ep.sigma) *
                              std::pow(r, -(static_cast<double>(dim) + ep.sigma));
            const double cw = comp_weight(regime, r);
            for (std::size_t id = 0; id < ds.dirs.size(); ++id) {
                const Vec z = r * ds.dirs[id];
                const double gz = cw != 0.0 ? cw * dot(grad, z) : 0.0;
                const double dp = u.value(x + z) - uc - gz;
                const double dm = u.value(x - z) - uc + gz;
                far += wr * ds.weights[id] * (split(dp) + split(dm));
            }
        }
    }

    OpValue out;
    out.value = near + far;
    if (q.tail_mode == TailMode::kBound) {
        // annular mass of the bounding kernel: mass_coef * delta^{-sigma}
        const double s = ep.sigma;
        const double mass_coef = (2.0 - s) * ep.Lambda * unit_sphere_area(dim) *
                                 (1.0 - std::pow(2.0, -s)) / s;
        const quad::Growth gw = u.growth();
        if (gw.c1 > 0.0 && gw.p >= s)
            throw std::domain_error("strong_pucci_plus: field growth exponent must be below sigma");
        const double xn = norm(x);
        double total = mass_coef * (gw.c0 + std::fabs(uc)) * std::pow(R, -s) /
                       (1.0 - std::pow(2.0, -s));
        if (gw.c1 > 0.0)
            total += mass_coef * gw.c1 * std::pow(2.0 + xn / R, gw.p) * std::pow(R, gw.p - s) /
                     (1.0 - std::pow(2.0, gw.p - s));
        const double gn = norm(grad);
        if (gn > 0.0) {
            if (regime == CompRegime::kFull && s > 1.0) {
                total += mass_coef * gn * 2.0 * std::pow(R, 1.0 - s) /
                         (1.0 - std::pow(2.0, 1.0 - s));
            } else if (regime == CompRegime::kUnitBall && R < 1.0) {
                for (double delta = R; delta < 1.0; delta *= 2.0)
                    total += mass_coef * gn * 2.0 * delta * std::pow(delta, -s);
            }
        }
        out.tail = total;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bellman-Isaacs structure over finite index sets

struct BellmanPair {
    int a = 0, b = 0;
    Kernel kernel;
    std::function<Vec(const Vec&)> drift;   // null -> zero drift
    std::function<double(const Vec&)> c;    // zeroth order, >= 0
    std::function<double(const Vec&)> f;    // forcing
};

struct BellmanProblem {
    int n_a = 1, n_b = 1;
    std::vector<BellmanPair> pairs;  // one entry per (a,b), any order; looked up densely
    double gamma = 0.0;              // coercivity floor: c_ab >= gamma
    EllipticityParams params;
    Domain domain;
    std::function<double(const Vec&)> g;        // exterior datum
    std::function<double(double)> modulus_g;    // declared modulus of continuity of g
    double g_bound = 0.0;
    double f_sup = 0.0;   // sup over pairs of ||f||_inf(Omega)
    double c_sup = 0.0;   // sup over pairs of ||c||_inf(Omega); modulus m(t) = c_sup t
    bool has_drift = false;

    const BellmanPair& pair(int a, int b) const {
        for (const auto& p : pairs)
            if (p.a == a && p.b == b) return p;
        throw std::invalid_argument("BellmanProblem: missing pair (" + std::to_string(a) + "," +
                                    std::to_string(b) + ")");
    }

    void validate() const {
        params.validate();
        if (n_a < 1 || n_b < 1 || pairs.empty())
            throw std::invalid_argument("BellmanProblem: empty index sets");
        if (pairs.size() != static_cast<std::size_t>(n_a) * static_cast<std::size_t>(n_b))
            throw std::invalid_argument("BellmanProblem: pair table incomplete");
        if (params.sigma < 1.0 && has_drift)
            throw std::invalid_argument("BellmanProblem: drift must vanish when sigma < 1");
        if (gamma < 0.0) throw std::invalid_argument("BellmanProblem: gamma must be >= 0");
    }
};

struct BellmanValue {
    double value = 0.0;
    double tail = 0.0;
    int a = 0, b = 0;  // active indices (first-index tie-breaking)
};

// One pair's contribution -I_ab[x,u] + b_ab.grad u + c_ab r + f_ab.
template <class Field>
OpValue bellman_pair_value(const BellmanPair& p, const Field& u, const Vec& x, double r,
                           const QuadratureParams& q, const Vec& grad) {
    const OpValue lin = evaluate_linear(p.kernel, u, x, q);
    double v = -lin.value + p.c(x) * r + p.f(x);
    if (p.drift) v += dot(p.drift(x), grad);
    return {v, lin.tail};
}

// sup_a inf_b of the pair values; the r slot may be overridden to support the
// scalar update of the Perron iteration.
template <class Field>
BellmanValue bellman_isaacs(const BellmanProblem& P, const Field& u, const Vec& x,
                            std::optional<double> r_override, const QuadratureParams& q) {
    if (P.pairs.empty()) throw std::invalid_argument("bellman_isaacs: empty index sets");
    const double rho_hint = q.inner_radius > 0.0 ? q.inner_radius : 1e-3;
    const Vec grad = u.gradient(x, 0.5 * rho_hint);
    const double r = r_override ? *r_override : u.value(x);

    BellmanValue out;
    double max_tail = 0.0;
    bool first_a = true;
    for (int a = 0; a < P.n_a; ++a) {
        double inner = 0.0;
        int arg_b = 0;
        bool first_b = true;
        for (int b = 0; b < P.n_b; ++b) {
            const OpValue pv = bellman_pair_value(P.pair(a, b), u, x, r, q, grad);
            max_tail = std::max(max_tail, pv.tail);
            if (first_b || pv.value < inner) {
                inner = pv.value;
                arg_b = b;
                first_b = false;
            }
        }
        if (first_a || inner > out.value) {
            out.value = inner;
            out.a = a;
            out.b = arg_b;
            first_a = false;
        }
    }
    out.tail = max_tail;
    return out;
}

// ---------------------------------------------------------------------------
// Abstract operator handle + structural checks

struct OperatorHandle {
    std::function<OpValue(const Vec& x, double r, const AnalyticField& u)> eval;
    double C0 = 0.0;
};

inline OperatorHandle make_operator(const BellmanProblem& P, const QuadratureParams& q) {
    OperatorHandle h;
    h.C0 = P.params.C0;
    h.eval = [&P, q](const Vec& x, double r, const AnalyticField& u) -> OpValue {
        const BellmanValue v = bellman_isaacs(P, u, x, r, q);
        return {v.value, v.tail};
    };
    return h;
}

struct AxiomSample {
    Vec x;
    double r = 0.0, s = 0.0, C = 0.0;
    AnalyticField u;
    AnalyticField psi;  // touched by u from above at x: u >= psi, u(x) = psi(x)
};

struct AxiomReport {
    bool pass_A2 = true, pass_A3 = true, pass_A4 = true;
    double worst_A2 = 0.0, worst_A3 = 0.0, worst_A4 = 0.0;  // violations (positive = bad)
    std::size_t samples = 0;
    bool pass() const { return pass_A2 && pass_A3 && pass_A4; }
};

// (A2) monotone in r, (A3) invariant under constants in the function slot,
// (A4) comparison for ordered functions touching at x.
inline AxiomReport check_structural_axioms(const OperatorHandle& op,
                                           const std::vector<AxiomSample>& samples,
                                           double tol = 1e-7) {
    AxiomReport rep;
    rep.samples = samples.size();
    for (const auto& smp : samples) {
        const double lo = std::min(smp.r, smp.s);
        const double hi = std::max(smp.r, smp.s);
        const double I_lo = op.eval(smp.x, lo, smp.u).value;
        const double I_hi = op.eval(smp.x, hi, smp.u).value;
        rep.worst_A2 = std::max(rep.worst_A2, I_lo - I_hi);

        const double I_base = op.eval(smp.x, smp.r, smp.u).value;
        const double I_shift = op.eval(smp.x, smp.r, field_plus_constant(smp.u, smp.C)).value;
        rep.worst_A3 = std::max(rep.worst_A3, std::fabs(I_shift - I_base));

        const double I_u = op.eval(smp.x, smp.r, smp.u).value;
        const double I_psi = op.eval(smp.x, smp.r, smp.psi).value;
        rep.worst_A4 = std::max(rep.worst_A4, I_u - I_psi);
    }
    rep.pass_A2 = rep.worst_A2 <= tol;
    rep.pass_A3 = rep.worst_A3 <= tol;
    rep.pass_A4 = rep.worst_A4 <= tol;
    return rep;
}

struct EllipticitySample {
    Vec x;
    double r = 0.0, s = 0.0;
    AnalyticField u;
    AnalyticField v;
};

struct EllipticityReport {
    bool pass = true;
    double worst_slack = 0.0;  // most negative sandwich margin observed
    std::size_t samples = 0;
};

// Verifies M^-(v-u) - C0|grad(u-v)| - m(|r-s|) <= I(x,r,u) - I(x,s,v)
//       <= M^+(v-u) + C0|grad(u-v)| + m(|r-s|) at each sample.
inline EllipticityReport check_uniform_ellipticity(
    const OperatorHandle& op, const std::vector<Kernel>& family,
    const std::vector<EllipticitySample>& samples, const QuadratureParams& q,
    const std::function<double(double)>& modulus, double tol = 1e-7) {
    EllipticityReport rep;
    rep.samples = samples.size();
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& smp : samples) {
        const AnalyticField diff = field_difference(smp.v, smp.u);
        const double rho_hint = q.inner_radius > 0.0 ? q.inner_radius : 1e-3;
        const double grad_n = norm(diff.gradient(smp.x, 0.5 * rho_hint));
        const double mterm = modulus(std::fabs(smp.r - smp.s));
        const double lo = extremal_minus(family, diff, smp.x, q).value - op.C0 * grad_n - mterm;
        const double hi = extremal_plus(family, diff, smp.x, q).value + op.C0 * grad_n + mterm;
        const double mid = op.eval(smp.x, smp.r, smp.u).value - op.eval(smp.x, smp.s, smp.v).value;
        worst = std::min(worst, std::min(mid - lo, hi - mid));
    }
    rep.worst_slack = samples.empty() ? 0.0 : worst;
    rep.pass = rep.worst_slack >= -tol;
    return rep;
}

}  // namespace nonlocal

#endif  // NONLOCAL_OPERATORS_HPP
