#ifndef NONLOCAL_PERRON_HPP
#define NONLOCAL_PERRON_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "nonlocal/fields.hpp"
#include "nonlocal/grid.hpp"
#include "nonlocal/operators.hpp"

namespace nonlocal {

enum class SweepMode { kGaussSeidel, kJacobi };

struct SolveReport {
    std::size_t iterations = 0;
    std::vector<double> residual_history;  // max |residual before update| per sweep
    bool converged = false;
    bool monotone = true;      // iterates nondecreasing nodewise
    bool sandwich_ok = true;   // sub <= u_k <= super throughout
    std::vector<std::pair<int, int>> active_indices;  // final argmax/argmin per interior node
    double runtime_seconds = 0.0;
    double final_max_delta = 0.0;
    std::string note;
};

struct SolverOptions {
    double tol = 1e-9;
    std::size_t max_sweeps = 20000;
    SweepMode mode = SweepMode::kGaussSeidel;
    int threads = 1;  // Jacobi sweeps may evaluate nodes in parallel
};

namespace detail {

// The discrete residual at a node is affine in the candidate value r once the
// quadrature stencil is fixed: the c-term contributes c(x) r and the center
// value enters the kernel integral linearly. Per (node, pair) we cache the
// slope (one extra evaluation) so later sweeps need a single quadrature per
// pair.
struct PairSlopeCache {
    std::vector<double> slope;  // [node_slot * n_pairs + pair]; NaN = not yet computed
    std::vector<quad::NearFieldMoments> moments;
    std::vector<std::uint8_t> have_moments;
};

struct NodeResidual {
    double value = 0.0;  // sup-inf residual at the current candidate
    int a = 0, b = 0;
};

inline double pair_residual(const BellmanPair& p, const GridFunction& u, const Vec& x, double r,
                            const QuadratureParams& q, const Vec& grad,
                            const quad::NearFieldMoments* mom = nullptr) {
    const GridField uf(u);
    const OpValue lin = evaluate_linear(p.kernel, uf, x, q, mom);
    double v = -lin.value + p.c(x) * r + p.f(x);
    if (p.drift) v += dot(p.drift(x), grad);
    return v;
}

// All pair residuals at candidate r0 plus their exact slopes in r.
struct AffineNodeModel {
    std::vector<double> value;  // residual of each pair at r0
    std::vector<double> slope;  // d residual / d r
    double r0 = 0.0;

    double compose(const BellmanProblem& P, double r) const {
        double out = 0.0;
        bool first_a = true;
        for (int a = 0; a < P.n_a; ++a) {
            double inner = 0.0;
            bool first_b = true;
            for (int b = 0; b < P.n_b; ++b) {
                const std::size_t idx = static_cast<std::size_t>(a * P.n_b + b);
                const double v = value[idx] + slope[idx] * (r - r0);
                if (first_b || v < inner) {
                    inner = v;
                    first_b = false;
                }
            }
            if (first_a || inner > out) {
                out = inner;
                first_a = false;
            }
        }
        return out;
    }

    std::pair<int, int> active(const BellmanProblem& P, double r) const {
        int aa = 0, ab = 0;
        double out = 0.0;
        bool first_a = true;
        for (int a = 0; a < P.n_a; ++a) {
            double inner = 0.0;
            int arg_b = 0;
            bool first_b = true;
            for (int b = 0; b < P.n_b; ++b) {
                const std::size_t idx = static_cast<std::size_t>(a * P.n_b + b);
                const double v = value[idx] + slope[idx] * (r - r0);
                if (first_b || v < inner) {
                    inner = v;
                    arg_b = b;
                    first_b = false;
                }
            }
            if (first_a || inner > out) {
                out = inner;
                aa = a;
                ab = arg_b;
                first_a = false;
            }
        }
        return {aa, ab};
    }
};

// Residual model at a node: evaluates each pair at the current value, and the
// slope from a unit perturbation of the center value (cached across sweeps —
// the slope depends only on geometry and coefficients).
inline AffineNodeModel node_model(const BellmanProblem& P, GridFunction& u, std::size_t node,
                                  const QuadratureParams& q, PairSlopeCache* cache,
                                  std::size_t cache_slot) {
    const Vec x = u.node(node);
    const Vec grad = u.gradient(x);
    const std::size_t n_pairs = P.pairs.size();
    AffineNodeModel m;
    m.r0 = u.value(node);
    m.value.resize(n_pairs);
    m.slope.resize(n_pairs);
    std::vector<const BellmanPair*> ordered(n_pairs);
    for (int a = 0; a < P.n_a; ++a)
        for (int b = 0; b < P.n_b; ++b)
            ordered[static_cast<std::size_t>(a * P.n_b + b)] = &P.pair(a, b);

    for (std::size_t ip = 0; ip < n_pairs; ++ip) {
        const std::size_t ci = cache_slot * n_pairs + ip;
        const quad::NearFieldMoments* mom = nullptr;
        if (cache) {
            if (!cache->have_moments[ci]) {
                double rho = q.inner_radius > 0.0 ? q.inner_radius : 2.0 * u.spacing();
                if (ordered[ip]->kernel.params.sigma == 1.0) rho = std::min(rho, 0.5);
                cache->moments[ci] = quad::kernel_moments(ordered[ip]->kernel, x, rho, q);
                cache->have_moments[ci] = 1;
            }
            mom = &cache->moments[ci];
        }
        m.value[ip] = pair_residual(*ordered[ip], u, x, m.r0, q, grad, mom);
        double s = cache ? cache->slope[ci] : std::numeric_limits<double>::quiet_NaN();
        if (std::isnan(s)) {
            const double old = u.value(node);
            u.set_value(node, old + 1.0);
            const Vec grad2 = u.gradient(x);  // centered stencil skips the center node
            const double v1 = pair_residual(*ordered[ip], u, x, m.r0 + 1.0, q, grad2, mom);
            u.set_value(node, old);
            s = v1 - m.value[ip];
            if (cache) cache->slope[ci] = s;
        }
        m.slope[ip] = s;
    }
    return m;
}

// Root of the piecewise-affine sup-inf residual within the bracket, by
// bisection (monotone nondecreasing in r by construction).
inline double affine_root(const BellmanProblem& P, const AffineNodeModel& m, double lo,
                          double hi) {
    double flo = m.compose(P, lo);
    double fhi = m.compose(P, hi);
    if (flo > 0.0 || fhi < 0.0)
        throw std::runtime_error(
            "pointwise_update: bracket failure (nonmonotone discrete operator; c == 0 with no "
            "kernel mass at this node?)");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f = m.compose(P, mid);
        if (f <= 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * std::max(1.0, std::fabs(lo))) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Unique value r* zeroing the Bellman-Isaacs residual at x with the function
// frozen elsewhere and both the r slot and the point value set to r*; found by
// bisection over [u(x) - 2 bound, u(x) + 2 bound] using monotonicity in r*.
inline double pointwise_update(const BellmanProblem& P, GridFunction& u, std::size_t node,
                               const QuadratureParams& q) {
    if (!u.node_interior(node))
        throw std::invalid_argument("pointwise_update: node is not interior");
    const detail::AffineNodeModel m = detail::node_model(P, u, node, q, nullptr, 0);
    const double B = std::max(1.0, u.bound());
    return detail::affine_root(P, m, m.r0 - 2.0 * B, m.r0 + 2.0 * B);
}

struct SweepResult {
    double max_delta = 0.0;
    double max_residual = 0.0;  // before the update
    std::size_t clamped = 0;
};

struct SweepContext {
    QuadratureParams q;
    const GridFunction* super = nullptr;  // clamp target (may be null)
    SweepMode mode = SweepMode::kGaussSeidel;
    int threads = 1;
    detail::PairSlopeCache* cache = nullptr;
    std::vector<std::size_t>* nodes = nullptr;  // interior nodes, fixed order
};

// One sweep of pointwise updates over the interior nodes in lexicographic
// order, clamping each value at the supersolution.
inline SweepResult sweep(const BellmanProblem& P, GridFunction& u, SweepContext& ctx) {
    std::vector<std::size_t> local_nodes;
    const std::vector<std::size_t>& nodes =
        ctx.nodes ? *ctx.nodes : (local_nodes = u.interior_nodes());
    const double B = std::max(1.0, u.bound());
    SweepResult res;

    auto compute_one = [&](GridFunction& env, std::size_t slot, std::size_t node, double& out_val,
                           double& out_res) {
        const detail::AffineNodeModel m =
            detail::node_model(P, env, node, ctx.q, ctx.cache, slot);
        out_res = std::fabs(m.compose(P, m.r0));
        out_val = detail::affine_root(P, m, m.r0 - 2.0 * B, m.r0 + 2.0 * B);
    };
    auto clamp_one = [&](std::size_t node, double r) {
        if (ctx.super) {
            const double cap = ctx.super->value(node);
            if (r > cap) {
                ++res.clamped;
                return cap;
            }
        }
        return r;
    };

    if (ctx.mode == SweepMode::kGaussSeidel) {
        for (std::size_t slot = 0; slot < nodes.size(); ++slot) {
            const std::size_t node = nodes[slot];
            double val = 0.0, rres = 0.0;
            compute_one(u, slot, node, val, rres);
            val = clamp_one(node, val);
            res.max_delta = std::max(res.max_delta, std::fabs(val - u.value(node)));
            res.max_residual = std::max(res.max_residual, rres);
            u.set_value(node, val);
        }
        return res;
    }

    // Jacobi: update from the previous iterate; identical results regardless
    // of the worker count since nodes are independent.
    GridFunction prev = u;
    std::vector<double> vals(nodes.size());
    std::vector<double> ress(nodes.size());
    const int nthreads = std::max(1, ctx.threads);
    auto work = [&](std::size_t begin, std::size_t end) {
        GridFunction scratch = prev;  // private copy: slope probing mutates the center
        for (std::size_t slot = begin; slot < end; ++slot)
            compute_one(scratch, slot, nodes[slot], vals[slot], ress[slot]);
    };
    if (nthreads == 1) {
        work(0, nodes.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (nodes.size() + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            const std::size_t b = std::min(nodes.size(), static_cast<std::size_t>(t) * chunk);
            const std::size_t e = std::min(nodes.size(), b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& th : pool) th.join();
    }
    for (std::size_t slot = 0; slot < nodes.size(); ++slot) {
        const std::size_t node = nodes[slot];
        const double val = clamp_one(node, vals[slot]);
        res.max_delta = std::max(res.max_delta, std::fabs(val - u.value(node)));
        res.max_residual = std::max(res.max_residual, ress[slot]);
        u.set_value(node, val);
    }
    return res;
}

// Monotone iteration from the subsolution, sandwiched by the supersolution:
// the discrete shadow of the sup-of-subsolutions construction.
inline std::pair<GridFunction, SolveReport> discrete_perron_solve(
    const BellmanProblem& P, const GridFunction& sub, const GridFunction& super,
    const SolverOptions& opt, const QuadratureParams& q) {
    const auto t0 = std::chrono::steady_clock::now();
    GridFunction u = sub;
    u.set_bound(std::max(sub.bound(), super.bound()));

    std::vector<std::size_t> nodes = u.interior_nodes();
    for (std::size_t k : nodes)
        if (sub.value(k) > super.value(k) + 1e-12)
            throw std::invalid_argument("discrete_perron_solve: sub > super at a node");

    detail::PairSlopeCache cache;
    cache.slope.assign(nodes.size() * P.pairs.size(), std::numeric_limits<double>::quiet_NaN());
    cache.moments.resize(nodes.size() * P.pairs.size());
    cache.have_moments.assign(nodes.size() * P.pairs.size(), 0);

    SweepContext ctx;
    ctx.q = q;
    ctx.super = &super;
    ctx.mode = opt.mode;
    ctx.threads = opt.threads;
    ctx.cache = &cache;
    ctx.nodes = &nodes;

    SolveReport rep;
    std::vector<double> before(nodes.size());
    for (std::size_t s = 0; s < opt.max_sweeps; ++s) {
        for (std::size_t i = 0; i < nodes.size(); ++i) before[i] = u.value(nodes[i]);
        const SweepResult sr = sweep(P, u, ctx);
        rep.residual_history.push_back(sr.max_residual);
        ++rep.iterations;
        rep.final_max_delta = sr.max_delta;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double v = u.value(nodes[i]);
            if (v < before[i] - 1e-12 * std::max(1.0, std::fabs(before[i])))
                rep.monotone = false;
            if (v < sub.value(nodes[i]) - 1e-9 || v > super.value(nodes[i]) + 1e-9)
                rep.sandwich_ok = false;
        }
        if (sr.max_delta < opt.tol) {
            rep.converged = true;
            break;
        }
    }
    if (!rep.converged) rep.note = "max_sweeps reached before tolerance";

    rep.active_indices.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const detail::AffineNodeModel m = detail::node_model(P, u, nodes[i], q, &cache, i);
        rep.active_indices[i] = m.active(P, m.r0);
    }
    rep.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(u), std::move(rep)};
}

// Discrete sub/supersolution checks: sign of the residual at every interior
// node with u as both center and environment.
struct ResidualReport {
    bool pass = false;
    double worst = 0.0;         // most violating residual
    std::size_t worst_node = 0;
    std::size_t nodes = 0;
};

inline ResidualReport check_discrete_subsolution(const BellmanProblem& P, const GridFunction& u,
                                                 const QuadratureParams& q, double tol = 1e-8) {
    ResidualReport rep;
    const GridField uf(u);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (!u.node_interior(k)) continue;
        ++rep.nodes;
        const BellmanValue v = bellman_isaacs(P, uf, u.node(k), std::nullopt, q);
        if (v.value > worst) {
            worst = v.value;
            rep.worst_node = k;
        }
    }
    rep.worst = rep.nodes ? worst : 0.0;
    rep.pass = rep.worst <= tol;
    return rep;
}

inline ResidualReport check_discrete_supersolution(const BellmanProblem& P, const GridFunction& u,
                                                   const QuadratureParams& q, double tol = 1e-8) {
    ResidualReport rep;
    const GridField uf(u);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (!u.node_interior(k)) continue;
        ++rep.nodes;
        const BellmanValue v = bellman_isaacs(P, uf, u.node(k), std::nullopt, q);
        if (v.value < worst) {
            worst = v.value;
            rep.worst_node = k;
        }
    }
    rep.worst = rep.nodes ? worst : 0.0;
    rep.pass = rep.worst >= -tol;
    return rep;
}

}  // namespace nonlocal

#endif  // NONLOCAL_PERRON_HPP
