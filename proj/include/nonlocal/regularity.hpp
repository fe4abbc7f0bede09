#ifndef NONLOCAL_REGULARITY_HPP
#define NONLOCAL_REGULARITY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "nonlocal/grid.hpp"
#include "nonlocal/vec.hpp"

namespace nonlocal {

// Dyadic oscillation profile around a center: per level k the extrema of w
// over the lattice nodes strictly inside B_{base^{-k}}(center), and the
// fitted Holder exponent from the log-oscillation slope.
struct HolderReport {
    Vec center;
    double base = 8.0;
    int levels = 0;
    std::vector<double> m_k;  // nondecreasing minima
    std::vector<double> M_k;  // nonincreasing maxima
    std::vector<std::size_t> nodes_k;
    bool fitted = false;
    bool perfect_regularity = false;  // all oscillations vanish
    double alpha_hat = 0.0;
    double fit_residual = 0.0;
    double epsilon4_implied = 0.0;  // 2 (1 - base^{-alpha_hat})
    std::string note;
};

inline HolderReport oscillation_profile(const GridFunction& w, const Vec& center, double base,
                                        int levels) {
    if (!(base > 1.0)) throw std::invalid_argument("oscillation_profile: base must exceed 1");
    if (levels < 1) throw std::invalid_argument("oscillation_profile: need at least one level");
    HolderReport rep;
    rep.center = center;
    rep.base = base;
    rep.levels = levels;
    for (int k = 0; k < levels; ++k) {
        const double radius = std::pow(base, -k);
        double mn = std::numeric_limits<double>::infinity();
        double mx = -std::numeric_limits<double>::infinity();
        std::size_t cnt = 0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const Vec y = w.node(i);
            if (norm(y - center) >= radius) continue;
            const double v = w.value(i);
            mn = std::min(mn, v);
            mx = std::max(mx, v);
            ++cnt;
        }
        if (k == levels - 1 && cnt < 8)
            throw std::invalid_argument(
                "oscillation_profile: grid too coarse at the requested depth (deepest ball holds " +
                std::to_string(cnt) + " nodes)");
        rep.m_k.push_back(mn);
        rep.M_k.push_back(mx);
        rep.nodes_k.push_back(cnt);
    }
    return rep;
}

// Least-squares slope of log(M_k - m_k) against k log(base), levels k >= 1.
inline HolderReport fit_holder_exponent(HolderReport rep) {
    std::vector<double> xs, ys;
    for (int k = 1; k < rep.levels; ++k) {
        const double osc = rep.M_k[static_cast<std::size_t>(k)] - rep.m_k[static_cast<std::size_t>(k)];
        if (osc > 0.0) {
            xs.push_back(k * std::log(rep.base));
            ys.push_back(std::log(osc));
        }
    }
    if (xs.empty()) {
        rep.perfect_regularity = true;
        rep.note = "all oscillations vanish; exponent undefined";
        return rep;
    }
    if (xs.size() < 3) {
        rep.note = "fewer than 3 usable levels; no fit";
        return rep;
    }
    const std::size_t n = xs.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double icept = (sy - slope * sx) / n;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ys[i] - (icept + slope * xs[i]);
        rss += e * e;
    }
    rep.fitted = true;
    rep.alpha_hat = -slope;
    rep.fit_residual = std::sqrt(rss / n);
    rep.epsilon4_implied = 2.0 * (1.0 - std::pow(rep.base, -rep.alpha_hat));
    return rep;
}

// Superlevel-set tail of a nonnegative supersolution: lattice measure of
// {u > t} within B_r(center) per threshold, and the fitted distribution bound
//   C r^n (u(center) + C1 r^sigma)^{eps3} t^{-eps3}.
struct HarnackReport {
    Vec center;
    int dim = 1;
    double r = 0.0;
    double C1 = 0.0;
    double sigma = 0.0;
    double u_center = 0.0;
    std::vector<double> thresholds;
    std::vector<double> measures;  // lattice measure |{u > t} & B_r|
    bool fitted = false;
    double epsilon3 = 0.0;
    double C = 0.0;
    bool majorizes = false;
    std::string note;
};

inline HarnackReport weak_harnack_check(const GridFunction& u, const Vec& center, double r,
                                        double C1, double sigma, std::vector<double> thresholds) {
    HarnackReport rep;
    rep.center = center;
    rep.dim = u.dim();
    rep.r = r;
    rep.C1 = C1;
    rep.sigma = sigma;
    std::sort(thresholds.begin(), thresholds.end());
    rep.thresholds = thresholds;

    const int dim = u.dim();
    const double cell = std::pow(u.spacing(), dim);
    std::vector<std::size_t> in_ball;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u.value(i) < 0.0)
            throw std::invalid_argument("weak_harnack_check: u must be nonnegative on all nodes");
        if (norm(u.node(i) - center) < r) in_ball.push_back(i);
    }
    rep.u_center = u.eval(center);

    for (double t : thresholds) {
        std::size_t cnt = 0;
        for (std::size_t i : in_ball)
            if (u.value(i) > t) ++cnt;
        rep.measures.push_back(static_cast<double>(cnt) * cell);
    }

    // log-log fit on the decaying tail (upper half of the positive-measure rows)
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < rep.thresholds.size(); ++i)
        if (rep.measures[i] > 0.0 && rep.thresholds[i] > 0.0) {
            xs.push_back(std::log(rep.thresholds[i]));
            ys.push_back(std::log(rep.measures[i]));
        }
    if (xs.size() >= 3) {
        const std::size_t lo = xs.size() / 2;
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        const double n = static_cast<double>(xs.size() - lo);
        for (std::size_t i = lo; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        const double denom = n * sxx - sx * sx;
        if (std::fabs(denom) > 1e-30) {
            const double slope = (n * sxy - sx * sy) / denom;
            rep.epsilon3 = -slope;
            rep.fitted = rep.epsilon3 > 0.0;
        }
    }
    if (!rep.fitted) {
        rep.note = "tail too short or not decaying; no exponent fitted";
        return rep;
    }

    // smallest C that majorizes every measurement, then verify
    const double scale = std::pow(r, dim) *
                         std::pow(rep.u_center + C1 * std::pow(r, sigma), rep.epsilon3);
    double c_needed = 0.0;
    for (std::size_t i = 0; i < rep.thresholds.size(); ++i) {
        if (rep.thresholds[i] <= 0.0) continue;
        c_needed = std::max(c_needed, rep.measures[i] * std::pow(rep.thresholds[i], rep.epsilon3) /
                                          scale);
    }
    rep.C = c_needed * (1.0 + 1e-12);
    rep.majorizes = true;
    for (std::size_t i = 0; i < rep.thresholds.size(); ++i) {
        if (rep.thresholds[i] <= 0.0) continue;
        const double bound = rep.C * scale * std::pow(rep.thresholds[i], -rep.epsilon3);
        if (rep.measures[i] > bound * (1.0 + 1e-9)) rep.majorizes = false;
    }
    return rep;
}

}  // namespace nonlocal

#endif  // NONLOCAL_REGULARITY_HPP
