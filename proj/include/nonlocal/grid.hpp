#ifndef NONLOCAL_GRID_HPP
#define NONLOCAL_GRID_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "nonlocal/vec.hpp"

namespace nonlocal {

struct Box {
    Vec lo, hi;
    int dim() const { return lo.dim(); }
    bool contains(const Vec& y, double eps = 0.0) const {
        for (int i = 0; i < dim(); ++i)
            if (y[i] < lo[i] - eps || y[i] > hi[i] + eps) return false;
        return true;
    }
};

// Lattice values on a box containing the domain closure, plus an exterior
// datum callable used beyond the box. Nodes are flagged interior (unknowns of
// the Dirichlet problem) or exterior (frozen at the datum).
class GridFunction {
  public:
    GridFunction() = default;

    GridFunction(Box box, double h, std::function<bool(const Vec&)> inside_domain,
                 std::function<double(const Vec&)> exterior_datum, double bound)
        : box_(box), h_(h), inside_(std::move(inside_domain)),
          datum_(std::move(exterior_datum)), bound_(bound) {
        if (!(h > 0.0)) throw std::invalid_argument("GridFunction: h must be positive");
        const int d = box.dim();
        total_ = 1;
        for (int i = 0; i < d; ++i) {
            counts_[static_cast<std::size_t>(i)] =
                static_cast<int>(std::floor((box.hi[i] - box.lo[i]) / h + 1e-9)) + 1;
            if (counts_[static_cast<std::size_t>(i)] < 2)
                throw std::invalid_argument("GridFunction: box too small for spacing");
            // snap the upper face onto the lattice
            box_.hi[i] = box.lo[i] + (counts_[static_cast<std::size_t>(i)] - 1) * h;
            total_ *= static_cast<std::size_t>(counts_[static_cast<std::size_t>(i)]);
        }
        values_.assign(total_, 0.0);
        interior_.assign(total_, 0);
        for (std::size_t k = 0; k < total_; ++k) {
            const Vec x = node(k);
            if (inside_ && inside_(x)) {
                interior_[k] = 1;
            } else {
                values_[k] = datum_ ? datum_(x) : 0.0;
            }
        }
    }

    int dim() const { return box_.dim(); }
    double spacing() const { return h_; }
    const Box& box() const { return box_; }
    double bound() const { return bound_; }
    void set_bound(double b) { bound_ = b; }
    std::size_t size() const { return total_; }
    int count(int axis) const { return counts_[static_cast<std::size_t>(axis)]; }
    bool node_interior(std::size_t k) const { return interior_[k] != 0; }
    bool in_domain(const Vec& y) const { return inside_ && inside_(y); }
    const std::function<double(const Vec&)>& exterior_datum() const { return datum_; }

    Vec node(std::size_t flat) const {
        Vec x(dim());
        std::size_t rem = flat;
        for (int i = dim() - 1; i >= 0; --i) {
            const std::size_t c = static_cast<std::size_t>(counts_[static_cast<std::size_t>(i)]);
            x[i] = box_.lo[i] + static_cast<double>(rem % c) * h_;
            rem /= c;
        }
        return x;
    }

    std::size_t flat(const std::array<int, kMaxDim>& idx) const {
        std::size_t f = 0;
        for (int i = 0; i < dim(); ++i)
            f = f * static_cast<std::size_t>(counts_[static_cast<std::size_t>(i)]) +
                static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]);
        return f;
    }

    double value(std::size_t k) const { return values_[k]; }
    void set_value(std::size_t k, double v) { values_[k] = v; }
    std::vector<double>& raw_values() { return values_; }
    const std::vector<double>& raw_values() const { return values_; }

    // nearest lattice node, or total_ if y is outside the box
    std::size_t nearest_node(const Vec& y) const {
        if (!box_.contains(y, 0.5 * h_)) return total_;
        std::array<int, kMaxDim> idx{};
        for (int i = 0; i < dim(); ++i) {
            int k = static_cast<int>(std::lround((y[i] - box_.lo[i]) / h_));
            k = std::clamp(k, 0, counts_[static_cast<std::size_t>(i)] - 1);
            idx[static_cast<std::size_t>(i)] = k;
        }
        return flat(idx);
    }

    // multilinear interpolation inside the box, exterior datum outside
    double eval(const Vec& y) const {
        if (!box_.contains(y)) {
            if (!datum_) throw std::domain_error("GridFunction::eval: no exterior datum");
            return datum_(y);
        }
        const int d = dim();
        std::array<int, kMaxDim> base{};
        std::array<double, kMaxDim> frac{};
        for (int i = 0; i < d; ++i) {
            double t = (y[i] - box_.lo[i]) / h_;
            int k = static_cast<int>(std::floor(t));
            k = std::clamp(k, 0, counts_[static_cast<std::size_t>(i)] - 2);
            base[static_cast<std::size_t>(i)] = k;
            frac[static_cast<std::size_t>(i)] = std::clamp(t - k, 0.0, 1.0);
        }
        double acc = 0.0;
        const int corners = 1 << d;
        for (int c = 0; c < corners; ++c) {
            double w = 1.0;
            std::array<int, kMaxDim> idx = base;
            for (int i = 0; i < d; ++i) {
                if (c & (1 << i)) {
                    idx[static_cast<std::size_t>(i)] += 1;
                    w *= frac[static_cast<std::size_t>(i)];
                } else {
                    w *= 1.0 - frac[static_cast<std::size_t>(i)];
                }
            }
            if (w != 0.0) acc += w * values_[flat(idx)];
        }
        return acc;
    }

    // centered lattice differences (one-sided at the box faces)
    Vec gradient(const Vec& x) const {
        const int d = dim();
        Vec g(d);
        for (int i = 0; i < d; ++i) {
            const Vec e = unit(d, i);
            const bool lo_ok = x[i] - h_ >= box_.lo[i] - 1e-12;
            const bool hi_ok = x[i] + h_ <= box_.hi[i] + 1e-12;
            if (lo_ok && hi_ok)
                g[i] = (eval(x + h_ * e) - eval(x - h_ * e)) / (2.0 * h_);
            else if (hi_ok)
                g[i] = (eval(x + h_ * e) - eval(x)) / h_;
            else
                g[i] = (eval(x) - eval(x - h_ * e)) / h_;
        }
        return g;
    }

    Mat hessian(const Vec& x) const {
        const int d = dim();
        Mat hm(d);
        const double uc = eval(x);
        for (int i = 0; i < d; ++i) {
            const Vec e = unit(d, i);
            hm(i, i) = (eval(x + h_ * e) + eval(x - h_ * e) - 2.0 * uc) / (h_ * h_);
            for (int j = i + 1; j < d; ++j) {
                const Vec f = unit(d, j);
                const double v = (eval(x + h_ * e + h_ * f) + eval(x - h_ * e - h_ * f) -
                                  eval(x + h_ * e - h_ * f) - eval(x - h_ * e + h_ * f)) /
                                 (4.0 * h_ * h_);
                hm(i, j) = v;
                hm(j, i) = v;
            }
        }
        return hm;
    }

    std::vector<std::size_t> interior_nodes() const {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < total_; ++k)
            if (interior_[k]) out.push_back(k);
        return out;
    }

  private:
    Box box_{};
    double h_ = 1.0;
    std::array<int, kMaxDim> counts_{{1, 1, 1}};
    std::size_t total_ = 0;
    std::vector<double> values_;
    std::vector<std::uint8_t> interior_;
    std::function<bool(const Vec&)> inside_;
    std::function<double(const Vec&)> datum_;
    double bound_ = 0.0;
};

// Fill every node (interior and exterior alike) by sampling a function.
inline void fill_from(GridFunction& gf, const std::function<double(const Vec&)>& f) {
    for (std::size_t k = 0; k < gf.size(); ++k) gf.set_value(k, f(gf.node(k)));
}

}  // namespace nonlocal

#endif  // NONLOCAL_GRID_HPP
