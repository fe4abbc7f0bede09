#ifndef NONLOCAL_FIELDS_HPP
#define NONLOCAL_FIELDS_HPP

#include <functional>
#include <utility>

#include "nonlocal/grid.hpp"
#include "nonlocal/quadrature.hpp"
#include "nonlocal/vec.hpp"

namespace nonlocal {

// Field concept used by the operator evaluators:
//   double value(const Vec&) const;
//   Vec    gradient(const Vec&, double step) const;
//   Mat    hessian(const Vec&, double step) const;
//   double sup_bound() const;          // for tail estimates
//   quad::Growth growth() const;
// Two models: lattice-backed (GridField) and closed-form (AnalyticField).

class GridField {
  public:
    explicit GridField(const GridFunction& gf) : gf_(&gf) {}

    double value(const Vec& y) const { return gf_->eval(y); }
    // lattice stencils ignore the requested step: the natural scale is h
    Vec gradient(const Vec& x, double /*step*/) const { return gf_->gradient(x); }
    Mat hessian(const Vec& x, double /*step*/) const { return gf_->hessian(x); }
    double sup_bound() const { return gf_->bound(); }
    quad::Growth growth() const { return {gf_->bound(), 0.0, 0.0}; }
    double natural_step() const { return gf_->spacing(); }
    const GridFunction& grid() const { return *gf_; }

  private:
    const GridFunction* gf_;
};

class AnalyticField {
  public:
    AnalyticField() = default;
    AnalyticField(std::function<double(const Vec&)> f, quad::Growth gw)
        : f_(std::move(f)), growth_{gw} {}
    AnalyticField(std::function<double(const Vec&)> f, std::function<Vec(const Vec&)> grad,
                  quad::Growth gw)
        : f_(std::move(f)), grad_(std::move(grad)), growth_{gw} {}

    double value(const Vec& y) const { return f_(y); }

    Vec gradient(const Vec& x, double step) const {
        if (grad_) return grad_(x);
        const int d = x.dim();
        Vec g(d);
        for (int i = 0; i < d; ++i) {
            const Vec e = unit(d, i);
            g[i] = (f_(x + step * e) - f_(x - step * e)) / (2.0 * step);
        }
        return g;
    }

    Mat hessian(const Vec& x, double step) const {
        const int d = x.dim();
        Mat h(d);
        const double uc = f_(x);
        for (int i = 0; i < d; ++i) {
            const Vec e = unit(d, i);
            h(i, i) = (f_(x + step * e) + f_(x - step * e) - 2.0 * uc) / (step * step);
            for (int j = i + 1; j < d; ++j) {
                const Vec ej = unit(d, j);
                const double v = (f_(x + step * e + step * ej) + f_(x - step * e - step * ej) -
                                  f_(x + step * e - step * ej) - f_(x - step * e + step * ej)) /
                                 (4.0 * step * step);
                h(i, j) = v;
                h(j, i) = v;
            }
        }
        return h;
    }

    double sup_bound() const { return growth_.c0; }  // meaningful when p == 0
    quad::Growth growth() const { return growth_; }
    double natural_step() const { return 0.0; }  // evaluator picks the near-field scale

    const std::function<double(const Vec&)>& fn() const { return f_; }

  private:
    std::function<double(const Vec&)> f_;
    std::function<Vec(const Vec&)> grad_;
    quad::Growth growth_{};
};

// Pointwise difference v - u of two analytic fields (test pairs of the
// ellipticity sandwich).
inline AnalyticField field_difference(const AnalyticField& v, const AnalyticField& u) {
    auto vf = v.fn();
    auto uf = u.fn();
    quad::Growth gw;
    gw.c0 = v.growth().c0 + u.growth().c0;
    gw.c1 = v.growth().c1 + u.growth().c1;
    gw.p = std::max(v.growth().p, u.growth().p);
    return AnalyticField([vf, uf](const Vec& y) { return vf(y) - uf(y); }, gw);
}

inline AnalyticField field_plus_constant(const AnalyticField& u, double c) {
    auto uf = u.fn();
    quad::Growth gw = u.growth();
    gw.c0 += std::fabs(c);
    return AnalyticField([uf, c](const Vec& y) { return uf(y) + c; }, gw);
}

}  // namespace nonlocal

#endif  // NONLOCAL_FIELDS_HPP
