#include <cstdio>
#include <cmath>
#include "nonlocal/operators.hpp"
using namespace nonlocal;

int main() {
    // scaling law: L_{K_r} v (x) = r^sigma (L_K u)(r x), v(y)=u(ry), matched lattices
    for (double sigma : {0.5, 1.0, 1.5}) {
        for (double r : {0.5, 0.25}) {
            EllipticityParams ep; ep.sigma = sigma;
            Kernel K = make_fractional_kernel(ep, 1.3, 1);
            Kernel Kr = rescale_kernel(K, r);
            auto uf = [](const Vec& y){ return std::cos(y[0]) + 0.3*std::sin(2*y[0]); };
            double h = 1.0/256;
            Box boxu{Vec{-3.0}, Vec{3.0}};
            GridFunction gu(boxu, r*h, [](const Vec& y){ return std::fabs(y[0]) < 1.0; }, uf, 1.3);
            fill_from(gu, uf);
            auto vf = [uf, r](const Vec& y){ return uf(Vec{r*y[0]}); };
            Box boxv{Vec{-3.0/r}, Vec{3.0/r}};
            GridFunction gv(boxv, h, [r](const Vec& y){ return std::fabs(r*y[0]) < 1.0; }, vf, 1.3);
            fill_from(gv, vf);
            QuadratureParams qv; qv.inner_radius = 2*h; qv.truncation = 16.0; qv.annuli_per_decade=5;
            QuadratureParams qu = qv; qu.inner_radius = 2*h*r; qu.truncation = 16.0*r;
            Vec xv{0.5}; Vec xu{0.5*r};
            OpValue lv = evaluate_linear(Kr, GridField(gv), xv, qv);
            OpValue lu = evaluate_linear(K, GridField(gu), xu, qu);
            double lhs = lv.value, rhs = std::pow(r, sigma)*lu.value;
            std::printf("sigma=%.1f r=%.2f: lhs=%.14f rhs=%.14f diff=%.2e tails=%.1e/%.1e\n",
                        sigma, r, lhs, rhs, std::fabs(lhs-rhs), lv.tail, std::pow(r,sigma)*lu.tail);
        }
    }
    // duality: extremal_plus(family, -u) == -extremal_minus(family, u) bitwise
    {
        EllipticityParams ep; ep.sigma = 1.5;
        std::vector<Kernel> fam = {make_fractional_kernel(ep, 1.0, 1),
                                   make_anisotropic_kernel(ep, 1.5, Vec{1.0}, 2.0)};
        double h = 1.0/64;
        Box box{Vec{-2.0}, Vec{2.0}};
        auto inside = [](const Vec& y){ return std::fabs(y[0]) < 1.0; };
        GridFunction g1(box, h, inside, [](const Vec& y){ return std::exp(-y[0]*y[0]); }, 2.0);
        fill_from(g1, [](const Vec& y){ return std::exp(-y[0]*y[0]) + 0.2*std::sin(3*y[0]); });
        GridFunction g2(box, h, inside, [](const Vec& y){ return -std::exp(-y[0]*y[0]); }, 2.0);
        for (std::size_t i = 0; i < g2.size(); ++i) g2.set_value(i, -g1.value(i));
        QuadratureParams q; q.truncation = 8.0;
        int exact = 0, total = 0;
        for (double x0 = -0.9; x0 <= 0.9; x0 += 0.15) {
            Vec x{x0};
            double a = extremal_plus(fam, GridField(g2), x, q).value;
            double b = -extremal_minus(fam, GridField(g1), x, q).value;
            total++; if (a == b) exact++;
        }
        std::printf("duality: %d/%d bit-exact\n", exact, total);
    }
    return 0;
}
