// Test-only oracles, independent of the library's quadrature and solver paths:
// composite Simpson rules, a dense LU solve, and a scalar residual scan.
#ifndef NONLOCAL_TESTS_ORACLES_HPP
#define NONLOCAL_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// graded composite Simpson on (0, b]: geometric panels toward 0 handle the
// kernel singularity
inline double simpson_graded(const std::function<double(double)>& f, double b, int levels = 60,
                             int per_panel = 64) {
    double total = 0.0;
    double hi = b;
    for (int l = 0; l < levels; ++l) {
        const double lo = hi * 0.5;
        total += simpson(f, lo, hi, per_panel);
        hi = lo;
    }
    return total;
}

// truncated cosine symbol of the 1d kernel A(2-s)|z|^{-1-s}:
//   c_R = int_{|z|<=R} (1 - cos z) K(z) dz
inline double cosine_symbol_truncated(double sigma, double A, double R) {
    auto f = [sigma, A](double z) {
        return (1.0 - std::cos(z)) * A * (2.0 - sigma) * std::pow(z, -1.0 - sigma);
    };
    return 2.0 * (simpson_graded(f, 1.0) + simpson(f, 1.0, R, 400000));
}

// dense LU with partial pivoting; solves A x = b in place
inline std::vector<double> lu_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = A.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(A[i][k]) > std::fabs(A[piv][k])) piv = i;
        if (std::fabs(A[piv][k]) < 1e-300) throw std::runtime_error("lu_solve: singular matrix");
        std::swap(A[piv], A[k]);
        std::swap(b[piv], b[k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = A[i][k] / A[k][k];
            if (m == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) A[i][j] -= m * A[k][j];
            b[i] -= m * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
        x[i] = s / A[i][i];
    }
    return x;
}

// finest root of a monotone scalar function on [lo, hi] by dense scan plus
// bisection refinement
inline double scalar_root_scan(const std::function<double(double)>& f, double lo, double hi,
                               int scan = 4000) {
    double a = lo, fa = f(a);
    double root = lo;
    bool found = false;
    for (int i = 1; i <= scan; ++i) {
        const double b = lo + (hi - lo) * i / scan;
        const double fb = f(b);
        if (fa <= 0.0 && fb >= 0.0) {
            double x0 = a, x1 = b;
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (x0 + x1);
                if (f(m) <= 0.0)
                    x0 = m;
                else
                    x1 = m;
            }
            root = 0.5 * (x0 + x1);
            found = true;
            break;
        }
        a = b;
        fa = fb;
    }
    if (!found) throw std::runtime_error("scalar_root_scan: no sign change");
    return root;
}

}  // namespace oracles

#endif
