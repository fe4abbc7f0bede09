#ifndef NONLOCAL_VEC_HPP
#define NONLOCAL_VEC_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>

namespace nonlocal {

// Small dense vector for spatial points/offsets, dimension 1..3.
inline constexpr int kMaxDim = 3;

struct Vec {
    std::array<double, kMaxDim> c{{0.0, 0.0, 0.0}};
    int n = 1;

    Vec() = default;
    explicit Vec(int dim) : n(dim) {
        if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Vec: dim must be 1..3");
    }
    Vec(std::initializer_list<double> xs) : n(static_cast<int>(xs.size())) {
        if (n < 1 || n > kMaxDim) throw std::invalid_argument("Vec: dim must be 1..3");
        int i = 0;
        for (double v : xs) c[static_cast<std::size_t>(i++)] = v;
    }

    double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
    int dim() const { return n; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] += o[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] -= o[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] *= s;
        return *this;
    }
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(double s, Vec a) { return a *= s; }
inline Vec operator*(Vec a, double s) { return a *= s; }
inline Vec operator-(Vec a) { return a *= -1.0; }

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int i = 0; i < a.n; ++i) s += a[i] * b[i];
    return s;
}
inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline Vec unit(int dim, int axis) {
    Vec e(dim);
    e[axis] = 1.0;
    return e;
}

// Symmetric matrix for Hessians, stored dense up to 3x3.
struct Mat {
    std::array<double, kMaxDim * kMaxDim> m{};
    int n = 1;

    Mat() = default;
    explicit Mat(int dim) : n(dim) {}
    double& operator()(int i, int j) { return m[static_cast<std::size_t>(i * kMaxDim + j)]; }
    double operator()(int i, int j) const { return m[static_cast<std::size_t>(i * kMaxDim + j)]; }
};

inline double quad_form(const Mat& h, const Vec& d) {
    double s = 0.0;
    for (int i = 0; i < d.n; ++i)
        for (int j = 0; j < d.n; ++j) s += h(i, j) * d[i] * d[j];
    return s;
}

// Volume of the unit ball and surface of the unit sphere in R^n.
inline double unit_ball_volume(int n) {
    switch (n) {
        case 1: return 2.0;
        case 2: return M_PI;
        case 3: return 4.0 * M_PI / 3.0;
        default: throw std::invalid_argument("unit_ball_volume: dim must be 1..3");
    }
}
inline double unit_sphere_area(int n) {
    switch (n) {
        case 1: return 2.0;
        case 2: return 2.0 * M_PI;
        case 3: return 4.0 * M_PI;
        default: throw std::invalid_argument("unit_sphere_area: dim must be 1..3");
    }
}

}  // namespace nonlocal

#endif  // NONLOCAL_VEC_HPP
