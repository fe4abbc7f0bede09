#ifndef NONLOCAL_KERNELS_HPP
#define NONLOCAL_KERNELS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nonlocal/ellipticity.hpp"
#include "nonlocal/vec.hpp"

namespace nonlocal {

// A Levy kernel: nonnegative density K(x,z) for z != 0, together with the
// ellipticity metadata of the class it is declared to belong to. The class
// membership itself is certified numerically, never assumed.
struct Kernel {
    using Density = std::function<double(const Vec& x, const Vec& z)>;

    Density density;
    EllipticityParams params;
    std::string label;
    int dim = 1;

    double operator()(const Vec& x, const Vec& z) const { return density(x, z); }
};

// K(z) = A (2-sigma) |z|^{-n-sigma}, independent of x.
inline Kernel make_fractional_kernel(const EllipticityParams& params, double amplitude,
                                     int dim = 1, std::string label = "fractional") {
    params.validate();
    if (!(amplitude > 0.0))
        throw std::invalid_argument("make_fractional_kernel: amplitude must be positive");
    const double a = amplitude * (2.0 - params.sigma);
    const double expo = -(static_cast<double>(dim) + params.sigma);
    Kernel k;
    k.params = params;
    k.dim = dim;
    k.label = std::move(label);
    k.density = [a, expo](const Vec&, const Vec& z) { return a * std::pow(norm(z), expo); };
    return k;
}

// Fractional profile modulated by a direction weight:
//   K(z) = A (2-sigma) (1 + (ratio-1) (z.axis/|z|)^2) |z|^{-n-sigma}.
inline Kernel make_anisotropic_kernel(const EllipticityParams& params, double amplitude,
                                      Vec axis, double ratio, std::string label = "anisotropic") {
    params.validate();
    if (!(amplitude > 0.0) || !(ratio > 0.0))
        throw std::invalid_argument("make_anisotropic_kernel: amplitude and ratio must be positive");
    const int dim = axis.dim();
    const double an = norm(axis);
    if (!(an > 0.0)) throw std::invalid_argument("make_anisotropic_kernel: zero axis");
    axis *= 1.0 / an;
    const double a = amplitude * (2.0 - params.sigma);
    const double expo = -(static_cast<double>(dim) + params.sigma);
    Kernel k;
    k.params = params;
    k.dim = dim;
    k.label = std::move(label);
    k.density = [a, expo, axis, ratio](const Vec&, const Vec& z) {
        const double r = norm(z);
        const double c = dot(z, axis) / r;
        return a * (1.0 + (ratio - 1.0) * c * c) * std::pow(r, expo);
    };
    return k;
}

// Fractional profile supported on a half-space {z.axis > 0}; doubled amplitude
// keeps the total annular mass of the two-sided kernel.
inline Kernel make_halfspace_kernel(const EllipticityParams& params, double amplitude, Vec axis,
                                    std::string label = "halfspace") {
    params.validate();
    if (!(amplitude > 0.0))
        throw std::invalid_argument("make_halfspace_kernel: amplitude must be positive");
    const int dim = axis.dim();
    const double an = norm(axis);
    if (!(an > 0.0)) throw std::invalid_argument("make_halfspace_kernel: zero axis");
    axis *= 1.0 / an;
    const double a = 2.0 * amplitude * (2.0 - params.sigma);
    const double expo = -(static_cast<double>(dim) + params.sigma);
    Kernel k;
    k.params = params;
    k.dim = dim;
    k.label = std::move(label);
    k.density = [a, expo, axis](const Vec&, const Vec& z) {
        if (dot(z, axis) <= 0.0) return 0.0;
        return a * std::pow(norm(z), expo);
    };
    return k;
}

// Fractional kernel whose amplitude varies affinely with the base point x:
//   K(x,z) = (a0 + slope.x) (2-sigma) |z|^{-n-sigma}, clamped below.
// The x-dependence makes the resulting operators non-translation-invariant.
inline Kernel make_scaled_fractional_kernel(const EllipticityParams& params, double a0, Vec slope,
                                            double floor_amp = 1e-8,
                                            std::string label = "scaled_fractional") {
    params.validate();
    if (!(a0 > 0.0)) throw std::invalid_argument("make_scaled_fractional_kernel: a0 must be positive");
    const int dim = slope.dim();
    const double two_minus = 2.0 - params.sigma;
    const double expo = -(static_cast<double>(dim) + params.sigma);
    Kernel k;
    k.params = params;
    k.dim = dim;
    k.label = std::move(label);
    k.density = [a0, slope, floor_amp, two_minus, expo](const Vec& x, const Vec& z) {
        const double amp = std::max(floor_amp, a0 + dot(slope, x));
        return amp * two_minus * std::pow(norm(z), expo);
    };
    return k;
}

// Tabulated radial profile: rows of (|z|, density) interpreted per direction
// sign in 1d (columns z, density) or isotropically in higher dimension.
// Log-log linear interpolation between samples, power-law extension outside.
struct TableKernelData {
    // sorted by radius; value is the density at that radius
    std::vector<std::pair<double, double>> positive;  // z > 0 ray (or isotropic profile)
    std::vector<std::pair<double, double>> negative;  // z < 0 ray (1d only; may be empty)
};

namespace detail {
inline double table_interp(const std::vector<std::pair<double, double>>& tab, double r) {
    if (tab.empty()) return 0.0;
    if (tab.size() == 1) return tab.front().second;
    auto it = std::lower_bound(tab.begin(), tab.end(), r,
                               [](const auto& p, double v) { return p.first < v; });
    std::size_t hi = static_cast<std::size_t>(it - tab.begin());
    if (hi == 0) hi = 1;
    if (hi >= tab.size()) hi = tab.size() - 1;
    const auto& [r0, v0] = tab[hi - 1];
    const auto& [r1, v1] = tab[hi];
    if (v0 <= 0.0 || v1 <= 0.0) {
        // linear fallback when a sample vanishes
        const double t = (r - r0) / (r1 - r0);
        return std::max(0.0, v0 + t * (v1 - v0));
    }
    const double t = (std::log(r) - std::log(r0)) / (std::log(r1) - std::log(r0));
    return std::exp(std::log(v0) + t * (std::log(v1) - std::log(v0)));
}
}  // namespace detail

inline Kernel make_table_kernel(const EllipticityParams& params, TableKernelData data, int dim,
                                std::string label = "table") {
    params.validate();
    if (data.positive.empty()) throw std::invalid_argument("make_table_kernel: empty table");
    std::sort(data.positive.begin(), data.positive.end());
    std::sort(data.negative.begin(), data.negative.end());
    auto shared = std::make_shared<TableKernelData>(std::move(data));
    Kernel k;
    k.params = params;
    k.dim = dim;
    k.label = std::move(label);
    if (dim == 1) {
        k.density = [shared](const Vec&, const Vec& z) {
            const double r = std::fabs(z[0]);
            const auto& tab = (z[0] >= 0.0 || shared->negative.empty()) ? shared->positive
                                                                        : shared->negative;
            return detail::table_interp(tab, r);
        };
    } else {
        k.density = [shared](const Vec&, const Vec& z) {
            return detail::table_interp(shared->positive, norm(z));
        };
    }
    return k;
}

// r^{n+sigma} K(x, r z): the rescaled kernel of the same class.
inline Kernel rescale_kernel(const Kernel& k, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("rescale_kernel: r must be positive");
    const double amp = std::pow(r, static_cast<double>(k.dim) + k.params.sigma);
    Kernel out = k;
    out.label = k.label + "@" + std::to_string(r);
    Kernel::Density base = k.density;
    out.density = [base, amp, r](const Vec& x, const Vec& z) { return amp * base(x, r * z); };
    return out;
}

inline Kernel scale_amplitude(const Kernel& k, double factor, std::string label = "") {
    if (!(factor > 0.0)) throw std::invalid_argument("scale_amplitude: factor must be positive");
    Kernel out = k;
    out.label = label.empty() ? k.label + "*" + std::to_string(factor) : std::move(label);
    Kernel::Density base = k.density;
    out.density = [base, factor](const Vec& x, const Vec& z) { return factor * base(x, z); };
    return out;
}

}  // namespace nonlocal

#endif  // NONLOCAL_KERNELS_HPP
