#ifndef NONLOCAL_ELLIPTICITY_HPP
#define NONLOCAL_ELLIPTICITY_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace nonlocal {

// Order/ellipticity constants shared by kernels, operators and barriers:
// sigma in (0,2), 0 < lambda <= Lambda, annular measure fraction mu in (0,1],
// gradient-term constant C0 >= 0 (forced to 0 when sigma < 1).
struct EllipticityParams {
    double sigma = 1.0;
    double lambda = 1.0;
    double Lambda = 1.0;
    double mu = 1.0;
    double C0 = 0.0;

    void validate() const {
        if (!(sigma > 0.0 && sigma < 2.0))
            throw std::invalid_argument("EllipticityParams: sigma must lie in (0,2), got " +
                                        std::to_string(sigma));
        if (!(lambda > 0.0 && lambda <= Lambda))
            throw std::invalid_argument("EllipticityParams: need 0 < lambda <= Lambda");
        if (!(mu > 0.0 && mu <= 1.0))
            throw std::invalid_argument("EllipticityParams: mu must lie in (0,1]");
        if (C0 < 0.0) throw std::invalid_argument("EllipticityParams: C0 must be >= 0");
        if (sigma < 1.0 && C0 != 0.0)
            throw std::invalid_argument("EllipticityParams: C0 must vanish when sigma < 1");
    }
};

// Compensation regime of the increment delta_z u: none below order one,
// restricted to the unit ball at order one, global above it.
enum class CompRegime { kNone, kUnitBall, kFull };

inline CompRegime comp_regime(double sigma) {
    if (sigma < 1.0) return CompRegime::kNone;
    if (sigma == 1.0) return CompRegime::kUnitBall;
    return CompRegime::kFull;
}

// Indicator weight of the gradient compensation at offset z.
inline double comp_weight(CompRegime r, double abs_z) {
    switch (r) {
        case CompRegime::kNone: return 0.0;
        case CompRegime::kUnitBall: return abs_z < 1.0 ? 1.0 : 0.0;
        case CompRegime::kFull: return 1.0;
    }
    return 0.0;
}

}  // namespace nonlocal

#endif  // NONLOCAL_ELLIPTICITY_HPP
