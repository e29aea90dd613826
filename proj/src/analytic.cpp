#include "fracsim/analytic.hpp"

#include <cmath>
#include <numbers>

#include "fracsim/errors.hpp"

namespace fracsim {

double brazilian_stress(double N, double d, double l) {
    if (!(d > 0.0 && l > 0.0)) {
        throw InputError("brazilian stress: splitting-plane dimensions must be positive");
    }
    return 2.0 * N / (std::numbers::pi * d * l);
}

double cube_splitting_strength(double N, double a) {
    if (!(a > 0.0)) throw InputError("cube strength: rib must be positive");
    return 0.64 * N / (a * a);
}

double cube_splitting_strength_exact(double N, double a) {
    if (!(a > 0.0)) throw InputError("cube strength: rib must be positive");
    return (2.0 / std::numbers::pi) * N / (a * a);
}

StrengthRatios strength_ratios(double Fult, double A, double As) {
    if (!(A > 0.0 && As > 0.0)) {
        throw InputError("strength ratios: loaded areas must be positive");
    }
    return {Fult / A, Fult / As};
}

double eccentricity_strength(double es_mm) {
    return -0.1035 * es_mm + 25.226;
}

}  // namespace fracsim
