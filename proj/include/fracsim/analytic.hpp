#pragma once

namespace fracsim {

/// Splitting-test stress 2N/(pi*d*l). d and l span the splitting plane
/// (specimen height times out-of-plane length). SI units.
double brazilian_stress(double N, double d, double l);

/// Cube splitting strength 0.64*N/a^2. The conventional 0.64 coefficient is
/// a rounded 2/pi; the exact variant is exposed separately.
double cube_splitting_strength(double N, double a);
double cube_splitting_strength_exact(double N, double a);

struct StrengthRatios {
    double overall = 0.0;  // f'w = Fult / A  (Pa)
    double contact = 0.0;  // CS  = Fult / As (Pa)
};

StrengthRatios strength_ratios(double Fult, double A, double As);

/// Regression of overall strength versus strip eccentricity, fitted on
/// centering-strip tests (R^2 = 0.88; likely specific to those dimensions
/// and material). Asymmetric units on purpose: takes mm, returns MPa,
/// exactly as the fit is quoted.
double eccentricity_strength(double es_mm);

/// Eccentricities covered by the fit; callers should flag extrapolation.
inline constexpr double kEccentricityFitMinMm = 0.0;
inline constexpr double kEccentricityFitMaxMm = 60.0;

}  // namespace fracsim
