#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "fracsim/mesh.hpp"

namespace fracsim {

/// Normalized secant-stiffness curve E*(e*): clamped piecewise-linear through
/// an ordered breakpoint list. e* is the scaled strain (estar_scale times the
/// first principal strain), E* the stiffness fraction relative to E_ini.
struct StepFunction {
    std::vector<std::array<double, 2>> breakpoints;  // (e_star, E_star)

    /// Built-in softening curve for calcium silicate: unit plateau up to
    /// e* = 2.0, then a steep drop to a 0.028 residual at e* = 5.0.
    static StepFunction default_curve();

    /// End of the undamaged plateau (last e* with E* equal to the first value).
    double plateau_end() const;
};

/// Throws ConfigError unless e* strictly increases, E* stays in (0, 1] and
/// starts at 1, and the curve is non-increasing beyond the plateau.
void validate_step_function(const StepFunction& sf);

struct MaterialParams {
    double E_avg = 6.0e9;       // Pa, mean block modulus
    double f_t = 2.0e6;         // Pa, tensile strength
    double nu_casi = 0.2;
    double E_rubber = 1.0e9;    // Pa
    double nu_rubber = 0.45;
    double E_floor = 1.0e7;     // Pa, additive residual stiffness in the secant law
    double estar_scale = 6000.0;
};

/// Seeded per-patch initial Young's moduli, uniform on [E_min, E_max].
struct RandomField {
    std::uint64_t seed = 0;
    double E_min = 0.0;
    double E_max = 0.0;
    std::map<int, double> patch_E;  // patch index -> E_ini (Pa)
};

double eval_step(const StepFunction& sf, double e_star);

/// e* = estar_scale * max(ep1, 0); compression never damages.
double strain_to_estar(double ep1, const MaterialParams& params);

/// Deterministic across platforms: mt19937_64 streams one draw per patch in
/// ascending patch-index order, mapped to [0,1) through the top 53 bits.
RandomField sample_field(std::uint64_t seed, const std::vector<int>& patches,
                         double E_min, double E_max);

/// Secant modulus E = E_floor + E*(e*) * patch_E with e* from ep1.
double secant_modulus(double patch_E, double ep1, const StepFunction& sf,
                      const MaterialParams& params);

/// Same law evaluated at an already-scaled e* (used with damage histories).
double secant_modulus_at_estar(double patch_E, double e_star, const StepFunction& sf,
                               const MaterialParams& params);

/// Per-element initial moduli: casi elements read their patch, rubber gets E_rubber.
std::vector<double> element_initial_E(const Mesh& mesh, const RandomField& field,
                                      const MaterialParams& params);

}  // namespace fracsim
