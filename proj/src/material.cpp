#include "fracsim/material.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fracsim/errors.hpp"

namespace fracsim {

StepFunction StepFunction::default_curve() {
    return StepFunction{{{0.0, 1.0},
                         {2.0, 1.0},
                         {2.2, 0.96},
                         {2.3, 0.85},
                         {2.4, 0.5},
                         {2.5, 0.2},
                         {2.6, 0.1},
                         {2.8, 0.05},
                         {5.0, 0.028}}};
}

double StepFunction::plateau_end() const {
    const double first = breakpoints.front()[1];
    double end = breakpoints.front()[0];
    for (const auto& bp : breakpoints) {
        if (bp[1] != first) break;
        end = bp[0];
    }
    return end;
}

void validate_step_function(const StepFunction& sf) {
    if (sf.breakpoints.size() < 2) {
        throw ConfigError("step function: need at least two breakpoints");
    }
    if (sf.breakpoints.front()[1] != 1.0) {
        throw ConfigError("step function: first E* must be 1");
    }
    for (std::size_t i = 0; i < sf.breakpoints.size(); ++i) {
        const auto& [e, E] = sf.breakpoints[i];
        if (!(E > 0.0 && E <= 1.0)) {
            throw ConfigError("step function: E* must lie in (0, 1]");
        }
        if (i > 0) {
            if (e <= sf.breakpoints[i - 1][0]) {
                throw ConfigError("step function: e* must be strictly increasing");
            }
            if (E > sf.breakpoints[i - 1][1]) {
                throw ConfigError("step function: E* must not increase");
            }
        }
    }
    if (sf.breakpoints.front()[0] < 0.0) {
        throw ConfigError("step function: e* must be non-negative");
    }
}

double eval_step(const StepFunction& sf, double e_star) {
    if (e_star < 0.0 || !std::isfinite(e_star)) {
        throw InputError("eval_step: e* must be finite and non-negative");
    }
    const auto& bp = sf.breakpoints;
    if (e_star <= bp.front()[0]) return bp.front()[1];
    if (e_star >= bp.back()[0]) return bp.back()[1];
    // first breakpoint with e >= e_star; predecessor exists by the checks above
    auto hi = std::lower_bound(bp.begin(), bp.end(), e_star,
                               [](const auto& b, double v) { return b[0] < v; });
    if ((*hi)[0] == e_star) return (*hi)[1];
    auto lo = hi - 1;
    const double t = (e_star - (*lo)[0]) / ((*hi)[0] - (*lo)[0]);
    return (*lo)[1] + t * ((*hi)[1] - (*lo)[1]);
}

double strain_to_estar(double ep1, const MaterialParams& params) {
    return params.estar_scale * std::max(ep1, 0.0);
}

RandomField sample_field(std::uint64_t seed, const std::vector<int>& patches,
                         double E_min, double E_max) {
    if (patches.empty()) throw ConfigError("random field: empty patch set");
    if (!(E_min < E_max)) throw ConfigError("random field: need E_min < E_max");

    std::vector<int> order = patches;
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());

    RandomField field;
    field.seed = seed;
    field.E_min = E_min;
    field.E_max = E_max;
    // mt19937_64 output is specified bit-for-bit by the standard; the top 53
    // bits map to a double in [0,1), so the field is platform-independent.
    std::mt19937_64 rng(seed);
    for (int p : order) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        field.patch_E[p] = E_min + u * (E_max - E_min);
    }
    return field;
}

double secant_modulus_at_estar(double patch_E, double e_star, const StepFunction& sf,
                               const MaterialParams& params) {
    return params.E_floor + eval_step(sf, e_star) * patch_E;
}

double secant_modulus(double patch_E, double ep1, const StepFunction& sf,
                      const MaterialParams& params) {
    if (patch_E <= 0) throw InputError("secant modulus: patch modulus must be positive");
    return secant_modulus_at_estar(patch_E, strain_to_estar(ep1, params), sf, params);
}

std::vector<double> element_initial_E(const Mesh& mesh, const RandomField& field,
                                      const MaterialParams& params) {
    std::vector<double> E(mesh.elements.size());
    for (const Element& e : mesh.elements) {
        if (e.region == Region::rubber) {
            E[e.id] = params.E_rubber;
            continue;
        }
        auto it = field.patch_E.find(e.patch);
        if (it == field.patch_E.end()) {
            std::ostringstream msg;
            msg << "element " << e.id << ": patch " << e.patch << " has no sampled modulus";
            throw ConfigError(msg.str());
        }
        E[e.id] = it->second;
    }
    return E;
}

}  // namespace fracsim
