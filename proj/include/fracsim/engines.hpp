#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracsim/fem.hpp"
#include "fracsim/material.hpp"
#include "fracsim/mesh.hpp"

namespace fracsim {

/// Sequential linear analysis: one linear solve per step, then the single
/// most critical element is degraded to degrade_factor times its initial
/// modulus. max_displacement is signed; its sign sets the loading direction
/// (negative = pressing the strip into the block) and its magnitude is the
/// stop bound on the scaled prescribed displacement.
struct SlaConfig {
    double degrade_factor = 0.01;
    int max_steps = 100;
    double load_threshold = 0.1;      // stop when load < threshold * running peak
    double max_displacement = -0.01;  // m, signed
};

/// Continuous secant stress-strain model: prescribed displacement ramp with a
/// damped fixed-point (Picard) inner loop adjusting each element's secant
/// modulus to its first-principal-strain history. max_prescribed_disp is
/// signed like SlaConfig::max_displacement.
struct SsConfig {
    int n_steps = 1000;
    double max_prescribed_disp = -0.002;  // m, signed
    double picard_tol = 1e-4;             // relative E mismatch at convergence
    int picard_max_iter = 50;
    double relaxation = 0.5;
};

struct TraceRecord {
    int step = 0;
    double prescribed_disp = 0.0;   // m, signed
    double edge_left_disp = 0.0;    // m, vertical, block top under strip left edge
    double edge_right_disp = 0.0;   // m, vertical, block top under strip right edge
    double load = 0.0;              // N, positive in the loading direction
    double contact_stress = 0.0;    // Pa, load / (strip width * depth)
    int degraded_element = -1;      // SLA only
    int picard_iterations = 0;      // SS only
    bool converged = true;          // SS only
    double equilibrium_residual = 0.0;
};

struct Trace {
    std::vector<TraceRecord> records;
};

struct Snapshot {
    int step = 0;
    FieldState state;                // SLA snapshots carry the load-scaled fields
    std::vector<double> estar_hist;  // SS only: per-element peak e*
};

struct EngineResult {
    Trace trace;
    std::vector<Snapshot> snapshots;
    std::string termination;
};

/// Eligible element with the largest first principal stress. Elements within
/// a 1e-9 relative band of the maximum count as tied; the lowest id wins.
/// Empty result = no eligible element in tension (clean SLA termination).
std::optional<int> critical_element(const FieldState& state,
                                    const std::vector<int>& eligible);

EngineResult run_sla(const Mesh& mesh, const RandomField& field,
                     const MaterialParams& params, const SlaConfig& config,
                     int snapshot_cadence = 1);

EngineResult run_ss(const Mesh& mesh, const RandomField& field,
                    const MaterialParams& params, const StepFunction& sf,
                    const SsConfig& config, int snapshot_cadence = 10);

}  // namespace fracsim
