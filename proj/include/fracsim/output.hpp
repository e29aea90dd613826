#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "fracsim/engines.hpp"
#include "fracsim/mesh.hpp"

namespace fracsim {

struct Scenario;  // scenario.hpp

/// Post-run trace statistics used by summary.json and the CLI footer.
struct TraceSummary {
    double peak_load = 0.0;            // N, max over steps
    int peak_load_step = -1;
    double peak_contact_stress = 0.0;  // Pa
    int first_drop_step = -1;          // first step with load <= 0.95 * running peak
    int steps_completed = 0;
    int non_converged_steps = 0;
};

TraceSummary analyze_trace(const Trace& trace);

/// step,prescribed_disp_m,edge_left_disp_m,edge_right_disp_m,load_N,contact_stress_Pa
void write_load_displacement_csv(const std::filesystem::path& path, const Trace& trace);

/// Same columns plus degraded_element,picard_iterations,converged,equilibrium_residual.
void write_trace_csv(const std::filesystem::path& path, const Trace& trace);

/// Legacy ASCII VTK unstructured grid: quad cells, CELL_DATA E_current/sp1/ep1,
/// POINT_DATA displacement vectors (z = 0).
void write_vtk(const std::filesystem::path& path, const Mesh& mesh, const Snapshot& snap);

nlohmann::json summary_json(const Scenario& scenario, const EngineResult& result,
                            const TraceSummary& summary, double wall_seconds);

void write_summary(const std::filesystem::path& path, const nlohmann::json& summary);

/// All floating point output goes through this ("%.17g": lossless re-parse,
/// byte-stable across runs).
std::string format_double(double v);

}  // namespace fracsim
