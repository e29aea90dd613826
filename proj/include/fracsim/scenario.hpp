#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "fracsim/engines.hpp"
#include "fracsim/material.hpp"

namespace fracsim {

struct GeometryConfig {
    double width = 0.2;   // m
    double height = 0.3;  // m
    int nx = 40;
    int ny = 60;
    double depth = 0.2;   // m
};

struct StripConfig {
    double width = 0.07;         // m
    double thickness = 0.005;    // m
    double eccentricity = 0.05;  // m
    int rows = 1;
};

struct RandomConfig {
    std::uint64_t seed = 1;
    double E_min = 6.3e9;   // Pa
    double E_max = 7.7e9;   // Pa
    double patch_w = 0.02;  // m
    double patch_h = 0.02;  // m
    bool constant_E = false;  // every patch gets materials.E_avg, no sampling
};

struct OutputConfig {
    std::string directory = "out";
    int snapshot_cadence = 0;  // 0 = engine default (1 for sla, 10 for ss)
};

enum class EngineKind { sla, ss };

struct Scenario {
    GeometryConfig geometry;
    StripConfig strip;
    MaterialParams materials;
    StepFunction step_function = StepFunction::default_curve();
    RandomConfig random;
    EngineKind engine = EngineKind::ss;
    SlaConfig sla;
    SsConfig ss;
    OutputConfig output;
};

/// Parses and validates a scenario file. Unknown keys are rejected; absent
/// keys take the defaults above. Throws ConfigError with the offending key
/// or the parser's line/column on failure.
Scenario load_scenario(const std::filesystem::path& path);

Scenario scenario_from_json(const nlohmann::json& j);

/// Fully resolved echo (defaults included) so a run can be reproduced from
/// its own summary.
nlohmann::json scenario_to_json(const Scenario& scenario);

/// Mesh + field + engine pipeline for a scenario (no file output).
struct PreparedScenario {
    Mesh mesh;
    BoundarySets bsets;
    RandomField field;
};

PreparedScenario prepare(const Scenario& scenario,
                         std::optional<std::uint64_t> seed_override = std::nullopt);

EngineResult run_engine(const Scenario& scenario, const PreparedScenario& prep);

/// Full run: engine + load_displacement.csv, trace.csv, summary.json and
/// fields_step_NNNN.vtk under out_dir. Returns the process exit status.
int run(const Scenario& scenario, std::optional<std::uint64_t> seed_override,
        const std::filesystem::path& out_dir);

}  // namespace fracsim
