#include "fracsim/scenario.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "fracsim/errors.hpp"
#include "fracsim/output.hpp"

namespace fracsim {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
}

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw ConfigError(where + ": unknown key \"" + key + "\"");
    }
}

template <typename T>
void read_field(const json& j, const char* key, T& out, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) return;  // keep the default
    try {
        it->get_to(out);
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

void check(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

void validate(const Scenario& s) {
    check(s.geometry.width > 0 && s.geometry.height > 0 && s.geometry.depth > 0,
          "geometry: dimensions must be positive");
    check(s.geometry.nx >= 1 && s.geometry.ny >= 1,
          "geometry: nx and ny must be >= 1");
    check(s.strip.width > 0, "strip.width must be positive");
    check(s.strip.rows >= 0, "strip.rows must be >= 0");
    check(s.strip.rows == 0 || s.strip.thickness > 0,
          "strip.thickness must be positive when rows >= 1");
    const MaterialParams& m = s.materials;
    check(m.E_avg > 0 && m.f_t > 0 && m.E_rubber > 0, "materials: moduli and strength must be positive");
    check(m.nu_casi >= 0 && m.nu_casi < 0.5 && m.nu_rubber >= 0 && m.nu_rubber < 0.5,
          "materials: Poisson ratios must lie in [0, 0.5)");
    check(m.E_floor >= 0, "materials.E_floor must be >= 0");
    check(m.estar_scale > 0, "materials.estar_scale must be positive");
    validate_step_function(s.step_function);
    check(s.random.patch_w > 0 && s.random.patch_h > 0,
          "random: patch size must be positive");
    if (!s.random.constant_E) {
        check(s.random.E_min > 0 && s.random.E_min < s.random.E_max,
              "random: need 0 < E_min < E_max");
    }
    check(s.sla.degrade_factor > 0 && s.sla.degrade_factor < 1,
          "sla.degrade_factor must lie in (0, 1)");
    check(s.sla.max_steps >= 1, "sla.max_steps must be >= 1");
    check(s.sla.load_threshold >= 0 && s.sla.load_threshold < 1,
          "sla.load_threshold must lie in [0, 1)");
    check(s.sla.max_displacement != 0, "sla.max_displacement must be nonzero");
    check(s.ss.n_steps >= 1, "ss.n_steps must be >= 1");
    check(s.ss.max_prescribed_disp != 0, "ss.max_prescribed_disp must be nonzero");
    check(s.ss.picard_tol > 0, "ss.picard_tol must be positive");
    check(s.ss.picard_max_iter >= 1, "ss.picard_max_iter must be >= 1");
    check(s.ss.relaxation > 0 && s.ss.relaxation <= 1,
          "ss.relaxation must lie in (0, 1]");
    check(s.output.snapshot_cadence >= 0, "output.snapshot_cadence must be >= 0");
    check(!s.output.directory.empty(), "output.directory must not be empty");
}

}  // namespace

Scenario scenario_from_json(const json& j) {
    require_object(j, "scenario");
    reject_unknown(j,
                   {"geometry", "strip", "materials", "step_function", "random",
                    "engine", "sla", "ss", "output"},
                   "scenario");
    Scenario s;

    if (auto it = j.find("geometry"); it != j.end()) {
        require_object(*it, "geometry");
        reject_unknown(*it, {"width", "height", "nx", "ny", "depth"}, "geometry");
        read_field(*it, "width", s.geometry.width, "geometry");
        read_field(*it, "height", s.geometry.height, "geometry");
        read_field(*it, "nx", s.geometry.nx, "geometry");
        read_field(*it, "ny", s.geometry.ny, "geometry");
        read_field(*it, "depth", s.geometry.depth, "geometry");
    }
    if (auto it = j.find("strip"); it != j.end()) {
        require_object(*it, "strip");
        reject_unknown(*it, {"width", "thickness", "eccentricity", "rows"}, "strip");
        read_field(*it, "width", s.strip.width, "strip");
        read_field(*it, "thickness", s.strip.thickness, "strip");
        read_field(*it, "eccentricity", s.strip.eccentricity, "strip");
        read_field(*it, "rows", s.strip.rows, "strip");
    }
    if (auto it = j.find("materials"); it != j.end()) {
        require_object(*it, "materials");
        reject_unknown(*it,
                       {"E_avg", "f_t", "nu_casi", "E_rubber", "nu_rubber", "E_floor",
                        "estar_scale"},
                       "materials");
        read_field(*it, "E_avg", s.materials.E_avg, "materials");
        read_field(*it, "f_t", s.materials.f_t, "materials");
        read_field(*it, "nu_casi", s.materials.nu_casi, "materials");
        read_field(*it, "E_rubber", s.materials.E_rubber, "materials");
        read_field(*it, "nu_rubber", s.materials.nu_rubber, "materials");
        read_field(*it, "E_floor", s.materials.E_floor, "materials");
        read_field(*it, "estar_scale", s.materials.estar_scale, "materials");
    }
    if (auto it = j.find("step_function"); it != j.end()) {
        require_object(*it, "step_function");
        reject_unknown(*it, {"breakpoints"}, "step_function");
        read_field(*it, "breakpoints", s.step_function.breakpoints, "step_function");
    }
    if (auto it = j.find("random"); it != j.end()) {
        require_object(*it, "random");
        reject_unknown(*it, {"seed", "E_min", "E_max", "patch_w", "patch_h", "constant_E"},
                       "random");
        read_field(*it, "seed", s.random.seed, "random");
        read_field(*it, "E_min", s.random.E_min, "random");
        read_field(*it, "E_max", s.random.E_max, "random");
        read_field(*it, "patch_w", s.random.patch_w, "random");
        read_field(*it, "patch_h", s.random.patch_h, "random");
        read_field(*it, "constant_E", s.random.constant_E, "random");
    }
    if (auto it = j.find("engine"); it != j.end()) {
        std::string tag;
        read_field(j, "engine", tag, "scenario");
        if (tag == "sla") {
            s.engine = EngineKind::sla;
        } else if (tag == "ss") {
            s.engine = EngineKind::ss;
        } else {
            throw ConfigError("engine: expected \"sla\" or \"ss\", got \"" + tag + "\"");
        }
    }
    if (j.count("sla") && s.engine != EngineKind::sla) {
        throw ConfigError("scenario: \"sla\" block given but engine is \"ss\"");
    }
    if (j.count("ss") && s.engine != EngineKind::ss) {
        throw ConfigError("scenario: \"ss\" block given but engine is \"sla\"");
    }
    if (auto it = j.find("sla"); it != j.end()) {
        require_object(*it, "sla");
        reject_unknown(*it,
                       {"degrade_factor", "max_steps", "load_threshold",
                        "max_displacement"},
                       "sla");
        read_field(*it, "degrade_factor", s.sla.degrade_factor, "sla");
        read_field(*it, "max_steps", s.sla.max_steps, "sla");
        read_field(*it, "load_threshold", s.sla.load_threshold, "sla");
        read_field(*it, "max_displacement", s.sla.max_displacement, "sla");
    }
    if (auto it = j.find("ss"); it != j.end()) {
        require_object(*it, "ss");
        reject_unknown(*it,
                       {"n_steps", "max_prescribed_disp", "picard_tol",
                        "picard_max_iter", "relaxation"},
                       "ss");
        read_field(*it, "n_steps", s.ss.n_steps, "ss");
        read_field(*it, "max_prescribed_disp", s.ss.max_prescribed_disp, "ss");
        read_field(*it, "picard_tol", s.ss.picard_tol, "ss");
        read_field(*it, "picard_max_iter", s.ss.picard_max_iter, "ss");
        read_field(*it, "relaxation", s.ss.relaxation, "ss");
    }
    if (auto it = j.find("output"); it != j.end()) {
        require_object(*it, "output");
        reject_unknown(*it, {"directory", "snapshot_cadence"}, "output");
        read_field(*it, "directory", s.output.directory, "output");
        read_field(*it, "snapshot_cadence", s.output.snapshot_cadence, "output");
    }

    validate(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open scenario file: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("scenario " + path.string() + ": " + e.what());
    }
    return scenario_from_json(j);
}

nlohmann::json scenario_to_json(const Scenario& s) {
    json j;
    j["geometry"] = {{"width", s.geometry.width},
                     {"height", s.geometry.height},
                     {"nx", s.geometry.nx},
                     {"ny", s.geometry.ny},
                     {"depth", s.geometry.depth}};
    j["strip"] = {{"width", s.strip.width},
                  {"thickness", s.strip.thickness},
                  {"eccentricity", s.strip.eccentricity},
                  {"rows", s.strip.rows}};
    j["materials"] = {{"E_avg", s.materials.E_avg},
                      {"f_t", s.materials.f_t},
                      {"nu_casi", s.materials.nu_casi},
                      {"E_rubber", s.materials.E_rubber},
                      {"nu_rubber", s.materials.nu_rubber},
                      {"E_floor", s.materials.E_floor},
                      {"estar_scale", s.materials.estar_scale}};
    j["step_function"] = {{"breakpoints", s.step_function.breakpoints}};
    j["random"] = {{"seed", s.random.seed},
                   {"E_min", s.random.E_min},
                   {"E_max", s.random.E_max},
                   {"patch_w", s.random.patch_w},
                   {"patch_h", s.random.patch_h},
                   {"constant_E", s.random.constant_E}};
    j["engine"] = s.engine == EngineKind::sla ? "sla" : "ss";
    if (s.engine == EngineKind::sla) {
        j["sla"] = {{"degrade_factor", s.sla.degrade_factor},
                    {"max_steps", s.sla.max_steps},
                    {"load_threshold", s.sla.load_threshold},
                    {"max_displacement", s.sla.max_displacement}};
    } else {
        j["ss"] = {{"n_steps", s.ss.n_steps},
                   {"max_prescribed_disp", s.ss.max_prescribed_disp},
                   {"picard_tol", s.ss.picard_tol},
                   {"picard_max_iter", s.ss.picard_max_iter},
                   {"relaxation", s.ss.relaxation}};
    }
    j["output"] = {{"directory", s.output.directory},
                   {"snapshot_cadence", s.output.snapshot_cadence}};
    return j;
}

PreparedScenario prepare(const Scenario& s, std::optional<std::uint64_t> seed_override) {
    Mesh mesh = build_structured_mesh(s.geometry.width, s.geometry.height, s.geometry.nx,
                                      s.geometry.ny, s.geometry.depth);
    mesh = attach_strip(std::move(mesh), s.strip.width, s.strip.thickness,
                        s.strip.eccentricity, s.strip.rows);
    mesh = assign_patches(std::move(mesh), s.random.patch_w, s.random.patch_h);
    BoundarySets bsets = boundary_sets(mesh);

    const std::uint64_t seed = seed_override.value_or(s.random.seed);
    RandomField field;
    if (s.random.constant_E) {
        field.seed = seed;
        field.E_min = field.E_max = s.materials.E_avg;
        for (int p : mesh.casi_patch_ids()) field.patch_E[p] = s.materials.E_avg;
    } else {
        field = sample_field(seed, mesh.casi_patch_ids(), s.random.E_min, s.random.E_max);
    }
    return {std::move(mesh), std::move(bsets), std::move(field)};
}

EngineResult run_engine(const Scenario& s, const PreparedScenario& prep) {
    int cadence = s.output.snapshot_cadence;
    if (cadence == 0) cadence = s.engine == EngineKind::sla ? 1 : 10;
    if (s.engine == EngineKind::sla) {
        return run_sla(prep.mesh, prep.field, s.materials, s.sla, cadence);
    }
    return run_ss(prep.mesh, prep.field, s.materials, s.step_function, s.ss, cadence);
}

int run(const Scenario& s, std::optional<std::uint64_t> seed_override,
        const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw InputError("cannot create output directory " + out_dir.string());

    const auto t0 = std::chrono::steady_clock::now();
    const PreparedScenario prep = prepare(s, seed_override);
    const EngineResult result = run_engine(s, prep);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Scenario echo = s;
    echo.random.seed = seed_override.value_or(s.random.seed);

    write_load_displacement_csv(out_dir / "load_displacement.csv", result.trace);
    write_trace_csv(out_dir / "trace.csv", result.trace);
    for (const Snapshot& snap : result.snapshots) {
        char name[32];
        std::snprintf(name, sizeof(name), "fields_step_%04d.vtk", snap.step);
        write_vtk(out_dir / name, prep.mesh, snap);
    }
    const TraceSummary ts = analyze_trace(result.trace);
    write_summary(out_dir / "summary.json", summary_json(echo, result, ts, wall));

    return result.termination.rfind("error", 0) == 0 ? 1 : 0;
}

}  // namespace fracsim
