#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracsim/analytic.hpp"
#include "fracsim/errors.hpp"
#include "fracsim/scenario.hpp"

namespace {

namespace fs = std::filesystem;

void print_value(const char* label, double value, const char* unit) {
    std::printf("%s = %.6g %s\n", label, value, unit);
}

// "a..b" -> [a, b] inclusive
std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
    const auto pos = text.find("..");
    if (pos == std::string::npos) {
        throw fracsim::InputError("--seeds expects a..b, got \"" + text + "\"");
    }
    try {
        const std::uint64_t a = std::stoull(text.substr(0, pos));
        const std::uint64_t b = std::stoull(text.substr(pos + 2));
        if (b < a) throw fracsim::InputError("--seeds range is empty: " + text);
        return {a, b};
    } catch (const std::invalid_argument&) {
        throw fracsim::InputError("--seeds expects numeric bounds, got \"" + text + "\"");
    } catch (const std::out_of_range&) {
        throw fracsim::InputError("--seeds bound out of range: " + text);
    }
}

int worker_count(std::size_t jobs) {
    const char* env = std::getenv("FRACTURE_SIM_THREADS");
    if (!env || !*env) return 1;
    const long v = std::strtol(env, nullptr, 10);
    if (v <= 0) return 1;  // 0 (or junk) means serial
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(v), jobs));
}

struct SeedOutcome {
    std::uint64_t seed = 0;
    int status = 1;
    std::string note;
};

int run_ensemble(const fracsim::Scenario& scenario, std::uint64_t first,
                 std::uint64_t last, const fs::path& out_root) {
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = first;; ++s) {
        seeds.push_back(s);
        if (s == last) break;
    }
    std::vector<SeedOutcome> outcomes(seeds.size());

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= seeds.size()) return;
            SeedOutcome& o = outcomes[i];
            o.seed = seeds[i];
            const fs::path dir = out_root / ("seed_" + std::to_string(seeds[i]));
            try {
                o.status = fracsim::run(scenario, seeds[i], dir);
                std::ifstream in(dir / "summary.json");
                const auto summary = nlohmann::json::parse(in);
                char buf[160];
                std::snprintf(buf, sizeof(buf),
                              "termination=%s peak_contact_stress_Pa=%.6g",
                              summary.at("termination").get<std::string>().c_str(),
                              summary.at("peak_contact_stress_Pa").get<double>());
                o.note = buf;
            } catch (const std::exception& e) {
                o.status = 1;
                o.note = std::string("failed: ") + e.what();
            }
        }
    };

    const int workers = worker_count(seeds.size());
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    int status = 0;
    for (const SeedOutcome& o : outcomes) {
        std::printf("seed %llu: %s\n", static_cast<unsigned long long>(o.seed),
                    o.note.c_str());
        status = std::max(status, o.status);
    }
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Plane-strain splitting-crack simulator for a block loaded through "
                 "an eccentric bearing strip"};
    app.require_subcommand(1);

    std::string config_path, out_dir, seeds_arg;
    std::uint64_t seed = 0;

    auto* cmd_run = app.add_subcommand("run", "Run a scenario, write traces and fields");
    cmd_run->add_option("--config", config_path, "Scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    auto* seed_opt = cmd_run->add_option("--seed", seed, "Override the scenario seed");
    cmd_run->add_option("--out", out_dir,
                        "Output directory (default: the scenario's output.directory)");

    auto* cmd_validate =
        app.add_subcommand("validate", "Check a scenario file and print it resolved");
    cmd_validate->add_option("--config", config_path, "Scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);

    auto* cmd_analytic =
        app.add_subcommand("analytic", "Closed-form splitting-strength formulas");
    cmd_analytic->require_subcommand(1);
    double arg_N = 0, arg_d = 0, arg_l = 0, arg_a = 0, arg_F = 0, arg_A = 0, arg_As = 0,
           arg_es = 0;
    bool exact = false;

    auto* cmd_brazil = cmd_analytic->add_subcommand(
        "brazil", "Splitting stress 2N/(pi d l) of a line-loaded specimen");
    cmd_brazil->add_option("N", arg_N, "Load (N)")->required();
    cmd_brazil->add_option("d", arg_d, "Splitting-plane height (m)")->required();
    cmd_brazil->add_option("l", arg_l, "Splitting-plane length (m)")->required();

    auto* cmd_cube =
        cmd_analytic->add_subcommand("cube", "Cube splitting strength 0.64 N/a^2");
    cmd_cube->add_option("N", arg_N, "Load (N)")->required();
    cmd_cube->add_option("a", arg_a, "Cube rib (m)")->required();
    cmd_cube->add_flag("--exact", exact, "Use 2/pi instead of the rounded 0.64");

    auto* cmd_strength = cmd_analytic->add_subcommand(
        "strength", "Overall strength Fult/A and contact stress Fult/As");
    cmd_strength->add_option("Fult", arg_F, "Ultimate force (N)")->required();
    cmd_strength->add_option("A", arg_A, "Specimen loaded area (m^2)")->required();
    cmd_strength->add_option("As", arg_As, "Strip loaded area (m^2)")->required();

    auto* cmd_ecc = cmd_analytic->add_subcommand(
        "ecc", "Overall strength versus strip eccentricity (regression fit)");
    cmd_ecc->add_option("es", arg_es, "Eccentricity (mm)")->required();

    auto* cmd_ensemble =
        app.add_subcommand("ensemble", "Run one scenario over a range of seeds");
    cmd_ensemble->add_option("--config", config_path, "Scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_ensemble->add_option("--seeds", seeds_arg, "Seed range a..b (inclusive)")
        ->required();
    cmd_ensemble->add_option("--out", out_dir, "Output root; one subdirectory per seed")
        ->required();

    try {
        app.parse(argc, argv);

        if (app.got_subcommand(cmd_run)) {
            const fracsim::Scenario scenario = fracsim::load_scenario(config_path);
            std::optional<std::uint64_t> seed_override;
            if (seed_opt->count() > 0) seed_override = seed;
            const fs::path out =
                out_dir.empty() ? fs::path(scenario.output.directory) : fs::path(out_dir);
            return fracsim::run(scenario, seed_override, out);
        }
        if (app.got_subcommand(cmd_validate)) {
            const fracsim::Scenario scenario = fracsim::load_scenario(config_path);
            fracsim::prepare(scenario);  // exercises mesh/strip/patch construction
            std::cout << fracsim::scenario_to_json(scenario).dump(2) << '\n';
            return 0;
        }
        if (app.got_subcommand(cmd_analytic)) {
            if (cmd_analytic->got_subcommand(cmd_brazil)) {
                print_value("sigma", fracsim::brazilian_stress(arg_N, arg_d, arg_l),
                            "Pa");
            } else if (cmd_analytic->got_subcommand(cmd_cube)) {
                const double f = exact
                                     ? fracsim::cube_splitting_strength_exact(arg_N, arg_a)
                                     : fracsim::cube_splitting_strength(arg_N, arg_a);
                print_value("f_bu", f, "Pa");
            } else if (cmd_analytic->got_subcommand(cmd_strength)) {
                const auto r = fracsim::strength_ratios(arg_F, arg_A, arg_As);
                print_value("f_w", r.overall, "Pa");
                print_value("CS", r.contact, "Pa");
            } else {
                if (arg_es < fracsim::kEccentricityFitMinMm ||
                    arg_es > fracsim::kEccentricityFitMaxMm) {
                    std::fprintf(stderr,
                                 "note: es outside the fitted range [%g, %g] mm; "
                                 "value is an extrapolation\n",
                                 fracsim::kEccentricityFitMinMm,
                                 fracsim::kEccentricityFitMaxMm);
                }
                print_value("f_w", fracsim::eccentricity_strength(arg_es), "MPa");
            }
            return 0;
        }
        if (app.got_subcommand(cmd_ensemble)) {
            const fracsim::Scenario scenario = fracsim::load_scenario(config_path);
            const auto [first, last] = parse_seed_range(seeds_arg);
            return run_ensemble(scenario, first, last, out_dir);
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
