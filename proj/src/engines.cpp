#include "fracsim/engines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracsim/errors.hpp"

namespace fracsim {

namespace {

void check_common(const Mesh& mesh) {
    if (!mesh.strip) throw ConfigError("engine: mesh has no strip attached");
}

FieldState scaled(const FieldState& s, double lambda) {
    FieldState out = s;
    out.u *= lambda;
    for (auto& v : out.strain)
        for (double& c : v) c *= lambda;
    for (auto& v : out.stress)
        for (double& c : v) c *= lambda;
    for (double& v : out.ep1) v *= lambda;  // lambda > 0 preserves principal order
    for (double& v : out.sp1) v *= lambda;
    return out;
}

}  // namespace

std::optional<int> critical_element(const FieldState& state,
                                    const std::vector<int>& eligible) {
    double max_sp1 = 0.0;
    for (int e : eligible) max_sp1 = std::max(max_sp1, state.sp1[e]);
    if (!(max_sp1 > 0.0)) return std::nullopt;  // no tension anywhere

    // candidates within a relative band of the max count as tied (exact
    // symmetric meshes produce FP-level ties); the lowest id wins
    const double band = max_sp1 * (1.0 - 1e-9);
    for (int e : eligible) {
        if (state.sp1[e] >= band) return e;  // eligible is ascending by id
    }
    return std::nullopt;  // unreachable
}

EngineResult run_sla(const Mesh& mesh, const RandomField& field,
                     const MaterialParams& params, const SlaConfig& config,
                     int snapshot_cadence) {
    check_common(mesh);
    if (!(config.degrade_factor > 0.0 && config.degrade_factor < 1.0)) {
        throw ConfigError("sla: degrade factor must lie in (0, 1)");
    }
    if (config.max_steps < 1) throw ConfigError("sla: max_steps must be >= 1");
    if (config.max_displacement == 0.0) {
        throw ConfigError("sla: max_displacement must be nonzero");
    }

    const BoundarySets bsets = boundary_sets(mesh);
    const NuByRegion nu{params.nu_casi, params.nu_rubber};
    const std::vector<double> E_ini = element_initial_E(mesh, field, params);
    std::vector<double> E_cur = E_ini;
    std::vector<char> degraded(mesh.elements.size(), 0);
    const double sign = config.max_displacement < 0.0 ? -1.0 : 1.0;
    const double width = mesh.strip->width;

    EliminationSolver solver;
    AssemblyCache cache(mesh, nu, bsets);
    EngineResult result;
    result.termination = "max_steps";
    FieldState last_state;
    int last_step = -1;
    double peak = 0.0;

    for (int step = 1; step <= config.max_steps; ++step) {
        std::vector<int> eligible;
        eligible.reserve(mesh.elements.size());
        for (const Element& e : mesh.elements) {
            if (e.region == Region::casi && !degraded[e.id]) eligible.push_back(e.id);
        }
        if (eligible.empty()) {
            result.termination = "no_tension";
            break;
        }

        const GlobalSystem* sys = nullptr;
        Eigen::VectorXd u;
        try {
            sys = &cache.update(E_cur, sign);  // unit-magnitude solve
            u = solver.solve(*sys);
        } catch (const SolverError& err) {
            result.termination = std::string("error: ") + err.what();
            break;
        }
        const FieldState state = recover_fields(mesh, u, E_cur, nu);

        const auto crit = critical_element(state, eligible);
        if (!crit) {
            result.termination = "no_tension";
            break;
        }
        const double lambda = params.f_t / state.sp1[*crit];
        if (!std::isfinite(lambda)) {
            result.termination = "instability";
            break;
        }

        TraceRecord rec;
        rec.step = step;
        rec.prescribed_disp = lambda * sign;
        rec.edge_left_disp = lambda * u[2 * bsets.edge_left_node + 1];
        rec.edge_right_disp = lambda * u[2 * bsets.edge_right_node + 1];
        rec.load = sign * lambda * vertical_reaction(*sys, u, bsets.strip_top_nodes);
        rec.contact_stress = contact_stress(rec.load, width, mesh.depth);
        rec.degraded_element = *crit;
        rec.equilibrium_residual = equilibrium_residual(*sys, u);
        result.trace.records.push_back(rec);

        last_state = scaled(state, lambda);
        last_step = step;
        if (snapshot_cadence > 0 && step % snapshot_cadence == 0) {
            result.snapshots.push_back({step, last_state, {}});
        }

        E_cur[*crit] = config.degrade_factor * E_ini[*crit];
        degraded[*crit] = 1;

        peak = std::max(peak, rec.load);
        if (rec.load < config.load_threshold * peak) {
            result.termination = "load_threshold";
            break;
        }
        if (std::abs(rec.prescribed_disp) > std::abs(config.max_displacement)) {
            result.termination = "max_displacement";
            break;
        }
    }

    if (last_step >= 0 &&
        (result.snapshots.empty() || result.snapshots.back().step != last_step)) {
        result.snapshots.push_back({last_step, std::move(last_state), {}});
    }
    return result;
}

EngineResult run_ss(const Mesh& mesh, const RandomField& field,
                    const MaterialParams& params, const StepFunction& sf,
                    const SsConfig& config, int snapshot_cadence) {
    check_common(mesh);
    validate_step_function(sf);
    if (config.n_steps < 1) throw ConfigError("ss: n_steps must be >= 1");
    if (config.max_prescribed_disp == 0.0) {
        throw ConfigError("ss: max_prescribed_disp must be nonzero");
    }
    if (!(config.relaxation > 0.0 && config.relaxation <= 1.0)) {
        throw ConfigError("ss: relaxation must lie in (0, 1]");
    }
    if (!(config.picard_tol > 0.0)) throw ConfigError("ss: picard_tol must be positive");
    if (config.picard_max_iter < 1) {
        throw ConfigError("ss: picard_max_iter must be >= 1");
    }

    const BoundarySets bsets = boundary_sets(mesh);
    const NuByRegion nu{params.nu_casi, params.nu_rubber};
    const std::vector<double> patch_E = element_initial_E(mesh, field, params);
    const std::size_t ne = mesh.elements.size();

    std::vector<double> E_cur(ne), target(ne);
    std::vector<double> estar_hist(ne, 0.0);
    for (const Element& e : mesh.elements) {
        E_cur[e.id] = (e.region == Region::rubber)
                          ? params.E_rubber
                          : secant_modulus_at_estar(patch_E[e.id], 0.0, sf, params);
    }

    const double sign = config.max_prescribed_disp < 0.0 ? -1.0 : 1.0;
    const double width = mesh.strip->width;

    EliminationSolver solver;
    AssemblyCache cache(mesh, nu, bsets);
    EngineResult result;
    result.termination = "n_steps";
    result.trace.records.push_back({});  // step 0: zero load at zero displacement
    FieldState last_state;
    std::vector<double> last_hist;
    std::vector<double> E_solved;  // moduli behind the last successful solve
    int last_step = -1;
    int consecutive_failures = 0;

    for (int step = 1; step <= config.n_steps; ++step) {
        const double delta =
            (static_cast<double>(step) / config.n_steps) * config.max_prescribed_disp;

        Eigen::VectorXd u;
        FieldState state;
        bool have_state = false;
        bool converged = false;
        bool solver_failed = false;
        int iters = 0;

        for (int iter = 1; iter <= config.picard_max_iter; ++iter) {
            iters = iter;
            try {
                const GlobalSystem& trial = cache.update(E_cur, delta);
                Eigen::VectorXd u_trial = solver.solve(trial);
                u = std::move(u_trial);
                E_solved = E_cur;
                state = recover_fields(mesh, u, E_solved, nu);
            } catch (const SolverError&) {
                solver_failed = true;
                break;
            }
            have_state = true;

            double mismatch = 0.0;
            bool finite = true;
            for (const Element& e : mesh.elements) {
                if (e.region == Region::rubber) {
                    target[e.id] = params.E_rubber;
                    continue;
                }
                const double es = strain_to_estar(state.ep1[e.id], params);
                if (!std::isfinite(es)) {
                    finite = false;
                    break;
                }
                estar_hist[e.id] = std::max(estar_hist[e.id], es);  // irreversible
                target[e.id] =
                    secant_modulus_at_estar(patch_E[e.id], estar_hist[e.id], sf, params);
                mismatch = std::max(mismatch,
                                    std::abs(target[e.id] - E_cur[e.id]) / E_cur[e.id]);
            }
            if (!finite) {
                solver_failed = true;
                break;
            }
            if (mismatch <= config.picard_tol) {
                converged = true;
                break;
            }
            for (std::size_t i = 0; i < ne; ++i) {
                E_cur[i] += config.relaxation * (target[i] - E_cur[i]);
            }
        }

        if (!have_state) {  // solver failed before producing any iterate
            result.termination = "instability";
            break;
        }

        // a failed later attempt overwrote the cached values: rebuild the
        // system behind u so the recorded load and residual match the state
        const GlobalSystem& sys = cache.update(E_solved, delta);

        TraceRecord rec;
        rec.step = step;
        rec.prescribed_disp = delta;
        rec.edge_left_disp = u[2 * bsets.edge_left_node + 1];
        rec.edge_right_disp = u[2 * bsets.edge_right_node + 1];
        rec.load = sign * vertical_reaction(sys, u, bsets.strip_top_nodes);
        rec.contact_stress = contact_stress(rec.load, width, mesh.depth);
        rec.picard_iterations = iters;
        rec.converged = converged;
        rec.equilibrium_residual = equilibrium_residual(sys, u);
        result.trace.records.push_back(rec);

        last_state = state;
        last_hist = estar_hist;
        last_step = step;
        if (snapshot_cadence > 0 && step % snapshot_cadence == 0) {
            result.snapshots.push_back({step, state, estar_hist});
        }

        if (solver_failed) {
            result.termination = "instability";
            break;
        }
        consecutive_failures = converged ? 0 : consecutive_failures + 1;
        if (consecutive_failures >= 5) {
            result.termination = "instability";
            break;
        }
    }

    if (last_step >= 0 &&
        (result.snapshots.empty() || result.snapshots.back().step != last_step)) {
        result.snapshots.push_back({last_step, std::move(last_state), std::move(last_hist)});
    }
    return result;
}

}  // namespace fracsim
