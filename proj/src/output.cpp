#include "fracsim/output.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "fracsim/errors.hpp"
#include "fracsim/scenario.hpp"

namespace fracsim {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    // binary keeps LF endings on every platform (outputs are byte-compared)
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open output file: " + path.string());
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

TraceSummary analyze_trace(const Trace& trace) {
    TraceSummary s;
    s.steps_completed = static_cast<int>(trace.records.size());
    double running_peak = 0.0;
    for (const TraceRecord& r : trace.records) {
        if (r.load > s.peak_load) {
            s.peak_load = r.load;
            s.peak_load_step = r.step;
        }
        s.peak_contact_stress = std::max(s.peak_contact_stress, r.contact_stress);
        if (!r.converged) ++s.non_converged_steps;
        if (s.first_drop_step < 0 && running_peak > 0.0 &&
            r.load <= 0.95 * running_peak) {
            s.first_drop_step = r.step;
        }
        running_peak = std::max(running_peak, r.load);
    }
    return s;
}

void write_load_displacement_csv(const std::filesystem::path& path, const Trace& trace) {
    std::ofstream out = open_out(path);
    out << "step,prescribed_disp_m,edge_left_disp_m,edge_right_disp_m,load_N,"
           "contact_stress_Pa\n";
    for (const TraceRecord& r : trace.records) {
        out << r.step << ',' << format_double(r.prescribed_disp) << ','
            << format_double(r.edge_left_disp) << ','
            << format_double(r.edge_right_disp) << ',' << format_double(r.load) << ','
            << format_double(r.contact_stress) << '\n';
    }
}

void write_trace_csv(const std::filesystem::path& path, const Trace& trace) {
    std::ofstream out = open_out(path);
    out << "step,prescribed_disp_m,edge_left_disp_m,edge_right_disp_m,load_N,"
           "contact_stress_Pa,degraded_element,picard_iterations,converged,"
           "equilibrium_residual\n";
    for (const TraceRecord& r : trace.records) {
        out << r.step << ',' << format_double(r.prescribed_disp) << ','
            << format_double(r.edge_left_disp) << ','
            << format_double(r.edge_right_disp) << ',' << format_double(r.load) << ','
            << format_double(r.contact_stress) << ',' << r.degraded_element << ','
            << r.picard_iterations << ',' << (r.converged ? 1 : 0) << ','
            << format_double(r.equilibrium_residual) << '\n';
    }
}

void write_vtk(const std::filesystem::path& path, const Mesh& mesh,
               const Snapshot& snap) {
    std::ofstream out = open_out(path);
    const std::size_t nn = mesh.nodes.size();
    const std::size_t ne = mesh.elements.size();

    out << "# vtk DataFile Version 3.0\n";
    out << "fracture-sim fields, step " << snap.step << "\n";
    out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";

    out << "POINTS " << nn << " double\n";
    for (const Node& n : mesh.nodes) {
        out << format_double(n.x) << ' ' << format_double(n.y) << " 0\n";
    }

    out << "CELLS " << ne << ' ' << 5 * ne << '\n';
    for (const Element& e : mesh.elements) {
        out << "4 " << e.nodes[0] << ' ' << e.nodes[1] << ' ' << e.nodes[2] << ' '
            << e.nodes[3] << '\n';
    }
    out << "CELL_TYPES " << ne << '\n';
    for (std::size_t i = 0; i < ne; ++i) out << "9\n";  // VTK_QUAD

    out << "CELL_DATA " << ne << '\n';
    const auto scalars = [&out](const char* name, const std::vector<double>& v) {
        out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (double x : v) out << format_double(x) << '\n';
    };
    scalars("E_current", snap.state.E_current);
    scalars("sp1", snap.state.sp1);
    scalars("ep1", snap.state.ep1);

    out << "POINT_DATA " << nn << '\n';
    out << "VECTORS u double\n";
    for (std::size_t n = 0; n < nn; ++n) {
        out << format_double(snap.state.u[2 * n]) << ' '
            << format_double(snap.state.u[2 * n + 1]) << " 0\n";
    }
}

nlohmann::json summary_json(const Scenario& scenario, const EngineResult& result,
                            const TraceSummary& summary, double wall_seconds) {
    int damaged = 0;
    if (scenario.engine == EngineKind::sla) {
        for (const TraceRecord& r : result.trace.records) {
            if (r.degraded_element >= 0) ++damaged;
        }
    } else if (!result.snapshots.empty()) {
        const double onset = scenario.step_function.plateau_end();
        for (double es : result.snapshots.back().estar_hist) {
            if (es > onset) ++damaged;
        }
    }

    nlohmann::json j;
    j["scenario"] = scenario_to_json(scenario);
    j["termination"] = result.termination;
    j["peak_load_N"] = summary.peak_load;
    j["peak_load_step"] = summary.peak_load_step;
    j["peak_contact_stress_Pa"] = summary.peak_contact_stress;
    j["first_drop_step"] = summary.first_drop_step;
    j["steps_completed"] = summary.steps_completed;
    j["non_converged_steps"] = summary.non_converged_steps;
    j["damaged_elements"] = damaged;
    j["wall_seconds"] = wall_seconds;
    return j;
}

void write_summary(const std::filesystem::path& path, const nlohmann::json& summary) {
    std::ofstream out = open_out(path);
    out << summary.dump(2) << '\n';
}

}  // namespace fracsim
