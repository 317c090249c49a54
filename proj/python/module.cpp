#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hcflow/diagnostics.hpp"
#include "hcflow/grid.hpp"
#include "hcflow/model.hpp"
#include "hcflow/run.hpp"
#include "hcflow/solver.hpp"

namespace py = pybind11;
using namespace hcflow;

namespace {

PeriodicGridFunction grid_from_points(const std::vector<std::pair<double, double>>& pts) {
    std::vector<Vec2> v;
    v.reserve(pts.size());
    for (const auto& [x, y] : pts) v.push_back({x, y});
    return PeriodicGridFunction(std::move(v));
}

std::vector<std::pair<double, double>> grid_to_points(const PeriodicGridFunction& g) {
    std::vector<std::pair<double, double>> out;
    out.reserve(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) out.emplace_back(g[k].x, g[k].y);
    return out;
}

InitialCurveSpec curve_from_kwargs(const std::string& type, py::kwargs kwargs) {
    const auto get = [&](const char* key, double fallback) {
        return kwargs.contains(key) ? kwargs[key].cast<double>() : fallback;
    };
    if (type == "circle") return Circle{get("r0", 1.0)};
    if (type == "ellipse") return Ellipse{get("a", 1.5), get("b", 1.0)};
    if (type == "perturbed_circle") return PerturbedCircle{get("r0", 1.0), get("eps", 0.1)};
    if (type == "dumbbell") return Dumbbell{get("neck", 0.12), get("scale", 2.0)};
    throw ConfigError("unknown curve type \"" + type + "\"");
}

}  // namespace

PYBIND11_MODULE(hcflow, m) {
    m.doc() = "Hyperbolic curvature flow of closed planar curves";

    py::register_exception<DegenerateSegment>(m, "DegenerateSegmentError");
    py::register_exception<HairpinSingularity>(m, "HairpinSingularityError");
    py::register_exception<BeyondExtinction>(m, "BeyondExtinctionError");
    py::register_exception<BlowUpDetected>(m, "BlowUpDetectedError");
    py::register_exception<ConfigError>(m, "ConfigurationError");

    // Grid operations on lists of (x, y) vertex pairs.
    m.def("backward_difference", [](const std::vector<std::pair<double, double>>& pts) {
        return grid_to_points(backward_difference(grid_from_points(pts)));
    });
    m.def("norm_0h", [](const std::vector<std::pair<double, double>>& pts) {
        return norm_0h(grid_from_points(pts));
    });
    m.def("norm_1h", [](const std::vector<std::pair<double, double>>& pts) {
        return norm_1h(grid_from_points(pts));
    });
    m.def("polygon_length", [](const std::vector<std::pair<double, double>>& pts) {
        return polygon_length(compute_geometry(grid_from_points(pts)));
    });
    m.def("curvature_sup", [](const std::vector<std::pair<double, double>>& pts) {
        return curvature_sup(compute_geometry(grid_from_points(pts)));
    });

    // Initial curves and the exact circle solutions.
    m.def(
        "sample_curve",
        [](const std::string& type, std::size_t grid_count, py::kwargs kwargs) {
            return grid_to_points(
                sample_initial_curve(curve_from_kwargs(type, kwargs), grid_count));
        },
        py::arg("type"), py::arg("grid_count"));
    m.def("circle_extinction_time", &circle_extinction_time, py::arg("r0"));
    m.def("circle_radius_exact_v0", &circle_radius_exact_v0, py::arg("r0"), py::arg("t"));
    m.def(
        "circle_radius_ode",
        [](double r0, double v0, double t_end, double max_dt) {
            const RadiusTrajectory traj = circle_radius_ode(r0, v0, t_end, max_dt);
            std::vector<std::tuple<double, double, double>> samples;
            samples.reserve(traj.samples.size());
            for (const auto& s : traj.samples) samples.emplace_back(s.t, s.r, s.rdot);
            return py::make_tuple(samples, traj.extinction_time);
        },
        py::arg("r0"), py::arg("v0"), py::arg("t_end"), py::arg("max_dt") = 0.0);
    m.def(
        "reference_solution",
        [](double r0, double t, double rho, double eps) {
            const ReferencePoint p = reference_solution(r0, t, rho, eps);
            return py::make_tuple(std::make_pair(p.position.x, p.position.y),
                                  std::make_pair(p.velocity.x, p.velocity.y));
        },
        py::arg("r0"), py::arg("t"), py::arg("rho"), py::arg("eps") = 0.1);

    m.def("eoc", &eoc, py::arg("err_coarse"), py::arg("err_fine"), py::arg("h_coarse"),
          py::arg("h_fine"));

    // Full runs driven by the JSON config format (same schema as the CLI).
    m.def(
        "evolve",
        [](const std::string& config_json) {
            const RunConfig config = config_from_json_text(config_json);
            const EvolveResult res = run_evolve(config);
            py::dict out;
            out["termination"] = to_string(res.termination);
            out["final_time"] = res.final_time;
            out["steps"] = res.steps;
            py::list series;
            for (const auto& r : res.series) {
                py::dict rec;
                rec["m"] = r.m;
                rec["t"] = r.t;
                rec["length"] = r.length;
                rec["kinf"] = r.kinf;
                rec["inv_kinf"] = r.inv_kinf;
                rec["energy"] = r.energy;
                rec["min_q"] = r.min_q;
                series.append(rec);
            }
            out["series"] = series;
            out["final_curve"] = grid_to_points(*res.final_curve);
            return out;
        },
        py::arg("config_json"));
    m.def(
        "converge",
        [](const std::vector<std::size_t>& levels) {
            const ConvergeResult res = run_converge(levels, preset("table1"), "");
            py::list rows;
            for (const auto& r : res.rows) {
                py::dict row;
                row["J"] = r.grid_count;
                row["pos_err"] = r.pos_err;
                row["vel_err"] = r.vel_err;
                if (r.eoc_pos) row["eoc_pos"] = *r.eoc_pos;
                if (r.eoc_vel) row["eoc_vel"] = *r.eoc_vel;
                rows.append(row);
            }
            return rows;
        },
        py::arg("levels"));
    m.def("preset_config", [](const std::string& name) {
        return config_to_json_text(preset(name));
    });
    m.def("preset_names", &preset_names);
}
