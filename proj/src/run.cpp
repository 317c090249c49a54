#include "hcflow/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hcflow/ode.hpp"

namespace hcflow {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt5(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4e", v);
    return buf;
}

void reject_unknown_fields(const ordered_json& obj,
                           std::initializer_list<const char*> allowed,
                           const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return it.key() == k;
            }) == allowed.end()) {
            throw ConfigError("unknown field \"" + it.key() + "\" in " + where);
        }
    }
}

InitialCurveSpec curve_from_json(const ordered_json& j) {
    if (!j.is_object() || !j.contains("type")) {
        throw ConfigError("curve must be an object with a \"type\" field");
    }
    const std::string type = j.at("type").get<std::string>();
    if (type == "circle") {
        reject_unknown_fields(j, {"type", "r0"}, "curve");
        Circle c;
        if (j.contains("r0")) c.r0 = j.at("r0").get<double>();
        return c;
    }
    if (type == "ellipse") {
        reject_unknown_fields(j, {"type", "a", "b"}, "curve");
        Ellipse e;
        if (j.contains("a")) e.a = j.at("a").get<double>();
        if (j.contains("b")) e.b = j.at("b").get<double>();
        return e;
    }
    if (type == "perturbed_circle") {
        reject_unknown_fields(j, {"type", "r0", "eps"}, "curve");
        PerturbedCircle p;
        if (j.contains("r0")) p.r0 = j.at("r0").get<double>();
        if (j.contains("eps")) p.eps = j.at("eps").get<double>();
        return p;
    }
    if (type == "dumbbell") {
        reject_unknown_fields(j, {"type", "neck", "scale"}, "curve");
        Dumbbell d;
        if (j.contains("neck")) d.neck = j.at("neck").get<double>();
        if (j.contains("scale")) d.scale = j.at("scale").get<double>();
        return d;
    }
    throw ConfigError("unknown curve type \"" + type + "\"");
}

ordered_json curve_to_json(const InitialCurveSpec& spec) {
    return std::visit(
        [](const auto& s) -> ordered_json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Circle>) {
                return {{"type", "circle"}, {"r0", s.r0}};
            } else if constexpr (std::is_same_v<T, Ellipse>) {
                return {{"type", "ellipse"}, {"a", s.a}, {"b", s.b}};
            } else if constexpr (std::is_same_v<T, PerturbedCircle>) {
                return {{"type", "perturbed_circle"}, {"r0", s.r0}, {"eps", s.eps}};
            } else {
                return {{"type", "dumbbell"}, {"neck", s.neck}, {"scale", s.scale}};
            }
        },
        spec);
}

FirstStep first_step_from_string(const std::string& s) {
    if (s == "taylor") return FirstStep::Taylor;
    if (s == "symmetric") return FirstStep::SymmetricSolve;
    throw ConfigError("first_step must be \"taylor\" or \"symmetric\"");
}

const char* first_step_to_string(FirstStep fs) {
    return fs == FirstStep::Taylor ? "taylor" : "symmetric";
}

}  // namespace

FlowParams RunConfig::to_params() const {
    FlowParams p;
    p.beta = beta;
    p.v0 = v0;
    p.grid_count = grid_count;
    p.dt = dt;
    p.final_time = final_time;
    p.snapshot_stride = snapshot_stride;
    if (curvature_cap) p.curvature_cap = *curvature_cap;
    if (length_floor_rel) p.length_floor_rel = *length_floor_rel;
    if (min_segment_rel) p.min_segment_rel = *min_segment_rel;
    p.first_step = first_step;
    p.validate();
    return p;
}

RunConfig config_from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown_fields(j,
                          {"curve", "v0", "beta", "J", "dt", "T", "snapshot_stride",
                           "output_dir", "curvature_cap", "length_floor_rel",
                           "min_segment_rel", "first_step", "write_svg", "qualitative",
                           "label"},
                          "config");
    RunConfig c;
    try {
        if (j.contains("curve")) c.curve = curve_from_json(j.at("curve"));
        if (j.contains("v0")) c.v0 = j.at("v0").get<double>();
        if (j.contains("beta")) c.beta = j.at("beta").get<double>();
        if (j.contains("J")) c.grid_count = j.at("J").get<std::size_t>();
        if (j.contains("dt")) c.dt = j.at("dt").get<double>();
        if (j.contains("T")) c.final_time = j.at("T").get<double>();
        if (j.contains("snapshot_stride"))
            c.snapshot_stride = j.at("snapshot_stride").get<std::size_t>();
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("curvature_cap")) c.curvature_cap = j.at("curvature_cap").get<double>();
        if (j.contains("length_floor_rel"))
            c.length_floor_rel = j.at("length_floor_rel").get<double>();
        if (j.contains("min_segment_rel"))
            c.min_segment_rel = j.at("min_segment_rel").get<double>();
        if (j.contains("first_step"))
            c.first_step = first_step_from_string(j.at("first_step").get<std::string>());
        if (j.contains("write_svg")) c.write_svg = j.at("write_svg").get<bool>();
        if (j.contains("qualitative")) c.qualitative = j.at("qualitative").get<bool>();
        if (j.contains("label")) c.label = j.at("label").get<std::string>();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad config field: ") + e.what());
    }
    c.to_params();  // validate early
    return c;
}

std::string config_to_json_text(const RunConfig& c) {
    ordered_json j;
    j["curve"] = curve_to_json(c.curve);
    j["v0"] = c.v0;
    j["beta"] = c.beta;
    j["J"] = c.grid_count;
    j["dt"] = c.dt;
    j["T"] = c.final_time;
    j["snapshot_stride"] = c.snapshot_stride;
    if (!c.output_dir.empty()) j["output_dir"] = c.output_dir;
    if (c.curvature_cap) j["curvature_cap"] = *c.curvature_cap;
    if (c.length_floor_rel) j["length_floor_rel"] = *c.length_floor_rel;
    if (c.min_segment_rel) j["min_segment_rel"] = *c.min_segment_rel;
    j["first_step"] = first_step_to_string(c.first_step);
    j["write_svg"] = c.write_svg;
    if (c.qualitative) j["qualitative"] = true;
    if (!c.label.empty()) j["label"] = c.label;
    return j.dump(2) + "\n";
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

RunConfig preset(const std::string& name) {
    RunConfig c;
    c.label = name;
    if (name == "circle-v0") {
        c.curve = Circle{1.0};
        c.v0 = 0.0;
        c.final_time = 1.5;
        c.snapshot_stride = 1000;
    } else if (name == "circle-v+1") {
        c.curve = Circle{1.0};
        c.v0 = 1.0;
        c.final_time = 3.6;
        c.snapshot_stride = 2000;
    } else if (name == "circle-v-1") {
        c.curve = Circle{1.0};
        c.v0 = -1.0;
        c.final_time = 0.8;
        c.snapshot_stride = 500;
    } else if (name == "ellipse-v0") {
        c.curve = Ellipse{1.5, 1.0};
        c.v0 = 0.0;
        c.final_time = 1.6;
        c.snapshot_stride = 1000;
    } else if (name == "ellipse-v1") {
        c.curve = Ellipse{1.5, 1.0};
        c.v0 = 1.0;
        c.final_time = 4.5;
        c.snapshot_stride = 3000;
    } else if (name == "ellipse-v0-beta2") {
        c.curve = Ellipse{1.5, 1.0};
        c.v0 = 0.0;
        c.beta = 2.0;
        c.final_time = 2.6;
        c.snapshot_stride = 2000;
    } else if (name == "ellipse-v1-beta01") {
        c.curve = Ellipse{1.5, 1.0};
        c.v0 = 1.0;
        c.beta = 0.1;
        c.final_time = 4.5;
        c.snapshot_stride = 3000;
    } else if (name == "dumbbell-v0") {
        c.curve = Dumbbell{};
        c.v0 = 0.0;
        c.final_time = 1.0;
        c.snapshot_stride = 1000;
        c.qualitative = true;
    } else if (name == "dumbbell-v1") {
        c.curve = Dumbbell{};
        c.v0 = 1.0;
        c.final_time = 4.5;
        c.snapshot_stride = 4000;
        c.qualitative = true;
    } else if (name == "dumbbell-v-1") {
        c.curve = Dumbbell{};
        c.v0 = -1.0;
        c.final_time = 0.6;
        c.snapshot_stride = 500;
        c.qualitative = true;
    } else if (name == "table1") {
        c.curve = PerturbedCircle{1.0, 0.1};
        c.v0 = 0.0;
        c.grid_count = 256;
        c.dt = 1.0 / 256.0;
        c.final_time = 1.0;
        c.snapshot_stride = 32;
        c.first_step = FirstStep::SymmetricSolve;
    } else {
        throw ConfigError("unknown preset \"" + name + "\"");
    }
    return c;
}

std::vector<std::string> preset_names() {
    return {"circle-v0",       "circle-v+1",       "circle-v-1",      "ellipse-v0",
            "ellipse-v1",      "ellipse-v0-beta2", "ellipse-v1-beta01", "dumbbell-v0",
            "dumbbell-v1",     "dumbbell-v-1",     "table1"};
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::ReachedT: return "ReachedT";
        case Termination::BlowUpDetected: return "BlowUpDetected";
        case Termination::HairpinSingularity: return "HairpinSingularity";
        case Termination::DegenerateSegment: return "DegenerateSegment";
    }
    return "unknown";
}

namespace {

void write_snapshot_csv(const std::filesystem::path& path,
                        const PeriodicGridFunction& x) {
    std::ofstream out(path, std::ios::binary);
    out << "j,x1,x2\n";
    for (std::size_t k = 0; k < x.size(); ++k) {
        out << (k + 1) << ',' << fmt17(x[k].x) << ',' << fmt17(x[k].y) << '\n';
    }
}

void write_series_csv(const std::filesystem::path& path,
                      const std::vector<DiagnosticsRecord>& series) {
    std::ofstream out(path, std::ios::binary);
    out << "m,t,length,kinf,inv_kinf,energy,min_q\n";
    for (const auto& r : series) {
        out << r.m << ',' << fmt17(r.t) << ',' << fmt17(r.length) << ','
            << fmt17(r.kinf) << ',' << fmt17(r.inv_kinf) << ',' << fmt17(r.energy)
            << ',' << fmt17(r.min_q) << '\n';
    }
}

void write_curves_svg(const std::filesystem::path& path,
                      const std::vector<std::pair<long, PeriodicGridFunction>>& snaps) {
    if (snaps.empty()) return;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& [m, poly] : snaps) {
        for (std::size_t k = 0; k < poly.size(); ++k) {
            xmin = std::min(xmin, poly[k].x);
            xmax = std::max(xmax, poly[k].x);
            ymin = std::min(ymin, poly[k].y);
            ymax = std::max(ymax, poly[k].y);
        }
    }
    const double pad = 0.05 * std::max(xmax - xmin, ymax - ymin) + 1e-6;
    xmin -= pad; xmax += pad; ymin -= pad; ymax += pad;

    std::ofstream out(path, std::ios::binary);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" "
                  "viewBox=\"%.6g %.6g %.6g %.6g\" preserveAspectRatio=\"xMidYMid meet\">\n",
                  xmin, ymin, xmax - xmin, ymax - ymin);
    out << buf;
    // SVG y points down; flip around the box's vertical center.
    std::snprintf(buf, sizeof(buf), "<g transform=\"translate(0 %.6g) scale(1 -1)\">\n",
                  ymin + ymax);
    out << buf;
    const double stroke = 0.004 * std::max(xmax - xmin, ymax - ymin);
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        const auto& poly = snaps[i].second;
        const int hue = snaps.size() > 1
                            ? static_cast<int>(240.0 * static_cast<double>(i) /
                                               static_cast<double>(snaps.size() - 1))
                            : 0;
        out << "<polygon fill=\"none\" stroke=\"hsl(" << (240 - hue)
            << ",70%,45%)\" stroke-width=\"" << stroke << "\" points=\"";
        for (std::size_t k = 0; k < poly.size(); ++k) {
            if (k) out << ' ';
            out << fmt5(poly[k].x) << ',' << fmt5(poly[k].y);
        }
        out << "\"/>\n";
    }
    out << "</g>\n</svg>\n";
}

}  // namespace

EvolveResult run_evolve(const RunConfig& config, bool keep_states) {
    const FlowParams params = config.to_params();
    const auto t0 = std::chrono::steady_clock::now();

    const bool writing = !config.output_dir.empty();
    std::filesystem::path dir(config.output_dir);
    if (writing) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw ConfigError("cannot create output directory " + config.output_dir);
    }

    EvolveResult res;
    SolverState state = init_states(config.curve, params);
    const long total_steps = params.step_count();

    std::vector<std::pair<long, PeriodicGridFunction>> snapshots;
    const auto take_snapshot = [&](const SolverState& s) {
        snapshots.emplace_back(s.step_index, s.x_curr);
        if (writing) {
            write_snapshot_csv(dir / ("snap_" + std::to_string(s.step_index) + ".csv"),
                               s.x_curr);
        }
    };

    res.series.push_back(record_step(state));
    take_snapshot(state);
    if (keep_states) {
        res.trajectory = FlowTrajectory{params, {state.x_curr}};
    }

    res.termination = Termination::ReachedT;
    try {
        while (state.step_index < total_steps) {
            state = step(state);
            res.series.push_back(record_step(state));
            if (keep_states) res.trajectory->states.push_back(state.x_curr);
            if (state.step_index % static_cast<long>(params.snapshot_stride) == 0) {
                take_snapshot(state);
            }
        }
        res.final_time = state.time();
    } catch (const BlowUpDetected& e) {
        res.termination = Termination::BlowUpDetected;
        res.stop_reason = e.reason;
        res.final_time = e.time;
    } catch (const HairpinSingularity&) {
        res.termination = Termination::HairpinSingularity;
        res.final_time = state.time();
    } catch (const DegenerateSegment&) {
        res.termination = Termination::DegenerateSegment;
        res.final_time = state.time();
    }
    res.steps = state.step_index;
    res.final_curve = state.x_curr;

    // Final curve, whether or not it falls on the stride.
    if (snapshots.empty() || snapshots.back().first != state.step_index) {
        take_snapshot(state);
    }

    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (writing) {
        write_series_csv(dir / "series.csv", res.series);
        if (config.write_svg) write_curves_svg(dir / "curves.svg", snapshots);

        ordered_json manifest;
        manifest["config"] = ordered_json::parse(config_to_json_text(config));
        manifest["termination"] = to_string(res.termination);
        if (res.stop_reason) {
            manifest["stop_reason"] = to_string(*res.stop_reason);
        }
        manifest["final_time"] = res.final_time;
        manifest["steps"] = res.steps;
        manifest["wall_seconds"] = res.wall_seconds;
        if (config.qualitative) manifest["qualitative_reproduction"] = true;
        std::ofstream out(dir / "manifest.json", std::ios::binary);
        out << manifest.dump(2) << '\n';
    }
    return res;
}

ConvergeResult run_converge(const std::vector<std::size_t>& levels,
                            const RunConfig& base, const std::string& out_dir) {
    const auto* pc = std::get_if<PerturbedCircle>(&base.curve);
    if (!pc || base.v0 != 0.0 || base.beta != 0.0) {
        throw ConfigError(
            "convergence benchmark needs a perturbed-circle curve with V0 = 0, beta = 0");
    }
    const ShrinkingCircleReference reference(pc->r0, pc->eps);

    ConvergeResult result;
    for (std::size_t J : levels) {
        RunConfig cfg = base;
        cfg.grid_count = J;
        cfg.dt = 1.0 / static_cast<double>(J);
        cfg.output_dir.clear();
        cfg.snapshot_stride = std::max<std::size_t>(J, 1);
        try {
            const EvolveResult run = run_evolve(cfg, /*keep_states=*/true);
            if (run.termination != Termination::ReachedT) {
                throw FlowError(std::string("run stopped early: ") +
                                to_string(run.termination));
            }
            ConvergenceRow row;
            row.grid_count = J;
            row.pos_err = error_position(reference, *run.trajectory);
            row.vel_err = error_velocity(reference, *run.trajectory);
            if (!result.rows.empty()) {
                const auto& prev = result.rows.back();
                const double h_c = 1.0 / static_cast<double>(prev.grid_count);
                const double h_f = 1.0 / static_cast<double>(J);
                row.eoc_pos = eoc(prev.pos_err, row.pos_err, h_c, h_f);
                row.eoc_vel = eoc(prev.vel_err, row.vel_err, h_c, h_f);
            }
            result.rows.push_back(row);
        } catch (const std::exception& e) {
            result.failures.push_back("J=" + std::to_string(J) + ": " + e.what());
        }
    }

    if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw ConfigError("cannot create output directory " + out_dir);
        write_convergence_csv(result.rows,
                              (std::filesystem::path(out_dir) / "table1.csv").string());
        std::ofstream txt(std::filesystem::path(out_dir) / "table1.txt",
                          std::ios::binary);
        txt << format_convergence_table(result.rows);
    }
    return result;
}

namespace {
std::string fmt_eoc(const std::optional<double>& v) {
    if (!v) return "---";
    char b[16];
    std::snprintf(b, sizeof(b), "%.2f", *v);
    return b;
}
}  // namespace

std::string format_convergence_table(const std::vector<ConvergenceRow>& rows) {
    std::ostringstream out;
    out << "    J   max ||x - x^m||_1h    EOC   max ||xdot - cd x^m||_0h   EOC\n";
    for (const auto& r : rows) {
        char line[160];
        std::snprintf(line, sizeof(line), "%5zu   %s            %5s   %s                 %5s\n",
                      r.grid_count, fmt5(r.pos_err).c_str(), fmt_eoc(r.eoc_pos).c_str(),
                      fmt5(r.vel_err).c_str(), fmt_eoc(r.eoc_vel).c_str());
        out << line;
    }
    return out.str();
}

void write_convergence_csv(const std::vector<ConvergenceRow>& rows,
                           const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    out << "J,pos_err,eoc_pos,vel_err,eoc_vel\n";
    for (const auto& r : rows) {
        out << r.grid_count << ',' << fmt17(r.pos_err) << ','
            << (r.eoc_pos ? fmt17(*r.eoc_pos) : std::string()) << ','
            << fmt17(r.vel_err) << ','
            << (r.eoc_vel ? fmt17(*r.eoc_vel) : std::string()) << '\n';
    }
}

ExactCircleResult run_exact_circle(double r0, double v0, double t_end,
                                   std::size_t samples) {
    if (!(r0 > 0.0)) throw ConfigError("r0 must be positive");
    if (samples < 2) throw ConfigError("need at least 2 samples");

    ExactCircleResult res;
    if (v0 == 0.0) {
        const double t_ext = circle_extinction_time(r0);
        for (std::size_t i = 0; i <= samples; ++i) {
            const double t = t_end * static_cast<double>(i) / static_cast<double>(samples);
            if (t >= t_ext) {
                res.truncated_at_extinction = true;
                break;
            }
            res.samples.push_back(
                {circle_radius_exact_v0(r0, t), circle_radius_rate_v0(r0, t), t});
        }
        return res;
    }

    // ODE oracle, advanced to the uniform sample times.
    OdeOptions opts;
    opts.abs_tol = opts.rel_tol = 1e-12;
    Dp54Integrator integrator(
        [](double, const std::vector<double>& y, std::vector<double>& dydt) {
            dydt[0] = y[1];
            dydt[1] = -1.0 / y[0];
        },
        opts);
    std::vector<double> y = {r0, v0};
    double t = 0.0;
    res.samples.push_back({r0, v0, 0.0});
    const double r_extinct = 1e-6 * r0;
    try {
        for (std::size_t i = 1; i <= samples; ++i) {
            const double ts = t_end * static_cast<double>(i) / static_cast<double>(samples);
            bool extinct = false;
            integrator.advance(y, t, ts, [&](double, const std::vector<double>& yk) {
                if (yk[0] <= r_extinct) {
                    extinct = true;
                    return false;
                }
                return true;
            });
            if (extinct) {
                res.truncated_at_extinction = true;
                break;
            }
            res.samples.push_back({y[0], y[1], t});
        }
    } catch (const StepSizeUnderflow&) {
        res.truncated_at_extinction = true;
    }
    return res;
}

std::string exact_circle_csv(const ExactCircleResult& result) {
    std::ostringstream out;
    out << "t,r,rdot,extinct\n";
    for (std::size_t i = 0; i < result.samples.size(); ++i) {
        const auto& s = result.samples[i];
        const bool last = i + 1 == result.samples.size();
        out << fmt17(s.t) << ',' << fmt17(s.r) << ',' << fmt17(s.rdot) << ','
            << (last && result.truncated_at_extinction ? 1 : 0) << '\n';
    }
    return out.str();
}

}  // namespace hcflow
