#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hcflow/diagnostics.hpp"
#include "hcflow/model.hpp"
#include "hcflow/solver.hpp"

namespace hcflow {

/// JSON-expressible run configuration; mirrors FlowParams plus the curve,
/// output location and writer switches.
struct RunConfig {
    InitialCurveSpec curve = Circle{};
    double v0 = 0.0;
    double beta = 0.0;
    std::size_t grid_count = 256;
    double dt = 1e-4;
    double final_time = 1.0;
    std::size_t snapshot_stride = 1000;
    std::string output_dir;
    std::optional<double> curvature_cap;
    std::optional<double> length_floor_rel;
    std::optional<double> min_segment_rel;
    FirstStep first_step = FirstStep::Taylor;
    bool write_svg = true;
    bool qualitative = false;  // flagged in the manifest (dumbbell runs)
    std::string label;

    FlowParams to_params() const;
};

/// Parse / serialize the explicit-field JSON format; unknown fields are
/// rejected.  Throws ConfigError on malformed input.
RunConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const RunConfig& config);
RunConfig load_config(const std::string& path);

/// Named experiment presets.
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

enum class Termination { ReachedT, BlowUpDetected, HairpinSingularity, DegenerateSegment };
const char* to_string(Termination t);

struct EvolveResult {
    Termination termination = Termination::ReachedT;
    std::optional<StopReason> stop_reason;  // set for BlowUpDetected
    double final_time = 0.0;
    long steps = 0;
    std::vector<DiagnosticsRecord> series;
    double wall_seconds = 0.0;
    /// The last alive polygon.
    std::optional<PeriodicGridFunction> final_curve;
    /// Present only when the caller asked for states (keep_states).
    std::optional<FlowTrajectory> trajectory;
};

/// Steps the flow to T or an early stop.  When output_dir is nonempty,
/// writes series.csv, snap_<m>.csv every snapshot_stride steps,
/// manifest.json and (optionally) curves.svg.  The manifest is written
/// even when the solver aborts.
EvolveResult run_evolve(const RunConfig& config, bool keep_states = false);

struct ConvergeResult {
    std::vector<ConvergenceRow> rows;
    std::vector<std::string> failures;  // per-level error messages, table still emitted
};

/// Runs the convergence benchmark (PerturbedCircle, V0 = 0, beta = 0,
/// dt = h per level) over the given grid counts, computes both error
/// columns and EOCs, and writes table1.csv plus a formatted text table
/// when out_dir is nonempty.
ConvergeResult run_converge(const std::vector<std::size_t>& levels,
                            const RunConfig& base, const std::string& out_dir);

/// Formatted text table (5 significant digits, mirroring the benchmark's
/// display precision).
std::string format_convergence_table(const std::vector<ConvergenceRow>& rows);

struct ExactCircleResult {
    std::vector<CircleRadiusState> samples;
    bool truncated_at_extinction = false;
};

/// Exact/ODE radius trajectory: closed form for V0 = 0, the ODE oracle
/// otherwise; truncates at extinction with a flag.
ExactCircleResult run_exact_circle(double r0, double v0, double t_end,
                                   std::size_t samples);

/// CSV writers (17 significant digits, LF line endings, deterministic).
std::string exact_circle_csv(const ExactCircleResult& result);
void write_convergence_csv(const std::vector<ConvergenceRow>& rows,
                           const std::string& path);

}  // namespace hcflow
