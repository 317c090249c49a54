#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hcflow/run.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_solver_abort = 2;
constexpr int exit_config_error = 3;

std::vector<std::size_t> parse_levels(const std::string& csv) {
    std::vector<std::size_t> levels;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        levels.push_back(static_cast<std::size_t>(std::stoul(tok)));
    }
    if (levels.empty()) throw hcflow::ConfigError("no levels given");
    return levels;
}

int do_evolve(const std::string& preset_name, const std::string& config_path,
              const std::string& out_dir) {
    hcflow::RunConfig config;
    if (!preset_name.empty()) {
        config = hcflow::preset(preset_name);
    } else if (!config_path.empty()) {
        config = hcflow::load_config(config_path);
    } else {
        throw hcflow::ConfigError("evolve needs --preset or --config");
    }
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (config.output_dir.empty()) {
        config.output_dir = config.label.empty() ? "out" : "out-" + config.label;
    }

    const hcflow::EvolveResult res = hcflow::run_evolve(config);
    std::cout << "termination: " << hcflow::to_string(res.termination);
    if (res.stop_reason) std::cout << " (" << hcflow::to_string(*res.stop_reason) << ")";
    std::cout << "\nfinal time:  " << res.final_time << "\nsteps:       " << res.steps
              << "\nartifacts:   " << config.output_dir << "\n";
    return res.termination == hcflow::Termination::ReachedT ? exit_ok : exit_solver_abort;
}

int do_converge(const std::string& levels_csv, const std::string& out_dir,
                const std::string& config_path) {
    hcflow::RunConfig base =
        config_path.empty() ? hcflow::preset("table1") : hcflow::load_config(config_path);
    const auto levels = parse_levels(levels_csv);
    const hcflow::ConvergeResult res = hcflow::run_converge(levels, base, out_dir);
    std::cout << hcflow::format_convergence_table(res.rows);
    for (const auto& f : res.failures) std::cerr << "level failed: " << f << "\n";
    if (!out_dir.empty()) std::cout << "artifacts:   " << out_dir << "\n";
    return res.failures.empty() ? exit_ok : exit_solver_abort;
}

int do_exact_circle(double r0, double v0, double t_end, std::size_t samples,
                    const std::string& out_path) {
    const hcflow::ExactCircleResult res =
        hcflow::run_exact_circle(r0, v0, t_end, samples);
    const std::string csv = hcflow::exact_circle_csv(res);
    if (out_path.empty() || out_path == "-") {
        std::cout << csv;
    } else {
        std::filesystem::path p(out_path);
        if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
        std::ofstream out(p, std::ios::binary);
        out << csv;
        std::cout << "wrote " << out_path << "\n";
    }
    if (res.truncated_at_extinction) {
        std::cout << "note: trajectory truncated at extinction\n";
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hyperbolic curvature flow of closed planar curves"};
    app.require_subcommand(1);

    std::string preset_name, config_path, out_dir;
    auto* evolve = app.add_subcommand("evolve", "Run one flow evolution");
    auto* opt_preset = evolve->add_option("--preset", preset_name, "experiment preset");
    evolve->add_option("--config", config_path, "JSON run configuration")
        ->excludes(opt_preset);
    evolve->add_option("--out", out_dir, "output directory");

    std::string levels_csv = "32,64,128,256,512,1024,2048";
    std::string conv_out = "out-table1", conv_config;
    auto* converge = app.add_subcommand("converge", "Convergence benchmark");
    converge->add_option("--levels", levels_csv, "comma-separated grid counts");
    converge->add_option("--out", conv_out, "output directory");
    converge->add_option("--config", conv_config, "JSON base configuration");

    double r0 = 1.0, v0 = 0.0, t_end = 1.2;
    std::size_t samples = 100;
    std::string circle_out;
    auto* exact = app.add_subcommand("exact-circle", "Exact/ODE circle radius table");
    exact->add_option("--r0", r0, "initial radius");
    exact->add_option("--v0", v0, "initial radial velocity");
    exact->add_option("--t-end", t_end, "final time");
    exact->add_option("--samples", samples, "number of samples");
    exact->add_option("--out", circle_out, "output CSV file ('-' = stdout)");

    auto* presets = app.add_subcommand("presets", "List experiment presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (evolve->parsed()) return do_evolve(preset_name, config_path, out_dir);
        if (converge->parsed()) return do_converge(levels_csv, conv_out, conv_config);
        if (exact->parsed()) return do_exact_circle(r0, v0, t_end, samples, circle_out);
        if (presets->parsed()) {
            for (const auto& n : hcflow::preset_names()) std::cout << n << "\n";
            return exit_ok;
        }
    } catch (const hcflow::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_solver_abort;
    }
    return exit_ok;
}
