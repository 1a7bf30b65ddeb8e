#include "commands.hpp"

#include "rah/scenario_io.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

namespace {

void setup_logging()
{
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("RAH_LOG")) {
        spdlog::set_level(spdlog::level::from_str(env));
    }
    spdlog::set_pattern("[%l] %v");
}

void add_run_options(CLI::App* cmd, rah::cli::RunConfig& cfg, std::string& qbar)
{
    cmd->add_option("--scenario", cfg.scenario, "scenario JSON file")->required();
    cmd->add_option("--plant", cfg.plant, "virtual-only | unicycle");
    cmd->add_option("--out", cfg.out, "output directory");
    cmd->add_option("--dt-sample", cfg.dt_sample, "sample interval of the written trajectory")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", cfg.seed, "random seed");
    cmd->add_option("--ell", cfg.ell, "override the gate gain")->check(CLI::PositiveNumber);
    cmd->add_option("--c", cfg.c, "override the stabilizer radius")->check(CLI::PositiveNumber);
    cmd->add_option("--qbar", qbar, "detour direction for every obstacle")->check(CLI::IsMember({"cw", "ccw"}));
    cmd->add_option("--rtol", cfg.rtol, "integrator relative tolerance");
    cmd->add_option("--atol", cfg.atol, "integrator absolute tolerance");
    cmd->add_option("--t-max", cfg.t_max, "continuous-time budget");
}

} // namespace

int main(int argc, char** argv)
{
    setup_logging();
    CLI::App app{"Hybrid reach-and-avoid simulator"};
    app.require_subcommand(1);

    rah::cli::RunConfig cfg;
    std::string qbar;
    std::filesystem::path validate_path;
    std::filesystem::path csv_path;

    auto* validate = app.add_subcommand("validate", "check a scenario file");
    validate->add_option("--scenario", validate_path, "scenario JSON file")->required();

    auto* simulate = app.add_subcommand("simulate", "run a scenario, write trajectory.csv and summary.json");
    add_run_options(simulate, cfg, qbar);

    auto* plot = app.add_subcommand("plot", "write SVG plots of a trajectory");
    add_run_options(plot, cfg, qbar);
    plot->add_option("--csv", csv_path, "trajectory CSV from simulate")->required();

    auto* verify = app.add_subcommand("verify", "run a scenario and its property and oracle checks");
    add_run_options(verify, cfg, qbar);

    auto* sweep = app.add_subcommand("sweep", "random initial conditions, one directory per run");
    add_run_options(sweep, cfg, qbar);
    sweep->add_option("--runs", cfg.runs, "number of runs")->check(CLI::PositiveNumber);
    sweep->add_option("--threads", cfg.threads, "worker threads (0: all cores)");

    CLI11_PARSE(app, argc, argv);
    if (!qbar.empty()) {
        cfg.qbar = rah::parse_qbar(qbar);
    }

    if (*validate) {
        return rah::cli::cmd_validate(validate_path, std::cout);
    }
    if (*simulate) {
        return rah::cli::cmd_simulate(cfg, std::cout);
    }
    if (*plot) {
        return rah::cli::cmd_plot(csv_path, cfg, std::cout);
    }
    if (*verify) {
        return rah::cli::cmd_verify(cfg, std::cout);
    }
    return rah::cli::cmd_sweep(cfg, std::cout);
}
