#ifndef RAH_TOOLS_COMMANDS_HPP
#define RAH_TOOLS_COMMANDS_HPP

#include "rah/oracles.hpp"
#include "rah/plant.hpp"
#include "rah/reach_avoid.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rah::cli {

struct RunConfig {
    std::filesystem::path scenario;
    std::string plant = "virtual-only";
    std::filesystem::path out = "out";
    std::optional<double> dt_sample;
    std::uint64_t seed = 0;
    std::optional<double> ell;
    std::optional<double> c;
    std::optional<QbarConvention> qbar;
    std::optional<double> rtol;
    std::optional<double> atol;
    std::optional<double> t_max;
    int runs = 8;     ///< sweep only
    int threads = 0;  ///< sweep only; 0 means hardware concurrency
};

/// Exit codes shared by all subcommands.
enum Exit : int { ok = 0, invalid = 1, malformed = 2, failed = 3 };

struct PlantEntry {
    PlantModel model;
    TrackingController controller;
};

/// Registered plants by CLI name; empty for unknown names and for "virtual-only".
std::optional<PlantEntry> find_plant(const std::string& name);
std::vector<std::string> plant_names();

/// Load a scenario and apply the overrides of `cfg`.
Scenario prepare_scenario(const RunConfig& cfg);

/// Trajectory checks matching the kind of run.
oracles::TrajectoryChecks virtual_checks(const Scenario& s);
oracles::TrajectoryChecks closed_loop_checks(const Scenario& s, const PlantModel& plant, const ClosedLoopRun& run);

int cmd_validate(const std::filesystem::path& scenario, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_plot(const std::filesystem::path& csv, const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);

} // namespace rah::cli

#endif // RAH_TOOLS_COMMANDS_HPP
