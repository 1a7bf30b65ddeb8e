#ifndef RAH_OUTPUT_HPP
#define RAH_OUTPUT_HPP

#include "rah/oracles.hpp"
#include "rah/plant.hpp"
#include "rah/reach_avoid.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace rah {

/// A parsed trajectory CSV.
struct TrajectoryTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Column index by name; throws if absent.
    std::size_t column(const std::string& name) const;
    bool has(const std::string& name) const;
    /// Number of columns named prefix_1, prefix_2, ...
    int count_prefixed(const std::string& prefix) const;
};

/// Shortest round-trip decimal form, so identical runs produce identical files.
std::string format_number(double v);

/// t,j,rho,xi_1..xi_p in world coordinates.
void write_virtual_csv(std::ostream& os, const VirtualRun& run);

/// t,j,rho,xi_1..xi_p,x_1..x_n,z_1..z_p,V,d,gate; xi is the virtual reference zeta.
void write_closed_loop_csv(std::ostream& os, const ClosedLoopRun& run, const PlantModel& plant);

TrajectoryTable read_trajectory_csv(std::istream& is);
TrajectoryTable read_trajectory_csv(const std::filesystem::path& path);

nlohmann::json virtual_summary(const Scenario& scenario, const VirtualRun& run,
                               const std::vector<oracles::PropertyReport>& checks);

nlohmann::json closed_loop_summary(const Scenario& scenario, const ClosedLoopRun& run, const PlantModel& plant,
                                   const std::vector<oracles::PropertyReport>& checks);

nlohmann::json report_to_json(const oracles::PropertyReport& r);

/**
 * Write plane.svg (2-D only: path, r / Delta / lambda rings, M1 sectors filled,
 * the wide cone of M0 outlined) and time.svg (inputs when a controller is
 * given, virtual law components, -rho). Returns the written paths.
 */
std::vector<std::filesystem::path> write_plots(const TrajectoryTable& table, const Scenario& scenario,
                                               const std::filesystem::path& out_dir,
                                               const TrackingController* controller = nullptr);

} // namespace rah

#endif // RAH_OUTPUT_HPP
