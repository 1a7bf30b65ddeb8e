#ifndef RAH_SCENARIO_IO_HPP
#define RAH_SCENARIO_IO_HPP

#include "rah/geometry.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace rah {

/// Malformed scenario document. what() names the offending field or position.
class ScenarioParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Build a scenario from JSON. Omitted obstacle parameters get the defaults of
 * make_obstacle, except lambda with several obstacles, which is placed in the
 * middle of the admissible interval (capped at 2 Delta).
 */
Scenario scenario_from_json(const nlohmann::json& doc);

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

/// Every field written explicitly, so the output round-trips.
nlohmann::json scenario_to_json(const Scenario& s);

const char* to_string(QbarConvention q);
QbarConvention parse_qbar(const std::string& name);

} // namespace rah

#endif // RAH_SCENARIO_IO_HPP
