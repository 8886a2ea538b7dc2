#ifndef OSM_REPORT_HPP
#define OSM_REPORT_HPP

#include <string>
#include <vector>

#include "json.hpp"

#include "osm/optimizer.hpp"
#include "osm/problem.hpp"
#include "osm/simulator.hpp"

namespace osm {
namespace report {

/** Current schema_version stamped on every JSON report. */
inline constexpr int schema_version = 1;

/** Shortest round-trip decimal form of x (%.17g). */
std::string g17(double x);

nlohmann::json to_json(const OuterBC& outer);
nlohmann::json to_json(const ProblemConfig& cfg);
nlohmann::json to_json(const SearchPolicy& policy);
nlohmann::json to_json(const TransmissionParams& params);
nlohmann::json to_json(const OptimizationResult& result);
nlohmann::json to_json(const SimulatorReport& rep);
nlohmann::json to_json(const std::vector<ModeRate>& rates);

OuterBC outer_from_json(const nlohmann::json& j);
ProblemConfig config_from_json(const nlohmann::json& j);
SearchPolicy policy_from_json(const nlohmann::json& j, SearchPolicy base = {});
TransmissionParams params_from_json(const nlohmann::json& j);

/** Aligned, space-padded text table (first row is the header). */
std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows);

/** One comma-joined, newline-terminated CSV record. */
std::string csv_line(const std::vector<std::string>& cells);

} // namespace report
} // namespace osm

#endif
