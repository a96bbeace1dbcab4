#pragma once

#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "fleetcarbon/ingestion.hpp"

namespace fleetcarbon {

/// One invocation of the engine. Sweep fields are meaningful only when
/// command == "sweep"; bound only applies to "emissions".
struct RunConfig {
    std::string command; // validate | intensity | energy | emissions | bounds | sweep
    std::string catalog_path;
    std::string contexts_path;
    std::string constants_path;
    std::string output_format = "table"; // table | json | csv
    std::string output_path;             // empty: table/json/csv go to `out`
    std::string bound = "default";
    std::string sweep_parameter;
    std::vector<double> sweep_values;
    double sweep_baseline = std::numeric_limits<double>::quiet_NaN();
};

inline constexpr int kSchemaVersion = 1;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailure = 1;
inline constexpr int kExitUsageError = 2;

/// Runs one command end to end. Tables and stdout payloads go to `out`,
/// diagnostics to `err`; JSON/CSV go to config.output_path when set.
/// Returns the process exit code (0 ok, 1 validation failure, 2 usage
/// error). Identical config and dataset produce byte-identical output.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

void print_validation_report(const ValidationReport& report, std::ostream& out);

} // namespace fleetcarbon
