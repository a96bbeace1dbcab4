#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fleetcarbon/types.hpp"

namespace fleetcarbon {

/// One validation finding. `row` is the 1-based line number in `file`
/// (0 when the finding is not tied to a line) and `code` is the
/// machine-readable error class listed in the README.
struct ValidationIssue {
    std::string file;
    long row = 0;
    std::string field;
    std::string code;
    std::string message;

    bool operator==(const ValidationIssue&) const = default;
};

struct ValidationReport {
    std::vector<ValidationIssue> errors;
    std::vector<ValidationIssue> warnings;

    bool ok() const { return errors.empty(); }

    void add_error(std::string file, long row, std::string field, std::string code,
                   std::string message);
    void add_warning(std::string file, long row, std::string field, std::string code,
                     std::string message);
    void merge(ValidationReport other);
};

/// `dataset` is engaged exactly when `report.ok()`.
struct LoadResult {
    std::optional<Dataset> dataset;
    ValidationReport report;
};

/// Loads and fully validates a dataset. Sales come either from
/// sales_<model_id> columns in the contexts file or from a long-format
/// sales.csv next to it. Collects every finding instead of stopping at
/// the first; a dataset is only returned when no errors were found.
LoadResult load_dataset(const std::filesystem::path& catalog_path,
                        const std::filesystem::path& contexts_path,
                        const std::filesystem::path& constants_path);

/// Re-checks every invariant of an in-memory dataset. Loading a dataset
/// and validating the result reports no new errors.
ValidationReport validate_dataset(const Dataset& dataset);

/// Writes catalog.csv, contexts.csv, sales.csv and constants.json into
/// `directory` (created if needed). Reloading the written files yields a
/// dataset equal to the input.
void save_dataset(const Dataset& dataset, const std::filesystem::path& directory);

} // namespace fleetcarbon
