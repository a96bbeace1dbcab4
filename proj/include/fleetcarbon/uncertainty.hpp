#pragma once

#include <array>
#include <string>
#include <vector>

#include "fleetcarbon/aggregation.hpp"
#include "fleetcarbon/types.hpp"

namespace fleetcarbon {

/// Factor choices behind one emission scenario. The named label ordering
/// (lower, default, upper) is monotone in both factor choices.
struct BoundScenario {
    std::string label;
    GridBound grid_factor_choice = GridBound::kDefault;
    GasolineBound gasoline_factor_choice = GasolineBound::kDefault;
};

/// The three standard scenarios. Electricity carries no lower factor, so
/// the lower scenario pairs the default grid factor with the lower
/// gasoline factor.
std::array<BoundScenario, 3> standard_scenarios();

/// Maps "lower" / "default" / "upper" to a scenario; "lower" uses the
/// default grid factor. Throws on any other label.
BoundScenario scenario_for_label(const std::string& label);

struct EmissionRow {
    std::string region_code;
    int year = 0;
    double cee_ktco2 = 0.0;
    double ceg_ktco2 = 0.0;
    double ce_ktco2 = 0.0;
};

struct ScenarioEmissions {
    BoundScenario scenario;
    std::vector<EmissionRow> region_year;      // ascending (region code, year)
    std::vector<EmissionRow> national_by_year; // region "T", ascending year
    EmissionRow national_total;                // region "T", year 0
};

/// Full emission computation per scenario, ordered lower, default, upper.
/// Throws if the gasoline factor triple is unset.
std::vector<ScenarioEmissions> emission_bounds(const Dataset& dataset);

/// One-at-a-time sweep over a single parameter. `values` are absolute
/// parameter values; the percent change of each row is taken against a
/// full recomputation at `baseline`.
struct SweepSpec {
    std::string parameter; // eta | mu_electric | grid_factor | gasoline_factor
    std::vector<double> values;
    double baseline = 0.0;
};

struct SweepRow {
    double value = 0.0;
    std::vector<std::pair<std::string, double>> ce_by_region; // ascending region code
    double national_ce_ktco2 = 0.0;
    double kg_co2_per_vehicle = 0.0;
    double pct_change_vs_baseline = 0.0;
};

/// Throws std::invalid_argument on an unknown parameter, an empty value
/// list, or a value (or baseline) outside the parameter's domain.
void validate_sweep_spec(const SweepSpec& spec);

/// Recomputes the default-scenario emissions once per sweep value, in the
/// order given by spec.values. Validates the spec first.
std::vector<SweepRow> sweep(const SweepSpec& spec, const Dataset& dataset);

/// Returns a copy of the dataset with one parameter replaced everywhere it
/// applies. Used by sweep(); exposed for direct what-if runs.
Dataset apply_sweep_parameter(const Dataset& dataset, const std::string& parameter, double value);

} // namespace fleetcarbon
