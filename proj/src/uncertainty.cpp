#include "fleetcarbon/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fleetcarbon {

namespace {

void validate_sweep_value(const std::string& parameter, double value) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument("sweep value for '" + parameter + "' must be finite");
    }
    if (parameter == "eta") {
        if (!(value > 0.0) || value > 1.0) {
            throw std::invalid_argument("eta sweep values must be in (0, 1]");
        }
    } else if (parameter == "mu_electric") {
        if (value < 0.0 || value > 1.0) {
            throw std::invalid_argument("mu_electric sweep values must be in [0, 1]");
        }
    } else if (parameter == "grid_factor" || parameter == "gasoline_factor") {
        if (!(value > 0.0)) {
            throw std::invalid_argument(parameter + " sweep values must be > 0");
        }
    } else {
        throw std::invalid_argument(
            "unknown sweep parameter '" + parameter +
            "' (expected eta, mu_electric, grid_factor or gasoline_factor)");
    }
}

struct SweepPoint {
    std::map<std::string, Totals> by_region;
    Totals national;
};

SweepPoint evaluate(const Dataset& dataset) {
    const auto cells = compute_all_cells(dataset);
    SweepPoint point;
    point.by_region = totals_by_region(totals_by_region_year(cells));
    point.national = national_totals(point.by_region);
    return point;
}

std::int64_t total_vehicle_count(const Dataset& dataset) {
    std::int64_t count = 0;
    for (const auto& ctx : dataset.contexts) {
        for (const auto& [model_id, units] : ctx.sales) {
            count += units;
        }
    }
    return count;
}

} // namespace

std::array<BoundScenario, 3> standard_scenarios() {
    return {BoundScenario{"lower", GridBound::kDefault, GasolineBound::kLower},
            BoundScenario{"default", GridBound::kDefault, GasolineBound::kDefault},
            BoundScenario{"upper", GridBound::kUpper, GasolineBound::kUpper}};
}

BoundScenario scenario_for_label(const std::string& label) {
    for (const auto& scenario : standard_scenarios()) {
        if (scenario.label == label) return scenario;
    }
    throw std::invalid_argument("unknown bound label '" + label +
                                "' (expected lower, default or upper)");
}

std::vector<ScenarioEmissions> emission_bounds(const Dataset& dataset) {
    const auto& triple = dataset.constants.gasoline_factor_kgco2_per_tj;
    if (!(triple.default_value > 0.0)) {
        throw std::invalid_argument("gasoline_factor_kgco2_per_tj is not configured");
    }
    std::vector<ScenarioEmissions> result;
    for (const auto& scenario : standard_scenarios()) {
        const auto cells =
            compute_all_cells(dataset, scenario.grid_factor_choice, scenario.gasoline_factor_choice);
        const auto region_year = totals_by_region_year(cells);
        const auto by_year = totals_by_year(region_year);
        const auto by_region = totals_by_region(region_year);
        const Totals national = national_totals(by_region);

        ScenarioEmissions entry{.scenario = scenario};
        for (const auto& [key, totals] : region_year) {
            entry.region_year.push_back(EmissionRow{key.first, key.second, totals.cee_ktco2,
                                                    totals.ceg_ktco2, totals.ce_ktco2});
        }
        for (const auto& [year, totals] : by_year) {
            entry.national_by_year.push_back(EmissionRow{kNationwideRegionCode, year,
                                                         totals.cee_ktco2, totals.ceg_ktco2,
                                                         totals.ce_ktco2});
        }
        entry.national_total = EmissionRow{kNationwideRegionCode, 0, national.cee_ktco2,
                                           national.ceg_ktco2, national.ce_ktco2};
        result.push_back(std::move(entry));
    }
    return result;
}

Dataset apply_sweep_parameter(const Dataset& dataset, const std::string& parameter, double value) {
    validate_sweep_value(parameter, value);
    Dataset adjusted = dataset;
    if (parameter == "eta") {
        adjusted.constants.eta = value;
    } else if (parameter == "mu_electric") {
        for (auto& model : adjusted.models) {
            model.mu_electric = value;
            model.mu_gasoline = 1.0 - value;
        }
    } else if (parameter == "grid_factor") {
        for (auto& ctx : adjusted.contexts) {
            auto& pair = ctx.grid_factor_kgco2_per_kwh;
            pair.default_value = value;
            pair.upper = std::max(pair.upper, value);
        }
    } else { // gasoline_factor
        auto& triple = adjusted.constants.gasoline_factor_kgco2_per_tj;
        triple.default_value = value;
        triple.lower = std::min(triple.lower, value);
        triple.upper = std::max(triple.upper, value);
    }
    return adjusted;
}

void validate_sweep_spec(const SweepSpec& spec) {
    if (spec.values.empty()) {
        throw std::invalid_argument("sweep values list is empty");
    }
    validate_sweep_value(spec.parameter, spec.baseline);
    for (double value : spec.values) {
        validate_sweep_value(spec.parameter, value);
    }
}

std::vector<SweepRow> sweep(const SweepSpec& spec, const Dataset& dataset) {
    validate_sweep_spec(spec);

    const SweepPoint baseline = evaluate(apply_sweep_parameter(dataset, spec.parameter, spec.baseline));
    const std::int64_t vehicles = total_vehicle_count(dataset);

    std::vector<SweepRow> rows;
    rows.reserve(spec.values.size());
    for (double value : spec.values) {
        const SweepPoint point = evaluate(apply_sweep_parameter(dataset, spec.parameter, value));
        SweepRow row{.value = value};
        for (const auto& [code, totals] : point.by_region) {
            row.ce_by_region.emplace_back(code, totals.ce_ktco2);
        }
        row.national_ce_ktco2 = point.national.ce_ktco2;
        row.kg_co2_per_vehicle =
            vehicles > 0 ? per_vehicle_carbon(point.national.ce_ktco2, vehicles) : 0.0;
        row.pct_change_vs_baseline =
            baseline.national.ce_ktco2 > 0.0
                ? (point.national.ce_ktco2 - baseline.national.ce_ktco2) /
                      baseline.national.ce_ktco2 * 100.0
                : 0.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace fleetcarbon
