#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fleetcarbon/core_model.hpp"
#include "fleetcarbon/types.hpp"

namespace fleetcarbon {

enum class GridBound { kDefault, kUpper };
enum class GasolineBound { kLower, kDefault, kUpper };

double grid_factor_value(const GridFactorPair& pair, GridBound bound);
double gasoline_factor_value(const FactorTriple& triple, GasolineBound bound);

/// Field-wise accumulator over ResultCells. Derived fields (total_tj,
/// ce_ktco2) are summed like the carrier fields, so a total always equals
/// the sum of the values it was built from, bit for bit.
struct Totals {
    double electricity_tj = 0.0;
    double gasoline_tj = 0.0;
    double total_tj = 0.0;
    double cee_ktco2 = 0.0;
    double ceg_ktco2 = 0.0;
    double ce_ktco2 = 0.0;

    void add(const ResultCell& cell);
    void add(const Totals& other);

    bool operator==(const Totals&) const = default;
};

/// Results of one model in one (region, year), all sales units included.
/// Throws if the model has positive sales but no variants for the year.
ResultCell compute_cell(const VehicleModel& model, const RegionYearContext& ctx,
                        const Constants& constants, std::int64_t sales_units,
                        GridBound grid_bound = GridBound::kDefault,
                        GasolineBound gasoline_bound = GasolineBound::kDefault);

/// One cell per sales entry of `ctx`, ascending model_id.
/// Throws on a sales key that matches no model.
std::vector<ResultCell> compute_context_cells(std::span<const VehicleModel> models,
                                              const RegionYearContext& ctx,
                                              const Constants& constants,
                                              GridBound grid_bound = GridBound::kDefault,
                                              GasolineBound gasoline_bound = GasolineBound::kDefault);

/// Cells for every context of the dataset, sorted ascending
/// (model_id, region code, year). Throws on duplicate (region, year)
/// contexts or unresolved sales keys.
std::vector<ResultCell> compute_all_cells(const Dataset& dataset,
                                          GridBound grid_bound = GridBound::kDefault,
                                          GasolineBound gasoline_bound = GasolineBound::kDefault);

struct RegionalEnergy {
    std::vector<ResultCell> cells;
    double total_tj = 0.0;
};

/// Per-model energy for one (region, year) plus the region total, which is
/// the sum of the returned cells in their stored order.
RegionalEnergy regional_energy(std::span<const VehicleModel> models, const RegionYearContext& ctx,
                               const Constants& constants);

/// CO2 from electricity for one (region, year), in ktCO2:
/// grid factor [kgCO2/kWh] times the fleet's kWh, summed ascending model_id.
double electricity_emissions(std::span<const VehicleModel> models, const RegionYearContext& ctx,
                             const Constants& constants, GridBound bound);

/// CO2 from gasoline combustion for one (region, year), in ktCO2:
/// gasoline factor [kgCO2/TJ] times the fleet's gasoline TJ, summed
/// ascending model_id.
double gasoline_emissions(std::span<const VehicleModel> models, const RegionYearContext& ctx,
                          const Constants& constants, GasolineBound bound);

/// Sum of the two emission carriers. Throws on negative input.
double total_emissions(double cee_ktco2, double ceg_ktco2);

/// Emissions per vehicle in kgCO2. Throws on vehicle_count <= 0.
double per_vehicle_carbon(double ce_ktco2, std::int64_t vehicle_count);

// Rollup views. Totals are accumulated through a fixed hierarchy so that
// every printed total is bit-identical to the sum of its printed parts:
// cells (ascending model) -> (region, year) -> region (ascending year)
// -> nationwide (ascending region code). Year totals sum the (region, year)
// level ascending region code; model totals sum cells ascending
// (region, year).
using RegionYearKey = std::pair<std::string, int>;

std::map<RegionYearKey, Totals> totals_by_region_year(std::span<const ResultCell> cells);
std::map<std::string, Totals> totals_by_region(const std::map<RegionYearKey, Totals>& region_year);
std::map<int, Totals> totals_by_year(const std::map<RegionYearKey, Totals>& region_year);
std::map<std::string, Totals> totals_by_model(std::span<const ResultCell> cells);
Totals national_totals(const std::map<std::string, Totals>& by_region);

/// Field-wise nationwide sum of regional cells, returned as a cell tagged
/// with region code "T" (model_id empty, year 0). Throws on duplicate
/// (model, region, year) keys or on cells already tagged "T".
ResultCell national_rollup(std::span<const ResultCell> cells);

/// The nationwide total is always the exact sum of regional cells; this
/// comparison mode additionally evaluates a caller-supplied "T" context
/// (national per-vehicle distance, grid factor and sales) the same way a
/// region is evaluated, so the two national figures can be compared.
struct NationalComparison {
    int year = 0;
    Totals rollup;      // sum of the dataset's regional cells for the year
    Totals independent; // computed from the supplied nationwide context
};

/// Throws unless national_ctx is tagged with region code "T".
NationalComparison compare_national(const Dataset& dataset,
                                    const RegionYearContext& national_ctx);

} // namespace fleetcarbon
