#include "fleetcarbon/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

namespace fleetcarbon {

namespace {

constexpr double kKgPerKiloton = 1.0e6;

const VehicleModel& find_model_or_throw(std::span<const VehicleModel> models,
                                        const std::string& model_id) {
    auto it = std::find_if(models.begin(), models.end(),
                           [&](const VehicleModel& m) { return m.model_id == model_id; });
    if (it == models.end()) {
        throw std::invalid_argument("sales references unknown model_id '" + model_id + "'");
    }
    return *it;
}

std::tuple<std::string, std::string, int> cell_key(const ResultCell& c) {
    return {c.model_id, c.region_code, c.year};
}

} // namespace

double grid_factor_value(const GridFactorPair& pair, GridBound bound) {
    return bound == GridBound::kUpper ? pair.upper : pair.default_value;
}

double gasoline_factor_value(const FactorTriple& triple, GasolineBound bound) {
    switch (bound) {
    case GasolineBound::kLower: return triple.lower;
    case GasolineBound::kUpper: return triple.upper;
    default: return triple.default_value;
    }
}

void Totals::add(const ResultCell& cell) {
    electricity_tj += cell.electricity_tj;
    gasoline_tj += cell.gasoline_tj;
    total_tj += cell.total_tj;
    cee_ktco2 += cell.cee_ktco2;
    ceg_ktco2 += cell.ceg_ktco2;
    ce_ktco2 += cell.ce_ktco2;
}

void Totals::add(const Totals& other) {
    electricity_tj += other.electricity_tj;
    gasoline_tj += other.gasoline_tj;
    total_tj += other.total_tj;
    cee_ktco2 += other.cee_ktco2;
    ceg_ktco2 += other.ceg_ktco2;
    ce_ktco2 += other.ce_ktco2;
}

ResultCell compute_cell(const VehicleModel& model, const RegionYearContext& ctx,
                        const Constants& constants, std::int64_t sales_units,
                        GridBound grid_bound, GasolineBound gasoline_bound) {
    if (sales_units < 0) {
        throw std::invalid_argument("sales must be >= 0 (model '" + model.model_id + "')");
    }
    ResultCell cell{.model_id = model.model_id,
                    .region_code = ctx.region.code,
                    .year = ctx.year};
    if (sales_units == 0) return cell;

    const auto variants = variants_for_year(model, ctx.year);
    if (variants.empty()) {
        throw std::invalid_argument("model '" + model.model_id + "' has no variants for year " +
                                    std::to_string(ctx.year));
    }
    const Intensity intensity = estimate_intensity(variants, constants.eta);
    const AvktSplit split = split_avkt(model, ctx.avkt_km);
    const EnergyPair per_vehicle = model_energy(intensity, split, constants);
    const auto sales = static_cast<double>(sales_units);

    cell.electricity_tj = per_vehicle.electricity_tj * sales;
    cell.gasoline_tj = per_vehicle.gasoline_tj * sales;
    cell.total_tj = cell.electricity_tj + cell.gasoline_tj;

    const double fleet_kwh = intensity.electricity_kwh_per_100km * split.electric_100km * sales;
    const double grid_factor = grid_factor_value(ctx.grid_factor_kgco2_per_kwh, grid_bound);
    const double gasoline_factor =
        gasoline_factor_value(constants.gasoline_factor_kgco2_per_tj, gasoline_bound);
    cell.cee_ktco2 = fleet_kwh * grid_factor / kKgPerKiloton;
    cell.ceg_ktco2 = cell.gasoline_tj * gasoline_factor / kKgPerKiloton;
    cell.ce_ktco2 = cell.cee_ktco2 + cell.ceg_ktco2;
    return cell;
}

std::vector<ResultCell> compute_context_cells(std::span<const VehicleModel> models,
                                              const RegionYearContext& ctx,
                                              const Constants& constants, GridBound grid_bound,
                                              GasolineBound gasoline_bound) {
    std::vector<ResultCell> cells;
    cells.reserve(ctx.sales.size());
    for (const auto& [model_id, units] : ctx.sales) {
        const VehicleModel& model = find_model_or_throw(models, model_id);
        cells.push_back(compute_cell(model, ctx, constants, units, grid_bound, gasoline_bound));
    }
    return cells;
}

std::vector<ResultCell> compute_all_cells(const Dataset& dataset, GridBound grid_bound,
                                          GasolineBound gasoline_bound) {
    std::set<RegionYearKey> seen;
    std::vector<ResultCell> cells;
    for (const auto& ctx : dataset.contexts) {
        if (!seen.insert({ctx.region.code, ctx.year}).second) {
            throw std::invalid_argument("duplicate context for region '" + ctx.region.code +
                                        "', year " + std::to_string(ctx.year));
        }
        auto ctx_cells =
            compute_context_cells(dataset.models, ctx, dataset.constants, grid_bound, gasoline_bound);
        cells.insert(cells.end(), ctx_cells.begin(), ctx_cells.end());
    }
    std::sort(cells.begin(), cells.end(),
              [](const ResultCell& a, const ResultCell& b) { return cell_key(a) < cell_key(b); });
    return cells;
}

RegionalEnergy regional_energy(std::span<const VehicleModel> models, const RegionYearContext& ctx,
                               const Constants& constants) {
    RegionalEnergy result;
    result.cells = compute_context_cells(models, ctx, constants);
    for (const auto& cell : result.cells) {
        result.total_tj += cell.total_tj;
    }
    return result;
}

double electricity_emissions(std::span<const VehicleModel> models, const RegionYearContext& ctx,
                             const Constants& constants, GridBound bound) {
    double cee = 0.0;
    for (const auto& cell :
         compute_context_cells(models, ctx, constants, bound, GasolineBound::kDefault)) {
        cee += cell.cee_ktco2;
    }
    return cee;
}

double gasoline_emissions(std::span<const VehicleModel> models, const RegionYearContext& ctx,
                          const Constants& constants, GasolineBound bound) {
    double ceg = 0.0;
    for (const auto& cell :
         compute_context_cells(models, ctx, constants, GridBound::kDefault, bound)) {
        ceg += cell.ceg_ktco2;
    }
    return ceg;
}

double total_emissions(double cee_ktco2, double ceg_ktco2) {
    if (cee_ktco2 < 0.0 || ceg_ktco2 < 0.0) {
        throw std::invalid_argument("emission totals must be >= 0");
    }
    return cee_ktco2 + ceg_ktco2;
}

double per_vehicle_carbon(double ce_ktco2, std::int64_t vehicle_count) {
    if (vehicle_count <= 0) {
        throw std::invalid_argument("vehicle_count must be > 0");
    }
    return ce_ktco2 * kKgPerKiloton / static_cast<double>(vehicle_count);
}

std::map<RegionYearKey, Totals> totals_by_region_year(std::span<const ResultCell> cells) {
    std::vector<const ResultCell*> ordered;
    ordered.reserve(cells.size());
    for (const auto& cell : cells) ordered.push_back(&cell);
    std::sort(ordered.begin(), ordered.end(), [](const ResultCell* a, const ResultCell* b) {
        return std::tie(a->region_code, a->year, a->model_id) <
               std::tie(b->region_code, b->year, b->model_id);
    });
    std::map<RegionYearKey, Totals> totals;
    for (const ResultCell* cell : ordered) {
        totals[{cell->region_code, cell->year}].add(*cell);
    }
    return totals;
}

std::map<std::string, Totals> totals_by_region(const std::map<RegionYearKey, Totals>& region_year) {
    std::map<std::string, Totals> totals;
    for (const auto& [key, value] : region_year) {
        totals[key.first].add(value);
    }
    return totals;
}

std::map<int, Totals> totals_by_year(const std::map<RegionYearKey, Totals>& region_year) {
    std::map<int, Totals> totals;
    for (const auto& [key, value] : region_year) {
        totals[key.second].add(value);
    }
    return totals;
}

std::map<std::string, Totals> totals_by_model(std::span<const ResultCell> cells) {
    std::vector<const ResultCell*> ordered;
    ordered.reserve(cells.size());
    for (const auto& cell : cells) ordered.push_back(&cell);
    std::sort(ordered.begin(), ordered.end(), [](const ResultCell* a, const ResultCell* b) {
        return std::tie(a->model_id, a->region_code, a->year) <
               std::tie(b->model_id, b->region_code, b->year);
    });
    std::map<std::string, Totals> totals;
    for (const ResultCell* cell : ordered) {
        totals[cell->model_id].add(*cell);
    }
    return totals;
}

Totals national_totals(const std::map<std::string, Totals>& by_region) {
    Totals national;
    for (const auto& [code, totals] : by_region) {
        national.add(totals);
    }
    return national;
}

ResultCell national_rollup(std::span<const ResultCell> cells) {
    std::set<std::tuple<std::string, std::string, int>> keys;
    for (const auto& cell : cells) {
        if (cell.region_code == kNationwideRegionCode) {
            throw std::invalid_argument("rollup input already tagged with region 'T'");
        }
        if (!keys.insert(cell_key(cell)).second) {
            throw std::invalid_argument("duplicate rollup key (model '" + cell.model_id +
                                        "', region '" + cell.region_code + "', year " +
                                        std::to_string(cell.year) + ")");
        }
    }
    const Totals national = national_totals(totals_by_region(totals_by_region_year(cells)));
    return ResultCell{.model_id = "",
                      .region_code = kNationwideRegionCode,
                      .year = 0,
                      .electricity_tj = national.electricity_tj,
                      .gasoline_tj = national.gasoline_tj,
                      .total_tj = national.total_tj,
                      .cee_ktco2 = national.cee_ktco2,
                      .ceg_ktco2 = national.ceg_ktco2,
                      .ce_ktco2 = national.ce_ktco2};
}

NationalComparison compare_national(const Dataset& dataset,
                                    const RegionYearContext& national_ctx) {
    if (national_ctx.region.code != kNationwideRegionCode) {
        throw std::invalid_argument("comparison context must use region code 'T'");
    }
    NationalComparison result;
    result.year = national_ctx.year;

    std::vector<ResultCell> year_cells;
    for (const auto& cell : compute_all_cells(dataset)) {
        if (cell.year == national_ctx.year) year_cells.push_back(cell);
    }
    result.rollup = national_totals(totals_by_region(totals_by_region_year(year_cells)));

    for (const auto& cell :
         compute_context_cells(dataset.models, national_ctx, dataset.constants)) {
        result.independent.add(cell);
    }
    return result;
}

} // namespace fleetcarbon
