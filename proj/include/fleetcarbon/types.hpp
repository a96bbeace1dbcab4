#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fleetcarbon {

/// One configuration of a vehicle model as sold in a given year.
struct VehicleVariant {
    std::string variant_id;
    int year = 0;
    double battery_energy_kwh = 0.0;
    double nedc_aer_km = 0.0;
    double gasoline_intensity_l_per_100km = 0.0;
    double popularity_weight = 0.0;

    bool operator==(const VehicleVariant&) const = default;
};

/// A vehicle model with its variant list and the fractions of annual
/// distance driven on electricity (mu_electric) vs. gasoline (mu_gasoline).
struct VehicleModel {
    std::string model_id;
    std::string name;
    std::vector<VehicleVariant> variants;
    double mu_electric = 0.0;
    double mu_gasoline = 0.0;

    bool operator==(const VehicleModel&) const = default;
};

/// {lower, default, upper} factor bounds, ordered lower <= default <= upper.
struct FactorTriple {
    double lower = 0.0;
    double default_value = 0.0;
    double upper = 0.0;

    bool operator==(const FactorTriple&) const = default;
};

/// Grid emission factor pair; no lower bound is modeled for electricity.
struct GridFactorPair {
    double default_value = 0.0;
    double upper = 0.0;

    bool operator==(const GridFactorPair&) const = default;
};

/// Global model parameters. eta, rho_kg_per_l and zeta_e_tj_per_kwh carry
/// usable defaults; zeta_g_tj_per_kg and the gasoline factor triple have no
/// defaults and must be supplied by the constants file.
struct Constants {
    double eta = 0.75;
    double rho_kg_per_l = 0.74;
    double zeta_e_tj_per_kwh = 3.6e-6;
    double zeta_g_tj_per_kg = 0.0;
    FactorTriple gasoline_factor_kgco2_per_tj;

    bool operator==(const Constants&) const = default;
};

/// Per-model energy intensities under real-world conditions.
struct Intensity {
    double electricity_kwh_per_100km = 0.0;
    double gasoline_l_per_100km = 0.0;

    bool operator==(const Intensity&) const = default;
};

/// Annual distance split by carrier, in hundreds of km.
struct AvktSplit {
    double electric_100km = 0.0;
    double gasoline_100km = 0.0;

    bool operator==(const AvktSplit&) const = default;
};

/// Code "T" is reserved for the nationwide rollup and may not be declared
/// as an input region.
struct Region {
    std::string code;
    std::string name;

    bool operator==(const Region&) const = default;
};

inline constexpr const char* kNationwideRegionCode = "T";

/// One (region, year) slice of the input data: per-vehicle annual distance,
/// the regional grid emission factor pair, and per-model sales.
struct RegionYearContext {
    Region region;
    int year = 0;
    double avkt_km = 0.0;
    GridFactorPair grid_factor_kgco2_per_kwh;
    std::map<std::string, std::int64_t> sales;

    bool operator==(const RegionYearContext&) const = default;
};

/// Results for one (model, region, year). total_tj and ce_ktco2 are stored
/// as the sum of their two carrier fields.
struct ResultCell {
    std::string model_id;
    std::string region_code;
    int year = 0;
    double electricity_tj = 0.0;
    double gasoline_tj = 0.0;
    double total_tj = 0.0;
    double cee_ktco2 = 0.0;
    double ceg_ktco2 = 0.0;
    double ce_ktco2 = 0.0;

    bool operator==(const ResultCell&) const = default;
};

struct DatasetMetadata {
    std::string version;
    std::string notes;

    bool operator==(const DatasetMetadata&) const = default;
};

/// A fully validated input set. Models are sorted by model_id and contexts
/// by (region code, year); all cross-references resolve.
struct Dataset {
    std::vector<VehicleModel> models;
    std::vector<RegionYearContext> contexts;
    Constants constants;
    DatasetMetadata metadata;

    bool operator==(const Dataset&) const = default;

    const VehicleModel* find_model(const std::string& model_id) const;
};

} // namespace fleetcarbon
