#pragma once

#include <span>
#include <vector>

#include "fleetcarbon/types.hpp"

namespace fleetcarbon {

/// Tolerance on |mu_electric + mu_gasoline - 1| before a model is rejected.
inline constexpr double kSplitTolerance = 1e-6;

/// Popularity weights further than this from summing to 1 are normalized
/// with a warning at ingestion; estimators always normalize internally.
inline constexpr double kWeightSumWarnTolerance = 1e-6;

struct EnergyPair {
    double electricity_tj = 0.0;
    double gasoline_tj = 0.0;

    double total_tj() const { return electricity_tj + gasoline_tj; }

    bool operator==(const EnergyPair&) const = default;
};

/// Sales-weighted mean of per-variant electricity use, in kWh/100 km.
/// Each variant contributes battery_energy_kwh over its real-world
/// all-electric range (eta * nedc_aer_km). Weights are normalized to sum
/// to 1, so any positive scaling of the weight vector gives the same value.
///
/// Throws std::invalid_argument on an empty variant list, eta outside
/// (0, 1], nonpositive battery energy or range, negative weights, or an
/// all-zero weight vector.
double estimate_electricity_intensity(std::span<const VehicleVariant> variants, double eta);

/// Sales-weighted mean of per-variant real-world gasoline use, in L/100 km.
/// Same weight handling and error conditions as the electricity estimator;
/// gasoline intensities must be >= 0.
double estimate_gasoline_intensity(std::span<const VehicleVariant> variants);

/// Both intensities for one variant set.
Intensity estimate_intensity(std::span<const VehicleVariant> variants, double eta);

/// Splits an annual per-vehicle distance (km) into electric and gasoline
/// portions, returned in hundreds of km. The model's mu pair must sum to 1
/// within kSplitTolerance; the split is computed from the normalized pair
/// so the two portions always sum to avkt_km / 100.
AvktSplit split_avkt(const VehicleModel& model, double avkt_km);

/// Annual per-vehicle energy use by carrier, in TJ:
///   electricity = EI * AVKTE * zeta_e
///   gasoline    = GI * AVKTG * rho * zeta_g
EnergyPair model_energy(const Intensity& intensity, const AvktSplit& split,
                        const Constants& constants);

/// Variants of `model` on sale in `year`, in catalog order.
std::vector<VehicleVariant> variants_for_year(const VehicleModel& model, int year);

} // namespace fleetcarbon
