#include "fleetcarbon/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fleetcarbon {

namespace {

double weight_sum(std::span<const VehicleVariant> variants) {
    double sum = 0.0;
    for (const auto& v : variants) {
        if (v.popularity_weight < 0.0 || !std::isfinite(v.popularity_weight)) {
            throw std::invalid_argument("popularity_weight must be finite and >= 0 (variant '" +
                                        v.variant_id + "')");
        }
        sum += v.popularity_weight;
    }
    if (sum <= 0.0) {
        throw std::invalid_argument("popularity_weight: all weights are zero, cannot normalize");
    }
    return sum;
}

} // namespace

const VehicleModel* Dataset::find_model(const std::string& model_id) const {
    auto it = std::lower_bound(models.begin(), models.end(), model_id,
                               [](const VehicleModel& m, const std::string& id) {
                                   return m.model_id < id;
                               });
    if (it != models.end() && it->model_id == model_id) return &*it;
    return nullptr;
}

double estimate_electricity_intensity(std::span<const VehicleVariant> variants, double eta) {
    if (variants.empty()) {
        throw std::invalid_argument("variants: list is empty");
    }
    if (!(eta > 0.0) || eta > 1.0 || !std::isfinite(eta)) {
        throw std::invalid_argument("eta: must be in (0, 1], got " + std::to_string(eta));
    }
    const double total_weight = weight_sum(variants);
    double intensity = 0.0;
    for (const auto& v : variants) {
        if (!(v.battery_energy_kwh > 0.0)) {
            throw std::invalid_argument("battery_energy_kwh: must be > 0 (variant '" +
                                        v.variant_id + "')");
        }
        if (!(v.nedc_aer_km > 0.0)) {
            throw std::invalid_argument("nedc_aer_km: must be > 0 (variant '" + v.variant_id +
                                        "')");
        }
        const double weight = v.popularity_weight / total_weight;
        intensity += weight * (100.0 * v.battery_energy_kwh) / (eta * v.nedc_aer_km);
    }
    return intensity;
}

double estimate_gasoline_intensity(std::span<const VehicleVariant> variants) {
    if (variants.empty()) {
        throw std::invalid_argument("variants: list is empty");
    }
    const double total_weight = weight_sum(variants);
    double intensity = 0.0;
    for (const auto& v : variants) {
        if (v.gasoline_intensity_l_per_100km < 0.0 ||
            !std::isfinite(v.gasoline_intensity_l_per_100km)) {
            throw std::invalid_argument("gasoline_l_per_100km: must be finite and >= 0 (variant '" +
                                        v.variant_id + "')");
        }
        intensity += (v.popularity_weight / total_weight) * v.gasoline_intensity_l_per_100km;
    }
    return intensity;
}

Intensity estimate_intensity(std::span<const VehicleVariant> variants, double eta) {
    return Intensity{
        .electricity_kwh_per_100km = estimate_electricity_intensity(variants, eta),
        .gasoline_l_per_100km = estimate_gasoline_intensity(variants),
    };
}

AvktSplit split_avkt(const VehicleModel& model, double avkt_km) {
    if (avkt_km < 0.0 || !std::isfinite(avkt_km)) {
        throw std::invalid_argument("avkt_km: must be finite and >= 0");
    }
    const double mu_sum = model.mu_electric + model.mu_gasoline;
    if (model.mu_electric < 0.0 || model.mu_gasoline < 0.0 ||
        std::abs(mu_sum - 1.0) > kSplitTolerance) {
        throw std::invalid_argument("mu_electric/mu_gasoline: must be >= 0 and sum to 1 (model '" +
                                    model.model_id + "')");
    }
    const double avkt_100km = avkt_km / 100.0;
    return AvktSplit{
        .electric_100km = (model.mu_electric / mu_sum) * avkt_100km,
        .gasoline_100km = (model.mu_gasoline / mu_sum) * avkt_100km,
    };
}

EnergyPair model_energy(const Intensity& intensity, const AvktSplit& split,
                        const Constants& constants) {
    return EnergyPair{
        .electricity_tj = intensity.electricity_kwh_per_100km * split.electric_100km *
                          constants.zeta_e_tj_per_kwh,
        .gasoline_tj = intensity.gasoline_l_per_100km * split.gasoline_100km *
                       constants.rho_kg_per_l * constants.zeta_g_tj_per_kg,
    };
}

std::vector<VehicleVariant> variants_for_year(const VehicleModel& model, int year) {
    std::vector<VehicleVariant> out;
    for (const auto& v : model.variants) {
        if (v.year == year) out.push_back(v);
    }
    return out;
}

} // namespace fleetcarbon
