#include <doctest.h>

#include <random>
#include <stdexcept>

#include "fleetcarbon/core_model.hpp"
#include "support/oracle.hpp"

using namespace fleetcarbon;
using testsupport::close_rel;

namespace {

VehicleVariant variant(double be, double naer, double gi = 5.0, double weight = 1.0,
                       int year = 2022) {
    return VehicleVariant{"v", year, be, naer, gi, weight};
}

} // namespace

TEST_CASE("electricity intensity: single-variant anchors") {
    // BE 40 kWh over a 108.7 km real-world range (NEDC range scaled by 0.75).
    const std::vector<VehicleVariant> fleet = {variant(40.0, 108.7 / 0.75)};
    const double ei = estimate_electricity_intensity(fleet, 0.75);
    CHECK(std::abs(ei - 36.8) <= 0.1);

    const std::vector<VehicleVariant> simple = {variant(10.0, 100.0)};
    CHECK(estimate_electricity_intensity(simple, 1.0) == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("electricity intensity: weighted means") {
    // Two identical variants split 0.3/0.7 behave like one variant.
    std::vector<VehicleVariant> duo = {variant(24.0, 130.0, 5.0, 0.3),
                                       variant(24.0, 130.0, 5.0, 0.7)};
    const std::vector<VehicleVariant> solo = {variant(24.0, 130.0)};
    CHECK(close_rel(estimate_electricity_intensity(duo, 0.75),
                    estimate_electricity_intensity(solo, 0.75), 1e-9));

    // Three variants against a hand-summed oracle over the three terms.
    const std::vector<VehicleVariant> trio = {variant(18.0, 95.0, 6.0, 2.0),
                                              variant(30.0, 160.0, 5.0, 1.0),
                                              variant(12.0, 70.0, 7.5, 3.0)};
    const double eta = 0.8;
    const double wsum = 2.0 + 1.0 + 3.0;
    const double expected = (2.0 / wsum) * 18.0 / (eta * 95.0) * 100.0 +
                            (1.0 / wsum) * 30.0 / (eta * 160.0) * 100.0 +
                            (3.0 / wsum) * 12.0 / (eta * 70.0) * 100.0;
    CHECK(close_rel(estimate_electricity_intensity(trio, eta), expected, 1e-9));
}

TEST_CASE("electricity intensity: validation errors name the offending field") {
    std::vector<VehicleVariant> fleet = {variant(40.0, 120.0)};
    CHECK_THROWS_AS(estimate_electricity_intensity({}, 0.75), std::invalid_argument);
    CHECK_THROWS_AS(estimate_electricity_intensity(fleet, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(estimate_electricity_intensity(fleet, 1.2), std::invalid_argument);
    CHECK_THROWS_AS(estimate_electricity_intensity(fleet, -0.5), std::invalid_argument);

    std::vector<VehicleVariant> bad_be = {variant(0.0, 120.0)};
    CHECK_THROWS_WITH_AS(estimate_electricity_intensity(bad_be, 0.75),
                         doctest::Contains("battery_energy_kwh"), std::invalid_argument);
    std::vector<VehicleVariant> bad_naer = {variant(40.0, 0.0)};
    CHECK_THROWS_WITH_AS(estimate_electricity_intensity(bad_naer, 0.75),
                         doctest::Contains("nedc_aer_km"), std::invalid_argument);
    std::vector<VehicleVariant> zero_weights = {variant(40.0, 120.0, 5.0, 0.0),
                                                variant(30.0, 100.0, 5.0, 0.0)};
    CHECK_THROWS_WITH_AS(estimate_electricity_intensity(zero_weights, 0.75),
                         doctest::Contains("popularity_weight"), std::invalid_argument);
    std::vector<VehicleVariant> negative_weight = {variant(40.0, 120.0, 5.0, -1.0)};
    CHECK_THROWS_AS(estimate_electricity_intensity(negative_weight, 0.75), std::invalid_argument);
}

TEST_CASE("gasoline intensity: anchors and errors") {
    const std::vector<VehicleVariant> one = {variant(20.0, 100.0, 4.7)};
    CHECK(close_rel(estimate_gasoline_intensity(one), 4.7, 1e-9));

    const std::vector<VehicleVariant> even = {variant(20.0, 100.0, 4.0, 0.5),
                                              variant(20.0, 100.0, 6.0, 0.5)};
    CHECK(close_rel(estimate_gasoline_intensity(even), 5.0, 1e-9));

    // Skewed mix of the most and least fuel-hungry configurations.
    const std::vector<VehicleVariant> skewed = {variant(20.0, 100.0, 4.7, 0.9),
                                                variant(20.0, 100.0, 23.5, 0.1)};
    CHECK(close_rel(estimate_gasoline_intensity(skewed), 6.58, 1e-9));

    CHECK_THROWS_AS(estimate_gasoline_intensity({}), std::invalid_argument);
    std::vector<VehicleVariant> negative_gi = {variant(20.0, 100.0, -1.0)};
    CHECK_THROWS_WITH_AS(estimate_gasoline_intensity(negative_gi),
                         doctest::Contains("gasoline_l_per_100km"), std::invalid_argument);
}

TEST_CASE("weight scaling invariance") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int round = 0; round < 1000; ++round) {
        auto variants = testsupport::random_variants(rng, 2022, 1 + round % 4);
        const double c = scale(rng);
        auto scaled = variants;
        for (auto& v : scaled) v.popularity_weight *= c;
        CHECK(close_rel(estimate_electricity_intensity(variants, 0.75),
                        estimate_electricity_intensity(scaled, 0.75), 1e-9));
        CHECK(close_rel(estimate_gasoline_intensity(variants),
                        estimate_gasoline_intensity(scaled), 1e-9));
    }
}

TEST_CASE("eta scaling law") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> eta_dist(0.5, 1.0);
    for (int round = 0; round < 500; ++round) {
        auto variants = testsupport::random_variants(rng, 2022, 1 + round % 4);
        const double eta0 = eta_dist(rng);
        const double eta1 = eta_dist(rng);
        const double ratio = estimate_electricity_intensity(variants, eta1) /
                             estimate_electricity_intensity(variants, eta0);
        CHECK(close_rel(ratio, eta0 / eta1, 1e-12));
    }
}

TEST_CASE("single-variant closed forms") {
    std::mt19937_64 rng(13);
    for (int round = 0; round < 200; ++round) {
        auto variants = testsupport::random_variants(rng, 2022, 1);
        const auto& v = variants.front();
        const double eta = 0.6 + 0.001 * (round % 400);
        CHECK(close_rel(estimate_electricity_intensity(variants, eta),
                        v.battery_energy_kwh / (eta * v.nedc_aer_km) * 100.0, 1e-12));
        CHECK(close_rel(estimate_gasoline_intensity(variants),
                        v.gasoline_intensity_l_per_100km, 1e-12));
    }
}

TEST_CASE("avkt split: anchors") {
    VehicleModel model{"m", "M", {variant(20, 100)}, 0.5, 0.5};
    auto split = split_avkt(model, 12915.0);
    CHECK(close_rel(split.electric_100km, 64.575, 1e-9));
    CHECK(close_rel(split.gasoline_100km, 64.575, 1e-9));

    model.mu_electric = 1.0;
    model.mu_gasoline = 0.0;
    split = split_avkt(model, 10000.0);
    CHECK(split.electric_100km == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(split.gasoline_100km == 0.0);

    model.mu_electric = 0.38;
    model.mu_gasoline = 0.62;
    split = split_avkt(model, 11000.0);
    CHECK(close_rel(split.electric_100km, 41.8, 1e-9));
    CHECK(close_rel(split.gasoline_100km, 68.2, 1e-9));
}

TEST_CASE("avkt split: errors and conservation") {
    VehicleModel model{"m", "M", {variant(20, 100)}, 0.5, 0.5};
    CHECK_THROWS_AS(split_avkt(model, -1.0), std::invalid_argument);
    model.mu_gasoline = 0.7; // sums to 1.2
    CHECK_THROWS_AS(split_avkt(model, 1000.0), std::invalid_argument);

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> mu(0.0, 1.0);
    std::uniform_real_distribution<double> avkt(0.0, 20000.0);
    std::uniform_real_distribution<double> wobble(-9e-7, 9e-7);
    for (int round = 0; round < 1000; ++round) {
        model.mu_electric = mu(rng);
        // A mu pair that only sums to 1 within the tolerance still conserves.
        model.mu_gasoline = 1.0 - model.mu_electric + wobble(rng);
        const double distance = avkt(rng);
        const auto s = split_avkt(model, distance);
        CHECK(close_rel(s.electric_100km + s.gasoline_100km, distance / 100.0, 1e-9));
    }
}

TEST_CASE("model energy: hand arithmetic") {
    Constants constants;
    constants.zeta_e_tj_per_kwh = 3.6e-6;
    constants.rho_kg_per_l = 0.74;
    constants.zeta_g_tj_per_kg = 4.43e-5;

    const auto pair = model_energy(Intensity{20.0, 5.0}, AvktSplit{100.0, 100.0}, constants);
    CHECK(close_rel(pair.electricity_tj, 0.0072, 1e-9));        // 20 * 100 * 3.6e-6
    CHECK(close_rel(pair.gasoline_tj, 0.016391, 1e-9));          // 5 * 100 * 0.74 * 4.43e-5

    const auto zero = model_energy(Intensity{20.0, 5.0}, AvktSplit{0.0, 0.0}, constants);
    CHECK(zero.electricity_tj == 0.0);
    CHECK(zero.gasoline_tj == 0.0);
}

TEST_CASE("model energy: homogeneity in each argument") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> value(0.1, 50.0);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    Constants constants;
    constants.zeta_g_tj_per_kg = 4.43e-5;
    for (int round = 0; round < 1000; ++round) {
        const Intensity intensity{value(rng), value(rng)};
        const AvktSplit split{value(rng), value(rng)};
        const double c = scale(rng);
        const auto base = model_energy(intensity, split, constants);

        const auto scaled_ei =
            model_energy(Intensity{c * intensity.electricity_kwh_per_100km,
                                   intensity.gasoline_l_per_100km},
                         split, constants);
        CHECK(close_rel(scaled_ei.electricity_tj, c * base.electricity_tj, 1e-9));
        CHECK(scaled_ei.gasoline_tj == base.gasoline_tj);

        const auto scaled_avktg =
            model_energy(intensity, AvktSplit{split.electric_100km, c * split.gasoline_100km},
                         constants);
        CHECK(close_rel(scaled_avktg.gasoline_tj, c * base.gasoline_tj, 1e-9));
        CHECK(scaled_avktg.electricity_tj == base.electricity_tj);
    }
}

TEST_CASE("variants_for_year filters by catalog year") {
    VehicleModel model{"m", "M",
                       {variant(20, 100, 5, 1, 2020), variant(22, 110, 5, 1, 2021),
                        variant(24, 120, 5, 1, 2021)},
                       0.5, 0.5};
    CHECK(variants_for_year(model, 2020).size() == 1);
    CHECK(variants_for_year(model, 2021).size() == 2);
    CHECK(variants_for_year(model, 2022).empty());
}
