#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "fleetcarbon/uncertainty.hpp"
#include "support/oracle.hpp"

using namespace fleetcarbon;
using testsupport::close_rel;

namespace {

Dataset empty_fleet() {
    Dataset ds;
    ds.constants.zeta_g_tj_per_kg = 4.43e-5;
    ds.constants.gasoline_factor_kgco2_per_tj = {67500.0, 69300.0, 73000.0};
    ds.models = {VehicleModel{"a", "A", {VehicleVariant{"v", 2022, 20, 100, 5, 1.0}}, 0.5, 0.5}};
    ds.contexts = {RegionYearContext{Region{"S", "S"}, 2022, 12000.0, GridFactorPair{0.6, 0.9},
                                     {{"a", 0}}}};
    return ds;
}

double national_ce(const Dataset& ds, GridBound grid, GasolineBound gasoline) {
    const auto cells = compute_all_cells(ds, grid, gasoline);
    return national_totals(totals_by_region(totals_by_region_year(cells))).ce_ktco2;
}

} // namespace

TEST_CASE("standard scenarios carry monotone factor choices") {
    const auto scenarios = standard_scenarios();
    REQUIRE(scenarios.size() == 3);
    CHECK(scenarios[0].label == "lower");
    CHECK(scenarios[1].label == "default");
    CHECK(scenarios[2].label == "upper");
    CHECK(scenarios[0].grid_factor_choice == GridBound::kDefault);
    CHECK(scenarios[1].grid_factor_choice == GridBound::kDefault);
    CHECK(scenarios[2].grid_factor_choice == GridBound::kUpper);
    CHECK(scenarios[0].gasoline_factor_choice == GasolineBound::kLower);
    CHECK(scenarios[2].gasoline_factor_choice == GasolineBound::kUpper);
    CHECK(scenario_for_label("lower").gasoline_factor_choice == GasolineBound::kLower);
    CHECK_THROWS_AS(scenario_for_label("mid"), std::invalid_argument);
}

TEST_CASE("emission bounds: empty fleet collapses to zero everywhere") {
    const auto result = emission_bounds(empty_fleet());
    REQUIRE(result.size() == 3);
    for (const auto& scenario : result) {
        for (const auto& row : scenario.region_year) {
            CHECK(row.cee_ktco2 == 0.0);
            CHECK(row.ceg_ktco2 == 0.0);
            CHECK(row.ce_ktco2 == 0.0);
        }
        CHECK(scenario.national_total.ce_ktco2 == 0.0);
    }
}

TEST_CASE("emission bounds: unset gasoline factors are rejected") {
    Dataset ds = empty_fleet();
    ds.constants.gasoline_factor_kgco2_per_tj = {};
    CHECK_THROWS_AS(emission_bounds(ds), std::invalid_argument);
}

TEST_CASE("emission bounds: ordering and envelope widening") {
    std::mt19937_64 rng(83);
    for (int round = 0; round < 100; ++round) {
        auto ds = testsupport::random_dataset(rng);
        const auto scenarios = emission_bounds(ds);
        REQUIRE(scenarios.size() == 3);
        for (size_t i = 0; i < scenarios[0].region_year.size(); ++i) {
            const auto& lo = scenarios[0].region_year[i];
            const auto& mid = scenarios[1].region_year[i];
            const auto& hi = scenarios[2].region_year[i];
            CHECK(lo.ceg_ktco2 <= mid.ceg_ktco2);
            CHECK(mid.ceg_ktco2 <= hi.ceg_ktco2);
            CHECK(mid.cee_ktco2 <= hi.cee_ktco2);
            CHECK(lo.cee_ktco2 == mid.cee_ktco2); // electricity has no lower factor
            CHECK(lo.ce_ktco2 <= mid.ce_ktco2);
            CHECK(mid.ce_ktco2 <= hi.ce_ktco2);
        }

        // Widening the gasoline spread widens the CEG envelope.
        auto widened = ds;
        auto& triple = widened.constants.gasoline_factor_kgco2_per_tj;
        triple.lower *= 0.9;
        triple.upper *= 1.1;
        const auto wide = emission_bounds(widened);
        for (size_t i = 0; i < scenarios[0].region_year.size(); ++i) {
            const double narrow_span = scenarios[2].region_year[i].ceg_ktco2 -
                                       scenarios[0].region_year[i].ceg_ktco2;
            const double wide_span =
                wide[2].region_year[i].ceg_ktco2 - wide[0].region_year[i].ceg_ktco2;
            CHECK(wide_span >= narrow_span);
        }
    }
}

TEST_CASE("emission bounds: scenario ratios mirror the supplied factor ratios") {
    // One region, one model, all-electric usage: the upper/default CEE ratio
    // must equal the grid factor ratio. Factors chosen to give the familiar
    // shape of an official operating-margin uplift (663/445) and a +/- band
    // around the gasoline default.
    Dataset ds;
    ds.constants.zeta_g_tj_per_kg = 4.43e-5;
    ds.constants.gasoline_factor_kgco2_per_tj = {69300.0 * (1.0 - 11.0 / 100.0), 69300.0,
                                                 69300.0 * (1.0 + 24.0 / 100.0)};
    ds.models = {VehicleModel{"a", "A", {VehicleVariant{"v", 2022, 24, 120, 6, 1.0}}, 0.5, 0.5}};
    ds.contexts = {RegionYearContext{Region{"N", "N"}, 2022, 11000.0,
                                     GridFactorPair{0.445, 0.663}, {{"a", 100000}}}};

    const auto scenarios = emission_bounds(ds);
    const auto& lo = scenarios[0].region_year.at(0);
    const auto& mid = scenarios[1].region_year.at(0);
    const auto& hi = scenarios[2].region_year.at(0);
    CHECK(close_rel(hi.cee_ktco2 / mid.cee_ktco2, 0.663 / 0.445, 1e-9));
    CHECK(close_rel(hi.ceg_ktco2 / mid.ceg_ktco2, 1.24, 1e-9));
    CHECK(close_rel(lo.ceg_ktco2 / mid.ceg_ktco2, 0.89, 1e-9));
    CHECK(hi.cee_ktco2 > mid.cee_ktco2);
}

TEST_CASE("CEG is exactly linear in the gasoline factor under doubling") {
    std::mt19937_64 rng(89);
    for (int round = 0; round < 100; ++round) {
        auto ds = testsupport::random_dataset(rng);
        const auto base = compute_all_cells(ds);
        auto doubled_ds = ds;
        auto& triple = doubled_ds.constants.gasoline_factor_kgco2_per_tj;
        triple = {triple.lower * 2.0, triple.default_value * 2.0, triple.upper * 2.0};
        const auto doubled = compute_all_cells(doubled_ds);
        REQUIRE(base.size() == doubled.size());
        for (size_t i = 0; i < base.size(); ++i) {
            CHECK(doubled[i].ceg_ktco2 == 2.0 * base[i].ceg_ktco2);
        }
    }
}

TEST_CASE("CEE(eta) * eta is constant across an eta sweep") {
    std::mt19937_64 rng(97);
    for (int round = 0; round < 50; ++round) {
        const auto ds = testsupport::random_dataset(rng);
        double reference = -1.0;
        for (double eta : {0.6, 0.7, 0.75, 0.8, 0.9}) {
            auto adjusted = apply_sweep_parameter(ds, "eta", eta);
            const auto cells = compute_all_cells(adjusted);
            const auto national = national_totals(totals_by_region(totals_by_region_year(cells)));
            const double product = national.cee_ktco2 * eta;
            if (reference < 0.0) {
                reference = product;
            } else {
                CHECK(close_rel(product, reference, 1e-12));
            }
        }
    }
}

TEST_CASE("eta sweep: exact carrier ratio and share-weighted total change") {
    std::mt19937_64 rng(101);
    for (int round = 0; round < 50; ++round) {
        auto ds = testsupport::random_dataset(rng);
        ds.constants.eta = 0.75;

        const auto at = [&](double eta, GridBound g, GasolineBound gb) {
            return national_totals(totals_by_region(
                totals_by_region_year(compute_all_cells(apply_sweep_parameter(ds, "eta", eta), g, gb))));
        };
        const auto base = at(0.75, GridBound::kDefault, GasolineBound::kDefault);
        const auto high = at(0.80, GridBound::kDefault, GasolineBound::kDefault);
        if (base.cee_ktco2 == 0.0) continue;
        CHECK(close_rel(high.cee_ktco2 / base.cee_ktco2, 0.9375, 1e-12));

        const double pct = (high.ce_ktco2 - base.ce_ktco2) / base.ce_ktco2 * 100.0;
        const double share = base.cee_ktco2 / base.ce_ktco2;
        CHECK(close_rel(pct, -6.25 * share, 1e-9));
    }
}

TEST_CASE("sweep: row order, baseline identity, determinism") {
    std::mt19937_64 rng(103);
    auto ds = testsupport::random_dataset(rng);
    ds.constants.eta = 0.75;

    const SweepSpec spec{"eta", {0.70, 0.75, 0.80}, 0.75};
    const auto rows = sweep(spec, ds);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].value == 0.70);
    CHECK(rows[1].value == 0.75);
    CHECK(rows[2].value == 0.80);
    CHECK(rows[1].pct_change_vs_baseline == 0.0);
    CHECK(rows[0].pct_change_vs_baseline >= 0.0); // lower eta, higher intensity
    CHECK(rows[2].pct_change_vs_baseline <= 0.0);

    const auto rows_again = sweep(spec, ds);
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].national_ce_ktco2 == rows_again[i].national_ce_ktco2);
        CHECK(rows[i].kg_co2_per_vehicle == rows_again[i].kg_co2_per_vehicle);
        CHECK(rows[i].pct_change_vs_baseline == rows_again[i].pct_change_vs_baseline);
        REQUIRE(rows[i].ce_by_region.size() == rows_again[i].ce_by_region.size());
        for (size_t r = 0; r < rows[i].ce_by_region.size(); ++r) {
            CHECK(rows[i].ce_by_region[r].second == rows_again[i].ce_by_region[r].second);
        }
    }

    const auto single = sweep(SweepSpec{"eta", {0.75}, 0.75}, ds);
    REQUIRE(single.size() == 1);
    CHECK(single[0].pct_change_vs_baseline == 0.0);
}

TEST_CASE("sweep: every parameter runs and domains are enforced") {
    std::mt19937_64 rng(107);
    auto ds = testsupport::random_dataset(rng);

    CHECK_THROWS_AS(sweep(SweepSpec{"eta", {1.5}, 0.75}, ds), std::invalid_argument);
    CHECK_THROWS_AS(sweep(SweepSpec{"eta", {}, 0.75}, ds), std::invalid_argument);
    CHECK_THROWS_AS(sweep(SweepSpec{"eta", {0.5}, -0.2}, ds), std::invalid_argument);
    CHECK_THROWS_AS(sweep(SweepSpec{"mu_electric", {1.4}, 0.5}, ds), std::invalid_argument);
    CHECK_THROWS_AS(sweep(SweepSpec{"grid_factor", {0.0}, 0.5}, ds), std::invalid_argument);
    CHECK_THROWS_AS(sweep(SweepSpec{"watts", {1.0}, 1.0}, ds), std::invalid_argument);
    CHECK_THROWS_AS(validate_sweep_spec(SweepSpec{"eta", {0.7}, std::nan("")}),
                    std::invalid_argument);

    const auto mu_rows = sweep(SweepSpec{"mu_electric", {0.2, 0.5, 0.8}, 0.5}, ds);
    REQUIRE(mu_rows.size() == 3);
    CHECK(mu_rows[1].pct_change_vs_baseline == 0.0);

    const auto grid_rows = sweep(SweepSpec{"grid_factor", {0.4, 0.6, 0.8}, 0.6}, ds);
    REQUIRE(grid_rows.size() == 3);
    // National CE rises with the grid factor.
    CHECK(grid_rows[0].national_ce_ktco2 <= grid_rows[1].national_ce_ktco2);
    CHECK(grid_rows[1].national_ce_ktco2 <= grid_rows[2].national_ce_ktco2);

    const auto fg_rows = sweep(SweepSpec{"gasoline_factor", {60000.0, 70000.0}, 60000.0}, ds);
    REQUIRE(fg_rows.size() == 2);
    CHECK(fg_rows[0].pct_change_vs_baseline == 0.0);
    CHECK(fg_rows[1].national_ce_ktco2 >= fg_rows[0].national_ce_ktco2);
}

TEST_CASE("sweep on an empty fleet degrades to zero rows without division") {
    const auto rows = sweep(SweepSpec{"eta", {0.7, 0.75}, 0.75}, empty_fleet());
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row.national_ce_ktco2 == 0.0);
        CHECK(row.kg_co2_per_vehicle == 0.0);
        CHECK(row.pct_change_vs_baseline == 0.0);
    }
}
