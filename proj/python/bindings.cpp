#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "fleetcarbon/aggregation.hpp"
#include "fleetcarbon/core_model.hpp"
#include "fleetcarbon/ingestion.hpp"
#include "fleetcarbon/report.hpp"
#include "fleetcarbon/uncertainty.hpp"

namespace py = pybind11;
using namespace fleetcarbon;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bottom-up fleet energy and CO2 accounting for plug-in hybrids";
    m.attr("__version__") = "0.1.0";
    m.attr("NATIONWIDE_REGION_CODE") = kNationwideRegionCode;
    m.attr("SPLIT_TOLERANCE") = kSplitTolerance;

    py::class_<VehicleVariant>(m, "VehicleVariant")
        .def(py::init<>())
        .def(py::init([](std::string variant_id, int year, double battery_energy_kwh,
                         double nedc_aer_km, double gasoline_intensity_l_per_100km,
                         double popularity_weight) {
                 return VehicleVariant{std::move(variant_id), year, battery_energy_kwh,
                                       nedc_aer_km, gasoline_intensity_l_per_100km,
                                       popularity_weight};
             }),
             py::arg("variant_id"), py::arg("year"), py::arg("battery_energy_kwh"),
             py::arg("nedc_aer_km"), py::arg("gasoline_intensity_l_per_100km") = 0.0,
             py::arg("popularity_weight") = 1.0)
        .def_readwrite("variant_id", &VehicleVariant::variant_id)
        .def_readwrite("year", &VehicleVariant::year)
        .def_readwrite("battery_energy_kwh", &VehicleVariant::battery_energy_kwh)
        .def_readwrite("nedc_aer_km", &VehicleVariant::nedc_aer_km)
        .def_readwrite("gasoline_intensity_l_per_100km",
                       &VehicleVariant::gasoline_intensity_l_per_100km)
        .def_readwrite("popularity_weight", &VehicleVariant::popularity_weight);

    py::class_<VehicleModel>(m, "VehicleModel")
        .def(py::init<>())
        .def(py::init([](std::string model_id, std::string name,
                         std::vector<VehicleVariant> variants, double mu_electric,
                         double mu_gasoline) {
                 return VehicleModel{std::move(model_id), std::move(name), std::move(variants),
                                     mu_electric, mu_gasoline};
             }),
             py::arg("model_id"), py::arg("name"), py::arg("variants"), py::arg("mu_electric"),
             py::arg("mu_gasoline"))
        .def_readwrite("model_id", &VehicleModel::model_id)
        .def_readwrite("name", &VehicleModel::name)
        .def_readwrite("variants", &VehicleModel::variants)
        .def_readwrite("mu_electric", &VehicleModel::mu_electric)
        .def_readwrite("mu_gasoline", &VehicleModel::mu_gasoline);

    py::class_<FactorTriple>(m, "FactorTriple")
        .def(py::init<>())
        .def(py::init([](double lower, double default_value, double upper) {
                 return FactorTriple{lower, default_value, upper};
             }),
             py::arg("lower"), py::arg("default_value"), py::arg("upper"))
        .def_readwrite("lower", &FactorTriple::lower)
        .def_readwrite("default_value", &FactorTriple::default_value)
        .def_readwrite("upper", &FactorTriple::upper);

    py::class_<GridFactorPair>(m, "GridFactorPair")
        .def(py::init<>())
        .def(py::init([](double default_value, double upper) {
                 return GridFactorPair{default_value, upper};
             }),
             py::arg("default_value"), py::arg("upper"))
        .def_readwrite("default_value", &GridFactorPair::default_value)
        .def_readwrite("upper", &GridFactorPair::upper);

    py::class_<Constants>(m, "Constants")
        .def(py::init<>())
        .def_readwrite("eta", &Constants::eta)
        .def_readwrite("rho_kg_per_l", &Constants::rho_kg_per_l)
        .def_readwrite("zeta_e_tj_per_kwh", &Constants::zeta_e_tj_per_kwh)
        .def_readwrite("zeta_g_tj_per_kg", &Constants::zeta_g_tj_per_kg)
        .def_readwrite("gasoline_factor_kgco2_per_tj", &Constants::gasoline_factor_kgco2_per_tj);

    py::class_<Intensity>(m, "Intensity")
        .def(py::init<>())
        .def(py::init([](double e, double g) { return Intensity{e, g}; }),
             py::arg("electricity_kwh_per_100km"), py::arg("gasoline_l_per_100km"))
        .def_readwrite("electricity_kwh_per_100km", &Intensity::electricity_kwh_per_100km)
        .def_readwrite("gasoline_l_per_100km", &Intensity::gasoline_l_per_100km);

    py::class_<AvktSplit>(m, "AvktSplit")
        .def(py::init<>())
        .def(py::init([](double e, double g) { return AvktSplit{e, g}; }),
             py::arg("electric_100km"), py::arg("gasoline_100km"))
        .def_readwrite("electric_100km", &AvktSplit::electric_100km)
        .def_readwrite("gasoline_100km", &AvktSplit::gasoline_100km);

    py::class_<EnergyPair>(m, "EnergyPair")
        .def(py::init<>())
        .def_readwrite("electricity_tj", &EnergyPair::electricity_tj)
        .def_readwrite("gasoline_tj", &EnergyPair::gasoline_tj)
        .def("total_tj", &EnergyPair::total_tj);

    py::class_<Region>(m, "Region")
        .def(py::init<>())
        .def(py::init([](std::string code, std::string name) {
                 return Region{std::move(code), std::move(name)};
             }),
             py::arg("code"), py::arg("name") = "")
        .def_readwrite("code", &Region::code)
        .def_readwrite("name", &Region::name);

    py::class_<RegionYearContext>(m, "RegionYearContext")
        .def(py::init<>())
        .def(py::init([](Region region, int year, double avkt_km, GridFactorPair grid,
                         std::map<std::string, std::int64_t> sales) {
                 return RegionYearContext{std::move(region), year, avkt_km, grid,
                                          std::move(sales)};
             }),
             py::arg("region"), py::arg("year"), py::arg("avkt_km"),
             py::arg("grid_factor_kgco2_per_kwh"),
             py::arg("sales") = std::map<std::string, std::int64_t>{})
        .def_readwrite("region", &RegionYearContext::region)
        .def_readwrite("year", &RegionYearContext::year)
        .def_readwrite("avkt_km", &RegionYearContext::avkt_km)
        .def_readwrite("grid_factor_kgco2_per_kwh", &RegionYearContext::grid_factor_kgco2_per_kwh)
        .def_readwrite("sales", &RegionYearContext::sales);

    py::class_<ResultCell>(m, "ResultCell")
        .def(py::init<>())
        .def_readwrite("model_id", &ResultCell::model_id)
        .def_readwrite("region_code", &ResultCell::region_code)
        .def_readwrite("year", &ResultCell::year)
        .def_readwrite("electricity_tj", &ResultCell::electricity_tj)
        .def_readwrite("gasoline_tj", &ResultCell::gasoline_tj)
        .def_readwrite("total_tj", &ResultCell::total_tj)
        .def_readwrite("cee_ktco2", &ResultCell::cee_ktco2)
        .def_readwrite("ceg_ktco2", &ResultCell::ceg_ktco2)
        .def_readwrite("ce_ktco2", &ResultCell::ce_ktco2);

    py::class_<DatasetMetadata>(m, "DatasetMetadata")
        .def(py::init<>())
        .def_readwrite("version", &DatasetMetadata::version)
        .def_readwrite("notes", &DatasetMetadata::notes);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init<>())
        .def_readwrite("models", &Dataset::models)
        .def_readwrite("contexts", &Dataset::contexts)
        .def_readwrite("constants", &Dataset::constants)
        .def_readwrite("metadata", &Dataset::metadata);

    py::class_<ValidationIssue>(m, "ValidationIssue")
        .def(py::init<>())
        .def_readwrite("file", &ValidationIssue::file)
        .def_readwrite("row", &ValidationIssue::row)
        .def_readwrite("field", &ValidationIssue::field)
        .def_readwrite("code", &ValidationIssue::code)
        .def_readwrite("message", &ValidationIssue::message)
        .def("__repr__", [](const ValidationIssue& issue) {
            return "<ValidationIssue " + issue.code + " " + issue.file + ":" +
                   std::to_string(issue.row) + " " + issue.field + ">";
        });

    py::class_<ValidationReport>(m, "ValidationReport")
        .def(py::init<>())
        .def_readwrite("errors", &ValidationReport::errors)
        .def_readwrite("warnings", &ValidationReport::warnings)
        .def_property_readonly("ok", &ValidationReport::ok);

    py::class_<LoadResult>(m, "LoadResult")
        .def_readonly("dataset", &LoadResult::dataset)
        .def_readonly("report", &LoadResult::report);

    py::enum_<GridBound>(m, "GridBound")
        .value("DEFAULT", GridBound::kDefault)
        .value("UPPER", GridBound::kUpper);

    py::enum_<GasolineBound>(m, "GasolineBound")
        .value("LOWER", GasolineBound::kLower)
        .value("DEFAULT", GasolineBound::kDefault)
        .value("UPPER", GasolineBound::kUpper);

    py::class_<Totals>(m, "Totals")
        .def(py::init<>())
        .def_readwrite("electricity_tj", &Totals::electricity_tj)
        .def_readwrite("gasoline_tj", &Totals::gasoline_tj)
        .def_readwrite("total_tj", &Totals::total_tj)
        .def_readwrite("cee_ktco2", &Totals::cee_ktco2)
        .def_readwrite("ceg_ktco2", &Totals::ceg_ktco2)
        .def_readwrite("ce_ktco2", &Totals::ce_ktco2);

    py::class_<RegionalEnergy>(m, "RegionalEnergy")
        .def_readonly("cells", &RegionalEnergy::cells)
        .def_readonly("total_tj", &RegionalEnergy::total_tj);

    py::class_<BoundScenario>(m, "BoundScenario")
        .def(py::init<>())
        .def_readwrite("label", &BoundScenario::label)
        .def_readwrite("grid_factor_choice", &BoundScenario::grid_factor_choice)
        .def_readwrite("gasoline_factor_choice", &BoundScenario::gasoline_factor_choice);

    py::class_<EmissionRow>(m, "EmissionRow")
        .def_readonly("region_code", &EmissionRow::region_code)
        .def_readonly("year", &EmissionRow::year)
        .def_readonly("cee_ktco2", &EmissionRow::cee_ktco2)
        .def_readonly("ceg_ktco2", &EmissionRow::ceg_ktco2)
        .def_readonly("ce_ktco2", &EmissionRow::ce_ktco2);

    py::class_<ScenarioEmissions>(m, "ScenarioEmissions")
        .def_readonly("scenario", &ScenarioEmissions::scenario)
        .def_readonly("region_year", &ScenarioEmissions::region_year)
        .def_readonly("national_by_year", &ScenarioEmissions::national_by_year)
        .def_readonly("national_total", &ScenarioEmissions::national_total);

    py::class_<SweepSpec>(m, "SweepSpec")
        .def(py::init<>())
        .def(py::init([](std::string parameter, std::vector<double> values, double baseline) {
                 return SweepSpec{std::move(parameter), std::move(values), baseline};
             }),
             py::arg("parameter"), py::arg("values"), py::arg("baseline"))
        .def_readwrite("parameter", &SweepSpec::parameter)
        .def_readwrite("values", &SweepSpec::values)
        .def_readwrite("baseline", &SweepSpec::baseline);

    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("value", &SweepRow::value)
        .def_readonly("ce_by_region", &SweepRow::ce_by_region)
        .def_readonly("national_ce_ktco2", &SweepRow::national_ce_ktco2)
        .def_readonly("kg_co2_per_vehicle", &SweepRow::kg_co2_per_vehicle)
        .def_readonly("pct_change_vs_baseline", &SweepRow::pct_change_vs_baseline);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("command", &RunConfig::command)
        .def_readwrite("catalog_path", &RunConfig::catalog_path)
        .def_readwrite("contexts_path", &RunConfig::contexts_path)
        .def_readwrite("constants_path", &RunConfig::constants_path)
        .def_readwrite("output_format", &RunConfig::output_format)
        .def_readwrite("output_path", &RunConfig::output_path)
        .def_readwrite("bound", &RunConfig::bound)
        .def_readwrite("sweep_parameter", &RunConfig::sweep_parameter)
        .def_readwrite("sweep_values", &RunConfig::sweep_values)
        .def_readwrite("sweep_baseline", &RunConfig::sweep_baseline);

    m.def("estimate_electricity_intensity",
          [](const std::vector<VehicleVariant>& variants, double eta) {
              return estimate_electricity_intensity(variants, eta);
          },
          py::arg("variants"), py::arg("eta"));
    m.def("estimate_gasoline_intensity",
          [](const std::vector<VehicleVariant>& variants) {
              return estimate_gasoline_intensity(variants);
          },
          py::arg("variants"));
    m.def("estimate_intensity",
          [](const std::vector<VehicleVariant>& variants, double eta) {
              return estimate_intensity(variants, eta);
          },
          py::arg("variants"), py::arg("eta"));
    m.def("split_avkt", &split_avkt, py::arg("model"), py::arg("avkt_km"));
    m.def("model_energy", &model_energy, py::arg("intensity"), py::arg("split"),
          py::arg("constants"));
    m.def("variants_for_year", &variants_for_year, py::arg("model"), py::arg("year"));

    m.def("compute_cell", &compute_cell, py::arg("model"), py::arg("ctx"), py::arg("constants"),
          py::arg("sales_units"), py::arg("grid_bound") = GridBound::kDefault,
          py::arg("gasoline_bound") = GasolineBound::kDefault);
    m.def("compute_context_cells",
          [](const std::vector<VehicleModel>& models, const RegionYearContext& ctx,
             const Constants& constants, GridBound grid, GasolineBound gasoline) {
              return compute_context_cells(models, ctx, constants, grid, gasoline);
          },
          py::arg("models"), py::arg("ctx"), py::arg("constants"),
          py::arg("grid_bound") = GridBound::kDefault,
          py::arg("gasoline_bound") = GasolineBound::kDefault);
    m.def("compute_all_cells", &compute_all_cells, py::arg("dataset"),
          py::arg("grid_bound") = GridBound::kDefault,
          py::arg("gasoline_bound") = GasolineBound::kDefault);
    m.def("regional_energy",
          [](const std::vector<VehicleModel>& models, const RegionYearContext& ctx,
             const Constants& constants) { return regional_energy(models, ctx, constants); },
          py::arg("models"), py::arg("ctx"), py::arg("constants"));
    m.def("electricity_emissions",
          [](const std::vector<VehicleModel>& models, const RegionYearContext& ctx,
             const Constants& constants, GridBound bound) {
              return electricity_emissions(models, ctx, constants, bound);
          },
          py::arg("models"), py::arg("ctx"), py::arg("constants"),
          py::arg("bound") = GridBound::kDefault);
    m.def("gasoline_emissions",
          [](const std::vector<VehicleModel>& models, const RegionYearContext& ctx,
             const Constants& constants, GasolineBound bound) {
              return gasoline_emissions(models, ctx, constants, bound);
          },
          py::arg("models"), py::arg("ctx"), py::arg("constants"),
          py::arg("bound") = GasolineBound::kDefault);
    m.def("total_emissions", &total_emissions, py::arg("cee_ktco2"), py::arg("ceg_ktco2"));
    m.def("per_vehicle_carbon", &per_vehicle_carbon, py::arg("ce_ktco2"),
          py::arg("vehicle_count"));
    m.def("national_rollup",
          [](const std::vector<ResultCell>& cells) { return national_rollup(cells); },
          py::arg("cells"));
    py::class_<NationalComparison>(m, "NationalComparison")
        .def_readonly("year", &NationalComparison::year)
        .def_readonly("rollup", &NationalComparison::rollup)
        .def_readonly("independent", &NationalComparison::independent);
    m.def("compare_national", &compare_national, py::arg("dataset"), py::arg("national_ctx"));
    m.def("totals_by_region_year",
          [](const std::vector<ResultCell>& cells) { return totals_by_region_year(cells); },
          py::arg("cells"));
    m.def("totals_by_region", &totals_by_region, py::arg("region_year"));
    m.def("totals_by_year", &totals_by_year, py::arg("region_year"));
    m.def("totals_by_model",
          [](const std::vector<ResultCell>& cells) { return totals_by_model(cells); },
          py::arg("cells"));
    m.def("national_totals", &national_totals, py::arg("by_region"));

    m.def("standard_scenarios", &standard_scenarios);
    m.def("scenario_for_label", &scenario_for_label, py::arg("label"));
    m.def("emission_bounds", &emission_bounds, py::arg("dataset"));
    m.def("validate_sweep_spec", &validate_sweep_spec, py::arg("spec"));
    m.def("apply_sweep_parameter", &apply_sweep_parameter, py::arg("dataset"),
          py::arg("parameter"), py::arg("value"));
    m.def("sweep", &sweep, py::arg("spec"), py::arg("dataset"));

    m.def("load_dataset", &load_dataset, py::arg("catalog_path"), py::arg("contexts_path"),
          py::arg("constants_path"));
    m.def("validate_dataset", &validate_dataset, py::arg("dataset"));
    m.def("save_dataset", &save_dataset, py::arg("dataset"), py::arg("directory"));

    m.def("run",
          [](const RunConfig& config) {
              std::ostringstream out, err;
              const int code = run(config, out, err);
              return py::make_tuple(code, out.str(), err.str());
          },
          py::arg("config"),
          "Runs one CLI command; returns (exit_code, stdout, stderr).");
}
