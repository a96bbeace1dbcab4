#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fleetcarbon/report.hpp"

namespace {

void add_dataset_options(CLI::App* cmd, fleetcarbon::RunConfig& config) {
    cmd->add_option("--catalog", config.catalog_path, "Vehicle catalog CSV")->required();
    cmd->add_option("--contexts", config.contexts_path, "Region/year contexts CSV")->required();
    cmd->add_option("--constants", config.constants_path, "Constants JSON")->required();
    cmd->add_option("--format", config.output_format, "Output format: table, json or csv")
        ->check(CLI::IsMember({"table", "json", "csv"}))
        ->default_val("table");
    cmd->add_option("--out", config.output_path,
                    "Write json/csv payload to this file instead of stdout");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bottom-up fleet energy and CO2 accounting for plug-in hybrids"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "fleetcarbon 0.1.0");

    fleetcarbon::RunConfig config;

    auto* validate = app.add_subcommand("validate", "Check a dataset and print every finding");
    add_dataset_options(validate, config);

    auto* intensity =
        app.add_subcommand("intensity", "Per-model energy intensities by year");
    add_dataset_options(intensity, config);

    auto* energy = app.add_subcommand("energy", "Energy use per model, region and year");
    add_dataset_options(energy, config);

    auto* emissions = app.add_subcommand("emissions", "CO2 emissions per model, region and year");
    add_dataset_options(emissions, config);
    emissions->add_option("--bound", config.bound, "Factor scenario: lower, default or upper")
        ->check(CLI::IsMember({"lower", "default", "upper"}))
        ->default_val("default");

    auto* bounds = app.add_subcommand("bounds", "Emission envelopes for all factor scenarios");
    add_dataset_options(bounds, config);

    auto* sweep = app.add_subcommand("sweep", "One-at-a-time parameter sensitivity sweep");
    add_dataset_options(sweep, config);
    sweep
        ->add_option("--param", config.sweep_parameter,
                     "Parameter: eta, mu_electric, grid_factor or gasoline_factor")
        ->required();
    sweep->add_option("--values", config.sweep_values, "Comma-separated parameter values")
        ->required()
        ->delimiter(',');
    sweep->add_option("--baseline", config.sweep_baseline, "Baseline parameter value")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return fleetcarbon::kExitUsageError;
    }

    config.command = app.get_subcommands().front()->get_name();
    return fleetcarbon::run(config, std::cout, std::cerr);
}
