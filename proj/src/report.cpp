#include "fleetcarbon/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fleetcarbon/aggregation.hpp"
#include "fleetcarbon/detail/numeric.hpp"
#include "fleetcarbon/uncertainty.hpp"

namespace fleetcarbon {

namespace {

using ordered_json = nlohmann::ordered_json;
using detail::format_double;

std::string fixed1(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f", value);
    return buf;
}

struct Table {
    std::vector<std::string> header;
    std::string align; // one 'l'/'r' per column
    std::vector<std::vector<std::string>> rows;

    void print(std::ostream& out) const {
        std::vector<size_t> width(header.size());
        for (size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
        for (const auto& row : rows) {
            for (size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
        }
        auto emit = [&](const std::vector<std::string>& row) {
            std::string line;
            for (size_t i = 0; i < row.size(); ++i) {
                if (i) line += "  ";
                const size_t pad = width[i] - row[i].size();
                if (align[i] == 'r') line.append(pad, ' ');
                line += row[i];
                if (align[i] == 'l' && i + 1 < row.size()) line.append(pad, ' ');
            }
            out << line << "\n";
        };
        emit(header);
        std::string rule;
        for (size_t i = 0; i < width.size(); ++i) {
            if (i) rule += "  ";
            rule.append(width[i], '-');
        }
        out << rule << "\n";
        for (const auto& row : rows) emit(row);
    }
};

void write_payload(const RunConfig& config, std::ostream& out, const std::string& payload) {
    if (config.output_path.empty()) {
        out << payload;
        return;
    }
    std::ofstream file(config.output_path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot write output file '" + config.output_path + "'");
    }
    file << payload;
}

std::string csv_escaped(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string escaped = "\"";
    for (char c : field) {
        if (c == '"') escaped += '"';
        escaped += c;
    }
    escaped += '"';
    return escaped;
}

// --- validate ---------------------------------------------------------------

ordered_json issue_json(const ValidationIssue& issue) {
    return {{"file", issue.file},
            {"row", issue.row},
            {"field", issue.field},
            {"code", issue.code},
            {"message", issue.message}};
}

int emit_validate(const RunConfig& config, const ValidationReport& report, std::ostream& out) {
    if (config.output_format == "json") {
        ordered_json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["command"] = "validate";
        doc["ok"] = report.ok();
        doc["errors"] = ordered_json::array();
        for (const auto& issue : report.errors) doc["errors"].push_back(issue_json(issue));
        doc["warnings"] = ordered_json::array();
        for (const auto& issue : report.warnings) doc["warnings"].push_back(issue_json(issue));
        write_payload(config, out, doc.dump(2) + "\n");
    } else if (config.output_format == "csv") {
        std::string payload = "severity,file,row,field,code,message\n";
        auto append = [&](const char* severity, const ValidationIssue& issue) {
            payload += severity;
            payload += ',' + csv_escaped(issue.file) + ',' + std::to_string(issue.row) + ',' +
                       csv_escaped(issue.field) + ',' + issue.code + ',' +
                       csv_escaped(issue.message) + '\n';
        };
        for (const auto& issue : report.errors) append("error", issue);
        for (const auto& issue : report.warnings) append("warning", issue);
        write_payload(config, out, payload);
    } else {
        std::ostringstream text;
        print_validation_report(report, text);
        write_payload(config, out, text.str());
    }
    return report.ok() ? kExitOk : kExitValidationFailure;
}

// --- intensity ---------------------------------------------------------------

struct IntensityRow {
    std::string model_id;
    std::string model_name;
    int year = 0;
    Intensity intensity;
};

std::vector<IntensityRow> intensity_rows(const Dataset& dataset) {
    std::vector<IntensityRow> rows;
    for (const auto& model : dataset.models) {
        std::set<int> years;
        for (const auto& v : model.variants) years.insert(v.year);
        for (int year : years) {
            const auto variants = variants_for_year(model, year);
            rows.push_back(IntensityRow{model.model_id, model.name, year,
                                        estimate_intensity(variants, dataset.constants.eta)});
        }
    }
    return rows;
}

int emit_intensity(const RunConfig& config, const Dataset& dataset, std::ostream& out) {
    const auto rows = intensity_rows(dataset);
    if (config.output_format == "json") {
        ordered_json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["command"] = "intensity";
        doc["eta"] = dataset.constants.eta;
        doc["rows"] = ordered_json::array();
        for (const auto& row : rows) {
            doc["rows"].push_back({{"model_id", row.model_id},
                                   {"model_name", row.model_name},
                                   {"year", row.year},
                                   {"electricity_kwh_per_100km",
                                    row.intensity.electricity_kwh_per_100km},
                                   {"gasoline_l_per_100km", row.intensity.gasoline_l_per_100km}});
        }
        write_payload(config, out, doc.dump(2) + "\n");
    } else if (config.output_format == "csv") {
        std::string payload =
            "model_id,model_name,year,electricity_kwh_per_100km,gasoline_l_per_100km\n";
        for (const auto& row : rows) {
            payload += csv_escaped(row.model_id) + ',' + csv_escaped(row.model_name) + ',' +
                       std::to_string(row.year) + ',' +
                       format_double(row.intensity.electricity_kwh_per_100km) + ',' +
                       format_double(row.intensity.gasoline_l_per_100km) + '\n';
        }
        write_payload(config, out, payload);
    } else {
        Table table{{"model_id", "model_name", "year", "kWh/100km", "L/100km"}, "lllrr", {}};
        for (const auto& row : rows) {
            table.rows.push_back({row.model_id, row.model_name, std::to_string(row.year),
                                  fixed1(row.intensity.electricity_kwh_per_100km),
                                  fixed1(row.intensity.gasoline_l_per_100km)});
        }
        std::ostringstream text;
        text << "Real-world energy intensity per model and year (eta = "
             << format_double(dataset.constants.eta) << ")\n";
        table.print(text);
        write_payload(config, out, text.str());
    }
    return kExitOk;
}

// --- energy / emissions -------------------------------------------------------

ordered_json totals_json(const Totals& totals) {
    return {{"electricity_tj", totals.electricity_tj},
            {"gasoline_tj", totals.gasoline_tj},
            {"total_tj", totals.total_tj},
            {"cee_ktco2", totals.cee_ktco2},
            {"ceg_ktco2", totals.ceg_ktco2},
            {"ce_ktco2", totals.ce_ktco2}};
}

ordered_json cell_json(const ResultCell& cell) {
    return {{"model_id", cell.model_id},
            {"region_code", cell.region_code},
            {"year", cell.year},
            {"electricity_tj", cell.electricity_tj},
            {"gasoline_tj", cell.gasoline_tj},
            {"total_tj", cell.total_tj},
            {"cee_ktco2", cell.cee_ktco2},
            {"ceg_ktco2", cell.ceg_ktco2},
            {"ce_ktco2", cell.ce_ktco2}};
}

std::map<std::string, std::int64_t> vehicles_by_region(const Dataset& dataset) {
    std::map<std::string, std::int64_t> counts;
    for (const auto& ctx : dataset.contexts) {
        auto& count = counts[ctx.region.code];
        for (const auto& [model_id, units] : ctx.sales) count += units;
    }
    return counts;
}

int emit_energy_or_emissions(const RunConfig& config, const Dataset& dataset,
                             const BoundScenario& scenario, std::ostream& out) {
    const bool emissions = config.command == "emissions";
    const auto cells = compute_all_cells(dataset, scenario.grid_factor_choice,
                                         scenario.gasoline_factor_choice);
    const auto by_region_year = totals_by_region_year(cells);
    const auto by_region = totals_by_region(by_region_year);
    const auto by_year = totals_by_year(by_region_year);
    const auto by_model = totals_by_model(cells);
    const Totals national = national_totals(by_region);
    const auto vehicles = vehicles_by_region(dataset);
    std::int64_t national_vehicles = 0;
    for (const auto& [code, count] : vehicles) national_vehicles += count;

    if (config.output_format == "json") {
        ordered_json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["command"] = config.command;
        if (emissions) doc["bound"] = scenario.label;
        doc["cells"] = ordered_json::array();
        for (const auto& cell : cells) doc["cells"].push_back(cell_json(cell));
        ordered_json totals;
        totals["by_region_year"] = ordered_json::array();
        for (const auto& [key, value] : by_region_year) {
            ordered_json entry = {{"region_code", key.first}, {"year", key.second}};
            entry.update(totals_json(value));
            totals["by_region_year"].push_back(entry);
        }
        totals["by_region"] = ordered_json::array();
        for (const auto& [code, value] : by_region) {
            ordered_json entry = {{"region_code", code}};
            entry.update(totals_json(value));
            if (emissions) {
                const std::int64_t count = vehicles.count(code) ? vehicles.at(code) : 0;
                entry["vehicles"] = count;
                entry["kg_co2_per_vehicle"] =
                    count > 0 ? per_vehicle_carbon(value.ce_ktco2, count) : 0.0;
            }
            totals["by_region"].push_back(entry);
        }
        totals["by_year"] = ordered_json::array();
        for (const auto& [year, value] : by_year) {
            ordered_json entry = {{"year", year}};
            entry.update(totals_json(value));
            totals["by_year"].push_back(entry);
        }
        totals["by_model"] = ordered_json::array();
        for (const auto& [model_id, value] : by_model) {
            ordered_json entry = {{"model_id", model_id}};
            entry.update(totals_json(value));
            totals["by_model"].push_back(entry);
        }
        ordered_json national_entry = totals_json(national);
        if (emissions) {
            national_entry["vehicles"] = national_vehicles;
            national_entry["kg_co2_per_vehicle"] =
                national_vehicles > 0 ? per_vehicle_carbon(national.ce_ktco2, national_vehicles)
                                      : 0.0;
        }
        totals["national"] = national_entry;
        doc["totals"] = totals;
        write_payload(config, out, doc.dump(2) + "\n");
        return kExitOk;
    }

    if (config.output_format == "csv") {
        std::string payload;
        if (emissions) {
            payload = "model_id,region_code,year,cee_ktco2,ceg_ktco2,ce_ktco2\n";
            for (const auto& cell : cells) {
                payload += csv_escaped(cell.model_id) + ',' + csv_escaped(cell.region_code) + ',' +
                           std::to_string(cell.year) + ',' + format_double(cell.cee_ktco2) + ',' +
                           format_double(cell.ceg_ktco2) + ',' + format_double(cell.ce_ktco2) +
                           '\n';
            }
        } else {
            payload = "model_id,region_code,year,electricity_tj,gasoline_tj,total_tj\n";
            for (const auto& cell : cells) {
                payload += csv_escaped(cell.model_id) + ',' + csv_escaped(cell.region_code) + ',' +
                           std::to_string(cell.year) + ',' + format_double(cell.electricity_tj) +
                           ',' + format_double(cell.gasoline_tj) + ',' +
                           format_double(cell.total_tj) + '\n';
            }
        }
        write_payload(config, out, payload);
        return kExitOk;
    }

    std::ostringstream text;
    const std::string unit = emissions ? "ktCO2" : "TJ";
    auto cell_fields = [&](const ResultCell& c) {
        return emissions ? std::vector<std::string>{fixed1(c.cee_ktco2), fixed1(c.ceg_ktco2),
                                                    fixed1(c.ce_ktco2)}
                         : std::vector<std::string>{fixed1(c.electricity_tj),
                                                    fixed1(c.gasoline_tj), fixed1(c.total_tj)};
    };
    auto totals_fields = [&](const Totals& t) {
        return emissions ? std::vector<std::string>{fixed1(t.cee_ktco2), fixed1(t.ceg_ktco2),
                                                    fixed1(t.ce_ktco2)}
                         : std::vector<std::string>{fixed1(t.electricity_tj),
                                                    fixed1(t.gasoline_tj), fixed1(t.total_tj)};
    };
    const std::vector<std::string> carrier_names = {"electricity", "gasoline", "total"};

    text << (emissions ? "Operational CO2 emissions (" + scenario.label + " factors, " + unit + ")"
                       : "Operational energy use (" + unit + ")")
         << "\n\n";
    {
        Table table{{"model_id", "region", "year", carrier_names[0] + " [" + unit + "]",
                     carrier_names[1] + " [" + unit + "]", carrier_names[2] + " [" + unit + "]"},
                    "lllrrr",
                    {}};
        for (const auto& cell : cells) {
            auto fields = cell_fields(cell);
            table.rows.push_back({cell.model_id, cell.region_code, std::to_string(cell.year),
                                  fields[0], fields[1], fields[2]});
        }
        table.print(text);
    }
    text << "\nTotals by region and year\n";
    {
        Table table{{"region", "year", carrier_names[0], carrier_names[1], carrier_names[2]},
                    "llrrr",
                    {}};
        for (const auto& [key, value] : by_region_year) {
            auto fields = totals_fields(value);
            table.rows.push_back(
                {key.first, std::to_string(key.second), fields[0], fields[1], fields[2]});
        }
        table.print(text);
    }
    text << "\nTotals by region\n";
    {
        std::vector<std::string> header = {"region", carrier_names[0], carrier_names[1],
                                           carrier_names[2]};
        std::string align = "lrrr";
        if (emissions) {
            header.push_back("kgCO2/vehicle");
            align += 'r';
        }
        Table table{header, align, {}};
        for (const auto& [code, value] : by_region) {
            auto fields = totals_fields(value);
            std::vector<std::string> row = {code, fields[0], fields[1], fields[2]};
            if (emissions) {
                const std::int64_t count = vehicles.count(code) ? vehicles.at(code) : 0;
                row.push_back(count > 0 ? fixed1(per_vehicle_carbon(value.ce_ktco2, count)) : "-");
            }
            table.rows.push_back(row);
        }
        const Totals t = national;
        auto fields = totals_fields(t);
        std::vector<std::string> row = {"T", fields[0], fields[1], fields[2]};
        if (emissions) {
            row.push_back(national_vehicles > 0
                              ? fixed1(per_vehicle_carbon(t.ce_ktco2, national_vehicles))
                              : "-");
        }
        table.rows.push_back(row);
        table.print(text);
    }
    text << "\nTotals by year\n";
    {
        Table table{{"year", carrier_names[0], carrier_names[1], carrier_names[2]}, "lrrr", {}};
        for (const auto& [year, value] : by_year) {
            auto fields = totals_fields(value);
            table.rows.push_back({std::to_string(year), fields[0], fields[1], fields[2]});
        }
        table.print(text);
    }
    write_payload(config, out, text.str());
    return kExitOk;
}

// --- bounds -------------------------------------------------------------------

int emit_bounds(const RunConfig& config, const Dataset& dataset, std::ostream& out) {
    const auto scenarios = emission_bounds(dataset);
    if (config.output_format == "json") {
        ordered_json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["command"] = "bounds";
        doc["scenarios"] = ordered_json::array();
        auto row_json = [](const EmissionRow& row) {
            return ordered_json{{"region_code", row.region_code},
                                {"year", row.year},
                                {"cee_ktco2", row.cee_ktco2},
                                {"ceg_ktco2", row.ceg_ktco2},
                                {"ce_ktco2", row.ce_ktco2}};
        };
        for (const auto& scenario : scenarios) {
            ordered_json entry;
            entry["label"] = scenario.scenario.label;
            entry["grid_factor_choice"] =
                scenario.scenario.grid_factor_choice == GridBound::kUpper ? "upper" : "default";
            entry["gasoline_factor_choice"] =
                scenario.scenario.gasoline_factor_choice == GasolineBound::kLower   ? "lower"
                : scenario.scenario.gasoline_factor_choice == GasolineBound::kUpper ? "upper"
                                                                                    : "default";
            entry["region_year"] = ordered_json::array();
            for (const auto& row : scenario.region_year) entry["region_year"].push_back(row_json(row));
            entry["national_by_year"] = ordered_json::array();
            for (const auto& row : scenario.national_by_year) {
                entry["national_by_year"].push_back(row_json(row));
            }
            entry["national_total"] = row_json(scenario.national_total);
            doc["scenarios"].push_back(entry);
        }
        write_payload(config, out, doc.dump(2) + "\n");
        return kExitOk;
    }
    if (config.output_format == "csv") {
        std::string payload = "scenario,region_code,year,cee_ktco2,ceg_ktco2,ce_ktco2\n";
        auto append = [&](const std::string& label, const EmissionRow& row) {
            payload += label + ',' + csv_escaped(row.region_code) + ',' +
                       std::to_string(row.year) + ',' + format_double(row.cee_ktco2) + ',' +
                       format_double(row.ceg_ktco2) + ',' + format_double(row.ce_ktco2) + '\n';
        };
        for (const auto& scenario : scenarios) {
            for (const auto& row : scenario.region_year) append(scenario.scenario.label, row);
            for (const auto& row : scenario.national_by_year) append(scenario.scenario.label, row);
            append(scenario.scenario.label, scenario.national_total);
        }
        write_payload(config, out, payload);
        return kExitOk;
    }
    std::ostringstream text;
    text << "Emission bounds by scenario (ktCO2); year 0 aggregates all years\n\n";
    Table table{{"scenario", "region", "year", "electricity", "gasoline", "total"}, "lllrrr", {}};
    for (const auto& scenario : scenarios) {
        for (const auto& row : scenario.region_year) {
            table.rows.push_back({scenario.scenario.label, row.region_code,
                                  std::to_string(row.year), fixed1(row.cee_ktco2),
                                  fixed1(row.ceg_ktco2), fixed1(row.ce_ktco2)});
        }
        for (const auto& row : scenario.national_by_year) {
            table.rows.push_back({scenario.scenario.label, row.region_code,
                                  std::to_string(row.year), fixed1(row.cee_ktco2),
                                  fixed1(row.ceg_ktco2), fixed1(row.ce_ktco2)});
        }
        table.rows.push_back({scenario.scenario.label, "T", "0",
                              fixed1(scenario.national_total.cee_ktco2),
                              fixed1(scenario.national_total.ceg_ktco2),
                              fixed1(scenario.national_total.ce_ktco2)});
    }
    table.print(text);
    write_payload(config, out, text.str());
    return kExitOk;
}

// --- sweep --------------------------------------------------------------------

int emit_sweep(const RunConfig& config, const Dataset& dataset, std::ostream& out) {
    const SweepSpec spec{config.sweep_parameter, config.sweep_values, config.sweep_baseline};
    const auto rows = sweep(spec, dataset);
    std::vector<std::string> region_codes;
    if (!rows.empty()) {
        for (const auto& [code, ce] : rows.front().ce_by_region) region_codes.push_back(code);
    }

    if (config.output_format == "json") {
        ordered_json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["command"] = "sweep";
        doc["parameter"] = spec.parameter;
        doc["baseline"] = spec.baseline;
        doc["rows"] = ordered_json::array();
        for (const auto& row : rows) {
            ordered_json by_region;
            for (const auto& [code, ce] : row.ce_by_region) by_region[code] = ce;
            doc["rows"].push_back({{"value", row.value},
                                   {"ce_by_region_ktco2", by_region},
                                   {"national_ce_ktco2", row.national_ce_ktco2},
                                   {"kg_co2_per_vehicle", row.kg_co2_per_vehicle},
                                   {"pct_change_vs_baseline", row.pct_change_vs_baseline}});
        }
        write_payload(config, out, doc.dump(2) + "\n");
        return kExitOk;
    }
    if (config.output_format == "csv") {
        std::string payload = "parameter,value";
        for (const auto& code : region_codes) payload += ",ce_" + code + "_ktco2";
        payload += ",national_ce_ktco2,kg_co2_per_vehicle,pct_change_vs_baseline\n";
        for (const auto& row : rows) {
            payload += spec.parameter + ',' + format_double(row.value);
            for (const auto& [code, ce] : row.ce_by_region) payload += ',' + format_double(ce);
            payload += ',' + format_double(row.national_ce_ktco2) + ',' +
                       format_double(row.kg_co2_per_vehicle) + ',' +
                       format_double(row.pct_change_vs_baseline) + '\n';
        }
        write_payload(config, out, payload);
        return kExitOk;
    }
    std::ostringstream text;
    text << "Sensitivity sweep over " << spec.parameter
         << " (baseline = " << format_double(spec.baseline) << ")\n\n";
    std::vector<std::string> header = {spec.parameter};
    std::string align = "r";
    for (const auto& code : region_codes) {
        header.push_back("CE " + code);
        align += 'r';
    }
    header.insert(header.end(), {"CE T", "kgCO2/vehicle", "% change"});
    align += "rrr";
    Table table{header, align, {}};
    for (const auto& row : rows) {
        std::vector<std::string> fields = {format_double(row.value)};
        for (const auto& [code, ce] : row.ce_by_region) fields.push_back(fixed1(ce));
        fields.push_back(fixed1(row.national_ce_ktco2));
        fields.push_back(fixed1(row.kg_co2_per_vehicle));
        fields.push_back(fixed1(row.pct_change_vs_baseline));
        table.rows.push_back(fields);
    }
    table.print(text);
    write_payload(config, out, text.str());
    return kExitOk;
}

} // namespace

void print_validation_report(const ValidationReport& report, std::ostream& out) {
    out << report.errors.size() << " errors, " << report.warnings.size() << " warnings\n";
    auto emit = [&](const char* severity, const ValidationIssue& issue) {
        out << "  [" << severity << "] " << issue.file;
        if (issue.row > 0) out << ":" << issue.row;
        if (!issue.field.empty()) out << " " << issue.field;
        out << " (" << issue.code << "): " << issue.message << "\n";
    };
    for (const auto& issue : report.errors) emit("error", issue);
    for (const auto& issue : report.warnings) emit("warning", issue);
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    static const std::set<std::string> kCommands = {"validate", "intensity", "energy",
                                                    "emissions", "bounds",    "sweep"};
    if (kCommands.count(config.command) == 0) {
        err << "unknown command '" << config.command << "'\n";
        return kExitUsageError;
    }
    if (config.output_format != "table" && config.output_format != "json" &&
        config.output_format != "csv") {
        err << "unknown output format '" << config.output_format << "'\n";
        return kExitUsageError;
    }
    BoundScenario scenario = scenario_for_label("default");
    if (config.command == "emissions") {
        try {
            scenario = scenario_for_label(config.bound);
        } catch (const std::invalid_argument& e) {
            err << e.what() << "\n";
            return kExitUsageError;
        }
    }
    if (config.command == "sweep") {
        try {
            validate_sweep_spec(
                SweepSpec{config.sweep_parameter, config.sweep_values, config.sweep_baseline});
        } catch (const std::invalid_argument& e) {
            err << e.what() << "\n";
            return kExitUsageError;
        }
    }

    LoadResult loaded =
        load_dataset(config.catalog_path, config.contexts_path, config.constants_path);
    if (config.command == "validate") {
        return emit_validate(config, loaded.report, out);
    }
    if (!loaded.report.ok()) {
        print_validation_report(loaded.report, err);
        return kExitValidationFailure;
    }
    for (const auto& warning : loaded.report.warnings) {
        err << "warning: " << warning.message << "\n";
    }

    const Dataset& dataset = *loaded.dataset;
    try {
        if (config.command == "intensity") return emit_intensity(config, dataset, out);
        if (config.command == "energy" || config.command == "emissions") {
            return emit_energy_or_emissions(config, dataset, scenario, out);
        }
        if (config.command == "bounds") return emit_bounds(config, dataset, out);
        return emit_sweep(config, dataset, out);
    } catch (const std::invalid_argument& e) {
        err << e.what() << "\n";
        return kExitUsageError;
    } catch (const std::runtime_error& e) {
        err << e.what() << "\n";
        return kExitValidationFailure;
    }
}

} // namespace fleetcarbon
