#include "fleetcarbon/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>
#include <utility>

#include <json.hpp>

#include "fleetcarbon/core_model.hpp"
#include "fleetcarbon/detail/numeric.hpp"

namespace fleetcarbon {

namespace {

using ordered_json = nlohmann::ordered_json;

const std::vector<std::string> kCatalogColumns = {
    "model_id",          "model_name",        "variant_id",
    "year",              "battery_energy_kwh", "nedc_aer_km",
    "gasoline_l_per_100km", "popularity_weight", "mu_electric",
    "mu_gasoline"};

const std::vector<std::string> kContextColumns = {
    "region_code", "region_name", "year", "avkt_km",
    "grid_factor_default_kgco2_per_kwh", "grid_factor_upper_kgco2_per_kwh"};

const std::vector<std::string> kSalesColumns = {"region_code", "year", "model_id", "units"};

constexpr const char* kSalesColumnPrefix = "sales_";

std::string trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

enum class ParseStatus { kOk, kBlank, kMalformed };

ParseStatus parse_double(const std::string& raw, double& out) {
    const std::string text = trimmed(raw);
    if (text.empty()) return ParseStatus::kBlank;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last || !std::isfinite(out)) return ParseStatus::kMalformed;
    return ParseStatus::kOk;
}

ParseStatus parse_integer(const std::string& raw, long long& out) {
    const std::string text = trimmed(raw);
    if (text.empty()) return ParseStatus::kBlank;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) return ParseStatus::kMalformed;
    return ParseStatus::kOk;
}

using detail::format_double;

std::string csv_escaped(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

struct CsvRow {
    long line = 0;
    std::vector<std::string> fields;
};

struct CsvFile {
    std::string path;
    std::vector<std::string> header;
    std::vector<CsvRow> rows;

    int column(const std::string& name) const {
        auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    }
};

// Splits one line into fields; quotes may wrap a field and are doubled to
// escape. Returns false on an unterminated quote.
bool split_csv_line(const std::string& line, std::vector<std::string>& fields) {
    fields.clear();
    std::string current;
    bool in_quotes = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    if (in_quotes) return false;
    fields.push_back(current);
    return true;
}

std::optional<CsvFile> read_csv(const std::filesystem::path& path, ValidationReport& report) {
    std::ifstream in(path);
    if (!in) {
        report.add_error(path.string(), 0, "", "io_error", "cannot open file");
        return std::nullopt;
    }
    CsvFile file;
    file.path = path.string();
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            line.erase(0, 3);
        }
        if (line_no == 1) {
            if (!split_csv_line(line, file.header)) {
                report.add_error(file.path, 1, "", "malformed_file", "unterminated quote in header");
                return std::nullopt;
            }
            for (auto& name : file.header) name = trimmed(name);
            std::set<std::string> seen;
            for (const auto& name : file.header) {
                if (!seen.insert(name).second) {
                    report.add_error(file.path, 1, name, "malformed_file",
                                     "duplicate column '" + name + "'");
                    return std::nullopt;
                }
            }
            continue;
        }
        if (line.empty()) continue;
        CsvRow row;
        row.line = line_no;
        if (!split_csv_line(line, row.fields)) {
            report.add_error(file.path, line_no, "", "malformed_file", "unterminated quote");
            continue;
        }
        if (row.fields.size() != file.header.size()) {
            report.add_error(file.path, line_no, "", "malformed_file",
                             "expected " + std::to_string(file.header.size()) + " fields, found " +
                                 std::to_string(row.fields.size()));
            continue;
        }
        file.rows.push_back(std::move(row));
    }
    if (line_no == 0) {
        report.add_error(file.path, 0, "", "malformed_file", "file is empty (header row required)");
        return std::nullopt;
    }
    return file;
}

bool check_required_columns(const CsvFile& file, const std::vector<std::string>& required,
                            ValidationReport& report) {
    bool ok = true;
    for (const auto& name : required) {
        if (file.column(name) < 0) {
            report.add_error(file.path, 1, name, "missing_column",
                             "required column '" + name + "' is missing");
            ok = false;
        }
    }
    return ok;
}

struct FieldReader {
    const CsvFile& file;
    const CsvRow& row;
    ValidationReport& report;

    const std::string& raw(const std::string& name) const {
        return row.fields[static_cast<size_t>(file.column(name))];
    }

    // Each reader returns true when the value parsed and passed its domain
    // check; every failure is recorded against (file, line, column).
    bool text(const std::string& name, std::string& out) const {
        out = trimmed(raw(name));
        if (out.empty()) {
            report.add_error(file.path, row.line, name, "blank_cell", "value is blank");
            return false;
        }
        return true;
    }

    bool number(const std::string& name, double& out) const {
        switch (parse_double(raw(name), out)) {
        case ParseStatus::kOk: return true;
        case ParseStatus::kBlank:
            report.add_error(file.path, row.line, name, "blank_cell", "value is blank");
            return false;
        default:
            report.add_error(file.path, row.line, name, "malformed_number",
                             "'" + trimmed(raw(name)) + "' is not a number");
            return false;
        }
    }

    bool integer(const std::string& name, long long& out) const {
        switch (parse_integer(raw(name), out)) {
        case ParseStatus::kOk: return true;
        case ParseStatus::kBlank:
            report.add_error(file.path, row.line, name, "blank_cell", "value is blank");
            return false;
        default:
            report.add_error(file.path, row.line, name, "malformed_number",
                             "'" + trimmed(raw(name)) + "' is not an integer");
            return false;
        }
    }

    bool positive(const std::string& name, double& out) const {
        if (!number(name, out)) return false;
        if (!(out > 0.0)) {
            report.add_error(file.path, row.line, name, "nonpositive_value",
                             "'" + name + "' must be > 0, got " + format_double(out));
            return false;
        }
        return true;
    }

    bool nonnegative(const std::string& name, double& out) const {
        if (!number(name, out)) return false;
        if (out < 0.0) {
            report.add_error(file.path, row.line, name, "negative_value",
                             "'" + name + "' must be >= 0, got " + format_double(out));
            return false;
        }
        return true;
    }

    bool unit_interval(const std::string& name, double& out) const {
        if (!number(name, out)) return false;
        if (out < 0.0 || out > 1.0) {
            report.add_error(file.path, row.line, name, "out_of_range",
                             "'" + name + "' must be in [0, 1], got " + format_double(out));
            return false;
        }
        return true;
    }
};

struct CatalogData {
    std::map<std::string, VehicleModel> models;        // keyed by model_id
    std::map<std::string, long> first_row_of_model;    // for mu/name mismatch reporting
    bool file_ok = false;
};

CatalogData load_catalog(const std::filesystem::path& path, ValidationReport& report) {
    CatalogData data;
    auto file = read_csv(path, report);
    if (!file) return data;
    if (!check_required_columns(*file, kCatalogColumns, report)) return data;
    data.file_ok = true;
    for (const auto& name : file->header) {
        if (std::find(kCatalogColumns.begin(), kCatalogColumns.end(), name) ==
            kCatalogColumns.end()) {
            report.add_error(file->path, 1, name, "unknown_column",
                             "unexpected column '" + name + "'");
        }
    }

    std::set<std::tuple<std::string, std::string, long long>> variant_keys;
    for (const auto& row : file->rows) {
        FieldReader read{*file, row, report};
        std::string model_id, model_name, variant_id;
        long long year = 0;
        double be = 0, naer = 0, gi = 0, weight = 0, mu_e = 0, mu_g = 0;

        bool ok = read.text("model_id", model_id);
        ok &= read.text("model_name", model_name);
        ok &= read.text("variant_id", variant_id);
        ok &= read.integer("year", year);
        ok &= read.positive("battery_energy_kwh", be);
        ok &= read.positive("nedc_aer_km", naer);
        ok &= read.nonnegative("gasoline_l_per_100km", gi);
        ok &= read.nonnegative("popularity_weight", weight);
        ok &= read.unit_interval("mu_electric", mu_e);
        ok &= read.unit_interval("mu_gasoline", mu_g);
        if (!ok) continue;

        if (!variant_keys.insert({model_id, variant_id, year}).second) {
            report.add_error(file->path, row.line, "variant_id", "duplicate_key",
                             "duplicate variant (model '" + model_id + "', variant '" + variant_id +
                                 "', year " + std::to_string(year) + ")");
            continue;
        }

        auto [it, inserted] = data.models.try_emplace(model_id);
        VehicleModel& model = it->second;
        if (inserted) {
            model.model_id = model_id;
            model.name = model_name;
            model.mu_electric = mu_e;
            model.mu_gasoline = mu_g;
            data.first_row_of_model[model_id] = row.line;
            if (std::abs(mu_e + mu_g - 1.0) > kSplitTolerance) {
                report.add_error(file->path, row.line, "mu_electric", "mu_sum_violation",
                                 "mu_electric + mu_gasoline = " + format_double(mu_e + mu_g) +
                                     " for model '" + model_id + "' (must sum to 1)");
            }
        } else {
            if (model.name != model_name) {
                report.add_error(file->path, row.line, "model_name", "name_mismatch",
                                 "model '" + model_id + "' named '" + model_name +
                                     "' here but '" + model.name + "' on line " +
                                     std::to_string(data.first_row_of_model[model_id]));
            }
            if (model.mu_electric != mu_e || model.mu_gasoline != mu_g) {
                report.add_error(file->path, row.line, "mu_electric", "mu_mismatch",
                                 "mu values for model '" + model_id +
                                     "' disagree with line " +
                                     std::to_string(data.first_row_of_model[model_id]));
            }
        }
        model.variants.push_back(VehicleVariant{.variant_id = variant_id,
                                                .year = static_cast<int>(year),
                                                .battery_energy_kwh = be,
                                                .nedc_aer_km = naer,
                                                .gasoline_intensity_l_per_100km = gi,
                                                .popularity_weight = weight});
    }

    // Weight vectors are normalized per (model, year) at compute time; an
    // all-zero vector cannot be.
    for (const auto& [model_id, model] : data.models) {
        std::map<int, double> weight_sums;
        for (const auto& v : model.variants) weight_sums[v.year] += v.popularity_weight;
        for (const auto& [year, sum] : weight_sums) {
            if (sum <= 0.0) {
                report.add_error(file->path, data.first_row_of_model[model_id],
                                 "popularity_weight", "degenerate_weights",
                                 "weights of model '" + model_id + "' for year " +
                                     std::to_string(year) + " sum to 0");
            }
        }
    }
    return data;
}

} // namespace

// ---------------------------------------------------------------------------

void ValidationReport::add_error(std::string file, long row, std::string field, std::string code,
                                 std::string message) {
    errors.push_back(ValidationIssue{std::move(file), row, std::move(field), std::move(code),
                                     std::move(message)});
}

void ValidationReport::add_warning(std::string file, long row, std::string field, std::string code,
                                   std::string message) {
    warnings.push_back(ValidationIssue{std::move(file), row, std::move(field), std::move(code),
                                       std::move(message)});
}

void ValidationReport::merge(ValidationReport other) {
    errors.insert(errors.end(), std::make_move_iterator(other.errors.begin()),
                  std::make_move_iterator(other.errors.end()));
    warnings.insert(warnings.end(), std::make_move_iterator(other.warnings.begin()),
                    std::make_move_iterator(other.warnings.end()));
}

namespace {

struct ContextsData {
    std::vector<RegionYearContext> contexts;                   // file order
    std::map<std::pair<std::string, int>, size_t> index;       // (region, year) -> position
    std::map<std::pair<std::string, int>, long> rows;          // for error attribution
    std::vector<std::string> wide_sales_models;                // from sales_<id> columns
    bool file_ok = false;
};

ContextsData load_contexts(const std::filesystem::path& path, ValidationReport& report) {
    ContextsData data;
    auto file = read_csv(path, report);
    if (!file) return data;
    if (!check_required_columns(*file, kContextColumns, report)) return data;
    data.file_ok = true;

    std::vector<std::pair<std::string, std::string>> sales_columns; // column name, model_id
    for (const auto& name : file->header) {
        if (std::find(kContextColumns.begin(), kContextColumns.end(), name) !=
            kContextColumns.end()) {
            continue;
        }
        if (name.rfind(kSalesColumnPrefix, 0) == 0 &&
            name.size() > std::string(kSalesColumnPrefix).size()) {
            const std::string model_id = name.substr(std::string(kSalesColumnPrefix).size());
            sales_columns.emplace_back(name, model_id);
            data.wide_sales_models.push_back(model_id);
        } else {
            report.add_error(file->path, 1, name, "unknown_column",
                             "unexpected column '" + name + "'");
        }
    }

    std::map<std::string, std::pair<std::string, long>> region_names; // code -> (name, line)
    for (const auto& row : file->rows) {
        FieldReader read{*file, row, report};
        std::string code, name;
        long long year = 0;
        double avkt = 0, gf_default = 0, gf_upper = 0;

        bool ok = read.text("region_code", code);
        ok &= read.text("region_name", name);
        ok &= read.integer("year", year);
        ok &= read.nonnegative("avkt_km", avkt);
        ok &= read.positive("grid_factor_default_kgco2_per_kwh", gf_default);
        ok &= read.positive("grid_factor_upper_kgco2_per_kwh", gf_upper);
        if (!ok) continue;

        if (code == kNationwideRegionCode) {
            report.add_error(file->path, row.line, "region_code", "reserved_region",
                             "region code 'T' is reserved for the nationwide rollup");
            continue;
        }
        if (gf_default > gf_upper) {
            report.add_error(file->path, row.line, "grid_factor_default_kgco2_per_kwh",
                             "bound_order_violation",
                             "grid factor default " + format_double(gf_default) +
                                 " exceeds upper " + format_double(gf_upper));
            continue;
        }
        auto name_it = region_names.find(code);
        if (name_it == region_names.end()) {
            region_names[code] = {name, row.line};
        } else if (name_it->second.first != name) {
            report.add_error(file->path, row.line, "region_name", "name_mismatch",
                             "region '" + code + "' named '" + name + "' here but '" +
                                 name_it->second.first + "' on line " +
                                 std::to_string(name_it->second.second));
        }

        const std::pair<std::string, int> key{code, static_cast<int>(year)};
        if (data.index.count(key) > 0) {
            report.add_error(file->path, row.line, "region_code", "duplicate_key",
                             "duplicate context (region '" + code + "', year " +
                                 std::to_string(year) + ")");
            continue;
        }

        RegionYearContext ctx;
        ctx.region = Region{code, name};
        ctx.year = static_cast<int>(year);
        ctx.avkt_km = avkt;
        ctx.grid_factor_kgco2_per_kwh = GridFactorPair{gf_default, gf_upper};
        for (const auto& [column, model_id] : sales_columns) {
            long long units = 0;
            if (!read.integer(column, units)) continue;
            if (units < 0) {
                report.add_error(file->path, row.line, column, "negative_value",
                                 "sales must be >= 0, got " + std::to_string(units));
                continue;
            }
            ctx.sales[model_id] = units;
        }
        data.rows[key] = row.line;
        data.index[key] = data.contexts.size();
        data.contexts.push_back(std::move(ctx));
    }
    return data;
}

void load_long_sales(const std::filesystem::path& path, ContextsData& contexts,
                     ValidationReport& report) {
    auto file = read_csv(path, report);
    if (!file) return;
    if (!check_required_columns(*file, kSalesColumns, report)) return;
    for (const auto& name : file->header) {
        if (std::find(kSalesColumns.begin(), kSalesColumns.end(), name) == kSalesColumns.end()) {
            report.add_error(file->path, 1, name, "unknown_column",
                             "unexpected column '" + name + "'");
        }
    }

    std::set<std::tuple<std::string, int, std::string>> seen;
    for (const auto& row : file->rows) {
        FieldReader read{*file, row, report};
        std::string region_code, model_id;
        long long year = 0, units = 0;
        bool ok = read.text("region_code", region_code);
        ok &= read.integer("year", year);
        ok &= read.text("model_id", model_id);
        ok &= read.integer("units", units);
        if (!ok) continue;

        if (units < 0) {
            report.add_error(file->path, row.line, "units", "negative_value",
                             "sales must be >= 0, got " + std::to_string(units));
            continue;
        }
        const std::pair<std::string, int> key{region_code, static_cast<int>(year)};
        auto it = contexts.index.find(key);
        if (it == contexts.index.end()) {
            report.add_error(file->path, row.line, "region_code", "dangling_reference",
                             "no context declared for region '" + region_code + "', year " +
                                 std::to_string(year));
            continue;
        }
        if (!seen.insert({region_code, static_cast<int>(year), model_id}).second) {
            report.add_error(file->path, row.line, "model_id", "duplicate_key",
                             "duplicate sales entry (region '" + region_code + "', year " +
                                 std::to_string(year) + ", model '" + model_id + "')");
            continue;
        }
        contexts.contexts[it->second].sales[model_id] = units;
    }
}

bool read_positive_constant(const ordered_json& doc, const std::string& key, bool required,
                            const std::string& path, double& out, ValidationReport& report) {
    if (!doc.contains(key)) {
        if (required) {
            report.add_error(path, 0, key, "missing_key",
                             "required key '" + key + "' is missing");
        }
        return false;
    }
    if (!doc[key].is_number()) {
        report.add_error(path, 0, key, "malformed_number", "'" + key + "' must be a number");
        return false;
    }
    const double value = doc[key].get<double>();
    if (!std::isfinite(value) || !(value > 0.0)) {
        report.add_error(path, 0, key, "nonpositive_value", "'" + key + "' must be > 0");
        return false;
    }
    out = value;
    return true;
}

void load_constants(const std::filesystem::path& path, Constants& constants,
                    DatasetMetadata& metadata, ValidationReport& report) {
    std::ifstream in(path);
    if (!in) {
        report.add_error(path.string(), 0, "", "io_error", "cannot open file");
        return;
    }
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        report.add_error(path.string(), 0, "", "malformed_file", e.what());
        return;
    }
    if (!doc.is_object()) {
        report.add_error(path.string(), 0, "", "malformed_file", "top level must be an object");
        return;
    }
    const std::string file = path.string();

    static const std::set<std::string> known_keys = {
        "eta", "rho_kg_per_l", "zeta_e_tj_per_kwh", "zeta_g_tj_per_kg",
        "gasoline_factor_kgco2_per_tj", "metadata"};
    for (const auto& [key, value] : doc.items()) {
        if (known_keys.count(key) == 0) {
            report.add_error(file, 0, key, "unknown_key", "unexpected key '" + key + "'");
        }
    }

    if (doc.contains("eta")) {
        if (!doc["eta"].is_number()) {
            report.add_error(file, 0, "eta", "malformed_number", "'eta' must be a number");
        } else {
            const double eta = doc["eta"].get<double>();
            if (!std::isfinite(eta) || !(eta > 0.0) || eta > 1.0) {
                report.add_error(file, 0, "eta", "out_of_range", "'eta' must be in (0, 1]");
            } else {
                constants.eta = eta;
            }
        }
    }
    read_positive_constant(doc, "rho_kg_per_l", false, file, constants.rho_kg_per_l, report);
    read_positive_constant(doc, "zeta_e_tj_per_kwh", false, file, constants.zeta_e_tj_per_kwh,
                           report);
    read_positive_constant(doc, "zeta_g_tj_per_kg", true, file, constants.zeta_g_tj_per_kg, report);

    if (!doc.contains("gasoline_factor_kgco2_per_tj")) {
        report.add_error(file, 0, "gasoline_factor_kgco2_per_tj", "missing_key",
                         "required key 'gasoline_factor_kgco2_per_tj' is missing");
    } else if (!doc["gasoline_factor_kgco2_per_tj"].is_object()) {
        report.add_error(file, 0, "gasoline_factor_kgco2_per_tj", "malformed_file",
                         "'gasoline_factor_kgco2_per_tj' must be an object with lower/default/upper");
    } else {
        const auto& triple = doc["gasoline_factor_kgco2_per_tj"];
        for (const auto& [key, value] : triple.items()) {
            if (key != "lower" && key != "default" && key != "upper") {
                report.add_error(file, 0, "gasoline_factor_kgco2_per_tj." + key, "unknown_key",
                                 "unexpected key '" + key + "'");
            }
        }
        double lower = 0, def = 0, upper = 0;
        bool ok = read_positive_constant(triple, "lower", true, file, lower, report);
        ok &= read_positive_constant(triple, "default", true, file, def, report);
        ok &= read_positive_constant(triple, "upper", true, file, upper, report);
        if (ok) {
            if (!(lower <= def && def <= upper)) {
                report.add_error(file, 0, "gasoline_factor_kgco2_per_tj", "bound_order_violation",
                                 "gasoline factors must satisfy lower <= default <= upper");
            } else {
                constants.gasoline_factor_kgco2_per_tj = FactorTriple{lower, def, upper};
            }
        }
    }

    if (doc.contains("metadata")) {
        if (!doc["metadata"].is_object()) {
            report.add_error(file, 0, "metadata", "malformed_file", "'metadata' must be an object");
        } else {
            for (const auto& [key, value] : doc["metadata"].items()) {
                if (key != "version" && key != "notes") {
                    report.add_error(file, 0, "metadata." + key, "unknown_key",
                                     "unexpected key '" + key + "'");
                } else if (!value.is_string()) {
                    report.add_error(file, 0, "metadata." + key, "malformed_file",
                                     "'metadata." + key + "' must be a string");
                }
            }
            const auto& meta = doc["metadata"];
            if (meta.contains("version") && meta["version"].is_string()) {
                metadata.version = meta["version"].get<std::string>();
            }
            if (meta.contains("notes") && meta["notes"].is_string()) {
                metadata.notes = meta["notes"].get<std::string>();
            }
        }
    }
}

bool model_has_variants_for_year(const VehicleModel& model, int year) {
    return std::any_of(model.variants.begin(), model.variants.end(),
                       [year](const VehicleVariant& v) { return v.year == year; });
}

} // namespace

LoadResult load_dataset(const std::filesystem::path& catalog_path,
                        const std::filesystem::path& contexts_path,
                        const std::filesystem::path& constants_path) {
    LoadResult result;
    ValidationReport& report = result.report;

    CatalogData catalog = load_catalog(catalog_path, report);
    ContextsData contexts = load_contexts(contexts_path, report);

    const std::filesystem::path sales_path = contexts_path.parent_path() / "sales.csv";
    const bool has_wide = !contexts.wide_sales_models.empty();
    const bool has_long = std::filesystem::exists(sales_path);
    if (!contexts.file_ok) {
        // No usable contexts; a sales-source finding would only be noise.
    } else if (has_wide && has_long) {
        report.add_error(contexts_path.string(), 1, "", "sales_source_conflict",
                         "contexts file declares sales_* columns but '" + sales_path.string() +
                             "' also exists; provide exactly one sales source");
    } else if (!has_wide && !has_long) {
        report.add_error(contexts_path.string(), 1, "", "missing_sales",
                         "no sales_* columns and no companion file '" + sales_path.string() + "'");
    } else if (has_long) {
        load_long_sales(sales_path, contexts, report);
    }

    Constants constants;
    DatasetMetadata metadata;
    load_constants(constants_path, constants, metadata, report);

    // Cross-references: every sales key must name a cataloged model with
    // variants for the context year when units are positive. Skipped when
    // the catalog itself did not parse; those findings would be derived
    // noise.
    for (const auto& ctx : contexts.contexts) {
        if (!catalog.file_ok) break;
        const long ctx_row = contexts.rows.count({ctx.region.code, ctx.year}) > 0
                                 ? contexts.rows.at({ctx.region.code, ctx.year})
                                 : 0;
        for (const auto& [model_id, units] : ctx.sales) {
            auto it = catalog.models.find(model_id);
            if (it == catalog.models.end()) {
                report.add_error(contexts_path.string(), ctx_row, "model_id", "dangling_reference",
                                 "sales reference undeclared model '" + model_id + "' (region '" +
                                     ctx.region.code + "', year " + std::to_string(ctx.year) + ")");
                continue;
            }
            if (units > 0 && !model_has_variants_for_year(it->second, ctx.year)) {
                report.add_error(contexts_path.string(), ctx_row, "model_id", "dangling_reference",
                                 "model '" + model_id + "' has sales but no variants for year " +
                                     std::to_string(ctx.year) + " (region '" + ctx.region.code +
                                     "')");
            }
        }
    }

    if (!report.ok()) return result;

    Dataset dataset;
    dataset.constants = constants;
    dataset.metadata = metadata;
    dataset.models.reserve(catalog.models.size());
    for (auto& [model_id, model] : catalog.models) {
        std::sort(model.variants.begin(), model.variants.end(),
                  [](const VehicleVariant& a, const VehicleVariant& b) {
                      return std::tie(a.year, a.variant_id) < std::tie(b.year, b.variant_id);
                  });
        dataset.models.push_back(std::move(model));
    }
    dataset.contexts = std::move(contexts.contexts);
    std::sort(dataset.contexts.begin(), dataset.contexts.end(),
              [](const RegionYearContext& a, const RegionYearContext& b) {
                  return std::tie(a.region.code, a.year) < std::tie(b.region.code, b.year);
              });

    report.merge(validate_dataset(dataset));
    if (!report.ok()) return result;
    result.dataset = std::move(dataset);
    return result;
}

ValidationReport validate_dataset(const Dataset& dataset) {
    ValidationReport report;
    const std::string file = "dataset";

    std::set<std::string> model_ids;
    for (const auto& model : dataset.models) {
        if (model.model_id.empty()) {
            report.add_error(file, 0, "model_id", "blank_cell", "model_id is empty");
            continue;
        }
        if (!model_ids.insert(model.model_id).second) {
            report.add_error(file, 0, "model_id", "duplicate_key",
                             "duplicate model '" + model.model_id + "'");
            continue;
        }
        if (model.variants.empty()) {
            report.add_error(file, 0, "variants", "empty_variants",
                             "model '" + model.model_id + "' has no variants");
            continue;
        }
        if (model.mu_electric < 0.0 || model.mu_electric > 1.0 || model.mu_gasoline < 0.0 ||
            model.mu_gasoline > 1.0) {
            report.add_error(file, 0, "mu_electric", "out_of_range",
                             "mu values of model '" + model.model_id + "' must be in [0, 1]");
        } else if (std::abs(model.mu_electric + model.mu_gasoline - 1.0) > kSplitTolerance) {
            report.add_error(file, 0, "mu_electric", "mu_sum_violation",
                             "mu_electric + mu_gasoline = " +
                                 format_double(model.mu_electric + model.mu_gasoline) +
                                 " for model '" + model.model_id + "' (must sum to 1)");
        }

        std::set<std::pair<int, std::string>> variant_keys;
        std::map<int, double> weight_sums;
        for (const auto& v : model.variants) {
            if (v.variant_id.empty()) {
                report.add_error(file, 0, "variant_id", "blank_cell",
                                 "variant of model '" + model.model_id + "' has empty variant_id");
            } else if (!variant_keys.insert({v.year, v.variant_id}).second) {
                report.add_error(file, 0, "variant_id", "duplicate_key",
                                 "duplicate variant (model '" + model.model_id + "', variant '" +
                                     v.variant_id + "', year " + std::to_string(v.year) + ")");
            }
            if (!(v.battery_energy_kwh > 0.0) || !std::isfinite(v.battery_energy_kwh)) {
                report.add_error(file, 0, "battery_energy_kwh", "nonpositive_value",
                                 "battery_energy_kwh must be > 0 (model '" + model.model_id +
                                     "', variant '" + v.variant_id + "')");
            }
            if (!(v.nedc_aer_km > 0.0) || !std::isfinite(v.nedc_aer_km)) {
                report.add_error(file, 0, "nedc_aer_km", "nonpositive_value",
                                 "nedc_aer_km must be > 0 (model '" + model.model_id +
                                     "', variant '" + v.variant_id + "')");
            }
            if (v.gasoline_intensity_l_per_100km < 0.0 ||
                !std::isfinite(v.gasoline_intensity_l_per_100km)) {
                report.add_error(file, 0, "gasoline_l_per_100km", "negative_value",
                                 "gasoline_l_per_100km must be >= 0 (model '" + model.model_id +
                                     "', variant '" + v.variant_id + "')");
            }
            if (v.popularity_weight < 0.0 || !std::isfinite(v.popularity_weight)) {
                report.add_error(file, 0, "popularity_weight", "negative_value",
                                 "popularity_weight must be >= 0 (model '" + model.model_id +
                                     "', variant '" + v.variant_id + "')");
            }
            weight_sums[v.year] += v.popularity_weight;
        }
        for (const auto& [year, sum] : weight_sums) {
            if (sum <= 0.0) {
                report.add_error(file, 0, "popularity_weight", "degenerate_weights",
                                 "weights of model '" + model.model_id + "' for year " +
                                     std::to_string(year) + " sum to 0");
            } else if (std::abs(sum - 1.0) > kWeightSumWarnTolerance) {
                report.add_warning(file, 0, "popularity_weight", "weight_sum_normalized",
                                   "weights of model '" + model.model_id + "' for year " +
                                       std::to_string(year) + " sum to " + format_double(sum) +
                                       "; normalized internally");
            }
        }
    }

    std::set<std::pair<std::string, int>> context_keys;
    std::map<std::string, std::string> region_names;
    for (const auto& ctx : dataset.contexts) {
        if (ctx.region.code.empty()) {
            report.add_error(file, 0, "region_code", "blank_cell", "region code is empty");
            continue;
        }
        if (ctx.region.code == kNationwideRegionCode) {
            report.add_error(file, 0, "region_code", "reserved_region",
                             "region code 'T' is reserved for the nationwide rollup");
            continue;
        }
        if (!context_keys.insert({ctx.region.code, ctx.year}).second) {
            report.add_error(file, 0, "region_code", "duplicate_key",
                             "duplicate context (region '" + ctx.region.code + "', year " +
                                 std::to_string(ctx.year) + ")");
            continue;
        }
        auto name_it = region_names.find(ctx.region.code);
        if (name_it == region_names.end()) {
            region_names[ctx.region.code] = ctx.region.name;
        } else if (name_it->second != ctx.region.name) {
            report.add_error(file, 0, "region_name", "name_mismatch",
                             "region '" + ctx.region.code + "' declared with differing names");
        }
        if (ctx.avkt_km < 0.0 || !std::isfinite(ctx.avkt_km)) {
            report.add_error(file, 0, "avkt_km", "negative_value",
                             "avkt_km must be >= 0 (region '" + ctx.region.code + "', year " +
                                 std::to_string(ctx.year) + ")");
        }
        const auto& grid = ctx.grid_factor_kgco2_per_kwh;
        if (!(grid.default_value > 0.0) || !(grid.upper > 0.0) ||
            !std::isfinite(grid.default_value) || !std::isfinite(grid.upper)) {
            report.add_error(file, 0, "grid_factor_default_kgco2_per_kwh", "nonpositive_value",
                             "grid factors must be > 0 (region '" + ctx.region.code + "', year " +
                                 std::to_string(ctx.year) + ")");
        } else if (grid.default_value > grid.upper) {
            report.add_error(file, 0, "grid_factor_default_kgco2_per_kwh", "bound_order_violation",
                             "grid factor default exceeds upper (region '" + ctx.region.code +
                                 "', year " + std::to_string(ctx.year) + ")");
        }
        for (const auto& [model_id, units] : ctx.sales) {
            if (units < 0) {
                report.add_error(file, 0, "units", "negative_value",
                                 "sales must be >= 0 (model '" + model_id + "', region '" +
                                     ctx.region.code + "', year " + std::to_string(ctx.year) + ")");
            }
            const VehicleModel* model = nullptr;
            for (const auto& m : dataset.models) {
                if (m.model_id == model_id) {
                    model = &m;
                    break;
                }
            }
            if (model == nullptr) {
                report.add_error(file, 0, "model_id", "dangling_reference",
                                 "sales reference undeclared model '" + model_id + "' (region '" +
                                     ctx.region.code + "', year " + std::to_string(ctx.year) + ")");
            } else if (units > 0 && !model_has_variants_for_year(*model, ctx.year)) {
                report.add_error(file, 0, "model_id", "dangling_reference",
                                 "model '" + model_id + "' has sales but no variants for year " +
                                     std::to_string(ctx.year) + " (region '" + ctx.region.code +
                                     "')");
            }
        }
    }

    const Constants& c = dataset.constants;
    if (!(c.eta > 0.0) || c.eta > 1.0 || !std::isfinite(c.eta)) {
        report.add_error(file, 0, "eta", "out_of_range", "eta must be in (0, 1]");
    }
    if (!(c.rho_kg_per_l > 0.0) || !std::isfinite(c.rho_kg_per_l)) {
        report.add_error(file, 0, "rho_kg_per_l", "nonpositive_value", "rho_kg_per_l must be > 0");
    }
    if (!(c.zeta_e_tj_per_kwh > 0.0) || !std::isfinite(c.zeta_e_tj_per_kwh)) {
        report.add_error(file, 0, "zeta_e_tj_per_kwh", "nonpositive_value",
                         "zeta_e_tj_per_kwh must be > 0");
    }
    if (!(c.zeta_g_tj_per_kg > 0.0) || !std::isfinite(c.zeta_g_tj_per_kg)) {
        report.add_error(file, 0, "zeta_g_tj_per_kg", "nonpositive_value",
                         "zeta_g_tj_per_kg must be > 0 and supplied by the constants file");
    }
    const auto& fg = c.gasoline_factor_kgco2_per_tj;
    if (!(fg.lower > 0.0) || !(fg.default_value > 0.0) || !(fg.upper > 0.0)) {
        report.add_error(file, 0, "gasoline_factor_kgco2_per_tj", "nonpositive_value",
                         "gasoline factors must be > 0 and supplied by the constants file");
    } else if (!(fg.lower <= fg.default_value && fg.default_value <= fg.upper)) {
        report.add_error(file, 0, "gasoline_factor_kgco2_per_tj", "bound_order_violation",
                         "gasoline factors must satisfy lower <= default <= upper");
    }
    return report;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);

    {
        std::ofstream out(directory / "catalog.csv");
        if (!out) throw std::runtime_error("cannot write " + (directory / "catalog.csv").string());
        for (size_t i = 0; i < kCatalogColumns.size(); ++i) {
            out << (i ? "," : "") << kCatalogColumns[i];
        }
        out << "\n";
        auto models = dataset.models;
        std::sort(models.begin(), models.end(),
                  [](const VehicleModel& a, const VehicleModel& b) {
                      return a.model_id < b.model_id;
                  });
        for (const auto& model : models) {
            auto variants = model.variants;
            std::sort(variants.begin(), variants.end(),
                      [](const VehicleVariant& a, const VehicleVariant& b) {
                          return std::tie(a.year, a.variant_id) < std::tie(b.year, b.variant_id);
                      });
            for (const auto& v : variants) {
                out << csv_escaped(model.model_id) << ',' << csv_escaped(model.name) << ','
                    << csv_escaped(v.variant_id) << ',' << v.year << ','
                    << format_double(v.battery_energy_kwh) << ',' << format_double(v.nedc_aer_km)
                    << ',' << format_double(v.gasoline_intensity_l_per_100km) << ','
                    << format_double(v.popularity_weight) << ','
                    << format_double(model.mu_electric) << ',' << format_double(model.mu_gasoline)
                    << "\n";
            }
        }
    }

    auto contexts = dataset.contexts;
    std::sort(contexts.begin(), contexts.end(),
              [](const RegionYearContext& a, const RegionYearContext& b) {
                  return std::tie(a.region.code, a.year) < std::tie(b.region.code, b.year);
              });
    {
        std::ofstream out(directory / "contexts.csv");
        if (!out) throw std::runtime_error("cannot write " + (directory / "contexts.csv").string());
        for (size_t i = 0; i < kContextColumns.size(); ++i) {
            out << (i ? "," : "") << kContextColumns[i];
        }
        out << "\n";
        for (const auto& ctx : contexts) {
            out << csv_escaped(ctx.region.code) << ',' << csv_escaped(ctx.region.name) << ','
                << ctx.year << ',' << format_double(ctx.avkt_km) << ','
                << format_double(ctx.grid_factor_kgco2_per_kwh.default_value) << ','
                << format_double(ctx.grid_factor_kgco2_per_kwh.upper) << "\n";
        }
    }
    {
        std::ofstream out(directory / "sales.csv");
        if (!out) throw std::runtime_error("cannot write " + (directory / "sales.csv").string());
        out << "region_code,year,model_id,units\n";
        for (const auto& ctx : contexts) {
            for (const auto& [model_id, units] : ctx.sales) {
                out << csv_escaped(ctx.region.code) << ',' << ctx.year << ','
                    << csv_escaped(model_id) << ',' << units << "\n";
            }
        }
    }
    {
        ordered_json doc;
        doc["eta"] = dataset.constants.eta;
        doc["rho_kg_per_l"] = dataset.constants.rho_kg_per_l;
        doc["zeta_e_tj_per_kwh"] = dataset.constants.zeta_e_tj_per_kwh;
        doc["zeta_g_tj_per_kg"] = dataset.constants.zeta_g_tj_per_kg;
        doc["gasoline_factor_kgco2_per_tj"] = {
            {"lower", dataset.constants.gasoline_factor_kgco2_per_tj.lower},
            {"default", dataset.constants.gasoline_factor_kgco2_per_tj.default_value},
            {"upper", dataset.constants.gasoline_factor_kgco2_per_tj.upper}};
        doc["metadata"] = {{"version", dataset.metadata.version},
                           {"notes", dataset.metadata.notes}};
        std::ofstream out(directory / "constants.json");
        if (!out) {
            throw std::runtime_error("cannot write " + (directory / "constants.json").string());
        }
        out << doc.dump(2) << "\n";
    }
}

} // namespace fleetcarbon
