#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "homebias/ingest.hpp"

namespace homebias {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    cells.push_back(cell);
    return cells;
}

struct CsvRow {
    int line = 0;
    std::vector<std::string> cells;
};

/// Reads a header-bearing CSV. The header must match `header` exactly.
/// Rows with the wrong cell count are reported and skipped.
std::vector<CsvRow> read_csv(const std::filesystem::path& path,
                             const std::vector<std::string>& header,
                             std::vector<SchemaError>& errors) {
    std::ifstream in(path);
    if (!in) {
        errors.push_back({path.string(), 0, "", "cannot open file"});
        return {};
    }
    std::vector<CsvRow> rows;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (!header_seen) {
            header_seen = true;
            if (cells != header) {
                std::string expected;
                for (std::size_t i = 0; i < header.size(); ++i) {
                    if (i) expected += ",";
                    expected += header[i];
                }
                errors.push_back({path.string(), lineno, "header",
                                  "header must be exactly '" + expected + "'"});
                return {};
            }
            continue;
        }
        if (cells.size() != header.size()) {
            errors.push_back({path.string(), lineno, "",
                              "expected " + std::to_string(header.size()) + " cells, got " +
                                  std::to_string(cells.size())});
            continue;
        }
        rows.push_back({lineno, std::move(cells)});
    }
    if (!header_seen) {
        errors.push_back({path.string(), 1, "header", "file has no header row"});
    }
    return rows;
}

struct CellContext {
    const std::filesystem::path& path;
    int line;
    std::vector<SchemaError>& errors;

    void fail(const std::string& column, const std::string& rule) const {
        errors.push_back({path.string(), line, column, rule});
    }
};

std::optional<double> parse_double(const CellContext& ctx, const std::string& cell,
                                   const std::string& column) {
    const std::string v = trim(cell);
    if (v.empty()) {
        ctx.fail(column, "value required");
        return std::nullopt;
    }
    double out = 0.0;
    const char* begin = v.data();
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(begin, end, out, std::chars_format::general);
    if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
        ctx.fail(column, "not a number");
        return std::nullopt;
    }
    return out;
}

std::optional<double> parse_optional_double(const CellContext& ctx, const std::string& cell,
                                            const std::string& column, bool& bad) {
    if (trim(cell).empty()) return std::nullopt;
    auto v = parse_double(ctx, cell, column);
    if (!v) bad = true;
    return v;
}

std::optional<long> parse_long(const CellContext& ctx, const std::string& cell,
                               const std::string& column) {
    const std::string v = trim(cell);
    if (v.empty()) {
        ctx.fail(column, "value required");
        return std::nullopt;
    }
    long out = 0;
    const char* begin = v.data();
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) {
        ctx.fail(column, "not an integer");
        return std::nullopt;
    }
    return out;
}

std::optional<int> parse_year(const CellContext& ctx, const std::string& cell) {
    auto v = parse_long(ctx, cell, "year");
    if (!v) return std::nullopt;
    if (*v < 1000 || *v > 9999) {
        ctx.fail("year", "year out of range");
        return std::nullopt;
    }
    return static_cast<int>(*v);
}

std::optional<bool> parse_dummy(const CellContext& ctx, const std::string& cell,
                                const std::string& column, bool& bad) {
    const std::string v = trim(cell);
    if (v.empty()) return std::nullopt;
    if (v == "0") return false;
    if (v == "1") return true;
    ctx.fail(column, "dummy must be 0 or 1");
    bad = true;
    return std::nullopt;
}

std::optional<std::string> parse_country(const CellContext& ctx, const std::string& cell) {
    const std::string v = trim(cell);
    if (!is_valid_iso(v)) {
        ctx.fail("country", "must be 3 uppercase letters");
        return std::nullopt;
    }
    return v;
}

std::optional<YearMonth> parse_year_month(const CellContext& ctx, const std::string& cell) {
    const std::string v = trim(cell);
    const bool shaped = v.size() == 7 && v[4] == '-' &&
                        std::all_of(v.begin(), v.begin() + 4, ::isdigit) &&
                        std::isdigit(static_cast<unsigned char>(v[5])) &&
                        std::isdigit(static_cast<unsigned char>(v[6]));
    if (!shaped) {
        ctx.fail("year_month", "must be YYYY-MM");
        return std::nullopt;
    }
    YearMonth ym{std::stoi(v.substr(0, 4)), std::stoi(v.substr(5, 2))};
    if (ym.month < 1 || ym.month > 12) {
        ctx.fail("year_month", "month must be in 01..12");
        return std::nullopt;
    }
    return ym;
}

void throw_if_errors(std::vector<SchemaError>& errors) {
    if (!errors.empty()) throw SchemaException(std::move(errors));
}

std::string double_to_string(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

std::vector<HoldingsRecord> load_holdings(const std::filesystem::path& path) {
    std::vector<SchemaError> errors;
    const auto rows =
        read_csv(path, {"country", "year", "domestic", "foreign", "funds", "aggregate"}, errors);
    std::vector<HoldingsRecord> records;
    std::set<std::pair<std::string, int>> seen;
    for (const auto& row : rows) {
        CellContext ctx{path, row.line, errors};
        auto country = parse_country(ctx, row.cells[0]);
        auto year = parse_year(ctx, row.cells[1]);
        auto domestic = parse_double(ctx, row.cells[2], "domestic");
        auto foreign = parse_double(ctx, row.cells[3], "foreign");
        auto funds = parse_double(ctx, row.cells[4], "funds");
        bool bad_aggregate = false;
        auto aggregate = parse_optional_double(ctx, row.cells[5], "aggregate", bad_aggregate);
        if (!country || !year || !domestic || !foreign || !funds || bad_aggregate) continue;
        if (!seen.insert({*country, *year}).second) {
            ctx.fail("country", "duplicate (country, year) row");
            continue;
        }
        HoldingsRecord r;
        r.country = *country;
        r.year = *year;
        r.domestic_assets = *domestic;
        r.foreign_assets = *foreign;
        r.investment_funds = *funds;
        r.aggregate_assets = aggregate ? *aggregate : *domestic + *foreign + *funds;
        records.push_back(std::move(r));
    }
    throw_if_errors(errors);
    return records;
}

std::vector<MonthlySeries> load_monthly_series(const std::filesystem::path& path,
                                               SeriesKind kind) {
    std::vector<SchemaError> errors;
    const auto rows = read_csv(path, {"country", "year_month", "value"}, errors);
    std::map<std::string, MonthlySeries> grouped;
    std::map<std::string, std::set<YearMonth>> months_seen;
    for (const auto& row : rows) {
        CellContext ctx{path, row.line, errors};
        auto country = parse_country(ctx, row.cells[0]);
        auto when = parse_year_month(ctx, row.cells[1]);
        auto value = parse_double(ctx, row.cells[2], "value");
        if (!country || !when || !value) continue;
        if (kind == SeriesKind::ExchangeRate && *value <= 0.0) {
            ctx.fail("value", "must be positive for ExchangeRate");
            continue;
        }
        if (!months_seen[*country].insert(*when).second) {
            ctx.fail("year_month", "duplicate month for country");
            continue;
        }
        auto& series = grouped[*country];
        series.country = *country;
        series.kind = kind;
        series.observations.push_back({*when, *value});
    }
    throw_if_errors(errors);
    std::vector<MonthlySeries> out;
    for (auto& [iso, series] : grouped) {
        std::sort(series.observations.begin(), series.observations.end(),
                  [](const MonthlyObservation& a, const MonthlyObservation& b) {
                      return a.when < b.when;
                  });
        out.push_back(std::move(series));
    }
    return out;
}

std::vector<CountryAttributes> load_attributes(const std::filesystem::path& path) {
    std::vector<SchemaError> errors;
    const auto rows = read_csv(
        path,
        {"country", "year", "distance_km", "common_language", "common_legal_origin",
         "tax_rate", "exports", "imports", "gdp", "foreign_listed", "total_listed",
         "market_cap"},
        errors);
    std::vector<CountryAttributes> out;
    std::set<std::pair<std::string, int>> seen;  // year -1 marks broadcast rows
    for (const auto& row : rows) {
        CellContext ctx{path, row.line, errors};
        auto country = parse_country(ctx, row.cells[0]);
        std::optional<int> year;
        if (!trim(row.cells[1]).empty()) {
            year = parse_year(ctx, row.cells[1]);
            if (!year) continue;
        }
        if (!country) continue;
        if (!seen.insert({*country, year ? *year : -1}).second) {
            ctx.fail("country", "duplicate (country, year) row");
            continue;
        }

        CountryAttributes a;
        a.country = *country;
        a.year = year;
        bool bad = false;
        a.distance_km = parse_optional_double(ctx, row.cells[2], "distance_km", bad);
        a.common_language = parse_dummy(ctx, row.cells[3], "common_language", bad);
        a.common_legal_origin = parse_dummy(ctx, row.cells[4], "common_legal_origin", bad);
        a.tax_rate = parse_optional_double(ctx, row.cells[5], "tax_rate", bad);
        a.exports = parse_optional_double(ctx, row.cells[6], "exports", bad);
        a.imports = parse_optional_double(ctx, row.cells[7], "imports", bad);
        a.gdp = parse_optional_double(ctx, row.cells[8], "gdp", bad);
        if (!trim(row.cells[9]).empty()) {
            a.foreign_listed = parse_long(ctx, row.cells[9], "foreign_listed");
            if (!a.foreign_listed) bad = true;
        }
        if (!trim(row.cells[10]).empty()) {
            a.total_listed = parse_long(ctx, row.cells[10], "total_listed");
            if (!a.total_listed) bad = true;
        }
        a.market_cap = parse_optional_double(ctx, row.cells[11], "market_cap", bad);
        if (bad) continue;

        // schema-level range rules, checked again by validate_panel
        if (a.tax_rate && (*a.tax_rate < 0.0 || *a.tax_rate > 1.0)) {
            ctx.fail("tax_rate", "outside [0,1]");
            continue;
        }
        if (a.foreign_listed && a.total_listed && *a.foreign_listed > *a.total_listed) {
            ctx.fail("foreign_listed", "must be <= total_listed");
            continue;
        }
        out.push_back(std::move(a));
    }
    throw_if_errors(errors);
    return out;
}

std::vector<BilateralShares> load_bilateral_shares(const std::filesystem::path& path) {
    std::vector<SchemaError> errors;
    const auto rows = read_csv(path, {"country", "year", "actual_share", "optimal_share"}, errors);
    std::vector<BilateralShares> out;
    std::set<std::pair<std::string, int>> seen;
    for (const auto& row : rows) {
        CellContext ctx{path, row.line, errors};
        auto country = parse_country(ctx, row.cells[0]);
        auto year = parse_year(ctx, row.cells[1]);
        auto actual = parse_double(ctx, row.cells[2], "actual_share");
        bool bad = false;
        auto optimal = parse_optional_double(ctx, row.cells[3], "optimal_share", bad);
        if (!country || !year || !actual || bad) continue;
        if (*actual < 0.0) {
            ctx.fail("actual_share", "must be >= 0");
            continue;
        }
        if (optimal && *optimal <= 0.0) {
            ctx.fail("optimal_share", "must be > 0 when supplied");
            continue;
        }
        if (!seen.insert({*country, *year}).second) {
            ctx.fail("country", "duplicate (country, year) row");
            continue;
        }
        BilateralShares b;
        b.country = *country;
        b.year = *year;
        b.actual_share = *actual;
        b.optimal_share = optimal;
        out.push_back(std::move(b));
    }
    throw_if_errors(errors);
    return out;
}

std::map<std::string, MarketClass> load_classification(const std::filesystem::path& path) {
    std::vector<SchemaError> errors;
    const auto rows = read_csv(path, {"country", "market_class"}, errors);
    std::map<std::string, MarketClass> out;
    for (const auto& row : rows) {
        CellContext ctx{path, row.line, errors};
        auto country = parse_country(ctx, row.cells[0]);
        const std::string value = trim(row.cells[1]);
        std::optional<MarketClass> cls;
        if (value == "developed") cls = MarketClass::Developed;
        else if (value == "emerging") cls = MarketClass::Emerging;
        else ctx.fail("market_class", "must be developed or emerging");
        if (!country || !cls) continue;
        if (!out.emplace(*country, *cls).second) {
            ctx.fail("country", "duplicate country row");
        }
    }
    throw_if_errors(errors);
    return out;
}

PanelManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::vector<SchemaError> errors;
    if (!in) {
        errors.push_back({path.string(), 0, "", "cannot open file"});
        throw SchemaException(std::move(errors));
    }
    PanelManifest manifest;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            errors.push_back({path.string(), lineno, "", "expected key = value"});
            continue;
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key == "origin") {
            if (!is_valid_iso(value)) {
                errors.push_back({path.string(), lineno, key, "must be 3 uppercase letters"});
            } else {
                manifest.origin = value;
            }
        } else if (key == "unit") {
            manifest.unit = value;
        } else if (key == "share_convention") {
            if (value == "fraction") manifest.share_convention = ShareConvention::Fraction;
            else if (value == "percent") manifest.share_convention = ShareConvention::Percent;
            else errors.push_back({path.string(), lineno, key, "must be fraction or percent"});
        } else {
            errors.push_back({path.string(), lineno, key, "unknown key"});
        }
    }
    throw_if_errors(errors);
    return manifest;
}

Panel assemble_panel(std::vector<HoldingsRecord> holdings,
                     std::vector<MonthlySeries> series,
                     std::vector<CountryAttributes> attributes,
                     std::vector<BilateralShares> bilateral,
                     const std::map<std::string, MarketClass>& classification,
                     const PanelManifest& manifest) {
    Panel panel;
    panel.origin = manifest.origin;
    panel.unit = manifest.unit;
    panel.share_convention = manifest.share_convention;
    panel.classification = classification;

    for (auto& r : holdings) {
        if (!panel.holdings.emplace(Panel::CountryYear{r.country, r.year}, r).second) {
            throw DomainError("duplicate holdings record for " + r.country + " " +
                              std::to_string(r.year));
        }
    }
    for (auto& s : series) {
        if (!panel.series.emplace(Panel::SeriesKey{s.country, s.kind}, std::move(s)).second) {
            throw DomainError("duplicate series for a country");
        }
    }
    for (auto& b : bilateral) {
        const Panel::CountryYear key{b.country, b.year};
        if (!panel.bilateral.emplace(key, std::move(b)).second) {
            throw DomainError("duplicate bilateral record");
        }
    }

    // panel years: explicit years anywhere in the inputs
    std::set<int> years;
    for (const auto& [key, r] : panel.holdings) years.insert(key.second);
    for (const auto& [key, b] : panel.bilateral) years.insert(key.second);
    for (const auto& a : attributes) {
        if (a.year) years.insert(*a.year);
    }

    // broadcast rows supply defaults; per-year rows override field by field
    std::map<std::string, CountryAttributes> broadcast;
    std::map<Panel::CountryYear, CountryAttributes> yearly;
    for (auto& a : attributes) {
        if (a.year) {
            if (!yearly.emplace(Panel::CountryYear{a.country, *a.year}, a).second) {
                throw DomainError("duplicate attributes for " + a.country + " " +
                                  std::to_string(*a.year));
            }
        } else {
            if (!broadcast.emplace(a.country, a).second) {
                throw DomainError("duplicate broadcast attributes for " + a.country);
            }
        }
    }
    auto overlay = [](const CountryAttributes& base, const CountryAttributes& top) {
        CountryAttributes m = base;
        m.year = top.year;
        if (top.distance_km) m.distance_km = top.distance_km;
        if (top.common_language) m.common_language = top.common_language;
        if (top.common_legal_origin) m.common_legal_origin = top.common_legal_origin;
        if (top.tax_rate) m.tax_rate = top.tax_rate;
        if (top.exports) m.exports = top.exports;
        if (top.imports) m.imports = top.imports;
        if (top.gdp) m.gdp = top.gdp;
        if (top.foreign_listed) m.foreign_listed = top.foreign_listed;
        if (top.total_listed) m.total_listed = top.total_listed;
        if (top.market_cap) m.market_cap = top.market_cap;
        return m;
    };
    for (const auto& [key, a] : yearly) {
        auto b = broadcast.find(key.first);
        panel.attributes[key] = b == broadcast.end() ? a : overlay(b->second, a);
    }
    for (const auto& [iso, a] : broadcast) {
        for (int year : years) {
            const Panel::CountryYear key{iso, year};
            if (!panel.attributes.count(key)) {
                CountryAttributes filled = a;
                filled.year = year;
                panel.attributes[key] = std::move(filled);
            }
        }
    }

    for (const auto& iso : panel.countries()) {
        if (!classification.count(iso)) {
            throw DomainError("country " + iso + " missing from classification");
        }
    }

    std::vector<Finding> findings = validate_panel(panel);
    std::vector<std::string> hard;
    for (auto& f : findings) {
        if (f.severity == Severity::Error) {
            hard.push_back(f.to_string());
        } else {
            panel.warnings.push_back(std::move(f));
        }
    }
    if (!hard.empty()) {
        std::string msg = "panel validation failed:";
        for (const auto& h : hard) msg += "\n  " + h;
        throw DomainError(msg);
    }

    std::set<std::string> with_attributes;
    for (const auto& [key, a] : panel.attributes) with_attributes.insert(key.first);
    std::set<std::string> flagged;
    for (const auto& [key, r] : panel.holdings) {
        if (!with_attributes.count(key.first) && flagged.insert(key.first).second) {
            panel.warnings.push_back({Severity::Warning, "country " + key.first, "attributes",
                                      "holdings present but no attributes"});
        }
    }
    return panel;
}

Panel load_panel_dir(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::exists(dir) || !fs::is_directory(dir)) {
        throw DomainError("panel directory not found: " + dir.string());
    }
    PanelManifest manifest = load_manifest(dir / "manifest.txt");
    auto classification = load_classification(dir / "classification.csv");

    std::vector<HoldingsRecord> holdings;
    if (fs::exists(dir / "holdings.csv")) holdings = load_holdings(dir / "holdings.csv");

    std::vector<MonthlySeries> series;
    if (fs::exists(dir / "exchange_rates.csv")) {
        series = load_monthly_series(dir / "exchange_rates.csv", SeriesKind::ExchangeRate);
    }
    if (fs::exists(dir / "market_returns.csv")) {
        auto returns = load_monthly_series(dir / "market_returns.csv", SeriesKind::MarketReturn);
        series.insert(series.end(), std::make_move_iterator(returns.begin()),
                      std::make_move_iterator(returns.end()));
    }

    std::vector<CountryAttributes> attributes;
    if (fs::exists(dir / "attributes.csv")) attributes = load_attributes(dir / "attributes.csv");

    std::vector<BilateralShares> bilateral;
    if (fs::exists(dir / "bilateral.csv")) {
        bilateral = load_bilateral_shares(dir / "bilateral.csv");
    }

    return assemble_panel(std::move(holdings), std::move(series), std::move(attributes),
                          std::move(bilateral), classification, manifest);
}

void save_panel(const Panel& panel, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::trunc);
        if (!out) throw DomainError(std::string("cannot write ") + name);
        return out;
    };

    {
        auto out = open("manifest.txt");
        out << "origin = " << panel.origin << "\n";
        out << "unit = " << panel.unit << "\n";
        out << "share_convention = "
            << (panel.share_convention == ShareConvention::Percent ? "percent" : "fraction")
            << "\n";
    }
    {
        auto out = open("classification.csv");
        out << "country,market_class\n";
        for (const auto& [iso, cls] : panel.classification) {
            out << iso << "," << to_string(cls) << "\n";
        }
    }
    {
        auto out = open("holdings.csv");
        out << "country,year,domestic,foreign,funds,aggregate\n";
        for (const auto& [key, r] : panel.holdings) {
            out << r.country << "," << r.year << "," << double_to_string(r.domestic_assets)
                << "," << double_to_string(r.foreign_assets) << ","
                << double_to_string(r.investment_funds) << ","
                << double_to_string(r.aggregate_assets) << "\n";
        }
    }
    {
        auto out = open("attributes.csv");
        out << "country,year,distance_km,common_language,common_legal_origin,tax_rate,"
               "exports,imports,gdp,foreign_listed,total_listed,market_cap\n";
        auto opt = [](const std::optional<double>& v) {
            return v ? double_to_string(*v) : std::string();
        };
        for (const auto& [key, a] : panel.attributes) {
            out << a.country << "," << key.second << "," << opt(a.distance_km) << ","
                << (a.common_language ? (*a.common_language ? "1" : "0") : "") << ","
                << (a.common_legal_origin ? (*a.common_legal_origin ? "1" : "0") : "") << ","
                << opt(a.tax_rate) << "," << opt(a.exports) << "," << opt(a.imports) << ","
                << opt(a.gdp) << ","
                << (a.foreign_listed ? std::to_string(*a.foreign_listed) : "") << ","
                << (a.total_listed ? std::to_string(*a.total_listed) : "") << ","
                << opt(a.market_cap) << "\n";
        }
    }
    {
        auto out = open("bilateral.csv");
        out << "country,year,actual_share,optimal_share\n";
        for (const auto& [key, b] : panel.bilateral) {
            out << b.country << "," << b.year << "," << double_to_string(b.actual_share) << ","
                << (b.optimal_share ? double_to_string(*b.optimal_share) : "") << "\n";
        }
    }
    {
        auto rates = open("exchange_rates.csv");
        auto returns = open("market_returns.csv");
        rates << "country,year_month,value\n";
        returns << "country,year_month,value\n";
        char month[8];
        for (const auto& [key, s] : panel.series) {
            auto& out = s.kind == SeriesKind::ExchangeRate ? rates : returns;
            for (const auto& obs : s.observations) {
                std::snprintf(month, sizeof(month), "%04d-%02d", obs.when.year, obs.when.month);
                out << s.country << "," << month << "," << double_to_string(obs.value) << "\n";
            }
        }
    }
}

}  // namespace homebias
