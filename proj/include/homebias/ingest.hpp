#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "homebias/errors.hpp"
#include "homebias/types.hpp"

namespace homebias {

/// Panel-level declarations, one per dataset: key = value lines.
struct PanelManifest {
    std::string origin = "USA";
    std::string unit = "millions-USD";
    ShareConvention share_convention = ShareConvention::Fraction;
};

// All loaders accept header-bearing comma-separated UTF-8 text with a
// decimal point and no thousands separators. Headers are lowercase and
// fixed. Every rejected cell produces exactly one SchemaError; a file
// with any error throws SchemaException carrying all of them.

/// Columns: country,year,domestic,foreign,funds,aggregate.
/// The aggregate cell may be blank; it is then computed from the
/// holdings identity. Duplicate (country, year) rows are errors.
std::vector<HoldingsRecord> load_holdings(const std::filesystem::path& path);

/// Columns: country,year_month,value with YYYY-MM months. Rows may
/// interleave countries; series are grouped and sorted. Duplicate
/// months within a country are errors, and exchange rates must be
/// strictly positive.
std::vector<MonthlySeries> load_monthly_series(const std::filesystem::path& path,
                                               SeriesKind kind);

/// Columns: country,year,distance_km,common_language,common_legal_origin,
/// tax_rate,exports,imports,gdp,foreign_listed,total_listed,market_cap.
/// A blank year marks a broadcast row. Any value cell may be blank
/// (field missing). Dummies must be 0/1.
std::vector<CountryAttributes> load_attributes(const std::filesystem::path& path);

/// Columns: country,year,actual_share,optimal_share (optimal may be blank).
std::vector<BilateralShares> load_bilateral_shares(const std::filesystem::path& path);

/// Columns: country,market_class with values developed|emerging.
std::map<std::string, MarketClass> load_classification(const std::filesystem::path& path);

PanelManifest load_manifest(const std::filesystem::path& path);

/// Merges the loaded inputs into a validated Panel: broadcasts
/// no-year attribute rows across all panel years (per-year rows win
/// field by field), attaches market classes, and runs validate_panel.
/// Error-severity findings and countries missing from the
/// classification are hard errors; warnings are kept on the panel.
Panel assemble_panel(std::vector<HoldingsRecord> holdings,
                     std::vector<MonthlySeries> series,
                     std::vector<CountryAttributes> attributes,
                     std::vector<BilateralShares> bilateral,
                     const std::map<std::string, MarketClass>& classification,
                     const PanelManifest& manifest);

// Standard panel directory layout:
//   manifest.txt, classification.csv, holdings.csv, attributes.csv,
//   bilateral.csv, exchange_rates.csv, market_returns.csv
// and optionally factors.conf. Missing optional files load as empty.
Panel load_panel_dir(const std::filesystem::path& dir);

/// Writes the panel back out in the standard layout, full precision.
/// load(save(panel)) reproduces the panel field for field.
void save_panel(const Panel& panel, const std::filesystem::path& dir);

}  // namespace homebias
