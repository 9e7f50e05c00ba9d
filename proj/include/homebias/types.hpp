#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace homebias {

enum class MarketClass { Developed, Emerging };

const char* to_string(MarketClass m);

/// Three-letter uppercase country identifier plus its market classification.
struct CountryId {
    std::string iso_code;
    MarketClass market_class = MarketClass::Developed;
};

/// True iff `code` is exactly three uppercase ASCII letters.
bool is_valid_iso(const std::string& code);

/// One country-year row of equity holdings, in a common currency unit
/// (millions of USD by convention; the unit is declared in the panel
/// manifest, not enforced here).
///
/// Identity: aggregate_assets = domestic_assets + foreign_assets +
/// investment_funds. Loaders compute the aggregate when it is omitted;
/// a supplied aggregate that disagrees beyond 1e-9 relative is a
/// validation finding, never a silent overwrite.
struct HoldingsRecord {
    std::string country;
    int year = 0;
    double domestic_assets = 0.0;
    double foreign_assets = 0.0;
    double investment_funds = 0.0;
    double aggregate_assets = 0.0;
};

struct YearMonth {
    int year = 0;
    int month = 0;  // 1..12
    auto operator<=>(const YearMonth&) const = default;
};

enum class SeriesKind { ExchangeRate, MarketReturn };

const char* to_string(SeriesKind k);

struct MonthlyObservation {
    YearMonth when;
    double value = 0.0;
};

/// Monthly input series behind the VOL and COV regressors.
/// Observations are strictly increasing in time, no duplicate months.
struct MonthlySeries {
    std::string country;
    SeriesKind kind = SeriesKind::ExchangeRate;
    std::vector<MonthlyObservation> observations;
};

/// Destination-country attributes for one year. Any field may be
/// missing (blank cell); factor construction excludes rows whose
/// inputs are missing rather than imputing. A row with no year is a
/// broadcast row: it supplies defaults for every panel year, with
/// per-year rows overriding field by field.
struct CountryAttributes {
    std::string country;
    std::optional<int> year;
    std::optional<double> distance_km;
    std::optional<bool> common_language;
    std::optional<bool> common_legal_origin;
    std::optional<double> tax_rate;
    std::optional<double> exports;
    std::optional<double> imports;
    std::optional<double> gdp;
    std::optional<long> foreign_listed;
    std::optional<long> total_listed;
    std::optional<double> market_cap;
};

/// Origin-country shares in one destination-year: the actual portfolio
/// share held in the destination and, optionally, the benchmark weight.
/// When optimal_share is absent it is derived from market caps.
/// Values follow the panel's declared share convention.
struct BilateralShares {
    std::string country;
    int year = 0;
    double actual_share = 0.0;
    std::optional<double> optimal_share;
};

enum class ShareConvention { Fraction, Percent };

enum class Severity { Warning, Error };

/// One validation result: which record, which field, which rule broke.
struct Finding {
    Severity severity = Severity::Error;
    std::string where;
    std::string field;
    std::string rule;

    std::string to_string() const;
};

/// Validated collection of panel inputs keyed by (country, year).
/// Immutable by convention after assembly; all members are plain
/// values, safe to share read-only across threads.
struct Panel {
    using CountryYear = std::pair<std::string, int>;
    using SeriesKey = std::pair<std::string, SeriesKind>;

    std::string origin = "USA";
    std::string unit = "millions-USD";
    ShareConvention share_convention = ShareConvention::Fraction;

    std::map<CountryYear, HoldingsRecord> holdings;
    std::map<SeriesKey, MonthlySeries> series;
    std::map<CountryYear, CountryAttributes> attributes;  // post-broadcast
    std::map<CountryYear, BilateralShares> bilateral;
    std::map<std::string, MarketClass> classification;
    std::vector<Finding> warnings;

    /// Sorted union of years appearing in holdings, attributes and
    /// bilateral records.
    std::vector<int> years() const;

    /// Sorted union of countries referenced by any record.
    std::vector<std::string> countries() const;

    CountryId country(const std::string& iso) const;  // throws DomainError if unclassified

    const HoldingsRecord* holdings_for(const std::string& iso, int year) const;
    const CountryAttributes* attributes_for(const std::string& iso, int year) const;
    const BilateralShares* bilateral_for(const std::string& iso, int year) const;
    const MonthlySeries* series_for(const std::string& iso, SeriesKind kind) const;
};

/// Checks every type invariant of the panel's records and returns one
/// finding per violation. An empty list means the panel is valid.
/// Deterministic and order-independent; findings are data, not failures.
std::vector<Finding> validate_panel(const Panel& panel);

}  // namespace homebias
