#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "homebias/errors.hpp"
#include "homebias/types.hpp"

namespace homebias {

namespace {

constexpr double kIdentityRelTol = 1e-9;

std::string holdings_id(const HoldingsRecord& r) {
    return "holdings " + r.country + " " + std::to_string(r.year);
}

std::string attributes_id(const CountryAttributes& a, int year) {
    return "attributes " + a.country + " " + std::to_string(year);
}

}  // namespace

const char* to_string(MarketClass m) {
    return m == MarketClass::Developed ? "developed" : "emerging";
}

const char* to_string(SeriesKind k) {
    return k == SeriesKind::ExchangeRate ? "exchange_rate" : "market_return";
}

bool is_valid_iso(const std::string& code) {
    if (code.size() != 3) return false;
    return std::all_of(code.begin(), code.end(),
                       [](unsigned char c) { return c >= 'A' && c <= 'Z'; });
}

std::string Finding::to_string() const {
    std::string s = severity == Severity::Error ? "error: " : "warning: ";
    return s + where + ": " + field + ": " + rule;
}

std::vector<int> Panel::years() const {
    std::set<int> ys;
    for (const auto& [key, rec] : holdings) ys.insert(key.second);
    for (const auto& [key, rec] : attributes) ys.insert(key.second);
    for (const auto& [key, rec] : bilateral) ys.insert(key.second);
    return {ys.begin(), ys.end()};
}

std::vector<std::string> Panel::countries() const {
    std::set<std::string> cs;
    for (const auto& [key, rec] : holdings) cs.insert(key.first);
    for (const auto& [key, rec] : attributes) cs.insert(key.first);
    for (const auto& [key, rec] : bilateral) cs.insert(key.first);
    for (const auto& [key, rec] : series) cs.insert(key.first);
    return {cs.begin(), cs.end()};
}

CountryId Panel::country(const std::string& iso) const {
    auto it = classification.find(iso);
    if (it == classification.end()) {
        throw DomainError("country " + iso + " has no market classification");
    }
    return CountryId{iso, it->second};
}

const HoldingsRecord* Panel::holdings_for(const std::string& iso, int year) const {
    auto it = holdings.find({iso, year});
    return it == holdings.end() ? nullptr : &it->second;
}

const CountryAttributes* Panel::attributes_for(const std::string& iso, int year) const {
    auto it = attributes.find({iso, year});
    return it == attributes.end() ? nullptr : &it->second;
}

const BilateralShares* Panel::bilateral_for(const std::string& iso, int year) const {
    auto it = bilateral.find({iso, year});
    return it == bilateral.end() ? nullptr : &it->second;
}

const MonthlySeries* Panel::series_for(const std::string& iso, SeriesKind kind) const {
    auto it = series.find({iso, kind});
    return it == series.end() ? nullptr : &it->second;
}

std::vector<Finding> validate_panel(const Panel& panel) {
    std::vector<Finding> findings;
    auto add = [&](Severity sev, std::string where, std::string field, std::string rule) {
        findings.push_back({sev, std::move(where), std::move(field), std::move(rule)});
    };

    for (const auto& [key, r] : panel.holdings) {
        const std::string id = holdings_id(r);
        if (!is_valid_iso(r.country)) {
            add(Severity::Error, id, "country", "iso_code must be 3 uppercase letters");
        }
        bool amounts_ok = true;
        if (r.domestic_assets < 0.0) {
            add(Severity::Error, id, "domestic", "must be >= 0");
            amounts_ok = false;
        }
        if (r.foreign_assets < 0.0) {
            add(Severity::Error, id, "foreign", "must be >= 0");
            amounts_ok = false;
        }
        if (r.investment_funds < 0.0) {
            add(Severity::Error, id, "funds", "must be >= 0");
            amounts_ok = false;
        }
        if (r.aggregate_assets <= 0.0) {
            add(Severity::Error, id, "aggregate", "must be > 0");
            amounts_ok = false;
        }
        if (!amounts_ok) continue;

        const double sum = r.domestic_assets + r.foreign_assets + r.investment_funds;
        const double scale = std::max(std::abs(sum), std::abs(r.aggregate_assets));
        if (std::abs(sum - r.aggregate_assets) > kIdentityRelTol * scale) {
            add(Severity::Error, id, "aggregate",
                "aggregate_identity: aggregate must equal domestic + foreign + funds");
        } else if (r.domestic_assets > r.aggregate_assets) {
            // Reachable only at the tolerance boundary of the identity.
            add(Severity::Error, id, "domestic", "domestic must be <= aggregate");
        }
    }

    for (const auto& [key, s] : panel.series) {
        const std::string id =
            std::string("series ") + s.country + " " + to_string(s.kind);
        if (!is_valid_iso(s.country)) {
            add(Severity::Error, id, "country", "iso_code must be 3 uppercase letters");
        }
        for (std::size_t i = 0; i < s.observations.size(); ++i) {
            const auto& obs = s.observations[i];
            if (obs.when.month < 1 || obs.when.month > 12) {
                add(Severity::Error, id, "year_month", "month must be in 1..12");
            }
            if (i > 0 && !(s.observations[i - 1].when < obs.when)) {
                add(Severity::Error, id, "year_month",
                    "timestamps must be strictly increasing, no duplicate months");
            }
            if (s.kind == SeriesKind::ExchangeRate && obs.value <= 0.0) {
                add(Severity::Error, id, "value", "must be positive for ExchangeRate");
            }
        }
    }

    for (const auto& [key, a] : panel.attributes) {
        const std::string id = attributes_id(a, key.second);
        if (!is_valid_iso(a.country)) {
            add(Severity::Error, id, "country", "iso_code must be 3 uppercase letters");
        }
        if (a.distance_km && a.country != panel.origin && *a.distance_km <= 0.0) {
            add(Severity::Error, id, "distance_km", "must be > 0 for destinations");
        }
        if (a.tax_rate && (*a.tax_rate < 0.0 || *a.tax_rate > 1.0)) {
            add(Severity::Error, id, "tax_rate", "outside [0,1]");
        }
        if (a.exports && *a.exports < 0.0) {
            add(Severity::Error, id, "exports", "must be >= 0");
        }
        if (a.imports && *a.imports < 0.0) {
            add(Severity::Error, id, "imports", "must be >= 0");
        }
        if (a.gdp && *a.gdp <= 0.0) {
            add(Severity::Error, id, "gdp", "must be > 0");
        }
        if (a.foreign_listed && *a.foreign_listed < 0) {
            add(Severity::Error, id, "foreign_listed", "must be >= 0");
        }
        if (a.total_listed && *a.total_listed <= 0) {
            add(Severity::Error, id, "total_listed", "must be > 0");
        }
        if (a.foreign_listed && a.total_listed && *a.foreign_listed > *a.total_listed) {
            add(Severity::Error, id, "foreign_listed",
                "foreign_listed must be <= total_listed");
        }
        if (a.market_cap && *a.market_cap < 0.0) {
            add(Severity::Error, id, "market_cap", "must be >= 0");
        }
    }

    for (const auto& [key, b] : panel.bilateral) {
        const std::string id = "bilateral " + b.country + " " + std::to_string(key.second);
        if (!is_valid_iso(b.country)) {
            add(Severity::Error, id, "country", "iso_code must be 3 uppercase letters");
        }
        if (b.actual_share < 0.0) {
            add(Severity::Error, id, "actual_share", "must be >= 0");
        }
        if (b.optimal_share && *b.optimal_share <= 0.0) {
            add(Severity::Error, id, "optimal_share", "must be > 0 when supplied");
        }
    }

    // Every referenced country must carry a market classification.
    for (const auto& iso : panel.countries()) {
        if (panel.classification.find(iso) == panel.classification.end()) {
            add(Severity::Error, "country " + iso, "market_class",
                "every country must have a market classification");
        }
    }

    return findings;
}

}  // namespace homebias
