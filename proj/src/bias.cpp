#include <algorithm>
#include <set>
#include <string>

#include "homebias/bias.hpp"
#include "homebias/errors.hpp"

namespace homebias {

HomeBiasResult home_bias(const HoldingsRecord& record) {
    if (record.aggregate_assets <= 0.0) {
        throw DomainError("home_bias: holdings " + record.country + " " +
                          std::to_string(record.year) + ": aggregate_assets must be > 0");
    }
    return {record.country, record.year, record.domestic_assets / record.aggregate_assets};
}

double actual_foreign_share(double foreign_holdings_in_dest, double aggregate_equity_holdings) {
    if (aggregate_equity_holdings <= 0.0) {
        throw DomainError("actual_foreign_share: aggregate equity holdings must be > 0");
    }
    if (foreign_holdings_in_dest < 0.0) {
        throw DomainError("actual_foreign_share: holdings in destination must be >= 0");
    }
    return foreign_holdings_in_dest / aggregate_equity_holdings;
}

double optimal_share(double dest_market_cap, double world_market_cap) {
    if (world_market_cap <= 0.0) {
        throw DomainError("optimal_share: world market cap must be > 0");
    }
    if (dest_market_cap < 0.0 || dest_market_cap > world_market_cap) {
        throw DomainError("optimal_share: destination cap must be in [0, world cap]");
    }
    return dest_market_cap / world_market_cap;
}

BilateralBiasResult bilateral_home_bias(double actual_share, double optimal_share) {
    if (optimal_share <= 0.0) {
        throw DomainError("bilateral_home_bias: benchmark weight undefined");
    }
    if (actual_share < 0.0) {
        throw DomainError("bilateral_home_bias: actual share must be >= 0");
    }
    BilateralBiasResult r;
    r.actual_share = actual_share;
    r.optimal_share = optimal_share;
    r.share_ratio = actual_share / optimal_share;
    r.hb_bilateral = 1.0 - r.share_ratio;
    return r;
}

HbTable hb_table(const Panel& panel, int year) {
    HbTable table;
    table.year = year;
    std::set<std::string> seen;
    for (const auto& [key, record] : panel.holdings) {
        if (key.second != year) continue;
        table.rows.push_back(home_bias(record));
        seen.insert(key.first);
    }
    // holdings map is ordered by (country, year), rows land sorted by country
    for (const auto& iso : panel.countries()) {
        if (!seen.count(iso)) {
            table.findings.push_back({Severity::Warning, iso + " " + std::to_string(year),
                                      "holdings", "no holdings for requested year"});
        }
    }
    if (table.rows.empty()) {
        table.findings.push_back({Severity::Warning, "year " + std::to_string(year),
                                  "holdings", "no holdings data in requested year"});
    }
    return table;
}

double world_market_cap(const Panel& panel, int year, bool include_origin) {
    double total = 0.0;
    for (const auto& [key, attrs] : panel.attributes) {
        if (key.second != year || !attrs.market_cap) continue;
        if (!include_origin && key.first == panel.origin) continue;
        total += *attrs.market_cap;
    }
    return total;
}

BilateralTable bilateral_table(const Panel& panel, int year, bool include_origin_in_world) {
    BilateralTable table;
    table.year = year;
    const double world_cap = world_market_cap(panel, year, include_origin_in_world);
    const double to_fraction =
        panel.share_convention == ShareConvention::Percent ? 0.01 : 1.0;

    std::set<std::string> destinations;
    for (const auto& [key, b] : panel.bilateral) {
        if (key.second == year) destinations.insert(key.first);
    }
    for (const auto& [key, a] : panel.attributes) {
        if (key.second == year) destinations.insert(key.first);
    }
    destinations.erase(panel.origin);

    for (const auto& iso : destinations) {
        const std::string id = iso + " " + std::to_string(year);
        const BilateralShares* shares = panel.bilateral_for(iso, year);
        if (!shares) {
            table.findings.push_back(
                {Severity::Warning, id, "actual_share", "no actual share; row omitted"});
            continue;
        }
        double actual = shares->actual_share;
        double optimal = 0.0;
        if (shares->optimal_share) {
            optimal = *shares->optimal_share;
        } else {
            // Fall back to the market-cap benchmark weight; supplied
            // shares are converted to fractions to match its units.
            const CountryAttributes* attrs = panel.attributes_for(iso, year);
            if (!attrs || !attrs->market_cap || world_cap <= 0.0) {
                table.findings.push_back({Severity::Warning, id, "optimal_share",
                                          "no optimal share or market-cap benchmark; row omitted"});
                continue;
            }
            optimal = optimal_share(*attrs->market_cap, world_cap);
            actual *= to_fraction;
        }
        BilateralBiasResult row = bilateral_home_bias(actual, optimal);
        row.destination = iso;
        row.year = year;
        table.rows.push_back(row);
    }
    std::sort(table.rows.begin(), table.rows.end(),
              [](const BilateralBiasResult& a, const BilateralBiasResult& b) {
                  return a.destination < b.destination;
              });
    return table;
}

}  // namespace homebias
