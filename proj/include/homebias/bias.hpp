#pragma once

#include <vector>

#include "homebias/types.hpp"

namespace homebias {

/// Global home bias of one country-year: domestic / aggregate holdings.
struct HomeBiasResult {
    std::string country;
    int year = 0;
    double hb = 0.0;  // in [0,1] whenever domestic <= aggregate
};

/// Bilateral home bias of the origin investor against one destination:
/// hb_bilateral = 1 - actual_share / optimal_share. Zero means holdings
/// exactly at the benchmark; negative means foreign over-weighting and
/// is reported raw, never clamped.
struct BilateralBiasResult {
    std::string destination;
    int year = 0;
    double actual_share = 0.0;
    double optimal_share = 0.0;
    double share_ratio = 0.0;
    double hb_bilateral = 0.0;
};

/// hb = domestic_assets / aggregate_assets. Throws DomainError when the
/// aggregate is not positive, naming the record.
HomeBiasResult home_bias(const HoldingsRecord& record);

/// Origin's portfolio share held in one destination: holdings in the
/// destination divided by the origin's total aggregate equity holdings
/// (domestic + foreign + funds).
double actual_foreign_share(double foreign_holdings_in_dest, double aggregate_equity_holdings);

/// Benchmark weight of the destination in the world market portfolio:
/// its market capitalization over world market capitalization.
double optimal_share(double dest_market_cap, double world_market_cap);

/// The ratio actual/optimal is unit-convention invariant, so fraction
/// and percent inputs give identical results as long as both shares use
/// the same convention.
BilateralBiasResult bilateral_home_bias(double actual_share, double optimal_share);

struct HbTable {
    int year = 0;
    std::vector<HomeBiasResult> rows;  // sorted by iso code
    std::vector<Finding> findings;
};

struct BilateralTable {
    int year = 0;
    std::vector<BilateralBiasResult> rows;  // sorted by iso code
    std::vector<Finding> findings;
};

/// One row per country with holdings in `year`, sorted by iso code.
/// Countries without holdings that year are reported as findings.
HbTable hb_table(const Panel& panel, int year);

/// Sum of market caps of all panel countries with a cap for `year`;
/// the origin's own cap is included when `include_origin` is set
/// (the standard world portfolio).
double world_market_cap(const Panel& panel, int year, bool include_origin = true);

/// One row per destination (origin excluded) with both shares
/// available in `year`. A missing actual share omits the row with a
/// named finding; a missing optimal share falls back to the market-cap
/// weight and is a finding only when that too is unavailable.
BilateralTable bilateral_table(const Panel& panel, int year, bool include_origin_in_world = true);

}  // namespace homebias
