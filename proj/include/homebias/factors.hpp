#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "homebias/types.hpp"

namespace homebias {

enum class ChangeMode { Simple, Log };
enum class DistanceMode { Log, Raw };
enum class Subsample { All, Emerging, Developed };

const char* to_string(ChangeMode m);
const char* to_string(DistanceMode m);
const char* to_string(Subsample s);

struct YearRange {
    int first = 0;
    int last = 0;
    bool contains(int y) const { return y >= first && y <= last; }
};

/// Knobs of factor construction. Loadable from a key=value text file:
///   change_mode   = simple | log
///   distance_mode = log | raw
///   window        = FIRST:LAST
///   include_origin_in_world = 0 | 1
///   robust_se     = 0 | 1
struct FactorConfig {
    ChangeMode change_mode = ChangeMode::Simple;
    DistanceMode distance_mode = DistanceMode::Log;
    std::optional<YearRange> window;  // default: each design row's own year
    bool include_origin_in_world = true;
    bool robust_se = false;
};

FactorConfig load_factor_config(const std::filesystem::path& path);

/// The nine regressors for one (destination, year) observation.
struct FactorVector {
    double vol = 0.0;   // std dev of monthly FX changes
    double cov = 0.0;   // covariance of origin and destination returns
    double size = 0.0;  // destination cap / world cap
    double dis = 0.0;   // log km (or raw km per config)
    double lan = 0.0;   // common language dummy
    double lo = 0.0;    // common legal origin dummy
    double tax = 0.0;   // tax rate in [0,1]
    double trd = 0.0;   // 0.5*(exports+imports)/gdp
    double fl = 0.0;    // foreign listed / total listed

    std::array<double, 9> as_array() const { return {vol, cov, size, dis, lan, lo, tax, trd, fl}; }
};

inline constexpr std::array<const char*, 9> kFactorNames = {
    "VOL", "COV", "SIZE", "DIS", "LAN", "LO", "TAX", "TRD", "FL"};

struct DesignRow {
    std::string destination;
    int year = 0;
    FactorVector factors;
};

/// One dropped (country, year) observation and why.
struct Exclusion {
    std::string country;
    int year = 0;
    std::string reason;
};

struct DesignMatrix {
    std::vector<DesignRow> rows;
    std::vector<double> response;  // hb_bilateral, aligned with rows
    std::vector<std::string> column_names;  // fixed order: VOL..FL
    std::vector<Exclusion> exclusions;
};

/// Sample standard deviation (divisor n-1) of month-over-month changes
/// of the rate series inside the window. Changes are taken between
/// calendar-adjacent months only; gaps are skipped, never interpolated.
/// Simple relative change by default, log change per config.
/// Scale invariant: redenominating the series leaves the result unchanged.
double fx_volatility(const MonthlySeries& rates, YearRange window,
                     ChangeMode mode = ChangeMode::Simple);

/// Sample covariance (divisor n-1) of the two return series over their
/// inner-joined months inside the window. Requires overlap >= 3.
double return_covariance(const MonthlySeries& origin_returns,
                         const MonthlySeries& dest_returns, YearRange window);

double market_size_share(double dest_cap, double world_cap);

/// 0.5 * (exports + imports) / gdp.
double trade_openness(double exports, double imports, double gdp);

/// Natural log of km (default) or raw km.
double distance_feature(double km, DistanceMode mode = DistanceMode::Log);

/// Assembles one row per (destination, year) with all nine factors and
/// response hb_bilateral. Rows with any missing input are dropped and
/// enumerated in the exclusion report (listwise deletion). Throws
/// DomainError when no usable row remains.
DesignMatrix build_design_matrix(const Panel& panel, const std::vector<int>& years,
                                 Subsample subsample, const FactorConfig& config);

}  // namespace homebias
