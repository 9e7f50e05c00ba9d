#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include "homebias/bias.hpp"
#include "homebias/errors.hpp"
#include "homebias/factors.hpp"

namespace homebias {

namespace {

bool adjacent_months(YearMonth a, YearMonth b) {
    if (a.year == b.year) return b.month == a.month + 1;
    return b.year == a.year + 1 && a.month == 12 && b.month == 1;
}

std::vector<MonthlyObservation> in_window(const MonthlySeries& s, YearRange w) {
    std::vector<MonthlyObservation> out;
    for (const auto& obs : s.observations) {
        if (w.contains(obs.when.year)) out.push_back(obs);
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

const char* to_string(ChangeMode m) { return m == ChangeMode::Simple ? "simple" : "log"; }
const char* to_string(DistanceMode m) { return m == DistanceMode::Log ? "log" : "raw"; }
const char* to_string(Subsample s) {
    switch (s) {
        case Subsample::All: return "all";
        case Subsample::Emerging: return "emerging";
        default: return "developed";
    }
}

double fx_volatility(const MonthlySeries& rates, YearRange window, ChangeMode mode) {
    const auto obs = in_window(rates, window);
    if (obs.size() < 3) {
        throw InsufficientDataError(
            "fx_volatility: " + rates.country + ": fewer than 3 monthly observations in " +
            std::to_string(window.first) + ":" + std::to_string(window.last));
    }
    // Welford's running variance over month-over-month changes; pairs
    // across calendar gaps are skipped, not interpolated.
    long n = 0;
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 1; i < obs.size(); ++i) {
        if (!adjacent_months(obs[i - 1].when, obs[i].when)) continue;
        const double prev = obs[i - 1].value;
        if (prev == 0.0) {
            throw DomainError("fx_volatility: " + rates.country + ": zero rate level");
        }
        const double change = mode == ChangeMode::Simple
                                  ? (obs[i].value - prev) / prev
                                  : std::log(obs[i].value / prev);
        ++n;
        const double delta = change - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (change - mean);
    }
    if (n < 2) {
        throw InsufficientDataError("fx_volatility: " + rates.country +
                                    ": fewer than 2 month-over-month changes in window");
    }
    return std::sqrt(m2 / static_cast<double>(n - 1));
}

double return_covariance(const MonthlySeries& origin_returns,
                         const MonthlySeries& dest_returns, YearRange window) {
    const auto a = in_window(origin_returns, window);
    const auto b = in_window(dest_returns, window);
    // inner join on year-month
    long n = 0;
    double mean_a = 0.0, mean_b = 0.0, comoment = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].when < b[j].when) {
            ++i;
        } else if (b[j].when < a[i].when) {
            ++j;
        } else {
            ++n;
            const double da = a[i].value - mean_a;
            mean_a += da / static_cast<double>(n);
            mean_b += (b[j].value - mean_b) / static_cast<double>(n);
            comoment += da * (b[j].value - mean_b);
            ++i;
            ++j;
        }
    }
    if (n < 3) {
        throw InsufficientDataError(
            "return_covariance: " + origin_returns.country + "/" + dest_returns.country +
            ": overlap of " + std::to_string(n) + " months, need >= 3");
    }
    return comoment / static_cast<double>(n - 1);
}

double market_size_share(double dest_cap, double world_cap) {
    if (world_cap <= 0.0) {
        throw DomainError("market_size_share: world market cap must be > 0");
    }
    if (dest_cap < 0.0 || dest_cap > world_cap) {
        throw DomainError("market_size_share: destination cap must be in [0, world cap]");
    }
    return dest_cap / world_cap;
}

double trade_openness(double exports, double imports, double gdp) {
    if (gdp <= 0.0) {
        throw DomainError("trade_openness: gdp must be > 0");
    }
    if (exports < 0.0 || imports < 0.0) {
        throw DomainError("trade_openness: exports and imports must be >= 0");
    }
    return 0.5 * (exports + imports) / gdp;
}

double distance_feature(double km, DistanceMode mode) {
    if (km <= 0.0) {
        throw DomainError("distance_feature: distance must be > 0 km");
    }
    return mode == DistanceMode::Log ? std::log(km) : km;
}

FactorConfig load_factor_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DomainError("cannot open factor config " + path.string());
    }
    FactorConfig config;
    std::string line;
    int lineno = 0;
    std::vector<SchemaError> errors;
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
        if (key == "change_mode") {
            if (value == "simple") config.change_mode = ChangeMode::Simple;
            else if (value == "log") config.change_mode = ChangeMode::Log;
            else errors.push_back({path.string(), lineno, key, "must be simple or log"});
        } else if (key == "distance_mode") {
            if (value == "log") config.distance_mode = DistanceMode::Log;
            else if (value == "raw") config.distance_mode = DistanceMode::Raw;
            else errors.push_back({path.string(), lineno, key, "must be log or raw"});
        } else if (key == "window") {
            const auto colon = value.find(':');
            try {
                if (colon == std::string::npos) throw std::invalid_argument("window");
                YearRange w{std::stoi(value.substr(0, colon)),
                            std::stoi(value.substr(colon + 1))};
                if (w.last < w.first) throw std::invalid_argument("window");
                config.window = w;
            } catch (const std::exception&) {
                errors.push_back({path.string(), lineno, key, "must be FIRST:LAST years"});
            }
        } else if (key == "include_origin_in_world") {
            if (value == "0") config.include_origin_in_world = false;
            else if (value == "1") config.include_origin_in_world = true;
            else errors.push_back({path.string(), lineno, key, "must be 0 or 1"});
        } else if (key == "robust_se") {
            if (value == "0") config.robust_se = false;
            else if (value == "1") config.robust_se = true;
            else errors.push_back({path.string(), lineno, key, "must be 0 or 1"});
        } else {
            errors.push_back({path.string(), lineno, key, "unknown key"});
        }
    }
    if (!errors.empty()) throw SchemaException(std::move(errors));
    return config;
}

DesignMatrix build_design_matrix(const Panel& panel, const std::vector<int>& years,
                                 Subsample subsample, const FactorConfig& config) {
    if (years.empty()) {
        throw DomainError("build_design_matrix: empty year set");
    }
    DesignMatrix design;
    design.column_names.assign(kFactorNames.begin(), kFactorNames.end());

    const MonthlySeries* origin_returns =
        panel.series_for(panel.origin, SeriesKind::MarketReturn);

    // cache per-year world caps
    std::map<int, double> world_caps;
    for (int y : years) {
        world_caps[y] = world_market_cap(panel, y, config.include_origin_in_world);
    }

    std::set<std::string> destinations;
    for (const auto& iso : panel.countries()) {
        if (iso != panel.origin) destinations.insert(iso);
    }

    for (const auto& iso : destinations) {
        const MarketClass cls = panel.country(iso).market_class;
        if (subsample == Subsample::Emerging && cls != MarketClass::Emerging) continue;
        if (subsample == Subsample::Developed && cls != MarketClass::Developed) continue;

        for (int year : years) {
            auto exclude = [&](const std::string& reason) {
                design.exclusions.push_back({iso, year, reason});
            };

            const BilateralShares* shares = panel.bilateral_for(iso, year);
            const CountryAttributes* attrs = panel.attributes_for(iso, year);
            if (!shares) {
                exclude("bilateral shares missing");
                continue;
            }
            if (!attrs) {
                exclude("attributes missing");
                continue;
            }
            std::string missing;
            auto need = [&](bool present, const char* field) {
                if (!present && missing.empty()) missing = field;
            };
            need(attrs->distance_km.has_value(), "distance_km");
            need(attrs->common_language.has_value(), "common_language");
            need(attrs->common_legal_origin.has_value(), "common_legal_origin");
            need(attrs->tax_rate.has_value(), "tax_rate");
            need(attrs->exports.has_value(), "exports");
            need(attrs->imports.has_value(), "imports");
            need(attrs->gdp.has_value(), "gdp");
            need(attrs->foreign_listed.has_value(), "foreign_listed");
            need(attrs->total_listed.has_value(), "total_listed");
            need(attrs->market_cap.has_value(), "market_cap");
            if (!missing.empty()) {
                exclude(missing + " missing");
                continue;
            }

            const MonthlySeries* rates = panel.series_for(iso, SeriesKind::ExchangeRate);
            const MonthlySeries* dest_returns =
                panel.series_for(iso, SeriesKind::MarketReturn);
            if (!rates) {
                exclude("exchange-rate series missing");
                continue;
            }
            if (!origin_returns || !dest_returns) {
                exclude("market-return series missing");
                continue;
            }

            // VOL and COV are year-local statistics unless a window is pinned
            const YearRange window = config.window.value_or(YearRange{year, year});

            FactorVector f;
            try {
                f.vol = fx_volatility(*rates, window, config.change_mode);
                f.cov = return_covariance(*origin_returns, *dest_returns, window);
                f.size = market_size_share(*attrs->market_cap, world_caps[year]);
                f.dis = distance_feature(*attrs->distance_km, config.distance_mode);
                f.lan = *attrs->common_language ? 1.0 : 0.0;
                f.lo = *attrs->common_legal_origin ? 1.0 : 0.0;
                f.tax = *attrs->tax_rate;
                f.trd = trade_openness(*attrs->exports, *attrs->imports, *attrs->gdp);
                f.fl = static_cast<double>(*attrs->foreign_listed) /
                       static_cast<double>(*attrs->total_listed);
            } catch (const DomainError& e) {
                exclude(e.what());
                continue;
            }

            double optimal = 0.0;
            double actual = shares->actual_share;
            if (shares->optimal_share) {
                optimal = *shares->optimal_share;
            } else if (world_caps[year] > 0.0) {
                optimal = market_size_share(*attrs->market_cap, world_caps[year]);
                if (panel.share_convention == ShareConvention::Percent) actual *= 0.01;
            } else {
                exclude("optimal share missing and no market-cap benchmark");
                continue;
            }
            if (optimal <= 0.0) {
                exclude("benchmark weight undefined");
                continue;
            }

            design.rows.push_back({iso, year, f});
            design.response.push_back(1.0 - actual / optimal);
        }
    }

    if (design.rows.empty()) {
        throw DomainError("build_design_matrix: no usable observations (" +
                          std::to_string(design.exclusions.size()) + " rows excluded)");
    }
    return design;
}

}  // namespace homebias
