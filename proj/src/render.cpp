#include <cstdio>
#include <map>
#include <set>

#include <json.hpp>

#include "homebias/render.hpp"

namespace homebias {

namespace {

using nlohmann::json;

// column precisions pinned for byte-deterministic reports
constexpr int kHbDecimals = 9;
constexpr int kShareDecimals = 5;
constexpr int kAmountDecimals = 1;
constexpr int kCoefDecimals = 6;
constexpr int kTDecimals = 3;
constexpr int kPDecimals = 4;
constexpr int kR2Decimals = 4;

std::string fit(const std::string& s, int width, bool left = false) {
    if (static_cast<int>(s.size()) >= width) return s;
    std::string pad(width - s.size(), ' ');
    return left ? s + pad : pad + s;
}

std::string opt_text(const std::optional<double>& v, int decimals) {
    return v ? format_double(*v, decimals) : std::string("n/a");
}

std::string opt_csv(const std::optional<double>& v, int decimals) {
    return v ? format_double(*v, decimals) : std::string();
}

json opt_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

std::string model_formula(const std::vector<std::string>& columns) {
    std::string s = "hb_bilateral ~";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        s += i ? " + " : " ";
        s += columns[i];
    }
    return s;
}

}  // namespace

std::string format_double(double v, int decimals) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string render_hb_table(const Panel& panel, const HbTable& table, OutputFormat format) {
    std::string out;
    if (format == OutputFormat::Csv) {
        out += "country,year,aggregate,domestic,hb\n";
        for (const auto& row : table.rows) {
            const auto* h = panel.holdings_for(row.country, row.year);
            out += row.country + "," + std::to_string(row.year) + ",";
            out += h ? format_double(h->aggregate_assets, kAmountDecimals) : std::string();
            out += ",";
            out += h ? format_double(h->domestic_assets, kAmountDecimals) : std::string();
            out += "," + format_double(row.hb, kHbDecimals) + "\n";
        }
        return out;
    }
    if (format == OutputFormat::JsonLines) {
        for (const auto& row : table.rows) {
            const auto* h = panel.holdings_for(row.country, row.year);
            json j;
            j["country"] = row.country;
            j["year"] = row.year;
            if (h) {
                j["aggregate"] = h->aggregate_assets;
                j["domestic"] = h->domestic_assets;
            }
            j["hb"] = row.hb;
            out += j.dump() + "\n";
        }
        return out;
    }
    out += "Home bias, year " + std::to_string(table.year) + ", origin " + panel.origin + "\n";
    out += fit("country", 8, true) + fit("aggregate", 16) + fit("domestic", 16) +
           fit("hb", 14) + "\n";
    for (const auto& row : table.rows) {
        const auto* h = panel.holdings_for(row.country, row.year);
        out += fit(row.country, 8, true);
        out += fit(h ? format_double(h->aggregate_assets, kAmountDecimals) : "n/a", 16);
        out += fit(h ? format_double(h->domestic_assets, kAmountDecimals) : "n/a", 16);
        out += fit(format_double(row.hb, kHbDecimals), 14) + "\n";
    }
    return out;
}

std::string render_bilateral_table(const BilateralTable& table, OutputFormat format) {
    std::string out;
    if (format == OutputFormat::Csv) {
        out += "destination,year,actual_share,optimal_share,share_ratio,hb_bilateral\n";
        for (const auto& row : table.rows) {
            out += row.destination + "," + std::to_string(row.year) + "," +
                   format_double(row.actual_share, kShareDecimals) + "," +
                   format_double(row.optimal_share, kShareDecimals) + "," +
                   format_double(row.share_ratio, kShareDecimals) + "," +
                   format_double(row.hb_bilateral, kShareDecimals) + "\n";
        }
        return out;
    }
    if (format == OutputFormat::JsonLines) {
        for (const auto& row : table.rows) {
            json j;
            j["destination"] = row.destination;
            j["year"] = row.year;
            j["actual_share"] = row.actual_share;
            j["optimal_share"] = row.optimal_share;
            j["share_ratio"] = row.share_ratio;
            j["hb_bilateral"] = row.hb_bilateral;
            out += j.dump() + "\n";
        }
        return out;
    }
    out += "Bilateral home bias, year " + std::to_string(table.year) + "\n";
    out += fit("destination", 12, true) + fit("actual", 12) + fit("optimal", 12) +
           fit("ratio", 12) + fit("hb", 12) + "\n";
    for (const auto& row : table.rows) {
        out += fit(row.destination, 12, true);
        out += fit(format_double(row.actual_share, kShareDecimals), 12);
        out += fit(format_double(row.optimal_share, kShareDecimals), 12);
        out += fit(format_double(row.share_ratio, kShareDecimals), 12);
        out += fit(format_double(row.hb_bilateral, kShareDecimals), 12) + "\n";
    }
    return out;
}

std::string render_regression_report(const RegressionReport& report, OutputFormat format) {
    std::string out;
    std::vector<std::string> regressors;
    for (const auto& row : report.rows) {
        if (row.name != "CONST") regressors.push_back(row.name);
    }
    if (format == OutputFormat::Csv) {
        out += "name,coefficient,std_error,t_stat,p_value\n";
        for (const auto& row : report.rows) {
            out += row.name + "," + format_double(row.coefficient, kCoefDecimals) + "," +
                   format_double(row.std_error, kCoefDecimals) + "," +
                   opt_csv(row.t_stat, kTDecimals) + "," + opt_csv(row.p_value, kPDecimals) +
                   "\n";
        }
        out += "R2," + format_double(report.r_squared, kR2Decimals) + ",,,\n";
        out += "N," + std::to_string(report.n_obs) + ",,,\n";
        return out;
    }
    if (format == OutputFormat::JsonLines) {
        for (const auto& row : report.rows) {
            json j;
            j["type"] = "coefficient";
            j["name"] = row.name;
            j["coefficient"] = row.coefficient;
            j["std_error"] = row.std_error;
            j["t_stat"] = opt_json(row.t_stat);
            j["p_value"] = opt_json(row.p_value);
            out += j.dump() + "\n";
        }
        json j;
        j["type"] = "summary";
        j["label"] = report.label;
        j["subsample"] = to_string(report.subsample);
        j["r_squared"] = report.r_squared;
        j["n_obs"] = report.n_obs;
        j["robust_se"] = report.robust_se;
        j["excluded"] = report.exclusions.size();
        out += j.dump() + "\n";
        return out;
    }
    out += "Model: " + model_formula(regressors) + "\n";
    out += "Subsample: " + std::string(to_string(report.subsample)) + " | Years: " +
           report.label + " | SE: " + (report.robust_se ? "HC1 robust" : "classical") + "\n";
    out += fit("regressor", 10, true) + fit("coefficient", 14) + fit("t-stat", 12) +
           fit("p-value", 10) + "\n";
    for (const auto& row : report.rows) {
        out += fit(row.name, 10, true);
        out += fit(format_double(row.coefficient, kCoefDecimals), 14);
        out += fit(opt_text(row.t_stat, kTDecimals), 12);
        out += fit(opt_text(row.p_value, kPDecimals), 10) + "\n";
    }
    out += "R-squared: " + format_double(report.r_squared, kR2Decimals) + "\n";
    out += "Observations: " + std::to_string(report.n_obs) + "\n";
    out += "Excluded observations: " + std::to_string(report.exclusions.size()) + "\n";
    return out;
}

std::string render_design_matrix(const DesignMatrix& design, OutputFormat format) {
    std::string out;
    if (format == OutputFormat::JsonLines) {
        for (std::size_t i = 0; i < design.rows.size(); ++i) {
            const auto& row = design.rows[i];
            json j;
            j["destination"] = row.destination;
            j["year"] = row.year;
            const auto values = row.factors.as_array();
            for (std::size_t k = 0; k < values.size(); ++k) {
                j[design.column_names[k]] = values[k];
            }
            j["response"] = design.response[i];
            out += j.dump() + "\n";
        }
        return out;
    }
    const bool csv = format == OutputFormat::Csv;
    if (csv) {
        out += "destination,year";
        for (const auto& name : design.column_names) out += "," + name;
        out += ",response\n";
    } else {
        out += fit("destination", 12, true) + fit("year", 6);
        for (const auto& name : design.column_names) out += fit(name, 12);
        out += fit("response", 12) + "\n";
    }
    for (std::size_t i = 0; i < design.rows.size(); ++i) {
        const auto& row = design.rows[i];
        if (csv) {
            out += row.destination + "," + std::to_string(row.year);
            for (double v : row.factors.as_array()) out += "," + format_double(v, kCoefDecimals);
            out += "," + format_double(design.response[i], kCoefDecimals) + "\n";
        } else {
            out += fit(row.destination, 12, true) + fit(std::to_string(row.year), 6);
            for (double v : row.factors.as_array()) out += fit(format_double(v, kCoefDecimals), 12);
            out += fit(format_double(design.response[i], kCoefDecimals), 12) + "\n";
        }
    }
    return out;
}

std::string render_exclusions(const std::vector<Exclusion>& exclusions) {
    std::string out = "country,year,reason\n";
    for (const auto& e : exclusions) {
        out += e.country + "," + std::to_string(e.year) + "," + e.reason + "\n";
    }
    return out;
}

namespace {

/// Shared grid renderer: one row per country, one column per year.
template <typename Table, typename CountryOf, typename ValueOf>
std::string render_grid(const std::vector<Table>& tables, OutputFormat format, int decimals,
                        const char* title, CountryOf country_of, ValueOf value_of) {
    std::vector<int> years;
    std::set<std::string> countries;
    std::map<std::pair<std::string, int>, double> cells;
    for (const auto& table : tables) {
        years.push_back(table.year);
        for (const auto& row : table.rows) {
            countries.insert(country_of(row));
            cells[{country_of(row), table.year}] = value_of(row);
        }
    }
    std::string out;
    if (format == OutputFormat::JsonLines) {
        for (const auto& iso : countries) {
            json j;
            j["country"] = iso;
            for (int year : years) {
                auto it = cells.find({iso, year});
                if (it != cells.end()) j[std::to_string(year)] = it->second;
            }
            out += j.dump() + "\n";
        }
        return out;
    }
    const bool csv = format == OutputFormat::Csv;
    if (csv) {
        out += "country";
        for (int year : years) out += "," + std::to_string(year);
        out += "\n";
    } else {
        out += std::string(title) + "\n" + fit("country", 8, true);
        for (int year : years) out += fit(std::to_string(year), decimals + 6);
        out += "\n";
    }
    for (const auto& iso : countries) {
        out += csv ? iso : fit(iso, 8, true);
        for (int year : years) {
            auto it = cells.find({iso, year});
            const std::string cell =
                it == cells.end() ? std::string() : format_double(it->second, decimals);
            out += csv ? "," + cell : fit(cell.empty() ? "." : cell, decimals + 6);
        }
        out += "\n";
    }
    return out;
}

}  // namespace

std::string render_hb_grid(const std::vector<HbTable>& tables, OutputFormat format) {
    return render_grid(
        tables, format, kHbDecimals, "Home bias by year",
        [](const HomeBiasResult& r) { return r.country; },
        [](const HomeBiasResult& r) { return r.hb; });
}

std::string render_bilateral_grid(const std::vector<BilateralTable>& tables,
                                  OutputFormat format) {
    return render_grid(
        tables, format, kShareDecimals, "Bilateral home bias by year",
        [](const BilateralBiasResult& r) { return r.destination; },
        [](const BilateralBiasResult& r) { return r.hb_bilateral; });
}

std::string render_plot_data(const std::vector<HbTable>& hb,
                             const std::vector<BilateralTable>& bilateral) {
    std::string out = "country,year,metric,value\n";
    for (const auto& table : hb) {
        for (const auto& row : table.rows) {
            out += row.country + "," + std::to_string(table.year) + ",hb," +
                   format_double(row.hb, kHbDecimals) + "\n";
        }
    }
    for (const auto& table : bilateral) {
        for (const auto& row : table.rows) {
            out += row.destination + "," + std::to_string(table.year) + ",hb_bilateral," +
                   format_double(row.hb_bilateral, kHbDecimals) + "\n";
        }
    }
    return out;
}

}  // namespace homebias
