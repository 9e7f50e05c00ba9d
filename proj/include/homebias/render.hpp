#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "homebias/bias.hpp"
#include "homebias/ols.hpp"

namespace homebias {

enum class OutputFormat { Text, Csv, JsonLines };

// All renderers produce byte-deterministic output: fixed decimal
// formatting (C locale), fixed ordering. HB tables print at 9 decimal
// places, bilateral tables at 5, regression rows as
// "coefficient (t-stat)" with an explicit p-value column.

std::string render_hb_table(const Panel& panel, const HbTable& table, OutputFormat format);
std::string render_bilateral_table(const BilateralTable& table, OutputFormat format);
std::string render_regression_report(const RegressionReport& report, OutputFormat format);
std::string render_design_matrix(const DesignMatrix& design, OutputFormat format);
std::string render_exclusions(const std::vector<Exclusion>& exclusions);

/// Multi-year grids (one country row, one column per year), the shape
/// used by report-all output files.
std::string render_hb_grid(const std::vector<HbTable>& tables, OutputFormat format);
std::string render_bilateral_grid(const std::vector<BilateralTable>& tables, OutputFormat format);

/// Long-format plot-ready rows: country,year,metric,value.
std::string render_plot_data(const std::vector<HbTable>& hb,
                             const std::vector<BilateralTable>& bilateral);

/// FNV-1a 64-bit content digest used by the report-all manifest.
std::uint64_t fnv1a64(std::string_view bytes);

std::string format_double(double v, int decimals);

}  // namespace homebias
