#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "homebias/commands.hpp"
#include "homebias/ingest.hpp"

namespace homebias {

namespace {

namespace fs = std::filesystem;

FactorConfig effective_config(const fs::path& panel_dir, const RunConfig& run) {
    FactorConfig config;
    const fs::path conf = panel_dir / "factors.conf";
    if (fs::exists(conf)) config = load_factor_config(conf);
    if (run.distance_mode) config.distance_mode = *run.distance_mode;
    if (run.change_mode) config.change_mode = *run.change_mode;
    return config;
}

std::vector<int> resolve_years(const Panel& panel, const RunConfig& run) {
    return run.years.empty() ? panel.years() : run.years;
}

std::vector<Subsample> resolve_subsamples(const RunConfig& run) {
    return run.subsamples.empty() ? std::vector<Subsample>{Subsample::All} : run.subsamples;
}

void emit_findings(const std::vector<Finding>& findings, std::ostream& diag) {
    for (const auto& f : findings) diag << f.to_string() << "\n";
}

/// Joins per-year renders into one stream: text tables separated by a
/// blank line, CSV keeping a single header row, JSON lines appended.
std::string join_renders(const std::vector<std::string>& parts, OutputFormat format) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i == 0) {
            out += parts[i];
            continue;
        }
        if (format == OutputFormat::Text) {
            out += "\n" + parts[i];
        } else if (format == OutputFormat::Csv) {
            const auto eol = parts[i].find('\n');
            out += eol == std::string::npos ? "" : parts[i].substr(eol + 1);
        } else {
            out += parts[i];
        }
    }
    return out;
}

void cmd_hb(const Panel& panel, const RunConfig& run, std::ostream& out, std::ostream& diag) {
    std::vector<std::string> parts;
    for (int year : resolve_years(panel, run)) {
        HbTable table = hb_table(panel, year);
        emit_findings(table.findings, diag);
        parts.push_back(render_hb_table(panel, table, run.format));
    }
    out << join_renders(parts, run.format);
}

void cmd_bilateral(const Panel& panel, const RunConfig& run, const FactorConfig& config,
                   std::ostream& out, std::ostream& diag) {
    std::vector<std::string> parts;
    for (int year : resolve_years(panel, run)) {
        BilateralTable table = bilateral_table(panel, year, config.include_origin_in_world);
        emit_findings(table.findings, diag);
        parts.push_back(render_bilateral_table(table, run.format));
    }
    out << join_renders(parts, run.format);
}

void emit_exclusions(const std::vector<Exclusion>& exclusions, std::ostream& diag) {
    for (const auto& e : exclusions) {
        diag << "excluded: " << e.country << " " << e.year << " (" << e.reason << ")\n";
    }
}

void cmd_factors(const Panel& panel, const RunConfig& run, const FactorConfig& config,
                 std::ostream& out, std::ostream& diag) {
    const Subsample subsample = resolve_subsamples(run).front();
    DesignMatrix design = build_design_matrix(panel, resolve_years(panel, run), subsample, config);
    emit_exclusions(design.exclusions, diag);
    out << render_design_matrix(design, run.format);
}

RegressionReport estimate_or_rethrow(const Panel& panel, const std::vector<int>& years,
                                     Subsample subsample, const FactorConfig& config) {
    try {
        return estimate_model(panel, years, subsample, config);
    } catch (const SchemaException&) {
        throw;
    } catch (const DomainError& e) {
        throw DomainError(std::string("subsample ") + to_string(subsample) + ": " + e.what());
    }
}

void cmd_estimate(const Panel& panel, const RunConfig& run, const FactorConfig& config,
                  std::ostream& out, std::ostream& diag) {
    const auto years = resolve_years(panel, run);
    std::vector<std::string> parts;
    for (Subsample subsample : resolve_subsamples(run)) {
        if (run.pooled || years.size() <= 1) {
            RegressionReport report = estimate_or_rethrow(panel, years, subsample, config);
            emit_exclusions(report.exclusions, diag);
            parts.push_back(render_regression_report(report, run.format));
        } else {
            for (int year : years) {
                RegressionReport report = estimate_or_rethrow(panel, {year}, subsample, config);
                emit_exclusions(report.exclusions, diag);
                parts.push_back(render_regression_report(report, run.format));
            }
        }
    }
    // regression reports each keep their own header: join with blank lines
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out << "\n";
        out << parts[i];
    }
}

const char* extension(OutputFormat format) {
    switch (format) {
        case OutputFormat::Csv: return "csv";
        case OutputFormat::JsonLines: return "jsonl";
        default: return "txt";
    }
}

void cmd_report_all(const Panel& panel, const RunConfig& run, const FactorConfig& config,
                    std::ostream& out, std::ostream& diag) {
    if (run.out_dir.empty()) throw UsageError("report-all requires --out DIR");
    const auto years = resolve_years(panel, run);
    const std::string ext = extension(run.format);

    // build every artifact in memory before the first write
    std::vector<HbTable> hb_tables;
    std::vector<BilateralTable> bilateral_tables;
    for (int year : years) {
        hb_tables.push_back(hb_table(panel, year));
        bilateral_tables.push_back(bilateral_table(panel, year, config.include_origin_in_world));
    }
    for (const auto& t : hb_tables) emit_findings(t.findings, diag);
    for (const auto& t : bilateral_tables) emit_findings(t.findings, diag);

    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("hb." + ext, render_hb_grid(hb_tables, run.format));
    files.emplace_back("bilateral." + ext, render_bilateral_grid(bilateral_tables, run.format));
    for (Subsample subsample : {Subsample::All, Subsample::Emerging, Subsample::Developed}) {
        RegressionReport report = estimate_or_rethrow(panel, years, subsample, config);
        std::string tag = to_string(subsample);
        files.emplace_back("regression_" + tag + "." + ext,
                           render_regression_report(report, run.format));
        files.emplace_back("exclusions_" + tag + ".csv", render_exclusions(report.exclusions));
    }
    files.emplace_back("plot_data.csv", render_plot_data(hb_tables, bilateral_tables));

    std::string manifest;
    char digest[32];
    for (const auto& [name, content] : files) {
        std::snprintf(digest, sizeof(digest), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(content)));
        manifest += std::string(digest) + "  " + name + "\n";
    }
    files.emplace_back("manifest.txt", manifest);

    fs::create_directories(run.out_dir);
    std::vector<fs::path> written;
    try {
        for (const auto& [name, content] : files) {
            const fs::path path = run.out_dir / name;
            std::ofstream file(path, std::ios::trunc | std::ios::binary);
            if (!file) throw DomainError("cannot write " + path.string());
            written.push_back(path);
            file << content;
            if (!file) throw DomainError("write failed for " + path.string());
        }
    } catch (...) {
        // all-or-nothing: remove whatever this run managed to write
        for (const auto& path : written) {
            std::error_code ec;
            fs::remove(path, ec);
        }
        throw;
    }
    out << manifest;
}

}  // namespace

void run_command(const RunConfig& config, std::ostream& out, std::ostream& diag) {
    if (config.panel_dir.empty()) {
        throw UsageError("no panel directory: pass --panel DIR or set HOMEBIAS_DATA");
    }
    Panel panel = load_panel_dir(config.panel_dir);
    emit_findings(panel.warnings, diag);
    const FactorConfig factor_config = effective_config(config.panel_dir, config);

    switch (config.command) {
        case Command::Hb: cmd_hb(panel, config, out, diag); break;
        case Command::Bilateral: cmd_bilateral(panel, config, factor_config, out, diag); break;
        case Command::Factors: cmd_factors(panel, config, factor_config, out, diag); break;
        case Command::Estimate: cmd_estimate(panel, config, factor_config, out, diag); break;
        case Command::ReportAll: cmd_report_all(panel, config, factor_config, out, diag); break;
    }
}

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& diag) {
    try {
        run_command(config, out, diag);
        return kExitOk;
    } catch (const UsageError& e) {
        diag << "usage error: " << e.what() << "\n";
        return kExitUsageError;
    } catch (const SchemaException& e) {
        for (const auto& err : e.errors()) diag << "schema error: " << err.to_string() << "\n";
        return kExitSchemaError;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return kExitDomainError;
    }
}

}  // namespace homebias
