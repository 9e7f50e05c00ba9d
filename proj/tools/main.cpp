#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "homebias/commands.hpp"
#include "homebias/errors.hpp"

namespace {

using homebias::RunConfig;

/// Parses "A:B" into the inclusive year list A..B.
std::vector<int> parse_year_range(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw homebias::UsageError("--years expects FIRST:LAST, got '" + spec + "'");
    }
    int first = 0;
    int last = 0;
    try {
        first = std::stoi(spec.substr(0, colon));
        last = std::stoi(spec.substr(colon + 1));
    } catch (const std::exception&) {
        throw homebias::UsageError("--years expects integer years, got '" + spec + "'");
    }
    if (first > last) {
        throw homebias::UsageError("--years range is reversed: '" + spec + "'");
    }
    std::vector<int> years;
    for (int y = first; y <= last; ++y) years.push_back(y);
    return years;
}

struct CliOptions {
    std::string panel;
    std::vector<int> year;
    std::string years;
    std::vector<std::string> subsamples;
    std::string format = "text";
    std::string out_dir;
    std::string distance_mode;
    std::string change_mode;
    bool pooled = false;
};

void add_common_options(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--panel", opt.panel, "Panel data directory");
    auto* year = cmd->add_option("--year", opt.year, "Single year (repeatable)");
    auto* years = cmd->add_option("--years", opt.years, "Inclusive year range FIRST:LAST");
    year->excludes(years);
    years->excludes(year);
    cmd->add_option("--subsample", opt.subsamples, "all, emerging or developed (repeatable)")
        ->check(CLI::IsMember({"all", "emerging", "developed"}));
    cmd->add_option("--format", opt.format, "text, csv or jsonl")
        ->check(CLI::IsMember({"text", "csv", "jsonl"}));
    cmd->add_option("--out", opt.out_dir, "Output directory (report-all)");
    cmd->add_option("--distance-mode", opt.distance_mode, "log or raw distance")
        ->check(CLI::IsMember({"log", "raw"}));
    cmd->add_option("--change-mode", opt.change_mode, "simple or log FX changes")
        ->check(CLI::IsMember({"simple", "log"}));
    cmd->add_flag("--pooled", opt.pooled, "Pool requested years into one regression");
}

RunConfig to_run_config(homebias::Command command, const CliOptions& opt) {
    RunConfig config;
    config.command = command;
    config.panel_dir = opt.panel;
    if (const char* env = std::getenv("HOMEBIAS_DATA"); env && *env) {
        config.panel_dir = env;
    }
    if (!opt.years.empty()) {
        config.years = parse_year_range(opt.years);
    } else {
        config.years = opt.year;
    }
    for (const auto& s : opt.subsamples) {
        if (s == "all") config.subsamples.push_back(homebias::Subsample::All);
        else if (s == "emerging") config.subsamples.push_back(homebias::Subsample::Emerging);
        else config.subsamples.push_back(homebias::Subsample::Developed);
    }
    if (opt.format == "csv") config.format = homebias::OutputFormat::Csv;
    else if (opt.format == "jsonl") config.format = homebias::OutputFormat::JsonLines;
    config.out_dir = opt.out_dir;
    if (opt.distance_mode == "log") config.distance_mode = homebias::DistanceMode::Log;
    else if (opt.distance_mode == "raw") config.distance_mode = homebias::DistanceMode::Raw;
    if (opt.change_mode == "simple") config.change_mode = homebias::ChangeMode::Simple;
    else if (opt.change_mode == "log") config.change_mode = homebias::ChangeMode::Log;
    config.pooled = opt.pooled;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"homebias: equity home bias measurement and determinants"};
    app.require_subcommand(1);

    CliOptions opt;
    struct Sub {
        const char* name;
        const char* help;
        homebias::Command command;
    };
    const Sub subs[] = {
        {"hb", "Global home bias table per year", homebias::Command::Hb},
        {"bilateral", "Bilateral home bias table per year", homebias::Command::Bilateral},
        {"factors", "Design matrix of the nine determinants", homebias::Command::Factors},
        {"estimate", "Cross-section OLS determinant regressions", homebias::Command::Estimate},
        {"report-all", "Write every artifact plus a digest manifest", homebias::Command::ReportAll},
    };
    for (const auto& sub : subs) {
        add_common_options(app.add_subcommand(sub.name, sub.help), opt);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return homebias::kExitUsageError;
    }

    try {
        for (const auto& sub : subs) {
            if (app.got_subcommand(sub.name)) {
                return homebias::dispatch(to_run_config(sub.command, opt), std::cout, std::cerr);
            }
        }
        std::cerr << "usage error: no command given\n";
        return homebias::kExitUsageError;
    } catch (const homebias::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return homebias::kExitUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return homebias::kExitDomainError;
    }
}
