#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "homebias/render.hpp"

namespace homebias {

enum class Command { Hb, Bilateral, Factors, Estimate, ReportAll };

/// Parsed run configuration for one CLI invocation.
struct RunConfig {
    Command command = Command::Hb;
    std::filesystem::path panel_dir;
    std::vector<int> years;                  // empty: every panel year
    std::vector<Subsample> subsamples;       // empty: All
    OutputFormat format = OutputFormat::Text;
    std::filesystem::path out_dir;           // report-all target
    std::optional<DistanceMode> distance_mode;
    std::optional<ChangeMode> change_mode;
    bool pooled = false;                     // estimate: pool years instead of per-year
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitSchemaError = 2;
inline constexpr int kExitUsageError = 3;

/// Runs one command. Data goes to `out`, diagnostics to `diag`, never
/// interleaved. Throws SchemaException / DomainError / UsageError.
void run_command(const RunConfig& config, std::ostream& out, std::ostream& diag);

/// run_command with the error-to-exit-status mapping applied:
/// 0 success, 1 domain error, 2 schema error, 3 usage error.
int dispatch(const RunConfig& config, std::ostream& out, std::ostream& diag);

}  // namespace homebias
