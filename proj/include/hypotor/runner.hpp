#pragma once

#include "hypotor/specfile.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hypotor {

// process exit codes (also returned in RunResult)
inline constexpr int kExitOk = 0;
inline constexpr int kExitParseError = 2;
inline constexpr int kExitPrecondition = 3;
inline constexpr int kExitRefinementExhausted = 4;
inline constexpr int kExitNoneWithinBudget = 5;

struct RunOptions {
    std::vector<std::string> only;  // task-id filter; empty = all
    std::string out_dir;            // when set, write report.json and CSVs
    bool parallel = false;
};

struct RunResult {
    Json report;
    int exit_code = kExitOk;
};

/// Executes the task list of a parsed spec; deterministic given identical
/// budgets (the wall_clock_ms field is the only run-to-run difference).
RunResult run_spec(const SpecFile& spec, const RunOptions& opts);
RunResult run_file(const std::string& path, const RunOptions& opts);

/// Renders one of the plot-ready tables from a report. Missing table -> error.
enum class CsvTable { Shells, Modes, Fits };
std::string render_csv(const Json& report, CsvTable which);

/// Report serialization used for both files and stdout (newline-terminated,
/// indent 2; byte-stable for identical content).
std::string report_to_string(const Json& report);

}  // namespace hypotor
