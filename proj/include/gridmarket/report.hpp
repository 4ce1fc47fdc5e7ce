#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridmarket/engine.hpp"

namespace gridmarket {

/// Thrown when report output cannot be written; the message carries the path.
class ReportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Paths written by emitReports, relative to the output directory.
struct RunArtifacts {
    std::filesystem::path root;
    std::vector<std::filesystem::path> files;
};

/// summary.json content: statistics, diagnostics, seed and a config echo, in a
/// fixed key order.
std::string summaryJson(const RunResult& run);

/// Writes prices.csv, utilization.csv, xi.csv, solver.csv, market.csv,
/// summary.json and plots/{prices,utilization,spend}.svg. If writing fails,
/// everything this call created is removed and ReportError is thrown.
RunArtifacts emitReports(const RunResult& run, const std::filesystem::path& outDir);

struct SweepOptions {
    std::vector<std::size_t> categoryCounts;
    int seeds = 3;
    std::uint64_t baseSeed = 1;
    int steps = 150;
    int deskScale = 10;
    bool recordTiming = true;
    bool writeRuns = true;  // per-run reports under runs/
};

struct SweepRow {
    std::size_t categories = 0;
    int runs = 0;
    int failures = 0;
    double meanQueries = 0.0;
    double meanMillis = 0.0;
    double meanResidual = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::string> errors;
};

/// Runs each preset for seeds baseSeed .. baseSeed + seeds - 1 and writes
/// sweep.csv with plots/{queries,runtime,spend}.svg. A failing run is recorded
/// and the sweep continues. Throws ConfigError for fewer than two presets.
SweepResult runSweep(const SweepOptions& options, const std::filesystem::path& outDir);

}  // namespace gridmarket
