#pragma once

#include "checks.hpp"
#include "report_io.hpp"

#include <optional>

namespace fmtool {

struct RunOptions {
    int workers = 1;
    std::optional<std::uint64_t> seed;  // replaces the config seed
    bool write = true;                  // false: compute only, touch no files
};

struct RunResult {
    Manifest manifest;
    std::vector<fm::VerificationReport> reports;
};

// Runs one planned check. A core error becomes a FAIL report carrying the message, except an
// inconclusive window, which is a SKIP.
fm::VerificationReport run_guarded(const std::string& name, const CheckRun& run, Experiment& experiment);

// Plans every check first (so a bad config fails before any work), runs them on a pool of
// workers and writes the reports, tables and manifest from this thread only.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options);

// 1 if any check failed, else 0.
int exit_status(const std::vector<fm::VerificationReport>& reports);

// FM_WORKERS, clamped to [1, 64]; defaults to the hardware concurrency.
int workers_from_env();
std::optional<std::uint64_t> seed_from_env();

}  // namespace fmtool
