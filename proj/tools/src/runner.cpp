#include "runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#ifndef FM_VERSION
#define FM_VERSION "0.0.0"
#endif

namespace fmtool {

fm::VerificationReport run_guarded(const std::string& name, const CheckRun& run, Experiment& experiment) {
    try {
        return run(experiment);
    } catch (const fm::Error& e) {
        if (e.kind() == fm::ErrorKind::InconclusiveWindow) return fm::VerificationReport::skipped(name, e.what());
        fm::VerificationReport r;
        r.check = name;
        r.status = fm::CheckStatus::Fail;
        r.note = std::string("error: ") + e.what();
        return r;
    } catch (const std::exception& e) {
        fm::VerificationReport r;
        r.check = name;
        r.status = fm::CheckStatus::Fail;
        r.note = std::string("error: ") + e.what();
        return r;
    }
}

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    const std::uint64_t seed = options.seed.value_or(config.seed);
    std::vector<CheckRun> plans;
    for (std::size_t i = 0; i < config.checks.size(); ++i)
        plans.push_back(plan_check(config, config.checks[i], seed + i));

    Experiment experiment(config);
    const std::size_t count = plans.size();
    std::vector<fm::VerificationReport> reports(count);
    std::vector<double> seconds(count, 0.0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < count;) {
            const auto start = std::chrono::steady_clock::now();
            reports[i] = run_guarded(config.checks[i].name, plans[i], experiment);
            seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
    };
    const int workers = std::clamp(options.workers, 1, static_cast<int>(std::max<std::size_t>(count, 1)));
    {
        std::vector<std::jthread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
    }

    RunResult result;
    result.manifest = {config.source.filename().string(), config.hash(), FM_VERSION, seed, workers, {}};
    if (options.write) std::filesystem::create_directories(config.output.directory);
    for (std::size_t i = 0; i < count; ++i) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "%02zu", i + 1);
        ManifestEntry entry{config.checks[i].name, config.checks[i].where, "", "",
                            std::string(fm::to_string(reports[i].status)), seconds[i]};
        if (config.output.json) entry.report = std::string("report-") + stem + "-" + entry.check + ".json";
        if (config.output.csv && !reports[i].table.rows.empty()) entry.table = entry.check + "-" + stem + ".csv";
        if (options.write) {
            if (!entry.report.empty()) write_json_file(config.output.directory / entry.report, to_json(reports[i]));
            if (!entry.table.empty()) {
                std::ofstream out(config.output.directory / entry.table);
                write_csv(out, reports[i].table);
            }
        }
        result.manifest.entries.push_back(std::move(entry));
    }
    if (options.write) write_json_file(config.output.directory / "manifest.json", to_json(result.manifest));
    result.reports = std::move(reports);
    return result;
}

int exit_status(const std::vector<fm::VerificationReport>& reports) {
    return std::any_of(reports.begin(), reports.end(),
                       [](const auto& r) { return r.status == fm::CheckStatus::Fail; })
               ? 1
               : 0;
}

int workers_from_env() {
    if (const char* v = std::getenv("FM_WORKERS")) {
        const int n = std::atoi(v);
        if (n > 0) return std::min(n, 64);
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::optional<std::uint64_t> seed_from_env() {
    if (const char* v = std::getenv("FM_SEED"); v && *v) return std::strtoull(v, nullptr, 10);
    return std::nullopt;
}

}  // namespace fmtool
