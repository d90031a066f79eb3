#pragma once

#include "config.hpp"

#include "fm/propagate.hpp"

#include <functional>
#include <memory>
#include <mutex>

namespace fmtool {

// Shared state of one experiment, computed on first use and safe to request from several workers.
class Experiment {
public:
    explicit Experiment(const ExperimentConfig& config);

    const ExperimentConfig& config() const { return config_; }
    const fm::PotentialModel& model() const { return model_; }
    const fm::ProductGrid& grid() const { return grid_; }
    const fm::FloquetHamiltonian& hamiltonian() const { return hamiltonian_; }
    const fm::FloquetSpectrum& spectrum();
    const fm::ThresholdSet& thresholds();
    const fm::GrafPartition& partition() const { return partition_; }

private:
    const ExperimentConfig& config_;
    fm::PotentialModel model_;
    fm::ProductGrid grid_;
    fm::FloquetHamiltonian hamiltonian_;
    fm::GrafPartition partition_;
    std::once_flag spectrum_once_, thresholds_once_;
    std::unique_ptr<fm::FloquetSpectrum> spectrum_;
    std::unique_ptr<fm::ThresholdSet> thresholds_;
};

using CheckRun = std::function<fm::VerificationReport(Experiment&)>;

// Parses and range-checks one check's parameters; the returned callable runs it.
// Throws ConfigError on any schema or precondition violation.
CheckRun plan_check(const ExperimentConfig& config, const CheckSpec& check, std::uint64_t seed);

// plan_check on every check of the config.
void validate_checks(const ExperimentConfig& config);

}  // namespace fmtool
