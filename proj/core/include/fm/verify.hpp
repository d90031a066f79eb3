#pragma once

#include "fm/conjugate.hpp"

#include <cstdint>
#include <map>

namespace fm {

enum class CheckStatus { Pass, Fail, Skip };
std::string_view to_string(CheckStatus status);

// Plot data attached to a report: named columns of equal length.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct VerificationReport {
    std::string check;
    double computed = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // computed - bound
    double tolerance = 0.0;
    CheckStatus status = CheckStatus::Skip;
    std::map<std::string, double> parameters;
    std::string grid;  // fingerprint
    std::string note;
    std::map<std::string, std::vector<double>> series;
    Table table;

    // margin = computed - bound, pass iff margin >= -tolerance.
    static VerificationReport judge(std::string check, double computed, double bound, double tolerance);
    static VerificationReport skipped(std::string check, std::string why);
    bool passed() const { return status == CheckStatus::Pass; }
};

std::string fingerprint(const ProductGrid& grid);

// ---- Mourre estimate -------------------------------------------------------------------------

struct MourreConfig {
    double lambda0 = 0.5;
    double delta0 = 0.1;
    double delta = 0.05;     // filter half-width, 0 < delta < delta0
    double epsilon = 0.05;
    ConjugateSpec conjugate{ConjugateKind::Glued, 0.0, 0.0, 4.0, {}};
    bool closed_form = true;  // kinetic commutators from their closed forms (else fully numerical)
    // Eigen-projection policy: window eigenvectors with less than `leakage` of their mass outside
    // |x| <= radius_fraction * L are projected out, at most max_projected of them (-1: no cap).
    double radius_fraction = 0.25;
    double leakage = 0.01;
    int max_projected = -1;
    std::optional<double> d1;  // distance to the thresholds below lambda0; computed when absent
    double tolerance = 0.0;
};

void validate(const MourreConfig& config, double omega);

// (2(d1 - delta0) - epsilon)/(3w/2) inside [delta0, w - delta0], -epsilon/(3w/2) outside.
double mourre_constant(double lambda0, double delta0, double epsilon, double d1, double omega);

// Smallest eigenvalue of the commutator form compressed to ran f_delta(K - lambda0), after the
// localized window eigenvectors are removed, minus the Mourre constant. Uses the exact window
// eigenbasis of the computed spectrum, so the Ritz value is the minimum over all of ran F.
VerificationReport mourre_check(const FloquetHamiltonian& k, const FloquetSpectrum& spectrum,
                                const ThresholdSet& thresholds, const MourreConfig& config,
                                const GrafPartition* partition = nullptr);

struct MourreSearch {
    std::vector<VerificationReport> reports;  // one per (R, delta) tried, in order
    std::optional<std::pair<double, double>> first_pass;  // (R, delta)
    std::vector<double> best_margin_by_scale;  // best over delta for each R
};

// The existence of R_eps and delta_{0,eps} realized as a search: every R in scales, delta halving
// from delta0 for `halvings` steps.
MourreSearch mourre_search(const FloquetHamiltonian& k, const FloquetSpectrum& spectrum, const ThresholdSet& thresholds,
                           MourreConfig config, const GrafPartition& partition, std::vector<double> scales = {4, 8, 16, 32},
                           int halvings = 3);

// ---- virial ---------------------------------------------------------------------------------

// |<phi, i[K, A] phi>| / ||phi||^2 for an eigenpair; rejects ||(K - lambda) phi|| > residual_limit ||phi||.
double virial_residual(const LinearOperator& k, const LinearOperator& a, double lambda, std::span<const cplx> phi,
                       double residual_limit = 1e-8);

// Every eigenvector of the computed spectrum; pass iff the worst residual <= tolerance.
VerificationReport virial_check(const FloquetHamiltonian& k, const FloquetSpectrum& spectrum, const LinearOperator& a,
                                double tolerance = 1e-6);

// ---- free diagnostics -----------------------------------------------------------------------

// Per-mode filter norms of f_{delta0}(n w + H0 - lambda0) and the per-mode constants of the
// direct-integral bound, from the grid symbols.
VerificationReport mode_diagnostics(const ProductGrid& grid, double lambda0, double delta0);

enum class EtaVariable { FreeEnergy, NegativeModeFrequency };

// Checks eta_s^2 + eta_bar_s^2 = 1 on the grid symbol of the variable, and for FreeEnergy with
// s = w the split bound and the bound on <p> eta_bar_w(H0).
VerificationReport eta_partition_diagnostics(const ProductGrid& grid, double scale, EtaVariable variable);

// ---- limiting absorption --------------------------------------------------------------------

enum class LapWeight { Position, Conjugate, Refined, Identity };
std::string_view to_string(LapWeight weight);
LapWeight parse_lap_weight(std::string_view name);

struct LapConfig {
    LapWeight weight = LapWeight::Position;
    double s = 0.6;
    std::vector<double> lambdas;
    std::vector<double> epsilons;  // decreasing
    double absorber_start = 0.75;  // CAP on |x_i| > absorber_start * L
    double absorber_strength = 0.5;
    double tolerance = 1e-6;       // power iteration
    int max_iterations = 500;
    double saturation = 0.05;      // allowed relative change over the last two rungs
    std::uint64_t seed = 1;
};

struct LapPoint {
    double lambda = 0.0;
    double epsilon = 0.0;
    double norm = 0.0;
    int iterations = 0;
};

struct LapResult {
    std::vector<LapPoint> points;
    std::vector<double> last_rung_change;  // per lambda: |N(eps_last) / N(eps_prev) - 1|
    std::vector<double> growth;            // per lambda: N(eps_last) / N(eps_first)
    std::optional<double> holder_exponent;
    bool saturated() const;                // every lambda within the saturation tolerance
    double saturation = 0.05;
};

// Dense path: K - i Gamma with a quadratic absorbing potential, Hessenberg-reduced once, then
// power iteration on (W R W*)^*(W R W*) for every (lambda, eps), R = (K - i Gamma - lambda - i eps)^{-1}.
// `conjugate` is needed for the Conjugate weight.
LapResult lap_scan(const FloquetHamiltonian& k, const LapConfig& config, const LinearOperator* conjugate = nullptr);

VerificationReport lap_report(const LapResult& result, const LapConfig& config, bool expect_saturation);

// ---- three-body ladder ----------------------------------------------------------------------

struct LadderConfig {
    double lambda0 = 0.5;
    double delta0 = 0.1;
    double delta = 0.05;
    double epsilon = 0.05;
    double scale = 8.0;        // R for the subsystem conjugate operator
    int modes = 8;
    int points = 512;
    double half_width = 64.0;
    double fiber_step = 0.01;  // spacing of the intercluster energies lambda_a
    double fiber_max = 0.0;    // 0: up to lambda0 + 2w
    ThresholdOptions thresholds;
};

// Fiber decomposition of f B_{a,R} f over the intercluster energy lambda_a, for a pair cluster a
// of a three-body model: per fiber the exact minimum over ran f_delta(K^a + lambda_a - lambda0)
// of i[K^a, A^a_R] + 2 lambda_a/(w/4 + lambda_a), against (2(d1_a(lambda0) - delta0) - eps/4)/(3w/2).
VerificationReport three_body_ladder_check(const PotentialModel& model, double period, const ClusterDecomposition& a,
                                           const LadderConfig& config);

// The two-body subsystem of a pair cluster (masses, charges and the pair interaction relabelled).
PotentialModel pair_subsystem(const PotentialModel& model, const ClusterDecomposition& a);

}  // namespace fm
