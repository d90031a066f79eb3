#pragma once

#include "fm/linear_operator.hpp"
#include "fm/potentials.hpp"
#include "fm/spectral.hpp"

#include <memory>
#include <optional>

namespace fm {

// K = D_t + p^2/2 + V(t, x) on the product grid, with V sampled at the M time samples.
// With a cluster decomposition a only the pairs inside a's clusters enter: K_a = D_t + p^2/2 + V^a.
class FloquetHamiltonian {
public:
    FloquetHamiltonian(ProductGrid grid, PotentialModel model, std::optional<ClusterDecomposition> cluster = {});

    const ProductGrid& grid() const { return grid_; }
    const PotentialModel& model() const { return model_; }
    const MassGeometry& geometry() const { return model_.geometry(); }
    bool time_independent() const { return model_.time_independent(); }
    const std::optional<ClusterDecomposition>& cluster() const { return cluster_; }

    const LinearOperator& full() const { return full_; }
    const LinearOperator& free() const { return free_; }
    const LinearOperator& potential() const { return potential_; }
    const Vec& potential_samples() const { return samples_; }

    // Real symmetric p^2/2 + V on one spatial block; only for time independent potentials.
    Eigen::MatrixXd static_block_dense(std::size_t max_dim = kDenseLimit) const;

private:
    ProductGrid grid_;
    PotentialModel model_;
    std::optional<ClusterDecomposition> cluster_;
    Vec samples_;
    LinearOperator free_;
    LinearOperator potential_;
    LinearOperator full_;
};

// Eigenpairs of K: from the dense matrix, or mode by mode when V does not depend on time.
class FloquetSpectrum {
public:
    enum class Kind { Dense, ModeBlocks };

    static FloquetSpectrum compute(const FloquetHamiltonian& k);
    // Only eigenpairs with eigenvalue in (lo, hi]; the mode-block path still returns everything.
    static FloquetSpectrum compute_window(const FloquetHamiltonian& k, double lo, double hi);
    static FloquetSpectrum from_dense(const ProductGrid& grid, std::shared_ptr<const Eigensystem> eig, bool complete);

    Kind kind() const { return kind_; }
    bool complete() const { return complete_; }
    std::size_t count() const { return values_.size(); }
    double value(std::size_t i) const { return values_[i]; }
    const RealVec& values() const { return values_; }
    Vec vector(std::size_t i) const;
    std::vector<std::size_t> in_window(double lo, double hi) const;  // lo < value < hi
    const ProductGrid& grid() const { return grid_; }

private:
    explicit FloquetSpectrum(ProductGrid grid) : grid_(std::move(grid)) {}

    ProductGrid grid_;
    Kind kind_ = Kind::Dense;
    bool complete_ = true;
    RealVec values_;
    std::shared_ptr<const Eigensystem> dense_;
    std::shared_ptr<const RealEigensystem> block_;
    std::vector<std::pair<int, std::size_t>> labels_;  // (mode index, block eigen index)
};

// Weighted mean of the temporal mode number n over a state.
double mode_centroid(const ProductGrid& grid, std::span<const cplx> state);

struct PeriodicityCount {
    double lambda = 0.0;
    double width = 0.0;
    std::size_t lower = 0;  // eigenvalues in [lambda, lambda + width) with centroid in the lower band
    std::size_t upper = 0;  // in [lambda + w, lambda + w + width), centroid one mode higher
    bool matches() const { return lower == upper; }
};

// Compares eigenvalue counts of two windows one ladder step apart. Only eigenvectors whose mode
// centroid keeps one mode away from the truncation on the shifted side are counted, so the two
// sets correspond under the shift n -> n + 1. inconclusive-window when the windows leave the
// interior of the mode ladder or a centroid sits within 0.1 of a band edge.
PeriodicityCount omega_periodicity_check(const FloquetSpectrum& spectrum, double lambda, double width);

// Mass of a spatial block outside the ball |x| <= radius (per unit total mass).
double mass_outside(const ProductGrid& grid, std::span<const cplx> state, double radius);

// Union of ladders theta + omega*Z, stored by base points in [0, omega).
class ThresholdSet {
public:
    ThresholdSet(double omega, std::vector<double> bases);

    double omega() const { return omega_; }
    const std::vector<double>& bases() const { return bases_; }
    double d0(double lambda) const;  // dist(lambda, set)
    double d1(double lambda) const;  // dist(lambda, set ∩ (-inf, lambda])
    std::vector<double> points_in(double lo, double hi) const;
    ThresholdSet merged(const ThresholdSet& other) const;

private:
    double omega_;
    std::vector<double> bases_;
};

struct QuasiEnergy {
    double value = 0.0;      // in [0, omega)
    double leakage = 0.0;    // mass outside |x| <= L/4
    bool bound = false;
};

struct ThresholdOptions {
    int points = 512;
    double half_width = 32.0;
    int steps_per_period = 512;
    double bound_radius_fraction = 0.25;
    double bound_leakage = 0.01;
};

// Quasi-energies of the subsystem K^a on its own internal space (dimension 0 or 1), from the
// monodromy U^a(T,0) (or the static spectrum when V^a does not depend on time).
std::vector<QuasiEnergy> subsystem_quasi_energies(const PotentialModel& model, double period,
                                                  const ClusterDecomposition& a, const ThresholdOptions& opt = {});

// Theta: point spectra of all K^a with a != a_max.
ThresholdSet thresholds(const PotentialModel& model, double period, const ThresholdOptions& opt = {});
// Point spectrum of K itself from localized eigenvectors of a computed spectrum.
std::vector<double> localized_eigenvalues(const FloquetSpectrum& spectrum, double radius_fraction = 0.25,
                                          double leakage = 0.01);
// Theta-hat_a = union over b ⊂ a of the point spectra of K^b; for a = a_max pass the full spectrum.
ThresholdSet refined_thresholds(const PotentialModel& model, double period, const ClusterDecomposition& a,
                                const ThresholdOptions& opt = {}, const FloquetSpectrum* full = nullptr);

}  // namespace fm
