#pragma once

#include "fm/fields.hpp"
#include "fm/geometry.hpp"
#include "fm/grid.hpp"

#include <optional>
#include <string>

namespace fm {

enum class PairFamily { Zero, GaussianWell, SoftCore };

// Static profile of a pair interaction as a function of the physical separation y.
struct PairProfile {
    PairFamily family = PairFamily::Zero;
    double strength = 0.0;  // Gaussian: well depth (V(0) = -strength); soft core: v0
    double width = 1.0;

    double value(double y) const;
    double d1(double y) const;
    double d2(double y) const;
    std::string label() const;
};

struct PairInteraction {
    int first = 0;
    int second = 1;
    PairProfile profile;
};

// Pair potentials V_jk(t, y) = profile(y + c_jk(t)) with the shifts generated by the uniform field.
class PotentialModel {
public:
    PotentialModel(MassGeometry geometry, std::vector<PairInteraction> pairs, std::optional<AcStarkFields> fields = {});

    const MassGeometry& geometry() const { return geometry_; }
    const std::vector<PairInteraction>& pairs() const { return pairs_; }
    const std::optional<AcStarkFields>& fields() const { return fields_; }
    bool time_independent() const;

    double pair_shift(const PairInteraction& p, double t) const;
    double pair_shift_rate(const PairInteraction& p, double t) const;
    double pair_shift_accel(const PairInteraction& p, double t) const;

    // Full potential (or the part with pairs inside a's clusters) at an internal point.
    double value(double t, const Eigen::VectorXd& x, const ClusterDecomposition* within = nullptr) const;
    Eigen::VectorXd gradient(double t, const Eigen::VectorXd& x, const ClusterDecomposition* within = nullptr) const;
    double time_derivative(double t, const Eigen::VectorXd& x, const ClusterDecomposition* within = nullptr) const;

    // Samples on the grid: (time sample k, spatial index) -> value, length modes * spatial.
    Vec sample(const ProductGrid& grid, const ClusterDecomposition* within = nullptr) const;
    Vec sample_at(const ProductGrid& grid, double t, const ClusterDecomposition* within = nullptr) const;
    Vec sample_virial(const ProductGrid& grid) const;          // x . grad V
    Vec sample_time_derivative(const ProductGrid& grid) const;  // dV/dt

private:
    bool included(const PairInteraction& p, const ClusterDecomposition* within) const;

    MassGeometry geometry_;
    std::vector<PairInteraction> pairs_;
    std::optional<AcStarkFields> fields_;
};

struct DecayLine {
    std::string bound;
    double constant = 0.0;
    bool finite = true;
};

// Smallest constants C in |d_y^a V| <= C<y>^{-rho-|a|} (|a| <= 2), |d_t d_y^a V| <= C<y>^{-1-rho-|a|}
// (|a| <= 1) and |d_t^2 V| <= C<y>^{-1-rho}, estimated on a logarithmic sample of y and one period of t.
std::vector<DecayLine> decay_report(const PotentialModel& model, const PairInteraction& pair, double rho,
                                    double y_max = 1e4);

// Throws decay-violation when any line of decay_report is unbounded.
void require_decay(const PotentialModel& model, double rho);

}  // namespace fm
