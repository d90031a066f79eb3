#pragma once

#include "fm/geometry.hpp"
#include "fm/grid.hpp"

#include <optional>

namespace fm {

// Smooth step: 1 on s <= lo, 0 on s >= hi, built from exp(-1/t).
double smooth_step(double s, double lo, double hi);
double smooth_step_derivative(double s, double lo, double hi);

// Energy cutoffs: eta = 0 on (-inf, 1], eta = 1 on [2, inf), eta^2 + eta_bar^2 = 1 everywhere.
// The scaled versions are eta(tau / s).
double eta(double tau);
double eta_bar(double tau);

struct GrafParameters {
    double kappa0 = 2.0;
    double r0 = 1.0;
    std::optional<double> r1;  // requested inner radius; derived from the geometry when absent
};

// Per-cluster samples of j_{a,R} and its analytic gradient on the spatial block of a grid.
struct SampledPartition {
    double scale = 1.0;
    std::vector<ClusterDecomposition> clusters;
    std::vector<RealVec> values;                 // [cluster][spatial]
    std::vector<std::vector<RealVec>> gradient;  // [cluster][axis][spatial]
};

struct PartitionReport {
    double sum_deviation = 0.0;         // max |sum_a j_a^2 - 1|
    double range_violation = 0.0;       // max distance of j_a outside [0, 1]
    double inner_violation = 0.0;       // max (|x^a| - r0) on supp j_a
    double outer_violation = 0.0;       // max (r1 - |x^{(jk)}|) on supp j_a for (jk) not in a
    double overlap = 0.0;               // max |j_a(x) j_b(kappa x)| for b not refining a
    double identity_deviation = 0.0;    // max |j_a(x) - j_a(x) sum_{b ⊂ a} j_b(kappa x)^2|
    std::vector<double> kappas;
    bool ok(double tol = 1e-12) const;
};

// Partition of unity of the internal space X by cluster geometry. The weights are explicit
// smooth functions of |x|, |x^{(jk)}|; normalising them gives sum j_a^2 = 1 exactly.
//   N=2: a_max lives in a ball, a_min outside a smaller ball.
//   N=3: a_max in a ball, each pair in a strip around its axis outside a ball, a_min away
//        from every strip.
class GrafPartition {
public:
    GrafPartition(MassGeometry geometry, GrafParameters params = {});

    const MassGeometry& geometry() const { return geometry_; }
    const std::vector<ClusterDecomposition>& clusters() const { return clusters_; }
    double kappa0() const { return params_.kappa0; }
    double r0() const { return params_.r0; }
    double r1() const { return r1_; }
    std::size_t index_of(const ClusterDecomposition& a) const;

    // Unscaled j_a(x) and gradients, in lattice order.
    RealVec values(const Eigen::VectorXd& x) const;
    std::vector<Eigen::VectorXd> gradients(const Eigen::VectorXd& x) const;

    SampledPartition sample(const ProductGrid& grid, double scale) const;
    // Checks every defining property at the grid points x/scale; throws partition-construction-failure.
    PartitionReport verify(const ProductGrid& grid, double scale, std::vector<double> kappas = {}) const;

private:
    struct Weights {
        RealVec w;
        std::vector<Eigen::VectorXd> dw;
    };
    Weights weights(const Eigen::VectorXd& x) const;

    MassGeometry geometry_;
    GrafParameters params_;
    std::vector<ClusterDecomposition> clusters_;
    std::vector<PairAxis> axes_;
    std::vector<std::size_t> pair_cluster_;  // lattice index of the pair cluster of each axis
    double r1_ = 0.0;
    // Radii of the explicit construction (unscaled).
    double ball_inner_ = 0.0, ball_outer_ = 0.0;    // a_max
    double far_inner_ = 0.0, far_outer_ = 0.0;      // radial factor of the other weights
    double strip_inner_ = 0.0, strip_outer_ = 0.0;  // pair strips
    double gap_inner_ = 0.0, gap_outer_ = 0.0;      // a_min away from strips
};

}  // namespace fm
