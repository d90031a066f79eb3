#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace fm {

// A set partition of the particle labels {0, ..., N-1}; clusters are kept sorted so that
// equal decompositions compare equal.
class ClusterDecomposition {
public:
    explicit ClusterDecomposition(std::vector<std::vector<int>> clusters);

    static ClusterDecomposition coarsest(int particles);  // one cluster
    static ClusterDecomposition finest(int particles);    // all singletons

    const std::vector<std::vector<int>>& clusters() const { return clusters_; }
    int cluster_count() const { return static_cast<int>(clusters_.size()); }
    int particles() const;

    // b.refines(a) is the order b ⊂ a: every cluster of b sits inside a cluster of a.
    bool refines(const ClusterDecomposition& a) const;
    bool joins(int j, int k) const;  // j and k lie in one cluster
    bool is_coarsest() const { return clusters_.size() == 1; }
    bool is_finest() const;

    std::string label() const;  // e.g. "{1,2}{3}" with 1-based labels
    bool operator==(const ClusterDecomposition&) const = default;

private:
    std::vector<std::vector<int>> clusters_;
};

// All set partitions of N labels, coarsest first and finest last.
std::vector<ClusterDecomposition> cluster_lattice(int particles);

// Relative coordinate of a pair inside the internal space: the unit vector spanning X^{(j,k)} and
// the factor that maps the signed coordinate to the physical separation r_j - r_k.
struct PairAxis {
    int first = 0;
    int second = 1;
    Eigen::VectorXd direction;
    double separation_factor = 1.0;
};

// Internal configuration space of N particles on a line with the mass-weighted metric. Internal
// coordinates are Jacobi coordinates, orthonormal for that metric, so the kinetic energy is
// one half of the flat Laplacian in them.
class MassGeometry {
public:
    explicit MassGeometry(std::vector<double> masses, std::vector<double> charges = {}, int space_dim = 1);

    int particles() const { return static_cast<int>(masses_.size()); }
    int internal_dim() const { return particles() - 1; }
    const std::vector<double>& masses() const { return masses_; }
    const std::vector<double>& charges() const { return charges_; }

    double mass_inner(const Eigen::VectorXd& r, const Eigen::VectorXd& s) const;

    // Columns are the Jacobi vectors in particle coordinates.
    const Eigen::MatrixXd& jacobi_basis() const { return basis_; }

    Eigen::VectorXd to_internal(const Eigen::VectorXd& positions) const;
    Eigen::VectorXd to_particles(const Eigen::VectorXd& internal) const;  // centre of mass at 0

    // Orthogonal projections in internal coordinates onto X_a (inter-cluster) and X^a (intra-cluster).
    Eigen::MatrixXd inter_projector(const ClusterDecomposition& a) const;
    Eigen::MatrixXd intra_projector(const ClusterDecomposition& a) const;

    PairAxis pair_axis(int j, int k) const;
    std::vector<PairAxis> pair_axes() const;

    // Mass-weighted coordinates of the vector ((q_j/m_j))_j projected onto X; the field direction.
    Eigen::VectorXd field_direction() const;

private:
    std::vector<double> masses_;
    std::vector<double> charges_;
    Eigen::MatrixXd basis_;
};

}  // namespace fm
