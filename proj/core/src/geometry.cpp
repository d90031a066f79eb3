#include "fm/geometry.hpp"

#include "fm/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace fm {

namespace {

std::vector<std::vector<int>> canonical(std::vector<std::vector<int>> clusters) {
    for (auto& c : clusters) std::sort(c.begin(), c.end());
    std::sort(clusters.begin(), clusters.end());
    return clusters;
}

}  // namespace

ClusterDecomposition::ClusterDecomposition(std::vector<std::vector<int>> clusters)
    : clusters_(canonical(std::move(clusters))) {
    std::vector<int> seen;
    for (const auto& c : clusters_) {
        require(!c.empty(), ErrorKind::InvalidInput, "empty cluster");
        seen.insert(seen.end(), c.begin(), c.end());
    }
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 0; i < seen.size(); ++i)
        require(seen[i] == static_cast<int>(i), ErrorKind::InvalidInput,
                "clusters must partition the labels 0..N-1 exactly once");
}

ClusterDecomposition ClusterDecomposition::coarsest(int particles) {
    std::vector<int> all(particles);
    for (int j = 0; j < particles; ++j) all[j] = j;
    return ClusterDecomposition({all});
}

ClusterDecomposition ClusterDecomposition::finest(int particles) {
    std::vector<std::vector<int>> singles;
    for (int j = 0; j < particles; ++j) singles.push_back({j});
    return ClusterDecomposition(std::move(singles));
}

int ClusterDecomposition::particles() const {
    int n = 0;
    for (const auto& c : clusters_) n += static_cast<int>(c.size());
    return n;
}

bool ClusterDecomposition::is_finest() const {
    return std::all_of(clusters_.begin(), clusters_.end(), [](const auto& c) { return c.size() == 1; });
}

bool ClusterDecomposition::refines(const ClusterDecomposition& a) const {
    return std::all_of(clusters_.begin(), clusters_.end(), [&](const std::vector<int>& mine) {
        return std::any_of(a.clusters_.begin(), a.clusters_.end(), [&](const std::vector<int>& theirs) {
            return std::includes(theirs.begin(), theirs.end(), mine.begin(), mine.end());
        });
    });
}

bool ClusterDecomposition::joins(int j, int k) const {
    for (const auto& c : clusters_) {
        bool hj = std::binary_search(c.begin(), c.end(), j);
        bool hk = std::binary_search(c.begin(), c.end(), k);
        if (hj || hk) return hj && hk;
    }
    return false;
}

std::string ClusterDecomposition::label() const {
    std::ostringstream out;
    for (const auto& c : clusters_) {
        out << '{';
        for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "," : "") << c[i] + 1;
        out << '}';
    }
    return out.str();
}

std::vector<ClusterDecomposition> cluster_lattice(int particles) {
    require(particles >= 1, ErrorKind::InvalidInput, "need at least one particle");
    std::vector<ClusterDecomposition> out;
    std::vector<std::vector<int>> current;
    std::function<void(int)> grow = [&](int j) {
        if (j == particles) {
            out.emplace_back(current);
            return;
        }
        for (std::size_t c = 0; c < current.size(); ++c) {  // index: grow() may reallocate
            current[c].push_back(j);
            grow(j + 1);
            current[c].pop_back();
        }
        current.push_back({j});
        grow(j + 1);
        current.pop_back();
    };
    grow(0);
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.cluster_count() < b.cluster_count();
    });
    return out;
}

MassGeometry::MassGeometry(std::vector<double> masses, std::vector<double> charges, int space_dim)
    : masses_(std::move(masses)), charges_(std::move(charges)) {
    require(space_dim == 1, ErrorKind::UnsupportedConfiguration, "only one spatial dimension is supported");
    const int n = particles();
    require(n == 2 || n == 3, ErrorKind::UnsupportedConfiguration,
            "particle count " + std::to_string(n) + " is outside {2,3}");
    for (double m : masses_)
        require(std::isfinite(m) && m > 0.0, ErrorKind::InvalidInput, "masses must be positive and finite");
    if (charges_.empty()) charges_.assign(n, 0.0);
    require(static_cast<int>(charges_.size()) == n, ErrorKind::InvalidInput, "one charge per particle");

    basis_ = Eigen::MatrixXd::Zero(n, n - 1);
    double cluster_mass = masses_[0];
    for (int i = 0; i + 1 < n; ++i) {
        const double next = masses_[i + 1];
        const double reduced = cluster_mass * next / (cluster_mass + next);
        for (int j = 0; j <= i; ++j) basis_(j, i) = 1.0 / cluster_mass;
        basis_(i + 1, i) = -1.0 / next;
        basis_.col(i) *= std::sqrt(reduced);
        cluster_mass += next;
    }
}

double MassGeometry::mass_inner(const Eigen::VectorXd& r, const Eigen::VectorXd& s) const {
    double acc = 0.0;
    for (int j = 0; j < particles(); ++j) acc += masses_[j] * r(j) * s(j);
    return acc;
}

Eigen::VectorXd MassGeometry::to_internal(const Eigen::VectorXd& positions) const {
    require(positions.size() == particles(), ErrorKind::InvalidInput, "position vector has wrong length");
    Eigen::VectorXd weighted = positions;
    for (int j = 0; j < particles(); ++j) weighted(j) *= masses_[j];
    return basis_.transpose() * weighted;
}

Eigen::VectorXd MassGeometry::to_particles(const Eigen::VectorXd& internal) const {
    require(internal.size() == internal_dim(), ErrorKind::InvalidInput, "internal vector has wrong length");
    return basis_ * internal;
}

Eigen::MatrixXd MassGeometry::inter_projector(const ClusterDecomposition& a) const {
    require(a.particles() == particles(), ErrorKind::InvalidInput, "decomposition does not match particle count");
    const int dim = internal_dim();
    Eigen::MatrixXd generators(dim, a.cluster_count());
    for (int c = 0; c < a.cluster_count(); ++c) {
        Eigen::VectorXd indicator = Eigen::VectorXd::Zero(particles());
        for (int j : a.clusters()[c]) indicator(j) = 1.0;
        generators.col(c) = to_internal(indicator);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(generators, Eigen::ComputeThinU);
    const double cutoff = 1e-12 * std::max(1.0, svd.singularValues().size() ? svd.singularValues()(0) : 0.0);
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > cutoff) proj += svd.matrixU().col(i) * svd.matrixU().col(i).transpose();
    return proj;
}

Eigen::MatrixXd MassGeometry::intra_projector(const ClusterDecomposition& a) const {
    return Eigen::MatrixXd::Identity(internal_dim(), internal_dim()) - inter_projector(a);
}

PairAxis MassGeometry::pair_axis(int j, int k) const {
    require(j != k && j >= 0 && k >= 0 && j < particles() && k < particles(), ErrorKind::InvalidInput,
            "pair labels out of range");
    Eigen::VectorXd row = (basis_.row(j) - basis_.row(k)).transpose();
    PairAxis axis;
    axis.first = j;
    axis.second = k;
    axis.separation_factor = row.norm();
    axis.direction = row / axis.separation_factor;
    return axis;
}

std::vector<PairAxis> MassGeometry::pair_axes() const {
    std::vector<PairAxis> out;
    for (int j = 0; j < particles(); ++j)
        for (int k = j + 1; k < particles(); ++k) out.push_back(pair_axis(j, k));
    return out;
}

Eigen::VectorXd MassGeometry::field_direction() const {
    Eigen::VectorXd ratio(particles());
    for (int j = 0; j < particles(); ++j) ratio(j) = charges_[j] / masses_[j];
    return to_internal(ratio);
}

}  // namespace fm
