#include "fm/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fm {

namespace {

double psi(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double dpsi(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

// h rises from 0 at t <= 0 to 1 at t >= 1.
double rise(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = psi(t), b = psi(1.0 - t);
    return a / (a + b);
}

double drise(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double a = psi(t), b = psi(1.0 - t);
    const double da = dpsi(t), db = -dpsi(1.0 - t);
    return (da * (a + b) - a * (da + db)) / ((a + b) * (a + b));
}

Eigen::VectorXd unit_or_zero(const Eigen::VectorXd& x) {
    const double n = x.norm();
    return n > 0.0 ? Eigen::VectorXd(x / n) : Eigen::VectorXd::Zero(x.size());
}

}  // namespace

double smooth_step(double s, double lo, double hi) { return 1.0 - rise((s - lo) / (hi - lo)); }
double smooth_step_derivative(double s, double lo, double hi) { return -drise((s - lo) / (hi - lo)) / (hi - lo); }

double eta(double tau) { return std::sin(0.5 * M_PI * rise(tau - 1.0)); }
double eta_bar(double tau) { return std::cos(0.5 * M_PI * rise(tau - 1.0)); }

bool PartitionReport::ok(double tol) const {
    return sum_deviation <= tol && range_violation <= 1e-15 && inner_violation <= 0.0 && outer_violation <= 0.0 &&
           overlap == 0.0 && identity_deviation <= tol;
}

GrafPartition::GrafPartition(MassGeometry geometry, GrafParameters params)
    : geometry_(std::move(geometry)), params_(params) {
    require(params_.kappa0 > 1.0, ErrorKind::InvalidInput, "kappa0 must exceed 1");
    require(params_.r0 > 0.0, ErrorKind::InvalidInput, "r0 must be positive");
    clusters_ = cluster_lattice(geometry_.particles());
    axes_ = geometry_.pair_axes();
    const double r0 = params_.r0, k0 = params_.kappa0;
    ball_outer_ = r0;
    ball_inner_ = r0 / k0;
    far_inner_ = r0 / k0;
    far_outer_ = r0;
    if (geometry_.particles() == 2) {
        r1_ = params_.r1.value_or(r0 / (2.0 * k0));
        require(r1_ > 0.0 && r1_ <= far_inner_, ErrorKind::PartitionConstruction,
                "r1 must lie in (0, r0/kappa0] for two particles");
        return;
    }
    far_outer_ = 0.5 * (far_inner_ + ball_outer_);
    for (const auto& ax : axes_) {
        std::vector<std::vector<int>> c{{ax.first, ax.second}};
        for (int j = 0; j < 3; ++j)
            if (j != ax.first && j != ax.second) c.push_back({j});
        pair_cluster_.push_back(index_of(ClusterDecomposition(c)));
    }
    // Strip half-width s: pair strips |x^P| < s may only meet the scaled strips |x^Q| < s/kappa
    // inside |x| <= far_inner, and the other pair coordinates stay >= r1 on a strip.
    const double u = far_inner_;
    double vertex = 0.0;  // parallelogram vertex radius for s = 1
    auto pair_clearance = [&](double s) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < axes_.size(); ++p)
            for (std::size_t q = 0; q < axes_.size(); ++q) {
                if (p == q) continue;
                const double c = std::abs(axes_[p].direction.dot(axes_[q].direction));
                const double sn = std::sqrt(std::max(0.0, 1.0 - c * c));
                best = std::min(best, sn * std::sqrt(std::max(0.0, u * u - s * s)) - c * s);
            }
        return best;
    };
    for (std::size_t p = 0; p < axes_.size(); ++p)
        for (std::size_t q = 0; q < axes_.size(); ++q) {
            if (p == q) continue;
            Eigen::Matrix2d n;
            n.row(0) = axes_[p].direction.transpose();
            n.row(1) = axes_[q].direction.transpose();
            const Eigen::Matrix2d inv = n.inverse();
            for (double sp : {1.0, -1.0})
                for (double sq : {1.0, -1.0})
                    vertex = std::max(vertex, (inv * Eigen::Vector2d(sp, sq / k0)).norm());
        }
    // Largest s balancing the a_min gap s/kappa0 against the pair clearance.
    double lo = 0.0, hi = std::min(u, 0.999 * u / vertex);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid / k0 < pair_clearance(mid)) lo = mid; else hi = mid;
    }
    const double s = lo;
    require(s > 0.0, ErrorKind::PartitionConstruction, "no admissible strip width for these masses");
    strip_outer_ = s;
    strip_inner_ = 0.5 * s;
    gap_inner_ = s / k0;
    gap_outer_ = 0.5 * (gap_inner_ + s);
    const double achievable = 0.999 * std::min(gap_inner_, pair_clearance(s));
    r1_ = params_.r1.value_or(achievable);
    require(r1_ > 0.0 && r1_ <= achievable, ErrorKind::PartitionConstruction,
            "requested r1 exceeds the admissible value " + std::to_string(achievable) + " for these masses");
}

std::size_t GrafPartition::index_of(const ClusterDecomposition& a) const {
    for (std::size_t i = 0; i < clusters_.size(); ++i)
        if (clusters_[i] == a) return i;
    throw Error(ErrorKind::InvalidInput, "cluster decomposition " + a.label() + " is not in the lattice");
}

GrafPartition::Weights GrafPartition::weights(const Eigen::VectorXd& x) const {
    const std::size_t n = clusters_.size();
    const auto dim = x.size();
    Weights out{RealVec(n, 0.0), std::vector<Eigen::VectorXd>(n, Eigen::VectorXd::Zero(dim))};
    const double r = x.norm();
    const Eigen::VectorXd er = unit_or_zero(x);

    out.w[0] = smooth_step(r, ball_inner_, ball_outer_);
    out.dw[0] = smooth_step_derivative(r, ball_inner_, ball_outer_) * er;

    const double far = 1.0 - smooth_step(r, far_inner_, far_outer_);
    const Eigen::VectorXd dfar = -smooth_step_derivative(r, far_inner_, far_outer_) * er;
    const std::size_t last = n - 1;  // a_min

    if (geometry_.particles() == 2) {
        out.w[last] = far;
        out.dw[last] = dfar;
        return out;
    }
    double gap = 1.0;
    Eigen::VectorXd dgap = Eigen::VectorXd::Zero(dim);
    std::vector<double> gap_factor(axes_.size());
    std::vector<Eigen::VectorXd> gap_grad(axes_.size());
    for (std::size_t p = 0; p < axes_.size(); ++p) {
        const double y = axes_[p].direction.dot(x);
        const Eigen::VectorXd ey = (y >= 0.0 ? 1.0 : -1.0) * axes_[p].direction;
        gap_factor[p] = 1.0 - smooth_step(std::abs(y), gap_inner_, gap_outer_);
        gap_grad[p] = -smooth_step_derivative(std::abs(y), gap_inner_, gap_outer_) * ey;
        gap *= gap_factor[p];

        const double strip = smooth_step(std::abs(y), strip_inner_, strip_outer_);
        const Eigen::VectorXd dstrip = smooth_step_derivative(std::abs(y), strip_inner_, strip_outer_) * ey;
        const std::size_t idx = pair_cluster_[p];
        out.w[idx] = strip * far;
        out.dw[idx] = dstrip * far + strip * dfar;
    }
    for (std::size_t p = 0; p < axes_.size(); ++p) {
        double others = 1.0;
        for (std::size_t q = 0; q < axes_.size(); ++q)
            if (q != p) others *= gap_factor[q];
        dgap += others * gap_grad[p];
    }
    out.w[last] = gap * far;
    out.dw[last] = dgap * far + gap * dfar;
    return out;
}

RealVec GrafPartition::values(const Eigen::VectorXd& x) const {
    auto [w, dw] = weights(x);
    double total = 0.0;
    for (double v : w) total += v * v;
    const double norm = std::sqrt(total);
    for (double& v : w) v /= norm;
    return w;
}

std::vector<Eigen::VectorXd> GrafPartition::gradients(const Eigen::VectorXd& x) const {
    const auto [w, dw] = weights(x);
    double total = 0.0;
    Eigen::VectorXd mix = Eigen::VectorXd::Zero(x.size());
    for (std::size_t a = 0; a < w.size(); ++a) {
        total += w[a] * w[a];
        mix += w[a] * dw[a];
    }
    const double norm = std::sqrt(total);
    std::vector<Eigen::VectorXd> out(w.size());
    for (std::size_t a = 0; a < w.size(); ++a) out[a] = dw[a] / norm - w[a] * mix / (norm * total);
    return out;
}

namespace {

Eigen::VectorXd grid_point(const ProductGrid& grid, std::size_t i) {
    const auto pos = grid.position(i);
    Eigen::VectorXd x(grid.dim());
    for (int d = 0; d < grid.dim(); ++d) x(d) = pos[d];
    return x;
}

}  // namespace

SampledPartition GrafPartition::sample(const ProductGrid& grid, double scale) const {
    require(grid.dim() == geometry_.internal_dim(), ErrorKind::InvalidInput, "grid dimension does not match geometry");
    require(scale >= 1.0, ErrorKind::InvalidInput, "partition scale R must be at least 1");
    const std::size_t s = grid.spatial_size();
    SampledPartition out;
    out.scale = scale;
    out.clusters = clusters_;
    out.values.assign(clusters_.size(), RealVec(s));
    out.gradient.assign(clusters_.size(), std::vector<RealVec>(grid.dim(), RealVec(s)));
    for (std::size_t i = 0; i < s; ++i) {
        const Eigen::VectorXd y = grid_point(grid, i) / scale;
        const RealVec j = values(y);
        const auto g = gradients(y);
        for (std::size_t a = 0; a < clusters_.size(); ++a) {
            out.values[a][i] = j[a];
            for (int d = 0; d < grid.dim(); ++d) out.gradient[a][d][i] = g[a](d) / scale;
        }
    }
    return out;
}

PartitionReport GrafPartition::verify(const ProductGrid& grid, double scale, std::vector<double> kappas) const {
    require(grid.dim() == geometry_.internal_dim(), ErrorKind::InvalidInput, "grid dimension does not match geometry");
    if (kappas.empty()) kappas = {params_.kappa0, 1.5 * params_.kappa0, 2.0 * params_.kappa0, 4.0 * params_.kappa0};
    for (double k : kappas) require(k >= params_.kappa0, ErrorKind::InvalidInput, "sampled kappa below kappa0");
    PartitionReport rep;
    rep.kappas = kappas;
    const std::size_t n = clusters_.size();
    std::vector<Eigen::MatrixXd> intra(n);
    for (std::size_t a = 0; a < n; ++a) intra[a] = geometry_.intra_projector(clusters_[a]);
    for (std::size_t i = 0; i < grid.spatial_size(); ++i) {
        const Eigen::VectorXd y = grid_point(grid, i) / scale;
        const RealVec j = values(y);
        double total = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            total += j[a] * j[a];
            rep.range_violation = std::max({rep.range_violation, -j[a], j[a] - 1.0});
            if (j[a] <= 0.0) continue;
            rep.inner_violation = std::max(rep.inner_violation, (intra[a] * y).norm() - params_.r0);
            for (const auto& ax : axes_)
                if (!clusters_[a].joins(ax.first, ax.second))
                    rep.outer_violation = std::max(rep.outer_violation, r1_ - std::abs(ax.direction.dot(y)));
        }
        rep.sum_deviation = std::max(rep.sum_deviation, std::abs(total - 1.0));
        for (double k : kappas) {
            const RealVec jk = values(k * y);
            for (std::size_t a = 0; a < n; ++a) {
                double inside = 0.0;
                for (std::size_t b = 0; b < n; ++b) {
                    if (clusters_[b].refines(clusters_[a])) inside += jk[b] * jk[b];
                    else rep.overlap = std::max(rep.overlap, std::abs(j[a] * jk[b]));
                }
                rep.identity_deviation = std::max(rep.identity_deviation, std::abs(j[a] - j[a] * inside));
            }
        }
    }
    if (!rep.ok())
        throw Error(ErrorKind::PartitionConstruction,
                    "partition check failed: sum dev " + std::to_string(rep.sum_deviation) + ", inner " +
                        std::to_string(rep.inner_violation) + ", outer " + std::to_string(rep.outer_violation) +
                        ", overlap " + std::to_string(rep.overlap) + ", identity " +
                        std::to_string(rep.identity_deviation));
    return rep;
}

}  // namespace fm
