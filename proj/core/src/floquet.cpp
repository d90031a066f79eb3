#include "fm/floquet.hpp"

#include "fm/split_step.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fm {

FloquetHamiltonian::FloquetHamiltonian(ProductGrid grid, PotentialModel model, std::optional<ClusterDecomposition> cluster)
    : grid_(grid),
      model_(std::move(model)),
      cluster_(std::move(cluster)),
      samples_(),
      free_(zero(grid)),
      potential_(zero(grid)),
      full_(zero(grid)) {
    require(grid_.dim() == model_.geometry().internal_dim(), ErrorKind::InvalidInput,
            "grid dimension must equal the internal dimension N-1");
    if (cluster_)
        require(cluster_->particles() == model_.geometry().particles(), ErrorKind::InvalidInput,
                "cluster decomposition does not match the particle count");
    samples_ = model_.sample(grid_, cluster_ ? &*cluster_ : nullptr);
    free_ = mode_frequency(grid_) + kinetic(grid_);
    if (model_.time_independent()) {
        Vec slice(samples_.begin(), samples_.begin() + static_cast<std::ptrdiff_t>(grid_.spatial_size()));
        potential_ = position_multiplier(grid_, std::move(slice), "V");
    } else {
        potential_ = time_position_multiplier(grid_, samples_, "V(t)");
    }
    full_ = free_ + potential_;
}

namespace {

// First column of the circulant matrix of p^2/2 on a periodic axis.
RealVec kinetic_column(const ProductGrid& grid) {
    const int n = grid.points();
    RealVec col(n);
    for (int d = 0; d < n; ++d) {
        double acc = 0.0;
        for (int m = 0; m < n; ++m) {
            const double k = grid.wavenumber(m);
            acc += 0.5 * k * k * std::cos(k * d * grid.spacing());
        }
        col[d] = acc / n;
    }
    return col;
}

Eigen::MatrixXd kinetic_axis(const ProductGrid& grid) {
    const int n = grid.points();
    const RealVec col = kinetic_column(grid);
    Eigen::MatrixXd t(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t(i, j) = col[(i - j + n) % n];
    return t;
}

}  // namespace

Eigen::MatrixXd FloquetHamiltonian::static_block_dense(std::size_t max_dim) const {
    require(time_independent(), ErrorKind::InvalidInput, "static block requested for a time dependent potential");
    const std::size_t s = grid_.spatial_size();
    require(s <= max_dim, ErrorKind::TooLarge, "spatial block exceeds dense limit");
    const Eigen::MatrixXd t1 = kinetic_axis(grid_);
    Eigen::MatrixXd h;
    if (grid_.dim() == 1) {
        h = t1;
    } else {
        const int n = grid_.points();
        h = Eigen::MatrixXd::Zero(s, s);
        // T ⊗ I + I ⊗ T with axis 0 outermost.
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int r = 0; r < n; ++r) {
                    h(i * n + r, j * n + r) += t1(i, j);
                    h(r * n + i, r * n + j) += t1(i, j);
                }
    }
    for (std::size_t i = 0; i < s; ++i) h(i, i) += samples_[i].real();
    return h;
}

FloquetSpectrum FloquetSpectrum::from_dense(const ProductGrid& grid, std::shared_ptr<const Eigensystem> eig, bool complete) {
    FloquetSpectrum s(grid);
    s.kind_ = Kind::Dense;
    s.complete_ = complete;
    s.values_ = eig->values;
    s.dense_ = std::move(eig);
    return s;
}

FloquetSpectrum FloquetSpectrum::compute(const FloquetHamiltonian& k) {
    if (!k.time_independent()) {
        auto eig = std::make_shared<const Eigensystem>(hermitian_eigensystem(to_dense(k.full())));
        return from_dense(k.grid(), std::move(eig), true);
    }
    FloquetSpectrum s(k.grid());
    s.kind_ = Kind::ModeBlocks;
    s.complete_ = true;
    s.block_ = std::make_shared<const RealEigensystem>(symmetric_eigensystem(k.static_block_dense()));
    const auto& g = k.grid();
    std::vector<std::pair<double, std::pair<int, std::size_t>>> all;
    for (int m = 0; m < g.modes(); ++m)
        for (std::size_t j = 0; j < s.block_->values.size(); ++j)
            all.push_back({g.mode_number(m) * g.omega() + s.block_->values[j], {m, j}});
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [v, label] : all) {
        s.values_.push_back(v);
        s.labels_.push_back(label);
    }
    return s;
}

FloquetSpectrum FloquetSpectrum::compute_window(const FloquetHamiltonian& k, double lo, double hi) {
    if (k.time_independent()) return compute(k);
    auto eig = std::make_shared<const Eigensystem>(hermitian_eigensystem(to_dense(k.full()), lo, hi));
    return from_dense(k.grid(), std::move(eig), false);
}

Vec FloquetSpectrum::vector(std::size_t i) const {
    require(i < count(), ErrorKind::InvalidInput, "eigenvector index out of range");
    if (kind_ == Kind::Dense) {
        const auto col = dense_->vectors.col(static_cast<Eigen::Index>(i));
        return Vec(col.data(), col.data() + col.size());
    }
    const auto [m, j] = labels_[i];
    const std::size_t s = grid_.spatial_size();
    Vec out(grid_.size(), cplx{});
    for (std::size_t p = 0; p < s; ++p) out[m * s + p] = block_->vectors(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(j));
    return out;
}

std::vector<std::size_t> FloquetSpectrum::in_window(double lo, double hi) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (values_[i] > lo && values_[i] < hi) out.push_back(i);
    return out;
}

double mass_outside(const ProductGrid& grid, std::span<const cplx> state, double radius) {
    const std::size_t s = grid.spatial_size();
    double total = 0.0, outside = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const auto x = grid.position(i % s);
        const double r2 = x[0] * x[0] + x[1] * x[1];
        const double w = std::norm(state[i]);
        total += w;
        if (r2 > radius * radius) outside += w;
    }
    return total > 0.0 ? outside / total : 0.0;
}

ThresholdSet::ThresholdSet(double omega, std::vector<double> bases) : omega_(omega) {
    require(omega > 0.0, ErrorKind::InvalidInput, "threshold ladder needs a positive frequency");
    for (double b : bases) {
        double r = std::fmod(b, omega);
        if (r < 0.0) r += omega;
        if (omega - r < 1e-12 * omega) r = 0.0;
        bool dup = false;
        for (double e : bases_) {
            const double d = std::abs(e - r);
            dup = dup || std::min(d, omega - d) < 1e-9 * omega;
        }
        if (!dup) bases_.push_back(r);
    }
    std::sort(bases_.begin(), bases_.end());
}

double ThresholdSet::d0(double lambda) const {
    double best = std::numeric_limits<double>::infinity();
    for (double b : bases_) {
        const double r = lambda - b;
        best = std::min(best, std::abs(r - omega_ * std::round(r / omega_)));
    }
    return best;
}

double ThresholdSet::d1(double lambda) const {
    double best = std::numeric_limits<double>::infinity();
    for (double b : bases_) {
        double r = std::fmod(lambda - b, omega_);
        if (r < 0.0) r += omega_;
        best = std::min(best, r);
    }
    return best;
}

std::vector<double> ThresholdSet::points_in(double lo, double hi) const {
    std::vector<double> out;
    for (double b : bases_)
        for (double n = std::ceil((lo - b) / omega_); b + n * omega_ <= hi; n += 1.0) out.push_back(b + n * omega_);
    std::sort(out.begin(), out.end());
    return out;
}

ThresholdSet ThresholdSet::merged(const ThresholdSet& other) const {
    std::vector<double> all = bases_;
    all.insert(all.end(), other.bases_.begin(), other.bases_.end());
    return ThresholdSet(omega_, all);
}

namespace {

double reduce(double value, double omega) {
    double r = std::fmod(value, omega);
    if (r < 0.0) r += omega;
    if (omega - r < 1e-12 * omega) r = 0.0;
    return r;
}

}  // namespace

std::vector<QuasiEnergy> subsystem_quasi_energies(const PotentialModel& model, double period,
                                                  const ClusterDecomposition& a, const ThresholdOptions& opt) {
    const auto& geo = model.geometry();
    const double omega = 2.0 * M_PI / period;
    const Eigen::MatrixXd intra = geo.intra_projector(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(intra);
    std::vector<Eigen::VectorXd> axes;
    for (int i = 0; i < intra.rows(); ++i)
        if (es.eigenvalues()(i) > 0.5) axes.push_back(es.eigenvectors().col(i));
    if (axes.empty()) return {QuasiEnergy{0.0, 0.0, true}};
    require(axes.size() == 1, ErrorKind::UnsupportedConfiguration,
            "subsystem quasi-energies are computed for internal dimension at most one");
    const Eigen::VectorXd axis = axes.front();

    const ProductGrid grid(period, 4, opt.half_width, opt.points, 1);
    auto potential_at = [&model, &a, &grid, axis](double t) {
        Vec v(grid.spatial_size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = model.value(t, axis * grid.coordinate(static_cast<int>(i)), &a);
        return v;
    };
    const double radius = opt.bound_radius_fraction * opt.half_width;
    std::vector<QuasiEnergy> out;
    auto leakage = [&](const Eigen::VectorXcd& v) {
        return mass_outside(grid, std::span<const cplx>(v.data(), static_cast<std::size_t>(v.size())), radius);
    };

    bool static_potential = model.time_independent();
    if (static_potential) {
        const Vec v = potential_at(0.0);
        const int n = grid.points();
        const RealVec col = kinetic_column(grid);
        Eigen::MatrixXd h(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) h(i, j) = col[(i - j + n) % n] + (i == j ? v[i].real() : 0.0);
        auto eig = symmetric_eigensystem(h);
        for (int j = 0; j < n; ++j) {
            const Eigen::VectorXcd vec = eig.vectors.col(j).cast<cplx>();
            const double leak = leakage(vec);
            out.push_back({reduce(eig.values[j], omega), leak, leak < opt.bound_leakage});
        }
        return out;
    }

    SplitStep stepper(grid, potential_at, kinetic_symbol(grid));
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(grid.spatial_size(), grid.spatial_size());
    stepper.propagate(u, 0.0, period, opt.steps_per_period);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(u);
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        const cplx mu = ces.eigenvalues()(j);
        Eigen::VectorXcd vec = ces.eigenvectors().col(j);
        vec.normalize();
        const double leak = leakage(vec);
        out.push_back({reduce(-std::arg(mu) / period, omega), leak, leak < opt.bound_leakage});
    }
    return out;
}

ThresholdSet thresholds(const PotentialModel& model, double period, const ThresholdOptions& opt) {
    const double omega = 2.0 * M_PI / period;
    std::vector<double> bases;
    for (const auto& a : cluster_lattice(model.geometry().particles())) {
        if (a.is_coarsest()) continue;
        for (const auto& q : subsystem_quasi_energies(model, period, a, opt))
            if (q.bound) bases.push_back(q.value);
    }
    return ThresholdSet(omega, bases);
}

std::vector<double> localized_eigenvalues(const FloquetSpectrum& spectrum, double radius_fraction, double leakage) {
    const auto& g = spectrum.grid();
    const double radius = radius_fraction * g.half_width();
    const std::size_t s = g.spatial_size();
    std::vector<double> out;
    for (std::size_t i = 0; i < spectrum.count(); ++i) {
        const Vec v = spectrum.vector(i);
        if (mass_outside(g, v, radius) >= leakage) continue;
        // Skip copies pressed against the mode truncation.
        const double centroid = mode_centroid(g, v) + g.modes() / 2;
        if (std::abs(centroid - 0.5 * (g.modes() - 1)) > 0.25 * g.modes()) continue;
        out.push_back(spectrum.value(i));
    }
    return out;
}

double mode_centroid(const ProductGrid& grid, std::span<const cplx> state) {
    const std::size_t s = grid.spatial_size();
    double total = 0.0, centroid = 0.0;
    for (int m = 0; m < grid.modes(); ++m) {
        double w = 0.0;
        for (std::size_t p = 0; p < s; ++p) w += std::norm(state[m * s + p]);
        total += w;
        centroid += w * grid.mode_number(m);
    }
    return centroid / total;
}

PeriodicityCount omega_periodicity_check(const FloquetSpectrum& spectrum, double lambda, double width) {
    const auto& g = spectrum.grid();
    const double w = g.omega();
    const int lo = -g.modes() / 2, hi = g.modes() / 2 - 1;
    require(width > 0.0 && width < w, ErrorKind::InvalidInput, "window width must lie in (0, w)");
    require(lambda >= (lo + 1) * w && lambda + w + width <= hi * w, ErrorKind::InconclusiveWindow,
            "windows [" + std::to_string(lambda) + ", " + std::to_string(lambda + w + width) +
                ") leave the interior of the mode ladder");
    // Lower band (lo + 1/2, hi - 3/2), upper band shifted by one mode.
    const double band_lo = lo + 0.5, band_hi = hi - 1.5;
    PeriodicityCount out{lambda, width};
    auto count = [&](double from, double shift, std::size_t& n) {
        for (std::size_t i = 0; i < spectrum.count(); ++i) {
            const double v = spectrum.value(i);
            if (v < from || v >= from + width) continue;
            const double c = mode_centroid(g, spectrum.vector(i)) - shift;
            require(std::abs(c - band_lo) > 0.1 && std::abs(c - band_hi) > 0.1, ErrorKind::InconclusiveWindow,
                    "eigenvalue " + std::to_string(v) + " has its mode centroid at a band edge");
            if (c > band_lo && c < band_hi) ++n;
        }
    };
    count(lambda, 0.0, out.lower);
    count(lambda + w, 1.0, out.upper);
    return out;
}

ThresholdSet refined_thresholds(const PotentialModel& model, double period, const ClusterDecomposition& a,
                                const ThresholdOptions& opt, const FloquetSpectrum* full) {
    const double omega = 2.0 * M_PI / period;
    std::vector<double> bases;
    for (const auto& b : cluster_lattice(model.geometry().particles())) {
        if (!b.refines(a)) continue;
        const bool whole = b.is_coarsest();
        if (whole && model.geometry().internal_dim() > 1) {
            require(full != nullptr, ErrorKind::InvalidInput,
                    "the full point spectrum needs a computed Floquet spectrum for three particles");
            for (double v : localized_eigenvalues(*full, opt.bound_radius_fraction, opt.bound_leakage)) bases.push_back(v);
            continue;
        }
        for (const auto& q : subsystem_quasi_energies(model, period, b, opt))
            if (q.bound) bases.push_back(q.value);
    }
    return ThresholdSet(omega, bases);
}

}  // namespace fm
