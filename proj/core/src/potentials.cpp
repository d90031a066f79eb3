#include "fm/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace fm {

double PairProfile::value(double y) const {
    switch (family) {
        case PairFamily::Zero: return 0.0;
        case PairFamily::GaussianWell: return -strength * std::exp(-0.5 * y * y / (width * width));
        case PairFamily::SoftCore: {
            const double u = y / width;
            return strength / (1.0 + u * u);
        }
    }
    return 0.0;
}

double PairProfile::d1(double y) const {
    switch (family) {
        case PairFamily::Zero: return 0.0;
        case PairFamily::GaussianWell:
            return strength * y / (width * width) * std::exp(-0.5 * y * y / (width * width));
        case PairFamily::SoftCore: {
            const double u = y / width, q = 1.0 + u * u;
            return -2.0 * strength * u / (width * q * q);
        }
    }
    return 0.0;
}

double PairProfile::d2(double y) const {
    switch (family) {
        case PairFamily::Zero: return 0.0;
        case PairFamily::GaussianWell: {
            const double w2 = width * width;
            return strength * (1.0 / w2 - y * y / (w2 * w2)) * std::exp(-0.5 * y * y / w2);
        }
        case PairFamily::SoftCore: {
            const double u = y / width, q = 1.0 + u * u;
            return strength * (6.0 * u * u - 2.0) / (width * width * q * q * q);
        }
    }
    return 0.0;
}

std::string PairProfile::label() const {
    switch (family) {
        case PairFamily::Zero: return "zero";
        case PairFamily::GaussianWell: return "gaussian(depth=" + std::to_string(strength) + ",width=" + std::to_string(width) + ")";
        case PairFamily::SoftCore: return "softcore(v0=" + std::to_string(strength) + ",width=" + std::to_string(width) + ")";
    }
    return "?";
}

PotentialModel::PotentialModel(MassGeometry geometry, std::vector<PairInteraction> pairs, std::optional<AcStarkFields> fields)
    : geometry_(std::move(geometry)), pairs_(std::move(pairs)), fields_(std::move(fields)) {
    for (const auto& p : pairs_) {
        require(p.first != p.second && p.first >= 0 && p.second >= 0 && p.first < geometry_.particles() &&
                    p.second < geometry_.particles(),
                ErrorKind::InvalidInput, "pair labels out of range");
        require(p.profile.width > 0.0 && std::isfinite(p.profile.width) && std::isfinite(p.profile.strength),
                ErrorKind::InvalidInput, "pair profile needs a positive width and finite strength");
    }
}

bool PotentialModel::time_independent() const {
    if (!fields_ || fields_->vanishes()) return true;
    return std::all_of(pairs_.begin(), pairs_.end(), [&](const PairInteraction& p) {
        if (p.profile.family == PairFamily::Zero) return true;
        const auto& q = geometry_.charges();
        const auto& m = geometry_.masses();
        return q[p.first] / m[p.first] == q[p.second] / m[p.second];
    });
}

double PotentialModel::pair_shift(const PairInteraction& p, double t) const {
    return fields_ ? fields_->pair_shift(p.first, p.second, t) : 0.0;
}
double PotentialModel::pair_shift_rate(const PairInteraction& p, double t) const {
    return fields_ ? fields_->pair_shift_rate(p.first, p.second, t) : 0.0;
}
double PotentialModel::pair_shift_accel(const PairInteraction& p, double t) const {
    return fields_ ? fields_->pair_shift_accel(p.first, p.second, t) : 0.0;
}

bool PotentialModel::included(const PairInteraction& p, const ClusterDecomposition* within) const {
    return within == nullptr || within->joins(p.first, p.second);
}

double PotentialModel::value(double t, const Eigen::VectorXd& x, const ClusterDecomposition* within) const {
    double v = 0.0;
    for (const auto& p : pairs_) {
        if (!included(p, within)) continue;
        const auto axis = geometry_.pair_axis(p.first, p.second);
        v += p.profile.value(axis.separation_factor * axis.direction.dot(x) + pair_shift(p, t));
    }
    return v;
}

Eigen::VectorXd PotentialModel::gradient(double t, const Eigen::VectorXd& x, const ClusterDecomposition* within) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
    for (const auto& p : pairs_) {
        if (!included(p, within)) continue;
        const auto axis = geometry_.pair_axis(p.first, p.second);
        const double y = axis.separation_factor * axis.direction.dot(x) + pair_shift(p, t);
        g += p.profile.d1(y) * axis.separation_factor * axis.direction;
    }
    return g;
}

double PotentialModel::time_derivative(double t, const Eigen::VectorXd& x, const ClusterDecomposition* within) const {
    double v = 0.0;
    for (const auto& p : pairs_) {
        if (!included(p, within)) continue;
        const auto axis = geometry_.pair_axis(p.first, p.second);
        const double y = axis.separation_factor * axis.direction.dot(x) + pair_shift(p, t);
        v += p.profile.d1(y) * pair_shift_rate(p, t);
    }
    return v;
}

namespace {

Eigen::VectorXd point(const ProductGrid& grid, std::size_t i) {
    auto pos = grid.position(i);
    Eigen::VectorXd x(grid.dim());
    for (int d = 0; d < grid.dim(); ++d) x(d) = pos[d];
    return x;
}

}  // namespace

Vec PotentialModel::sample_at(const ProductGrid& grid, double t, const ClusterDecomposition* within) const {
    require(grid.dim() == geometry_.internal_dim(), ErrorKind::InvalidInput, "grid dimension does not match geometry");
    Vec out(grid.spatial_size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = value(t, point(grid, i), within);
    return out;
}

Vec PotentialModel::sample(const ProductGrid& grid, const ClusterDecomposition* within) const {
    Vec out;
    out.reserve(grid.size());
    for (int k = 0; k < grid.modes(); ++k) {
        Vec slice = sample_at(grid, grid.time_sample(k), within);
        out.insert(out.end(), slice.begin(), slice.end());
    }
    return out;
}

Vec PotentialModel::sample_virial(const ProductGrid& grid) const {
    Vec out;
    out.reserve(grid.size());
    for (int k = 0; k < grid.modes(); ++k)
        for (std::size_t i = 0; i < grid.spatial_size(); ++i) {
            const auto x = point(grid, i);
            out.push_back(x.dot(gradient(grid.time_sample(k), x)));
        }
    return out;
}

Vec PotentialModel::sample_time_derivative(const ProductGrid& grid) const {
    Vec out;
    out.reserve(grid.size());
    for (int k = 0; k < grid.modes(); ++k)
        for (std::size_t i = 0; i < grid.spatial_size(); ++i)
            out.push_back(time_derivative(grid.time_sample(k), point(grid, i)));
    return out;
}

std::vector<DecayLine> decay_report(const PotentialModel& model, const PairInteraction& pair, double rho, double y_max) {
    require(rho > 0.0 && rho <= 1.0e3, ErrorKind::InvalidInput, "decay exponent must be positive");
    const double period = model.fields() ? 2.0 * M_PI / model.fields()->field().omega() : 1.0;
    constexpr int kTimes = 64;
    constexpr int kRadii = 2000;
    struct Line {
        std::string name;
        double power;
        std::function<double(double, double)> f;  // (t, y)
    };
    const auto& prof = pair.profile;
    auto shift = [&](double t) { return model.pair_shift(pair, t); };
    auto rate = [&](double t) { return model.pair_shift_rate(pair, t); };
    auto accel = [&](double t) { return model.pair_shift_accel(pair, t); };
    std::vector<Line> lines = {
        {"|V| <= C<y>^-rho", rho, [&](double t, double y) { return prof.value(y + shift(t)); }},
        {"|dy V| <= C<y>^-(rho+1)", rho + 1, [&](double t, double y) { return prof.d1(y + shift(t)); }},
        {"|dy^2 V| <= C<y>^-(rho+2)", rho + 2, [&](double t, double y) { return prof.d2(y + shift(t)); }},
        {"|dt V| <= C<y>^-(1+rho)", rho + 1, [&](double t, double y) { return prof.d1(y + shift(t)) * rate(t); }},
        {"|dt dy V| <= C<y>^-(2+rho)", rho + 2, [&](double t, double y) { return prof.d2(y + shift(t)) * rate(t); }},
        {"|dt^2 V| <= C<y>^-(1+rho)", rho + 1,
         [&](double t, double y) {
             const double s = y + shift(t);
             return prof.d2(s) * rate(t) * rate(t) + prof.d1(s) * accel(t);
         }},
    };
    // one decade below the last radius
    const int near = kRadii - static_cast<int>(std::lround(kRadii / (std::log10(y_max) + 2.0)));
    std::vector<DecayLine> out;
    for (const auto& line : lines) {
        double best = 0.0, tail_far = 0.0, tail_near = 0.0;
        for (int r = 0; r <= kRadii; ++r) {
            const double y = r == 0 ? 0.0 : std::pow(10.0, -2.0 + (std::log10(y_max) + 2.0) * r / kRadii);
            for (double sign : {1.0, -1.0}) {
                for (int k = 0; k < kTimes; ++k) {
                    const double t = period * k / kTimes;
                    const double g = std::abs(line.f(t, sign * y)) * std::pow(1.0 + y * y, 0.5 * line.power);
                    best = std::max(best, g);
                    if (r == kRadii) tail_far = std::max(tail_far, g);
                    if (r == near) tail_near = std::max(tail_near, g);
                }
            }
        }
        DecayLine d;
        d.bound = line.name;
        d.constant = best;
        d.finite = std::isfinite(best) && !(tail_far > 1.5 * tail_near && tail_far > 1e-300);
        out.push_back(d);
    }
    return out;
}

void require_decay(const PotentialModel& model, double rho) {
    for (const auto& p : model.pairs()) {
        for (const auto& line : decay_report(model, p, rho)) {
            require(line.finite, ErrorKind::DecayViolation,
                    "pair (" + std::to_string(p.first + 1) + "," + std::to_string(p.second + 1) + ") " +
                        p.profile.label() + " violates " + line.bound + " for rho=" + std::to_string(rho));
        }
    }
}

}  // namespace fm
