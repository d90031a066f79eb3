#include "fm/fields.hpp"

#include <cmath>

namespace fm {

TrigSeries::TrigSeries(double omega, int order) : omega_(omega), order_(order), c_(2 * order + 1) {
    require(omega > 0.0 && std::isfinite(omega), ErrorKind::InvalidInput, "field frequency must be positive");
    require(order >= 0, ErrorKind::InvalidInput, "negative series order");
}

TrigSeries TrigSeries::from_cos_sin(double omega, double constant, const RealVec& cos_coeffs, const RealVec& sin_coeffs) {
    const int order = static_cast<int>(std::max(cos_coeffs.size(), sin_coeffs.size()));
    TrigSeries s(omega, order);
    s.set_coefficient(0, constant);
    for (int k = 1; k <= order; ++k) {
        const double a = k <= static_cast<int>(cos_coeffs.size()) ? cos_coeffs[k - 1] : 0.0;
        const double b = k <= static_cast<int>(sin_coeffs.size()) ? sin_coeffs[k - 1] : 0.0;
        require(std::isfinite(a) && std::isfinite(b), ErrorKind::InvalidInput, "non-finite field coefficient");
        s.set_coefficient(k, cplx(a, -b) * 0.5);
    }
    return s;
}

TrigSeries TrigSeries::from_samples(double omega, const RealVec& samples, double periodicity_tol) {
    require(samples.size() >= 3, ErrorKind::InvalidInput, "too few field samples");
    const double scale = std::max(1.0, std::abs(samples.front()));
    require(std::abs(samples.front() - samples.back()) <= periodicity_tol * scale, ErrorKind::InvalidInput,
            "field samples are not periodic: endpoints differ");
    const int n = static_cast<int>(samples.size()) - 1;
    const int order = (n - 1) / 2;
    TrigSeries s(omega, order);
    for (int k = 0; k <= order; ++k) {
        cplx acc = 0.0;
        for (int j = 0; j < n; ++j) acc += samples[j] * std::polar(1.0, -2.0 * M_PI * k * j / n);
        s.set_coefficient(k, acc / static_cast<double>(n));
    }
    return s;
}

cplx TrigSeries::coefficient(int k) const {
    if (std::abs(k) > order_) return 0.0;
    return c_[k + order_];
}

void TrigSeries::set_coefficient(int k, cplx value) {
    require(std::abs(k) <= order_, ErrorKind::InvalidInput, "coefficient index beyond series order");
    if (k == 0) {
        c_[order_] = value.real();
        return;
    }
    c_[k + order_] = k > 0 ? value : std::conj(value);
    c_[-k + order_] = k > 0 ? std::conj(value) : value;
}

double TrigSeries::operator()(double t) const {
    double acc = c_[order_].real();
    for (int k = 1; k <= order_; ++k) acc += 2.0 * (c_[k + order_] * std::polar(1.0, k * omega_ * t)).real();
    return acc;
}

TrigSeries TrigSeries::centred() const {
    TrigSeries s = *this;
    s.c_[order_] = 0.0;
    return s;
}

TrigSeries TrigSeries::derivative() const {
    TrigSeries s(omega_, order_);
    for (int k = 1; k <= order_; ++k) s.set_coefficient(k, cplx(0.0, k * omega_) * coefficient(k));
    return s;
}

TrigSeries TrigSeries::integral_from_zero() const {
    TrigSeries s(omega_, order_);
    double constant = 0.0;
    for (int k = 1; k <= order_; ++k) {
        const cplx ck = coefficient(k) / cplx(0.0, k * omega_);
        s.set_coefficient(k, ck);
        constant -= 2.0 * ck.real();
    }
    s.set_coefficient(0, constant);
    return s;
}

TrigSeries TrigSeries::operator*(const TrigSeries& other) const {
    require(omega_ == other.omega_, ErrorKind::InvalidInput, "series with different frequencies");
    TrigSeries s(omega_, order_ + other.order_);
    for (int k = -order_; k <= order_; ++k)
        for (int l = -other.order_; l <= other.order_; ++l) s.c_[k + l + s.order_] += coefficient(k) * other.coefficient(l);
    s.c_[s.order_] = s.c_[s.order_].real();
    return s;
}

TrigSeries TrigSeries::operator+(const TrigSeries& other) const {
    require(omega_ == other.omega_, ErrorKind::InvalidInput, "series with different frequencies");
    TrigSeries s(omega_, std::max(order_, other.order_));
    for (int k = -s.order_; k <= s.order_; ++k) s.c_[k + s.order_] = coefficient(k) + other.coefficient(k);
    return s;
}

TrigSeries TrigSeries::scaled(double f) const {
    TrigSeries s = *this;
    for (auto& z : s.c_) z *= f;
    return s;
}

bool TrigSeries::is_zero() const {
    for (const auto& z : c_)
        if (z != cplx{}) return false;
    return true;
}

AcStarkFields::AcStarkFields(const MassGeometry& geometry, TrigSeries field)
    : geometry_(geometry),
      field_(std::move(field)),
      direction_(geometry.field_direction()),
      velocity_(field_.omega(), 0),
      displacement_(field_.omega(), 0),
      phase_periodic_(field_.omega(), 0) {
    const TrigSeries b0 = field_.centred().integral_from_zero();
    velocity_ = b0.centred();
    displacement_ = velocity_.integral_from_zero();
    const double u2 = direction_.squaredNorm();
    const TrigSeries integrand = (velocity_ * velocity_).scaled(0.5 * u2) + displacement_.scaled(-u2 * field_mean());
    phase_slope_ = integrand.mean();
    phase_periodic_ = integrand.integral_from_zero();
}

Eigen::VectorXd AcStarkFields::E(double t) const { return direction_ * field_(t); }
Eigen::VectorXd AcStarkFields::b(double t) const { return direction_ * velocity_(t); }
Eigen::VectorXd AcStarkFields::c(double t) const { return direction_ * displacement_(t); }
double AcStarkFields::a(double t) const { return phase_slope_ * t + phase_periodic_(t); }

double AcStarkFields::charge_ratio_gap(int j, int k) const {
    const auto& q = geometry_.charges();
    const auto& m = geometry_.masses();
    return q[j] / m[j] - q[k] / m[k];
}

double AcStarkFields::pair_shift(int j, int k, double t) const { return charge_ratio_gap(j, k) * displacement_(t); }
double AcStarkFields::pair_shift_rate(int j, int k, double t) const { return charge_ratio_gap(j, k) * velocity_(t); }
double AcStarkFields::pair_shift_accel(int j, int k, double t) const {
    return charge_ratio_gap(j, k) * (field_(t) - field_mean());
}

}  // namespace fm
