#pragma once

#include "fm/geometry.hpp"
#include "fm/types.hpp"

#include <Eigen/Dense>

namespace fm {

// Real T-periodic function sum_{|k|<=K} c_k e^{i k w t} with c_{-k} = conj(c_k).
class TrigSeries {
public:
    TrigSeries(double omega, int order);
    static TrigSeries from_cos_sin(double omega, double constant, const RealVec& cos_coeffs, const RealVec& sin_coeffs);
    // Samples on [0, T] with both endpoints included; the endpoints must agree.
    static TrigSeries from_samples(double omega, const RealVec& samples, double periodicity_tol = 1e-9);

    double omega() const { return omega_; }
    int order() const { return order_; }
    cplx coefficient(int k) const;
    void set_coefficient(int k, cplx value);  // also sets the conjugate partner

    double operator()(double t) const;
    double mean() const { return coefficient(0).real(); }
    TrigSeries centred() const;                 // mean removed
    TrigSeries derivative() const;
    TrigSeries integral_from_zero() const;      // of the zero-mean part, vanishing at t = 0
    TrigSeries operator*(const TrigSeries& other) const;
    TrigSeries operator+(const TrigSeries& other) const;
    TrigSeries scaled(double s) const;
    bool is_zero() const;

private:
    double omega_;
    int order_;
    std::vector<cplx> c_;  // index k + order
};

// Time-periodic uniform field and the derived Avron-Herbst functions in internal coordinates.
// E(t) = u*field(t) with u the projected charge-to-mass vector; b, c are the zero-mean velocity
// and displacement along u, and a(t) = slope*t + phase(t).
class AcStarkFields {
public:
    AcStarkFields(const MassGeometry& geometry, TrigSeries field);

    const TrigSeries& field() const { return field_; }
    double field_mean() const { return field_.mean(); }
    const Eigen::VectorXd& direction() const { return direction_; }
    const TrigSeries& velocity_profile() const { return velocity_; }      // field-bar
    const TrigSeries& displacement_profile() const { return displacement_; }  // field-bar-bar

    Eigen::VectorXd E(double t) const;
    Eigen::VectorXd b(double t) const;
    Eigen::VectorXd c(double t) const;
    double a(double t) const;
    double phase_slope() const { return phase_slope_; }

    // c_{jk}(t) = (q_j/m_j - q_k/m_k) * field-bar-bar(t) and its time derivative.
    double pair_shift(int j, int k, double t) const;
    double pair_shift_rate(int j, int k, double t) const;
    double pair_shift_accel(int j, int k, double t) const;
    bool vanishes() const { return field_.is_zero(); }

private:
    double charge_ratio_gap(int j, int k) const;

    MassGeometry geometry_;
    TrigSeries field_;
    Eigen::VectorXd direction_;
    TrigSeries velocity_;
    TrigSeries displacement_;
    TrigSeries phase_periodic_;
    double phase_slope_ = 0.0;
};

}  // namespace fm
