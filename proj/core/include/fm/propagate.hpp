#pragma once

#include "fm/floquet.hpp"
#include "fm/sampling.hpp"
#include "fm/split_step.hpp"
#include "fm/verify.hpp"

#include <optional>

namespace fm {

struct PropagatorOptions {
    int steps_per_period = 256;
    double drift_limit = 1e-8;  // relative norm change tolerated over one propagate call
};

// U(t, s) on one spatial block: Strang split step with fixed dt = T / steps_per_period.
class Propagator {
public:
    Propagator(ProductGrid grid, SplitStep::PotentialAt potential, PropagatorOptions options = {});
    // H(t) = p^2/2 + V(t, x) of a potential model.
    static Propagator for_model(const ProductGrid& grid, const PotentialModel& model, PropagatorOptions options = {});

    const ProductGrid& grid() const { return stepper_.grid(); }
    const PropagatorOptions& options() const { return options_; }
    double step() const { return grid().period() / options_.steps_per_period; }
    // (t1 - t0)/dt as an integer; invalid-input unless dt divides the interval.
    int steps_between(double t0, double t1) const;
    Propagator refined() const;  // same potential, half the step

    Vec propagate(std::span<const cplx> state, double t0, double t1) const;
    void propagate(Eigen::MatrixXcd& states, double t0, double t1) const;  // columns are states

    double drift() const { return drift_; }  // largest relative norm change seen so far

private:
    SplitStep::PotentialAt potential_;
    SplitStep stepper_;
    PropagatorOptions options_;
    mutable double drift_ = 0.0;
};

// ||U_dt psi - U_{dt/2} psi|| / 3: the Richardson estimate of the error of the refined result.
double richardson_error(const Propagator& propagator, std::span<const cplx> state, double t0, double t1);

// ---- Floquet group ----------------------------------------------------------------------------

// e^{-i sigma K} Phi from a complete spectrum of K, mode-major in and out.
Vec floquet_evolve(const FloquetSpectrum& spectrum, std::span<const cplx> state, double sigma);

// (U-hat(sigma) Phi)(t_k) = U(t_k, t_k - sigma) Phi(t_k - sigma) at the M time samples, assembled
// mode-major. Phi(t_k - sigma) is the exact trigonometric interpolant of the mode coefficients.
Vec assembled_group(const Propagator& propagator, std::span<const cplx> state, double sigma);

// Max relative deviation over sigmas and states between the two sides at dt and dt/2.
// computed = deviation at dt, bound = tolerance; parameters carry the halving ratio.
VerificationReport floquet_group_check(const FloquetSpectrum& spectrum, const Propagator& propagator,
                                       std::span<const Vec> states, std::span<const double> sigmas,
                                       double tolerance = 5e-6);

// ---- Avron-Herbst -----------------------------------------------------------------------------

// T(t) psi = e^{-i a(t)} e^{i b(t).x} psi(x - c(t)) on one spatial block.
Vec gauge_map(const ProductGrid& grid, const AcStarkFields& fields, double t, std::span<const cplx> state);
Vec gauge_map_inverse(const ProductGrid& grid, const AcStarkFields& fields, double t, std::span<const cplx> state);

struct AvronHerbstResult {
    double deviation = 0.0;          // max over the t grid, relative
    double refined_deviation = 0.0;  // same at dt/2
    std::vector<double> times;
    std::vector<double> deviations;
};

// Propagates psi under H-hat(t) = p^2/2 + V(x) - E(t).x and under H(t) = p^2/2 + V(x + c(t)),
// compares T(t) U(t, 0) T(0)^* psi with U-hat(t, 0) psi at every time in `times`.
// The model must carry a field with zero mean; out-of-box if |c(t)| exceeds `shift_margin` * L.
AvronHerbstResult avron_herbst(const ProductGrid& grid, const PotentialModel& model, std::span<const cplx> state,
                               std::span<const double> times, PropagatorOptions options = {},
                               double shift_margin = 0.25);

VerificationReport avron_herbst_check(const ProductGrid& grid, const PotentialModel& model,
                                      std::span<const cplx> state, std::span<const double> times,
                                      double tolerance = 5e-6, PropagatorOptions options = {});

// ---- propagation estimates --------------------------------------------------------------------

struct EstimateConfig {
    double lambda0 = 0.5;
    double delta = 0.05;
    double s = 0.6;                  // <x>^{-s}
    double velocity = 0.5;           // cut |x| < v sigma
    double a_centre = 0.0;           // 2(d1 - 2 eps)/(3w/2) for the A-window
    double c1 = 0.05;                // A-window: -c2 <= A/sigma - a_centre <= -c1
    double c2 = 10.0;
    double sigma_max = 64.0;         // time units
    double sigma_step = 0.05;
    double horizon_fraction = 0.75;  // mass beyond this fraction of L ends the horizon
    double horizon_mass = 1e-6;
    double stabilization = 0.05;
};

void validate(const EstimateConfig& config);

struct EstimateIntegral {
    double value = 0.0;       // up to sigma_max
    double half_value = 0.0;  // up to sigma_max / 2
    double norm = 0.0;        // ||f Phi||^2
    std::vector<double> sigma;
    std::vector<double> integrand;
    double relative_change() const;
};

// int_{-smax}^{smax} ||<x>^{-s} e^{-i sigma K} f_delta(K - lambda0) Phi||^2 d sigma / ||Phi||^2.
// truncated-horizon when the evolved state reaches the absorbing fraction of the box.
EstimateIntegral smoothness_integral(const FloquetSpectrum& spectrum, std::span<const cplx> state,
                                     const EstimateConfig& config);

// int_1^{smax} ||1{|x| < v sigma} e^{-i sigma K} f Phi||^2 d sigma / sigma.
EstimateIntegral minimal_velocity_integral(const FloquetSpectrum& spectrum, std::span<const cplx> state,
                                           const EstimateConfig& config);

// Same with the spectral projector of A onto [sigma(a_centre - c2), sigma(a_centre - c1)].
// A must not couple temporal modes; it is diagonalized block by block.
EstimateIntegral a_window_integral(const FloquetSpectrum& spectrum, const LinearOperator& a,
                                   std::span<const cplx> state, const EstimateConfig& config);

// Bounded: |I(smax)/I(smax/2) - 1| <= stabilization. Growing: I(smax)/I(smax/2) >= 1.8.
VerificationReport estimate_report(std::string check, const EstimateIntegral& integral, const EstimateConfig& config,
                                   bool expect_bounded);

}  // namespace fm
