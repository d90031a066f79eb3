#pragma once

#include "fm/linear_operator.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>

namespace fm {

// Smooth bump exp(1 - 1/(1 - (lambda/delta)^2)) on |lambda| < delta, zero elsewhere.
double bump(double lambda, double delta);

struct SpectralWindow {
    double center = 0.0;
    double delta = 0.1;
    double operator()(double lambda) const { return bump(lambda - center, delta); }
    bool contains(double lambda) const { return std::abs(lambda - center) < delta; }
};

struct Eigensystem {
    RealVec values;            // ascending
    Eigen::MatrixXcd vectors;  // columns
};

// Full Hermitian eigendecomposition (LAPACK divide and conquer).
Eigensystem hermitian_eigensystem(const Eigen::MatrixXcd& matrix);
// Only the eigenpairs with eigenvalue in (lo, hi].
Eigensystem hermitian_eigensystem(const Eigen::MatrixXcd& matrix, double lo, double hi);

struct RealEigensystem {
    RealVec values;
    Eigen::MatrixXd vectors;
};
RealEigensystem symmetric_eigensystem(const Eigen::MatrixXd& matrix);

// Unitary Hessenberg reduction A = Q H Q* of a general square matrix, used for repeated
// shifted solves (A - z) x = b at O(n^2) per shift.
class HessenbergSolver {
public:
    explicit HessenbergSolver(const Eigen::MatrixXcd& matrix);
    std::size_t dim() const { return static_cast<std::size_t>(h_.rows()); }
    // Solves (A - z) x = b and (A - z)^* x = b.
    Eigen::VectorXcd solve(cplx z, const Eigen::VectorXcd& b) const;
    Eigen::VectorXcd solve_adjoint(cplx z, const Eigen::VectorXcd& b) const;

    // Factorization of A - z kept for repeated right-hand sides.
    class Shifted {
    public:
        Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const;
        Eigen::VectorXcd solve_adjoint(const Eigen::VectorXcd& b) const;

    private:
        friend class HessenbergSolver;
        struct Factor;
        Shifted(const HessenbergSolver& owner, std::shared_ptr<const Factor> factor)
            : owner_(&owner), factor_(std::move(factor)) {}
        const HessenbergSolver* owner_;
        std::shared_ptr<const Factor> factor_;
    };
    Shifted shifted(cplx z) const;

private:
    Eigen::MatrixXcd h_;
    Eigen::MatrixXcd q_;
};

struct SpectralInterval {
    double lo = 0.0;
    double hi = 0.0;
};

// Enclosure of the spectrum of a self-adjoint operator from a Lanczos run, widened by the
// Ritz residuals and a relative safety margin.
SpectralInterval spectral_enclosure(const LinearOperator& op, std::uint64_t seed, int steps = 60);

// Chebyshev expansion of f on an interval, truncated once the coefficient tail drops below tol.
class ChebyshevSeries {
public:
    ChebyshevSeries(std::function<double(double)> f, SpectralInterval interval, double tol, int max_degree = 1 << 18);
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const SpectralInterval& interval() const { return interval_; }
    double tail_bound() const { return tail_; }
    double evaluate(double x) const;
    // y = f(op) v; throws spectral-bound-error when the recurrence escapes the enclosure.
    Vec apply(const LinearOperator& op, std::span<const cplx> v) const;

private:
    std::vector<double> coeffs_;
    SpectralInterval interval_;
    double tail_ = 0.0;
};

enum class FilterPath { Automatic, Dense, Chebyshev };

struct FilterOptions {
    FilterPath path = FilterPath::Automatic;
    double tolerance = 1e-8;
    std::uint64_t seed = 1;
};

// f(op) for self-adjoint op: exact eigendecomposition up to the dense limit, Chebyshev beyond.
LinearOperator apply_filter(const LinearOperator& op, std::function<double(double)> f, FilterOptions options = {});

// Operator defined by an eigensystem and a spectral function: Q f(Lambda) Q^*.
LinearOperator function_of(const ProductGrid& grid, std::shared_ptr<const Eigensystem> eig,
                           std::function<cplx(double)> f, std::string label);

}  // namespace fm
