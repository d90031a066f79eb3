#include "fm/spectral.hpp"

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace fm {

double bump(double lambda, double delta) {
    const double u = lambda / delta;
    if (!(std::abs(u) < 1.0)) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

Eigensystem hermitian_eigensystem(const Eigen::MatrixXcd& matrix) {
    require(matrix.rows() == matrix.cols(), ErrorKind::InvalidInput, "eigensystem of a non-square matrix");
    const lapack_int n = static_cast<lapack_int>(matrix.rows());
    Eigensystem out;
    out.vectors = matrix;
    out.values.resize(n);
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.vectors.data(), n, out.values.data());
    require(info == 0, ErrorKind::InvalidInput, "zheevd failed with info " + std::to_string(info));
    return out;
}

Eigensystem hermitian_eigensystem(const Eigen::MatrixXcd& matrix, double lo, double hi) {
    require(matrix.rows() == matrix.cols(), ErrorKind::InvalidInput, "eigensystem of a non-square matrix");
    require(lo < hi, ErrorKind::Ordering, "eigenvalue window is empty");
    const lapack_int n = static_cast<lapack_int>(matrix.rows());
    Eigen::MatrixXcd a = matrix;
    std::vector<double> w(n);
    Eigen::MatrixXcd z(n, n);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'V', 'L', n, a.data(), n, lo, hi, 0, 0, 0.0,
                                           &found, w.data(), z.data(), n, support.data());
    require(info == 0, ErrorKind::InvalidInput, "zheevr failed with info " + std::to_string(info));
    Eigensystem out;
    out.values.assign(w.begin(), w.begin() + found);
    out.vectors = z.leftCols(found);
    return out;
}

RealEigensystem symmetric_eigensystem(const Eigen::MatrixXd& matrix) {
    require(matrix.rows() == matrix.cols(), ErrorKind::InvalidInput, "eigensystem of a non-square matrix");
    const lapack_int n = static_cast<lapack_int>(matrix.rows());
    RealEigensystem out;
    out.vectors = matrix;
    out.values.resize(n);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.vectors.data(), n, out.values.data());
    require(info == 0, ErrorKind::InvalidInput, "dsyevd failed with info " + std::to_string(info));
    return out;
}

HessenbergSolver::HessenbergSolver(const Eigen::MatrixXcd& matrix) {
    require(matrix.rows() == matrix.cols(), ErrorKind::InvalidInput, "Hessenberg reduction of a non-square matrix");
    const lapack_int n = static_cast<lapack_int>(matrix.rows());
    h_ = matrix;
    std::vector<cplx> tau(std::max<lapack_int>(n - 1, 1));
    lapack_int info = LAPACKE_zgehrd(LAPACK_COL_MAJOR, n, 1, n, h_.data(), n, tau.data());
    require(info == 0, ErrorKind::InvalidInput, "zgehrd failed");
    q_ = h_;
    info = LAPACKE_zunghr(LAPACK_COL_MAJOR, n, 1, n, q_.data(), n, tau.data());
    require(info == 0, ErrorKind::InvalidInput, "zunghr failed");
    for (lapack_int j = 0; j < n; ++j)
        for (lapack_int i = j + 2; i < n; ++i) h_(i, j) = 0.0;
}

// Gaussian elimination with adjacent-row pivoting on the shifted Hessenberg matrix.
struct HessenbergSolver::Shifted::Factor {
    Eigen::MatrixXcd u;
    std::vector<cplx> mult;
    std::vector<char> swapped;

    Factor(const Eigen::MatrixXcd& h, cplx z) : u(h), mult(h.rows()), swapped(h.rows(), 0) {
        const Eigen::Index n = h.rows();
        for (Eigen::Index k = 0; k < n; ++k) u(k, k) -= z;
        for (Eigen::Index k = 0; k + 1 < n; ++k) {
            if (std::abs(u(k + 1, k)) > std::abs(u(k, k))) {
                u.row(k).segment(k, n - k).swap(u.row(k + 1).segment(k, n - k));
                swapped[k] = 1;
            }
            const cplx piv = u(k, k);
            require(piv != cplx{}, ErrorKind::SingularResolvent, "shifted matrix is singular");
            const cplx l = u(k + 1, k) / piv;
            mult[k] = l;
            u.row(k + 1).segment(k, n - k) -= l * u.row(k).segment(k, n - k);
        }
        require(u(n - 1, n - 1) != cplx{}, ErrorKind::SingularResolvent, "shifted matrix is singular");
    }

    Eigen::VectorXcd solve(Eigen::VectorXcd b) const {
        const Eigen::Index n = u.rows();
        for (Eigen::Index k = 0; k + 1 < n; ++k) {
            if (swapped[k]) std::swap(b(k), b(k + 1));
            b(k + 1) -= mult[k] * b(k);
        }
        return u.triangularView<Eigen::Upper>().solve(b);
    }

    Eigen::VectorXcd solve_adjoint(const Eigen::VectorXcd& b) const {
        const Eigen::Index n = u.rows();
        Eigen::VectorXcd w = u.adjoint().triangularView<Eigen::Lower>().solve(b);
        for (Eigen::Index k = n - 2; k >= 0; --k) {
            w(k) -= std::conj(mult[k]) * w(k + 1);
            if (swapped[k]) std::swap(w(k), w(k + 1));
        }
        return w;
    }
};

HessenbergSolver::Shifted HessenbergSolver::shifted(cplx z) const {
    return Shifted(*this, std::make_shared<const Shifted::Factor>(h_, z));
}

Eigen::VectorXcd HessenbergSolver::Shifted::solve(const Eigen::VectorXcd& b) const {
    return owner_->q_ * factor_->solve(owner_->q_.adjoint() * b);
}

Eigen::VectorXcd HessenbergSolver::Shifted::solve_adjoint(const Eigen::VectorXcd& b) const {
    return owner_->q_ * factor_->solve_adjoint(owner_->q_.adjoint() * b);
}

Eigen::VectorXcd HessenbergSolver::solve(cplx z, const Eigen::VectorXcd& b) const { return shifted(z).solve(b); }

Eigen::VectorXcd HessenbergSolver::solve_adjoint(cplx z, const Eigen::VectorXcd& b) const {
    return shifted(z).solve_adjoint(b);
}

SpectralInterval spectral_enclosure(const LinearOperator& op, std::uint64_t seed, int steps) {
    const std::size_t n = op.dim();
    steps = static_cast<int>(std::min<std::size_t>(steps, n));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::vector<Vec> basis;
    Vec v(n);
    for (auto& z : v) z = cplx(gauss(rng), gauss(rng));
    scale(1.0 / norm(v), v);
    std::vector<double> alpha, beta;
    Vec w(n);
    double last_beta = 0.0;
    for (int j = 0; j < steps; ++j) {
        basis.push_back(v);
        op.apply(v, w);
        const double a = dot(v, w).real();
        alpha.push_back(a);
        for (const auto& b : basis) axpy(-dot(b, w), b, w);  // full reorthogonalisation
        for (const auto& b : basis) axpy(-dot(b, w), b, w);
        last_beta = norm(w);
        if (j + 1 == steps || last_beta < 1e-12) break;
        beta.push_back(last_beta);
        v = w;
        scale(1.0 / last_beta, v);
    }
    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) t(i, i) = alpha[i];
    for (int i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(m - 1);
    const double r_lo = std::abs(last_beta * es.eigenvectors()(m - 1, 0));
    const double r_hi = std::abs(last_beta * es.eigenvectors()(m - 1, m - 1));
    const double margin = 0.05 * (hi - lo) + 1e-8;
    return {lo - r_lo - margin, hi + r_hi + margin};
}

ChebyshevSeries::ChebyshevSeries(std::function<double(double)> f, SpectralInterval interval, double tol, int max_degree)
    : interval_(interval) {
    require(interval.hi > interval.lo, ErrorKind::SpectralBound, "empty spectral enclosure");
    const double mid = 0.5 * (interval.hi + interval.lo), half = 0.5 * (interval.hi - interval.lo);
    for (int nodes = 1024;; nodes *= 2) {
        std::vector<double> samples(nodes), dct(nodes);
        for (int k = 0; k < nodes; ++k)
            samples[k] = f(mid + half * std::cos(std::numbers::pi * (k + 0.5) / nodes));
        fftw_plan plan = fftw_plan_r2r_1d(nodes, samples.data(), dct.data(), FFTW_REDFT10, FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
        std::vector<double> c(nodes);
        for (int k = 0; k < nodes; ++k) c[k] = dct[k] / nodes;
        c[0] *= 0.5;
        // Truncate where the remaining absolute tail is below tol.
        double tail = 0.0;
        int keep = nodes;
        for (int k = nodes - 1; k >= 0; --k) {
            if (tail + std::abs(c[k]) > tol) break;
            tail += std::abs(c[k]);
            keep = k;
        }
        const bool resolved = keep <= nodes / 2;
        if (resolved || nodes >= max_degree) {
            require(resolved, ErrorKind::SpectralBound,
                    "Chebyshev expansion did not reach tolerance within degree " + std::to_string(max_degree));
            coeffs_.assign(c.begin(), c.begin() + std::max(keep, 1));
            tail_ = tail;
            return;
        }
    }
}

double ChebyshevSeries::evaluate(double x) const {
    const double mid = 0.5 * (interval_.hi + interval_.lo), half = 0.5 * (interval_.hi - interval_.lo);
    const double t = (x - mid) / half;
    double b1 = 0.0, b2 = 0.0;
    for (int k = degree(); k >= 1; --k) {
        const double b0 = coeffs_[k] + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return coeffs_[0] + t * b1 - b2;
}

Vec ChebyshevSeries::apply(const LinearOperator& op, std::span<const cplx> v) const {
    const double mid = 0.5 * (interval_.hi + interval_.lo), half = 0.5 * (interval_.hi - interval_.lo);
    const std::size_t n = v.size();
    const double v_norm = norm(v);
    Vec t_prev(v.begin(), v.end()), t_cur(n), t_next(n), out(n), tmp(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = coeffs_[0] * v[i];
    if (degree() == 0) return out;
    op.apply(t_prev, tmp);
    for (std::size_t i = 0; i < n; ++i) t_cur[i] = (tmp[i] - mid * t_prev[i]) / half;
    for (std::size_t i = 0; i < n; ++i) out[i] += coeffs_[1] * t_cur[i];
    for (int k = 2; k <= degree(); ++k) {
        op.apply(t_cur, tmp);
        for (std::size_t i = 0; i < n; ++i) t_next[i] = 2.0 * (tmp[i] - mid * t_cur[i]) / half - t_prev[i];
        for (std::size_t i = 0; i < n; ++i) out[i] += coeffs_[k] * t_next[i];
        std::swap(t_prev, t_cur);
        std::swap(t_cur, t_next);
        if (k % 64 == 0 && norm(t_cur) > 4.0 * v_norm + 1e-300)
            throw Error(ErrorKind::SpectralBound, "operator spectrum escapes the Chebyshev enclosure");
    }
    return out;
}

LinearOperator function_of(const ProductGrid& grid, std::shared_ptr<const Eigensystem> eig,
                           std::function<cplx(double)> f, std::string label) {
    Eigen::VectorXcd fl(eig->values.size());
    bool real = true;
    for (std::size_t i = 0; i < eig->values.size(); ++i) {
        fl(i) = f(eig->values[i]);
        real = real && fl(i).imag() == 0.0;
    }
    auto run = [eig, fl](std::span<const cplx> in, std::span<cplx> out, bool adj) {
        Eigen::Map<const Eigen::VectorXcd> x(in.data(), in.size());
        Eigen::Map<Eigen::VectorXcd> y(out.data(), out.size());
        Eigen::VectorXcd c = eig->vectors.adjoint() * x;
        c = adj ? (fl.conjugate().cwiseProduct(c)).eval() : fl.cwiseProduct(c).eval();
        y.noalias() = eig->vectors * c;
    };
    return custom_operator(
        grid, [run](std::span<const cplx> in, std::span<cplx> out) { run(in, out, false); },
        [run](std::span<const cplx> in, std::span<cplx> out) { run(in, out, true); }, real, label);
}

LinearOperator apply_filter(const LinearOperator& op, std::function<double(double)> f, FilterOptions options) {
    require(op.is_self_adjoint(), ErrorKind::InvalidInput, "spectral filters need a self-adjoint operator");
    const bool dense = options.path == FilterPath::Dense ||
                       (options.path == FilterPath::Automatic && op.dim() <= kDenseLimit);
    if (dense) {
        auto eig = std::make_shared<const Eigensystem>(hermitian_eigensystem(to_dense(op)));
        return function_of(op.grid(), eig, [f](double x) { return cplx(f(x)); }, "f(dense)");
    }
    auto series = std::make_shared<const ChebyshevSeries>(f, spectral_enclosure(op, options.seed), options.tolerance);
    auto run = [series, op](std::span<const cplx> in, std::span<cplx> out) {
        Vec y = series->apply(op, in);
        std::copy(y.begin(), y.end(), out.begin());
    };
    return custom_operator(op.grid(), run, run, true, "f(chebyshev deg " + std::to_string(series->degree()) + ")");
}

}  // namespace fm
