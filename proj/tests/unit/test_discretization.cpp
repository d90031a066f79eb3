#include "fm/conjugate.hpp"
#include "fm/sampling.hpp"
#include "fm/spectral.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace fm;

namespace {

constexpr double kPeriod = 2.0 * std::numbers::pi;

Vec random_state(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Vec v(n);
    for (auto& z : v) z = {g(rng), g(rng)};
    return v;
}

double distance(std::span<const cplx> a, std::span<const cplx> b) {
    Vec d(a.begin(), a.end());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= b[i];
    return norm(d);
}

}  // namespace

TEST_CASE("grid: mode ladder, momentum grid and sizes") {
    ProductGrid grid(kPeriod, 8, 16.0, 64, 1);
    CHECK(grid.omega() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(grid.mode_number(0) == -4);
    CHECK(grid.mode_number(7) == 3);
    std::vector<int> seen;
    for (int m = 0; m < 64; ++m) seen.push_back(static_cast<int>(std::lround(grid.wavenumber(m) * 16.0 / std::numbers::pi)));
    std::sort(seen.begin(), seen.end());
    CHECK(seen.front() == -32);
    CHECK(seen.back() == 31);
    CHECK(ProductGrid(kPeriod, 8, 16.0, 64, 2).size() == 32768);
}

TEST_CASE("grid: transforms preserve the norm") {
    ProductGrid grid(kPeriod, 8, 8.0, 32, 2);
    Vec v = random_state(grid.size(), 1), w = v;
    grid.forward_space(w);
    CHECK(std::abs(norm(w) / std::sqrt(double(grid.spatial_size())) - norm(v)) <= 1e-12 * norm(v));
    grid.backward_space(w);
    for (auto& z : w) z /= double(grid.spatial_size());
    CHECK(distance(v, w) <= 1e-12 * norm(v));
    Vec t = v;
    grid.modes_to_time(t);
    CHECK(std::abs(norm(t) - norm(v)) <= 1e-12 * norm(v));
    grid.time_to_modes(t);
    CHECK(distance(v, t) <= 1e-12 * norm(v));
}

TEST_CASE("operators: mode resolvent values and pole guard") {
    ProductGrid grid(kPeriod, 8, 8.0, 16, 1);
    auto r = mode_resolvent(grid, 1.5);
    Vec e(grid.size());
    for (int m = 0; m < grid.modes(); ++m) {
        std::fill(e.begin(), e.end(), cplx{});
        e[m * grid.spatial_size()] = 1.0;
        Vec out = r(e);
        CHECK(std::abs(out[m * grid.spatial_size()] - 1.0 / (1.5 - grid.mode_number(m))) <= 1e-15);
    }
    try {
        mode_resolvent(grid, 2.0);
        FAIL("pole accepted");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::SingularResolvent);
    }
}

TEST_CASE("operators: dense forms") {
    ProductGrid grid(kPeriod, 4, 8.0, 32, 1);
    auto id = to_dense(identity(grid));
    CHECK(id == Eigen::MatrixXcd::Identity(grid.size(), grid.size()));

    auto dt = to_dense(mode_frequency(grid));
    auto eig = hermitian_eigensystem(dt);
    for (int n = -2; n < 2; ++n) {
        const auto count = std::count_if(eig.values.begin(), eig.values.end(),
                                         [&](double v) { return std::abs(v - n) < 1e-12; });
        CHECK(count == 32);
    }

    // the dilation generator Re(p.x) is Hermitian in the position basis
    DilationTerm term{Eigen::MatrixXd::Identity(1, 1), {}, {}};
    auto a = to_dense(dilation_operator(grid, term));
    CHECK((a - a.adjoint()).norm() <= 1e-10 * a.norm());

    CHECK_THROWS_AS(to_dense(identity(ProductGrid(kPeriod, 8, 8.0, 1024, 1))), Error);
}

TEST_CASE("operators: adjoint consistency and self-adjointness on random states") {
    ProductGrid grid(kPeriod, 8, 16.0, 64, 1);
    auto x = position_component(grid, 0);
    auto p = momentum_component(grid, 0);
    std::vector<LinearOperator> ops = {
        p * x,
        real_part(p * x),
        mode_resolvent(grid, 1.5) * kinetic(grid) + x,
        cplx(0.0, 2.0) * (p * x - x * p),
    };
    Vec phi = random_state(grid.size(), 2), psi = random_state(grid.size(), 3);
    for (const auto& op : ops) {
        const cplx lhs = dot(op(phi), psi);
        const cplx rhs = dot(phi, op.adjoint()(psi));
        CHECK(std::abs(lhs - rhs) <= 1e-10 * norm(phi) * norm(psi));
        if (op.is_self_adjoint()) CHECK(std::abs(dot(phi, op(phi)).imag()) <= 1e-10 * std::abs(dot(phi, op(phi))));
    }
    // Re T = (T + T*)/2
    auto t = p * x;
    auto re = real_part(t);
    Vec a = re(phi), b = t(phi), c = t.adjoint()(phi);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = 0.5 * (b[i] + c[i]);
    CHECK(distance(a, b) <= 1e-13 * norm(b));
}

TEST_CASE("operators: Fourier multipliers commute, position multipliers do not") {
    ProductGrid grid(kPeriod, 8, 16.0, 128, 1);
    Vec phi = random_packets(grid, 1, 4).front();
    auto dt = mode_frequency(grid), t = kinetic(grid), x = position_component(grid, 0);
    CHECK(distance((dt * t)(phi), (t * dt)(phi)) <= 1e-12 * norm((dt * t)(phi)));
    // i[p^2/2, x] = p up to the packet tails that wrap around the box
    auto c = cplx(0.0, 1.0) * (t * x - x * t);
    auto p = momentum_component(grid, 0);
    CHECK(distance(c(phi), p(phi)) <= 1e-6 * norm(p(phi)));
}

TEST_CASE("filter: support, normalisation and dense vs Chebyshev") {
    CHECK(bump(0.0, 0.3) == 1.0);
    CHECK(bump(0.3, 0.3) == 0.0);
    CHECK(bump(-0.31, 0.3) == 0.0);
    for (double l = -0.3; l <= 0.3; l += 0.01) {
        CHECK(bump(l, 0.3) >= 0.0);
        CHECK(bump(l, 0.3) <= 1.0);
        CHECK(bump(l, 0.3) == bump(-l, 0.3));
    }

    ProductGrid grid(kPeriod, 8, 8.0, 64, 1);  // 512 dims
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m(grid.size(), grid.size());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m(i, j) = {g(rng), g(rng)};
    m = (m + m.adjoint()).eval() / (2.0 * std::sqrt(double(grid.size())));
    auto op = dense_operator(grid, m, "H");
    auto f = [](double l) { return bump(l - 0.2, 0.8); };
    auto dense = apply_filter(op, f, {FilterPath::Dense});
    auto cheb = apply_filter(op, f, {FilterPath::Chebyshev, 1e-10, 3});
    double worst = 0.0;
    for (int s = 0; s < 5; ++s) {
        Vec v = random_state(grid.size(), 20 + s);
        worst = std::max(worst, distance(dense(v), cheb(v)) / norm(v));
        CHECK(norm(dense(v)) <= norm(v) * (1.0 + 1e-12));
    }
    CHECK(worst <= 1e-7);

    // eigenvectors at the centre are fixed, those outside the window are annihilated
    auto eig = hermitian_eigensystem(m);
    const Eigen::VectorXcd inside = eig.vectors.col(0);
    Vec v(inside.data(), inside.data() + inside.size());
    auto filtered = apply_filter(op, [&](double l) { return bump(l - eig.values[0], 0.01); }, {FilterPath::Dense});
    CHECK(distance(filtered(v), v) <= 1e-10);
    const Eigen::VectorXcd outside = eig.vectors.col(grid.size() - 1);
    Vec u(outside.data(), outside.data() + outside.size());
    CHECK(norm(filtered(u)) <= 1e-10);
}

TEST_CASE("spectral: Hessenberg shifted solves") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(60, 60);
    for (int i = 0; i < 60; ++i)
        for (int j = 0; j < 60; ++j) a(i, j) = {g(rng), g(rng)};
    HessenbergSolver solver(a);
    Eigen::VectorXcd b = Eigen::VectorXcd::Random(60);
    const cplx z{0.3, 0.7};
    Eigen::VectorXcd x = solver.solve(z, b);
    CHECK(((a - z * Eigen::MatrixXcd::Identity(60, 60)) * x - b).norm() <= 1e-10 * b.norm());
    Eigen::VectorXcd y = solver.shifted(z).solve_adjoint(b);
    CHECK(((a - z * Eigen::MatrixXcd::Identity(60, 60)).adjoint() * y - b).norm() <= 1e-10 * b.norm());
}
