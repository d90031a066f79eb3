#include "fm/floquet.hpp"
#include "fm/sampling.hpp"
#include "fm/verify.hpp"

#include <doctest.h>

#include <numbers>

using namespace fm;

namespace {

constexpr double kPeriod = 2.0 * std::numbers::pi;

double distance(std::span<const cplx> a, std::span<const cplx> b) {
    Vec d(a.begin(), a.end());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= b[i];
    return norm(d);
}

}  // namespace

TEST_CASE("floquet: free spectrum is the joint symbol n w + k^2/2") {
    ProductGrid grid(kPeriod, 8, 16.0, 64, 1);
    FloquetHamiltonian k(grid, PotentialModel(MassGeometry({1.0, 1.0}), {}));
    auto spectrum = FloquetSpectrum::compute(k);
    RealVec symbol;
    for (int m = 0; m < grid.modes(); ++m)
        for (int i = 0; i < grid.points(); ++i)
            symbol.push_back(grid.mode_number(m) * grid.omega() + 0.5 * std::pow(grid.wavenumber(i), 2));
    std::sort(symbol.begin(), symbol.end());
    RealVec values = spectrum.values();
    std::sort(values.begin(), values.end());
    REQUIRE(values.size() == symbol.size());
    for (std::size_t i = 0; i < values.size(); ++i) CHECK(std::abs(values[i] - symbol[i]) <= 1e-10 * (1 + std::abs(symbol[i])));
}

TEST_CASE("floquet: K for the finest decomposition is the free operator") {
    MassGeometry g({1.0, 1.0});
    PotentialModel model(g, {{0, 1, {PairFamily::GaussianWell, 0.5, 1.0}}});
    ProductGrid grid(kPeriod, 8, 16.0, 128, 1);
    FloquetHamiltonian ka(grid, model, ClusterDecomposition::finest(2));
    FloquetHamiltonian k(grid, model);
    auto phi = random_packets(grid, 3, 1);
    for (const auto& s : phi) {
        CHECK(distance(ka.full()(s), k.free()(s)) == 0.0);
        CHECK(distance(k.full()(s), k.free()(s)) > 0.0);
        // self-adjoint on random states
        auto other = random_packets(grid, 1, 9).front();
        CHECK(std::abs(dot(k.full()(s), other) - dot(s, k.full()(other))) <= 1e-10 * norm(s) * norm(other));
    }
}

TEST_CASE("floquet: cluster Hamiltonian splits as subsystem plus intercluster kinetic energy") {
    // equal masses: the first Jacobi axis is the (1,2) relative coordinate, the second the intercluster one
    MassGeometry g({1.0, 1.0, 1.0}, {1.0, -1.0, 0.0});
    PairProfile well{PairFamily::GaussianWell, 0.4, 1.0};
    AcStarkFields fields(g, TrigSeries::from_cos_sin(1.0, 0.0, {0.2}, {}));
    PotentialModel model(g, {{0, 1, well}, {0, 2, well}, {1, 2, well}}, fields);
    ClusterDecomposition a({{0, 1}, {2}});
    ProductGrid grid(kPeriod, 4, 12.0, 32, 2);
    FloquetHamiltonian ka(grid, model, a);

    ProductGrid line(kPeriod, 4, 12.0, 32, 1);
    FloquetHamiltonian sub(line, pair_subsystem(model, a));
    auto t_a = kinetic(line);

    auto phis = random_packets(line, 2, 3);
    const std::size_t n = line.spatial_size();
    Vec psi(line.size());  // the intercluster factor, copied into every mode so T_a acts blockwise
    for (int m = 0; m < line.modes(); ++m)
        for (int i = 0; i < line.points(); ++i)
            psi[m * n + i] = std::exp(-0.5 * std::pow(line.coordinate(i) - 0.5, 2)) * std::polar(1.0, 0.7 * line.coordinate(i));
    const Vec t_psi = t_a(psi);
    for (const auto& phi : phis) {
        Vec product(grid.size()), expected(grid.size());
        const Vec k_phi = sub.full()(phi);
        for (int m = 0; m < grid.modes(); ++m)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    product[m * n * n + i * n + j] = phi[m * n + i] * psi[j];
                    expected[m * n * n + i * n + j] = k_phi[m * n + i] * psi[j] + phi[m * n + i] * t_psi[j];
                }
        CHECK(distance(ka.full()(product), expected) <= 1e-10 * norm(expected));
    }
}

TEST_CASE("floquet: subsystem quasi-energies") {
    MassGeometry g({1.0, 1.0, 1.0});
    PairProfile well{PairFamily::GaussianWell, 0.5, 1.0};
    PotentialModel model(g, {{0, 1, well}});
    ThresholdOptions opt;
    opt.points = 256;

    auto finest = subsystem_quasi_energies(model, kPeriod, ClusterDecomposition::finest(3), opt);
    REQUIRE(finest.size() == 1);
    CHECK(finest.front().value == 0.0);

    // static bound state of the (1,2) pair against a dense eigensolve of p^2/2 + V on the same grid
    ClusterDecomposition a({{0, 1}, {2}});
    ProductGrid line(kPeriod, 4, opt.half_width, opt.points, 1);
    FloquetHamiltonian sub(line, pair_subsystem(model, a));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub.static_block_dense());
    const double e = es.eigenvalues()(0);
    REQUIRE(e < 0.0);
    std::vector<double> bound;
    for (const auto& q : subsystem_quasi_energies(model, kPeriod, a, opt))
        if (q.bound) bound.push_back(q.value);
    REQUIRE(bound.size() == 1);
    CHECK(std::abs(bound.front() - (e + 1.0)) <= 1e-6);

    // pair without interaction: nothing localized
    ClusterDecomposition b({{1, 2}, {0}});
    for (const auto& q : subsystem_quasi_energies(model, kPeriod, b, opt)) CHECK_FALSE(q.bound);

    // a weak drive moves the quasi-energy only at second order in the amplitude
    MassGeometry gq({1.0, 1.0, 1.0}, {1.0, -1.0, 0.0});
    PotentialModel driven(gq, {{0, 1, well}}, AcStarkFields(gq, TrigSeries::from_cos_sin(1.0, 0.0, {1e-3}, {})));
    opt.steps_per_period = 256;
    std::vector<double> driven_bound;
    for (const auto& q : subsystem_quasi_energies(driven, kPeriod, a, opt))
        if (q.bound) driven_bound.push_back(q.value);
    REQUIRE(driven_bound.size() == 1);
    CHECK(std::abs(driven_bound.front() - bound.front()) <= 1e-4);
}

TEST_CASE("floquet: threshold distances") {
    ThresholdSet ladder(1.0, {0.0});
    CHECK(ladder.d0(0.3) == doctest::Approx(0.3));
    CHECK(ladder.d1(0.3) == doctest::Approx(0.3));
    CHECK(ladder.d0(0.7) == doctest::Approx(0.3));
    CHECK(ladder.d1(0.7) == doctest::Approx(0.7));
    ThresholdSet two(1.0, {0.0, 0.823});
    CHECK(two.d0(0.823) == 0.0);
    CHECK(two.d0(1.823) <= 1e-12);
    CHECK(two.d1(0.9) == doctest::Approx(0.077));
    auto pts = two.points_in(-1.0, 1.0);
    CHECK(pts.size() == 5);  // -1, -0.177, 0, 0.823, 1
    CHECK(ladder.merged(two).bases().size() == 2);
    // N=2: Theta is the mode ladder
    MassGeometry g({1.0, 1.0});
    auto theta = thresholds(PotentialModel(g, {{0, 1, {PairFamily::GaussianWell, 0.5, 1.0}}}), kPeriod);
    REQUIRE(theta.bases().size() == 1);
    CHECK(theta.bases().front() == 0.0);
}

TEST_CASE("floquet: eigenpairs, periodicity and localisation") {
    MassGeometry g({1.0, 1.0}, {1.0, -1.0});
    PairProfile well{PairFamily::GaussianWell, 0.5, 1.0};
    ProductGrid grid(kPeriod, 8, 16.0, 128, 1);

    SUBCASE("free ladder counts match exactly") {
        FloquetHamiltonian k0(grid, PotentialModel(g, {}));
        auto s0 = FloquetSpectrum::compute(k0);
        for (double lambda : {-2.0, -0.5, 0.3, 1.1}) CHECK(omega_periodicity_check(s0, lambda, 0.25).matches());
        try {
            omega_periodicity_check(s0, 2.5, 0.25);
            FAIL("edge window accepted");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::InconclusiveWindow);
        }
    }

    SUBCASE("driven well: dense eigenpairs") {
        PotentialModel model(g, {{0, 1, well}}, AcStarkFields(g, TrigSeries::from_cos_sin(1.0, 0.0, {0.2}, {})));
        FloquetHamiltonian k(grid, model);
        auto spectrum = FloquetSpectrum::compute(k);
        CHECK(spectrum.kind() == FloquetSpectrum::Kind::Dense);
        double worst = 0.0;
        for (std::size_t i = 0; i < spectrum.count(); ++i) {
            Vec v = spectrum.vector(i), kv = k.full()(v);
            for (std::size_t j = 0; j < v.size(); ++j) kv[j] -= spectrum.value(i) * v[j];
            worst = std::max(worst, norm(kv) / norm(v));
        }
        CHECK(worst <= 1e-8);
        auto count = omega_periodicity_check(spectrum, -0.6, 0.3);
        CHECK(count.lower > 0);
        CHECK(count.matches());
    }

    SUBCASE("static well: one localized state per interior mode") {
        PotentialModel model(MassGeometry({1.0, 1.0}), {{0, 1, well}});
        FloquetHamiltonian k(grid, model);
        auto spectrum = FloquetSpectrum::compute(k);
        CHECK(spectrum.kind() == FloquetSpectrum::Kind::ModeBlocks);
        auto loc = localized_eigenvalues(spectrum);
        REQUIRE_FALSE(loc.empty());
        for (double v : loc) CHECK(std::abs(v - std::round(v) - (loc.front() - std::round(loc.front()))) <= 1e-10);
        CHECK(omega_periodicity_check(spectrum, -1.3, 0.5).matches());
    }
}
