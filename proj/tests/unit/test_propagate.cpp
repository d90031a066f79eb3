#include "fm/propagate.hpp"

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

Vec gaussian(const ProductGrid& grid, double centre, double width, double momentum) {
    Vec psi(grid.spatial_size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double x = grid.position(i)[0] - centre;
        psi[i] = std::exp(-x * x / (2 * width * width)) * std::polar(1.0, momentum * x);
    }
    return psi;
}

PotentialModel driven_well(double amplitude, double depth = 0.5) {
    MassGeometry g({1.0, 1.0}, {1.0, -1.0});
    std::vector<PairInteraction> pairs;
    if (depth != 0.0) pairs.push_back({0, 1, {PairFamily::GaussianWell, depth, 1.0}});
    return PotentialModel(g, pairs, AcStarkFields(g, TrigSeries::from_cos_sin(1.0, 0.0, {amplitude}, {})));
}

}  // namespace

TEST_CASE("propagate: free Gaussian against its closed form") {
    ProductGrid grid(kPeriod, 4, 32.0, 512, 1);
    MassGeometry g({1.0, 1.0});
    auto u = Propagator::for_model(grid, PotentialModel(g, {}));
    const double t = kPeriod / 4;
    Vec out = u.propagate(gaussian(grid, 0.0, 1.0, 0.0), 0.0, t);
    Vec exact(grid.spatial_size());
    const cplx z(1.0, t);
    for (std::size_t i = 0; i < exact.size(); ++i) {
        const double x = grid.position(i)[0];
        exact[i] = std::exp(-x * x / (2.0 * z)) / std::sqrt(z);
    }
    CHECK(distance(out, exact) <= 1e-8 * norm(exact));
    CHECK(u.drift() <= 1e-12);
    CHECK_THROWS_AS(u.propagate(exact, 0.0, 0.3), Error);
}

TEST_CASE("propagate: second order in the step and the cocycle property") {
    ProductGrid grid(kPeriod, 4, 32.0, 256, 1);
    auto model = driven_well(0.2);
    auto u = Propagator::for_model(grid, model);
    const Vec psi = gaussian(grid, 0.5, 1.5, 0.3);
    const double t1 = kPeriod / 2;
    const Vec reference = u.refined().refined().refined().propagate(psi, 0.0, t1);
    const double coarse = distance(u.propagate(psi, 0.0, t1), reference);
    const double fine = distance(u.refined().propagate(psi, 0.0, t1), reference);
    CHECK(coarse / fine > 3.5);
    CHECK(coarse / fine < 4.5);
    CHECK(richardson_error(u, psi, 0.0, t1) == doctest::Approx(fine).epsilon(0.2));

    const double dt = u.step();
    const Vec direct = u.propagate(psi, 10 * dt, 200 * dt);
    const Vec split = u.propagate(u.propagate(psi, 10 * dt, 77 * dt), 77 * dt, 200 * dt);
    CHECK(distance(direct, split) <= 1e-9 * norm(psi));
    // backward evolution inverts forward evolution
    CHECK(distance(u.propagate(u.propagate(psi, 0.0, 64 * dt), 64 * dt, 0.0), psi) <= 1e-9 * norm(psi));
}

TEST_CASE("propagate: Floquet group at sigma = 0 and for the free operator") {
    ProductGrid grid(kPeriod, 8, 16.0, 128, 1);
    PacketOptions po;
    po.momentum_fraction = 0.05;
    po.min_width_fraction = 0.08;
    po.max_width_fraction = 0.12;
    auto states = random_packets(grid, 2, 3, po);

    auto model = driven_well(0.1);
    FloquetHamiltonian k(grid, model);
    auto spectrum = FloquetSpectrum::compute(k);
    auto u = Propagator::for_model(grid, model);
    for (const auto& s : states) {
        CHECK(distance(floquet_evolve(spectrum, s, 0.0), s) <= 1e-10 * norm(s));
        CHECK(distance(assembled_group(u, s, 0.0), s) <= 1e-12 * norm(s));
    }

    // free: split step is exact, so the two sides agree to roundoff at any step count
    MassGeometry g({1.0, 1.0});
    PotentialModel free(g, {});
    FloquetHamiltonian k0(grid, free);
    auto s0 = FloquetSpectrum::compute(k0);
    auto u0 = Propagator::for_model(grid, free);
    const double sigmas[] = {0.0, 16 * u0.step(), 100 * u0.step()};
    auto r = floquet_group_check(s0, u0, states, sigmas, 1e-8);
    CHECK(r.passed());
    CHECK(r.computed <= 1e-8);
}

TEST_CASE("propagate: gauge map is unitary and inverted exactly") {
    ProductGrid grid(kPeriod, 4, 32.0, 512, 1);
    auto model = driven_well(0.3);
    const auto& fields = *model.fields();
    const Vec psi = gaussian(grid, 0.0, 1.0, 0.2);
    for (double t : {0.0, 0.9, 2.5, 4.0}) {
        const Vec mapped = gauge_map(grid, fields, t, psi);
        CHECK(std::abs(norm(mapped) - norm(psi)) <= 1e-12 * norm(psi));
        CHECK(distance(gauge_map_inverse(grid, fields, t, mapped), psi) <= 1e-12 * norm(psi));
    }
    // zero field: the identity
    auto none = driven_well(0.0);
    CHECK(distance(gauge_map(grid, *none.fields(), 1.3, psi), psi) <= 1e-14 * norm(psi));
}

TEST_CASE("propagate: Avron-Herbst without interaction is second order in the step") {
    ProductGrid grid(kPeriod, 4, 64.0, 1024, 1);
    const Vec psi = gaussian(grid, 0.0, 2.0, 0.0);
    std::vector<double> times;
    for (int i = 1; i <= 4; ++i) times.push_back(i * kPeriod / 4);
    // the moving frame is exactly free; the length gauge carries the splitting error of E(t).x
    auto r = avron_herbst(grid, driven_well(0.05, 0.0), psi, times);
    CHECK(r.deviation <= 1e-5);
    CHECK(r.deviation / r.refined_deviation > 3.5);
    CHECK(r.deviation / r.refined_deviation < 4.5);
    CHECK(r.deviations.size() == times.size());

    MassGeometry g({1.0, 1.0}, {1.0, -1.0});
    PotentialModel dc(g, {}, AcStarkFields(g, TrigSeries::from_cos_sin(1.0, 0.1, {0.05}, {})));
    try {
        avron_herbst(grid, dc, psi, times);
        FAIL("field with non-zero mean accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnsupportedConfiguration);
    }
}

TEST_CASE("propagate: estimate integrals vanish for filtered-out states and an empty velocity cut") {
    MassGeometry g({1.0, 1.0});
    PotentialModel model(g, {{0, 1, {PairFamily::GaussianWell, 0.5, 1.0}}});
    ProductGrid grid(kPeriod, 8, 32.0, 256, 1);
    FloquetHamiltonian k(grid, model);
    auto spectrum = FloquetSpectrum::compute(k);
    EstimateConfig c;
    c.lambda0 = 0.5;
    c.delta = 0.05;
    c.sigma_max = 16.0;
    c.sigma_step = 0.25;
    c.horizon_mass = 1.0;

    // an eigenvector far outside the window
    std::size_t far = 0;
    for (std::size_t i = 0; i < spectrum.count(); ++i)
        if (std::abs(spectrum.value(i) - 0.5) > std::abs(spectrum.value(far) - 0.5)) far = i;
    const Vec outside = spectrum.vector(far);
    auto smooth = smoothness_integral(spectrum, outside, c);
    CHECK(smooth.value == 0.0);
    CHECK(smooth.norm == 0.0);

    auto phi = random_packets(grid, 1, 4).front();
    c.velocity = 0.0;
    CHECK(minimal_velocity_integral(spectrum, phi, c).value == 0.0);

    c.s = 0.5;
    CHECK_THROWS_AS(validate(c), Error);
}
