#include "fm/conjugate.hpp"
#include "fm/sampling.hpp"

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

TEST_CASE("conjugate: structural zeros of the cluster terms") {
    ProductGrid grid(kPeriod, 4, 16.0, 64, 1);
    MassGeometry g({1.0, 1.0});
    CHECK(cluster_terms(grid, g, ClusterDecomposition::finest(2), true, false).empty());
    CHECK(cluster_terms(grid, g, ClusterDecomposition::coarsest(2), false, true).empty());
    CHECK(cluster_terms(grid, g, ClusterDecomposition::coarsest(2), true, false).size() == 1);

    ProductGrid plane(kPeriod, 4, 8.0, 16, 2);
    MassGeometry g3({1.0, 2.0, 5.0});
    for (const auto& a : cluster_lattice(3)) {
        const auto inner = cluster_terms(plane, g3, a, true, false);
        const auto outer = cluster_terms(plane, g3, a, false, true);
        CHECK(inner.empty() == a.is_finest());
        CHECK(outer.empty() == a.is_coarsest());
    }
    CHECK(parse_conjugate_kind(to_string(ConjugateKind::ClusterIntercluster)) == ConjugateKind::ClusterIntercluster);
    CHECK_THROWS_AS(parse_conjugate_kind("nope"), Error);
}

TEST_CASE("conjugate: glued operator for two particles is the sum of the two localized pieces") {
    ProductGrid grid(kPeriod, 4, 32.0, 256, 1);
    MassGeometry g({1.0, 2.0});
    GrafPartition partition(g);
    const double r = 4.0;
    auto glued = build_conjugate({ConjugateKind::Glued, 0, 0, r, {}}, grid, g, &partition);
    auto sampled = partition.sample(grid, r);
    LinearOperator manual = zero(grid);
    for (std::size_t a = 0; a < sampled.clusters.size(); ++a) {
        auto j = partition_multiplier(grid, sampled, a);
        auto piece = build_conjugate({ConjugateKind::ClusterSum, 0, 0, 1, sampled.clusters[a]}, grid, g);
        manual = manual + j * piece * j;
    }
    auto states = random_packets(grid, 3, 21);
    for (const auto& s : states) {
        CHECK(distance(glued(s), manual(s)) <= 1e-12 * norm(manual(s)));
        // symmetric form
        auto other = random_packets(grid, 1, 22).front();
        CHECK(std::abs(dot(glued(s), other) - dot(s, glued(other))) <= 1e-10 * norm(s) * norm(other));
    }
    CHECK_THROWS_AS(build_conjugate({ConjugateKind::Glued, 0, 0, r, {}}, grid, g), Error);
}

TEST_CASE("conjugate: every kind is symmetric on random states") {
    ProductGrid grid(kPeriod, 8, 16.0, 128, 1);
    MassGeometry g({1.0, 1.0});
    const auto top = ClusterDecomposition::coarsest(2), bottom = ClusterDecomposition::finest(2);
    std::vector<ConjugateSpec> specs = {
        {ConjugateKind::Dilation, 0, 0, 1, {}},
        {ConjugateKind::Yokoyama, 0, 0, 1, {}},
        {ConjugateKind::Ak, 0.5, 0.05, 1, {}},
        {ConjugateKind::ClusterInternal, 0, 0, 1, top},
        {ConjugateKind::ClusterIntercluster, 0, 0, 1, bottom},
        {ConjugateKind::DilationInternal, 0, 0, 1, top},
    };
    auto states = random_packets(grid, 2, 5);
    for (const auto& spec : specs) {
        auto a = build_conjugate(spec, grid, g);
        CHECK(a.is_self_adjoint());
        const cplx form = dot(states[0], a(states[1])), back = dot(a(states[0]), states[1]);
        CHECK(std::abs(form - back) <= 1e-10 * norm(states[0]) * norm(states[1]));
        CHECK(std::abs(dot(states[0], a(states[0])).imag()) <= 1e-10 * norm(states[0]) * norm(a(states[0])));
    }
    // Re(p.x) equals the dilation of the internal variable when the internal space is all of X
    auto full = build_conjugate({ConjugateKind::Dilation, 0, 0, 1, {}}, grid, g);
    auto internal = build_conjugate({ConjugateKind::DilationInternal, 0, 0, 1, top}, grid, g);
    CHECK(distance(full(states[0]), internal(states[0])) <= 1e-12 * norm(full(states[0])));
}

TEST_CASE("conjugate: closed-form commutator agrees with the numerical one on smooth states") {
    MassGeometry g({1.0, 1.0}, {1.0, -1.0});
    PotentialModel model(g, {{0, 1, {PairFamily::GaussianWell, 0.5, 1.0}}});
    GrafPartition partition(g);
    auto error = [&](int points, double r) {
        ProductGrid grid(kPeriod, 8, 32.0, points, 1);
        FloquetHamiltonian k(grid, model);
        ConjugateSpec spec{ConjugateKind::Glued, 0, 0, r, {}};
        auto closed = commutator_closed_form(k, spec, &partition);
        auto numeric = commutator(k.full(), build_conjugate(spec, grid, g, &partition));
        double worst = 0.0;
        for (const auto& s : random_packets(grid, 2, 31)) {
            REQUIRE(in_box(grid, s));
            worst = std::max(worst, distance(closed(s), numeric(s)) / norm(numeric(s)));
        }
        return worst;
    };
    CHECK(error(1024, 8.0) <= 1e-6);
    // at small R the partition is steep and only the numerical side carries a resolution error
    const double coarse = error(1024, 4.0), fine = error(2048, 4.0);
    CHECK(fine <= 1e-5);
    CHECK(fine <= 0.1 * coarse);

    ProductGrid grid(kPeriod, 8, 32.0, 256, 1);
    // Ak: (lambda0 - delta - D_t)^{-1} commutes with K0, so i[K0, A] is the multiplier times p^2
    ConjugateSpec ak{ConjugateKind::Ak, 0.5, 0.05, 1, {}};
    FloquetHamiltonian k0(grid, PotentialModel(g, {}));
    auto closed = commutator_closed_form(k0, ak);
    auto expected = mode_resolvent(grid, 0.45) * (cplx(2.0) * kinetic(grid));
    for (const auto& s : random_packets(grid, 2, 32)) CHECK(distance(closed(s), expected(s)) <= 1e-10 * norm(expected(s)));
}

TEST_CASE("partition: multipliers commute with the mode frequency and are supported as declared") {
    ProductGrid grid(kPeriod, 4, 32.0, 256, 1);
    MassGeometry g({1.0, 1.0});
    GrafPartition partition(g);
    auto sampled = partition.sample(grid, 4.0);
    auto dt = mode_frequency(grid);
    auto s = random_packets(grid, 1, 3).front();
    for (std::size_t a = 0; a < sampled.clusters.size(); ++a) {
        auto j = partition_multiplier(grid, sampled, a);
        CHECK(distance((j * dt)(s), (dt * j)(s)) <= 1e-13 * norm((dt * j)(s)));
    }
    const auto top = partition.index_of(ClusterDecomposition::coarsest(2));
    for (std::size_t i = 0; i < grid.spatial_size(); ++i) {
        double total = 0.0;
        for (const auto& v : sampled.values) total += v[i] * v[i];
        CHECK(std::abs(total - 1.0) <= 1e-12);
        // the bound-pair weight lives in the ball of radius r0 R
        if (std::abs(grid.position(i)[0]) > partition.r0() * 4.0 + 1e-12) CHECK(sampled.values[top][i] == 0.0);
    }
    CHECK(partition.verify(grid, 4.0, {2.0, 3.0}).ok());

    // eta^2 + eta_bar^2 = 1 and the support of the ramp
    for (double t = -1.0; t <= 3.0; t += 0.01) {
        CHECK(std::abs(eta(t) * eta(t) + eta_bar(t) * eta_bar(t) - 1.0) <= 1e-14);
        if (t <= 1.0) CHECK(eta(t) == 0.0);
        if (t >= 2.0) CHECK(eta(t) == 1.0);
    }
    CHECK(smooth_step(0.5, 1.0, 2.0) == 1.0);
    CHECK(smooth_step(2.5, 1.0, 2.0) == 0.0);
    CHECK(smooth_step_derivative(1.5, 1.0, 2.0) == doctest::Approx((smooth_step(1.5 + 1e-6, 1.0, 2.0) - smooth_step(1.5 - 1e-6, 1.0, 2.0)) / 2e-6).epsilon(1e-6));
}

TEST_CASE("conjugate: Nelson bounds") {
    ProductGrid grid(kPeriod, 8, 16.0, 128, 1);
    MassGeometry g({1.0, 1.0});
    auto states = random_packets(grid, 4, 2);
    auto none = nelson_bounds(zero(grid), states);
    CHECK(none.relative_bound == 0.0);
    CHECK(none.commutator_bound == 0.0);
    CHECK(none.samples == 4);
    CHECK(none.floor > 0.0);

    auto a = build_conjugate({ConjugateKind::Dilation, 0, 0, 1, {}}, grid, g);
    auto b = nelson_bounds(a, states);
    CHECK(b.relative_bound > 0.0);
    // |Re(p.x)| <= (p^2 + x^2)/2 <= N0 on these states
    CHECK(b.relative_bound <= 2.0);
}
