#include "fm/potentials.hpp"

#include <doctest.h>

#include <numbers>

using namespace fm;

namespace {

constexpr double kPi = std::numbers::pi;

bool all_finite(const std::vector<DecayLine>& lines) {
    return std::all_of(lines.begin(), lines.end(), [](const DecayLine& l) { return l.finite; });
}

}  // namespace

TEST_CASE("potentials: profile derivatives against finite differences") {
    for (PairProfile p : {PairProfile{PairFamily::GaussianWell, 0.7, 1.3}, PairProfile{PairFamily::SoftCore, 2.0, 0.8}}) {
        const double h = 1e-4;
        for (double y : {-3.0, -0.4, 0.0, 0.9, 5.0}) {
            CHECK(p.d1(y) == doctest::Approx((p.value(y + h) - p.value(y - h)) / (2 * h)).epsilon(1e-7));
            CHECK(p.d2(y) == doctest::Approx((p.d1(y + h) - p.d1(y - h)) / (2 * h)).epsilon(1e-7));
        }
    }
    CHECK(PairProfile{PairFamily::GaussianWell, 0.5, 1.0}.value(0.0) == -0.5);
}

TEST_CASE("potentials: decay certificates") {
    MassGeometry g({1.0, 1.0});
    PotentialModel zero(g, {{0, 1, {PairFamily::Zero, 0.0, 1.0}}});
    for (const auto& line : decay_report(zero, zero.pairs()[0], 2.0)) CHECK(line.constant == 0.0);

    PotentialModel gauss(g, {{0, 1, {PairFamily::GaussianWell, 1.0, 1.0}}});
    for (double rho : {0.5, 1.0, 2.0, 6.0}) CHECK(all_finite(decay_report(gauss, gauss.pairs()[0], rho)));

    // v0 / (1 + y^2) decays exactly like <y>^-2
    PotentialModel soft(g, {{0, 1, {PairFamily::SoftCore, 1.0, 1.0}}});
    CHECK(all_finite(decay_report(soft, soft.pairs()[0], 2.0)));
    CHECK_FALSE(decay_report(soft, soft.pairs()[0], 3.0).front().finite);
    try {
        require_decay(soft, 3.0);
        FAIL("decay violation not reported");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DecayViolation);
    }
}

TEST_CASE("fields: cosine drive integrals in closed form") {
    const double e0 = 0.3, w = 1.0;
    MassGeometry g({1.0, 1.0}, {1.0, -1.0});
    AcStarkFields f(g, TrigSeries::from_cos_sin(w, 0.0, {e0}, {}));
    const double u = g.field_direction()(0);
    for (double t : {0.0, 0.4, 1.7, 3.0, 5.5}) {
        CHECK(std::abs(f.b(t)(0) - u * e0 / w * std::sin(w * t)) <= 1e-12);
        CHECK(std::abs(f.c(t)(0) - u * e0 / (w * w) * (1.0 - std::cos(w * t))) <= 1e-12);
    }
    const double T = 2 * kPi / w;
    CHECK(std::abs(f.b(0.0)(0) - f.b(T)(0)) <= 1e-10);
    CHECK(std::abs(f.c(0.0)(0) - f.c(T)(0)) <= 1e-10);

    // a(T) = 1/2 int |b|^2 by trapezoid quadrature
    double quad = 0.0;
    const int n = 4096;
    for (int k = 0; k < n; ++k) quad += 0.5 * f.b(T * k / n).squaredNorm() * T / n;
    CHECK(std::abs(f.a(T) - quad) <= 1e-10);
    CHECK(f.a(T) >= 0.0);

    AcStarkFields none(g, TrigSeries::from_cos_sin(w, 0.0, {0.0}, {}));
    CHECK(none.vanishes());
    CHECK(none.b(1.0).norm() == 0.0);
    CHECK(none.c(1.0).norm() == 0.0);
    CHECK(none.a(2.0) == 0.0);
}

TEST_CASE("fields: pair shifts vanish for equal charge-to-mass ratios") {
    MassGeometry g({1.0, 2.0, 4.0}, {0.5, 1.0, -1.0});
    AcStarkFields f(g, TrigSeries::from_cos_sin(1.0, 0.0, {0.4}, {0.1}));
    for (double t : {0.3, 1.1, 4.0}) {
        CHECK(f.pair_shift(0, 1, t) == 0.0);
        CHECK(f.pair_shift(0, 2, t) != 0.0);
    }
}

TEST_CASE("potentials: periodicity, cluster splitting and time derivative") {
    // c_12(t) = 0.3 (1 - cos t): charge-to-mass gap 0.3 with unit amplitude
    MassGeometry g({1.0, 1.0}, {0.15, -0.15});
    PairProfile well{PairFamily::GaussianWell, 1.0, 1.0};
    PotentialModel model(g, {{0, 1, well}}, AcStarkFields(g, TrigSeries::from_cos_sin(1.0, 0.0, {1.0}, {})));
    CHECK_FALSE(model.time_independent());
    const double T = 2 * kPi;
    for (double t : {0.0, 0.7, 2.9})
        CHECK(std::abs(model.pair_shift(model.pairs()[0], t) - 0.3 * (1.0 - std::cos(t))) <= 1e-12);
    Eigen::VectorXd x(1);
    for (double y : {-2.0, 0.1, 1.5}) {
        x(0) = y;
        for (double t : {0.0, 1.3, 4.4}) {
            CHECK(std::abs(model.value(t + T, x) - model.value(t, x)) <= 1e-12);
            // centred differences are O(h^2)
            const double h = 1e-3;
            const double fd = (model.value(t + h, x) - model.value(t - h, x)) / (2 * h);
            CHECK(std::abs(model.time_derivative(t, x) - fd) <= 1e-6);
        }
    }

    // V^a + I_a = V for every cluster decomposition of three particles
    MassGeometry g3({1.0, 2.0, 5.0}, {1.0, 0.0, -1.0});
    PotentialModel three(g3,
                         {{0, 1, {PairFamily::GaussianWell, 0.4, 1.0}},
                          {0, 2, {PairFamily::SoftCore, 0.2, 1.5}},
                          {1, 2, {PairFamily::GaussianWell, 0.3, 0.7}}},
                         AcStarkFields(g3, TrigSeries::from_cos_sin(1.0, 0.0, {0.2}, {})));
    Eigen::VectorXd p(2);
    p << 0.3, -0.8;
    for (const auto& a : cluster_lattice(3)) {
        double inter = 0.0;
        for (const auto& pair : three.pairs()) {
            if (a.joins(pair.first, pair.second)) continue;
            const auto axis = g3.pair_axis(pair.first, pair.second);
            inter += pair.profile.value(axis.separation_factor * axis.direction.dot(p) + three.pair_shift(pair, 0.9));
        }
        CHECK(std::abs(three.value(0.9, p, &a) + inter - three.value(0.9, p)) <= 1e-12);
    }
    CHECK(three.value(0.9, p, &cluster_lattice(3).back()) == 0.0);
}
