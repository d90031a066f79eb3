// Acceptance runs at desk scale. Usage: fm_acceptance [id ...]; no ids runs everything.
// One line per check: "[id] name PASS|FAIL  summary  (seconds)". Exit code 1 iff any check fails.

#include "fm/propagate.hpp"
#include "fm/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace fm;

constexpr double kPeriod = 2.0 * std::numbers::pi;  // omega = 1

struct Outcome {
    bool pass = false;
    std::string summary;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double relative_error(const LinearOperator& lhs, const LinearOperator& rhs, const std::vector<Vec>& states) {
    double worst = 0.0;
    for (const auto& s : states) {
        Vec a = lhs(s), b = rhs(s);
        for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
        worst = std::max(worst, norm(a) / norm(b));
    }
    return worst;
}

PotentialModel static_well(double depth, double width, std::vector<double> charges = {}) {
    MassGeometry g({1.0, 1.0}, std::move(charges));
    return PotentialModel(g, {{0, 1, {PairFamily::GaussianWell, depth, width}}});
}

// ---- 1: free commutator identities ----

Outcome commutator_identities() {
    ProductGrid grid(kPeriod, 8, 64.0, 2048, 1);
    MassGeometry g({1.0, 1.0});
    FloquetHamiltonian k(grid, PotentialModel(g, {}));
    auto states = random_packets(grid, 50, 11);
    for (const auto& s : states)
        if (!in_box(grid, s)) return {false, "sample state not in box"};

    auto a_max = build_conjugate({ConjugateKind::ClusterSum, 0, 0, 1, ClusterDecomposition::coarsest(2)}, grid, g);
    auto a_min = build_conjugate({ConjugateKind::ClusterSum, 0, 0, 1, ClusterDecomposition::finest(2)}, grid, g);
    auto c_max = commutator(k.full(), a_max);
    auto c_min = commutator(k.full(), a_min);

    GrafPartition partition(g);
    auto sampled = partition.sample(grid, 16.0);

    std::vector<std::pair<std::string, double>> errors = {
        {"dilation", relative_error(c_max, closed_form(ClosedForm::Dilation, grid), states)},
        {"dilation-double", relative_error(commutator(c_max, a_max), closed_form(ClosedForm::DilationDouble, grid), states)},
        {"resolvent", relative_error(c_min, closed_form(ClosedForm::Resolvent, grid), states)},
        {"resolvent-double", relative_error(commutator(c_min, a_min), closed_form(ClosedForm::ResolventDouble, grid), states)},
        {"cluster-difference", relative_error(c_min - c_max, closed_form(ClosedForm::ClusterDifference, grid), states)},
        {"ims", relative_error(closed_form(ClosedForm::Ims, grid, &sampled), cplx(2.0) * kinetic(grid), states)},
    };
    for (std::size_t a = 0; a < sampled.clusters.size(); ++a) {
        auto j = partition_multiplier(grid, sampled, a);
        errors.emplace_back("localization" + sampled.clusters[a].label(),
                            relative_error(commutator(j, kinetic(grid)),
                                           closed_form(ClosedForm::Localization, grid, &sampled, a), states));
    }
    bool pass = true;
    std::ostringstream out;
    for (const auto& [name, e] : errors) {
        pass = pass && e <= 1e-6;
        out << name << "=" << fmt("%.1e", e) << " ";
    }
    return {pass, out.str()};
}

// ---- 2: free Mourre bound against the mode-wise oracle ----

// min over grid (n, k) with |n w + k^2/2 - lambda0| < delta of k^2 / (3w/2 - n w).
double free_oracle(const ProductGrid& grid, double lambda0, double delta) {
    double best = INFINITY;
    const double w = grid.omega();
    for (int m = 0; m < grid.modes(); ++m) {
        const int n = grid.mode_number(m);
        for (int i = 0; i < grid.points(); ++i) {
            const double k = grid.wavenumber(i);
            if (std::abs(n * w + 0.5 * k * k - lambda0) < delta) best = std::min(best, k * k / (1.5 * w - n * w));
        }
    }
    return best;
}

Outcome free_mourre() {
    ProductGrid grid(kPeriod, 8, 64.0, 1024, 1);
    MassGeometry g({1.0, 1.0});
    FloquetHamiltonian k(grid, PotentialModel(g, {}));
    auto spectrum = FloquetSpectrum::compute(k);
    ThresholdSet theta(grid.omega(), {0.0});
    bool pass = true;
    std::ostringstream out;
    for (double lambda0 : {0.3, 0.5, 0.7}) {
        MourreConfig c;
        c.lambda0 = lambda0;
        c.delta0 = 0.1;
        c.delta = 0.1 * (1.0 - 1e-9);
        c.epsilon = 1e-12;
        c.leakage = -1.0;  // nothing is localized in the free case
        c.d1 = lambda0;
        c.conjugate = {ConjugateKind::ClusterInternal, 0, 0, 1, ClusterDecomposition::coarsest(2)};
        auto r = mourre_check(k, spectrum, theta, c);
        const double oracle = free_oracle(grid, lambda0, c.delta);
        const double target = 2.0 * (lambda0 - 0.1) / 1.5 - 1e-6;
        const bool ok = r.computed > target && std::abs(r.computed - oracle) <= 1e-10 * oracle;
        pass = pass && ok;
        out << fmt("l0=%.1f ritz=%.6f oracle=%.6f bound=%.6f ", lambda0, r.computed, oracle, target + 1e-6);
    }
    return {pass, out.str()};
}

// ---- 3: high modes vanish ----

Outcome mode_vanishing() {
    ProductGrid grid(kPeriod, 16, 64.0, 2048, 1);
    double worst = 0.0;
    bool pass = true;
    for (double lambda0 : {0.0, 0.25, 0.5, 0.75, 0.95})
        for (double delta0 : {0.05, 0.1, 0.2, 0.24}) {
            auto r = mode_diagnostics(grid, lambda0, delta0);
            worst = std::max(worst, r.parameters["high_mode_filter_norm"]);
            // independent: every grid symbol of every mode n >= 2 lies outside the bump support
            for (int m = 0; m < grid.modes(); ++m) {
                const int n = grid.mode_number(m);
                if (n < 2) continue;
                for (int i = 0; i < grid.points(); ++i) {
                    const double k = grid.wavenumber(i);
                    if (bump(n * grid.omega() + 0.5 * k * k - lambda0, delta0) != 0.0) pass = false;
                }
            }
        }
    pass = pass && worst == 0.0;
    return {pass, fmt("max filter norm over n>=2: %g", worst)};
}

// ---- 4: Graf partition ----

Outcome graf_partition() {
    bool pass = true;
    std::ostringstream out;
    auto run = [&](const MassGeometry& g, const ProductGrid& grid, const char* tag) {
        GrafPartition partition(g);
        for (double scale : {4.0, 8.0, 16.0}) {
            try {
                auto rep = partition.verify(grid, scale, {2.0, 3.0, 5.0});
                const bool ok = rep.ok(1e-12);
                pass = pass && ok;
                out << fmt("%s R=%g sum=%.1e ", tag, scale, rep.sum_deviation);
            } catch (const Error& e) {
                pass = false;
                out << tag << " R=" << scale << " " << e.what() << " ";
            }
        }
    };
    run(MassGeometry({1.0, 1.0}), ProductGrid(kPeriod, 8, 32.0, 1024, 1), "N=2");
    run(MassGeometry({1.0, 1.0, 1.0}), ProductGrid(kPeriod, 8, 32.0, 64, 2), "N=3");
    run(MassGeometry({1.0, 2.0, 5.0}), ProductGrid(kPeriod, 8, 32.0, 128, 2), "N=3(1,2,5)");
    return {pass, out.str()};
}

// ---- 5: interacting two-body Mourre ----

Outcome two_body_mourre() {
    auto model = static_well(0.5, 1.0);
    ProductGrid grid(kPeriod, 8, 64.0, 1024, 1);
    FloquetHamiltonian k(grid, model);
    auto spectrum = FloquetSpectrum::compute(k);
    auto theta = thresholds(model, kPeriod);
    auto theta_hat = refined_thresholds(model, kPeriod, ClusterDecomposition::coarsest(2), {}, &spectrum);
    const double lambda0 = 0.5;
    GrafPartition partition(model.geometry());

    MourreConfig c;
    c.lambda0 = lambda0;
    c.delta0 = 0.1;
    c.delta = 0.05;
    c.d1 = theta.d1(lambda0);
    c.epsilon = 0.2 * *c.d1;

    std::ostringstream out;
    out << fmt("d0(Theta-hat)=%.3f ", theta_hat.d0(lambda0));
    std::vector<double> margins;
    bool any = false;
    for (double scale : {4.0, 8.0, 16.0}) {
        c.conjugate = {ConjugateKind::Glued, 0, 0, scale, {}};
        auto r = mourre_check(k, spectrum, theta, c, &partition);
        margins.push_back(r.margin);
        any = any || r.passed();
        out << fmt("R=%g margin=%.6f ", scale, r.margin);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < margins.size(); ++i) monotone = monotone && margins[i] >= margins[i - 1] - 1e-6;

    // dense cross-validation at 2048 dims
    ProductGrid small(kPeriod, 8, 32.0, 256, 1);
    FloquetHamiltonian ks(small, model);
    auto blocks = FloquetSpectrum::compute(ks);
    auto eig = std::make_shared<Eigensystem>(hermitian_eigensystem(to_dense(ks.full())));
    auto dense = FloquetSpectrum::from_dense(small, eig, true);
    c.conjugate = {ConjugateKind::Glued, 0, 0, 4.0, {}};
    auto rb = mourre_check(ks, blocks, theta, c, &partition);
    auto rd = mourre_check(ks, dense, theta, c, &partition);
    const double cross = std::abs(rb.computed - rd.computed);
    const bool cross_ok = cross <= 1e-8 * std::max(1.0, std::abs(rb.computed));
    out << fmt("dense-vs-blocks=%.1e ", cross) << (monotone ? "" : "margin decreases in R ");
    return {any && monotone && cross_ok && theta_hat.d0(lambda0) > 0.0, out.str()};
}

// ---- 6: three-body glued Mourre ----

Outcome three_body_mourre() {
    MassGeometry g({1.0, 1.0, 1.0});
    PairProfile well{PairFamily::GaussianWell, 0.3, 1.0};
    PotentialModel model(g, {{0, 1, well}, {0, 2, well}, {1, 2, well}});
    ProductGrid grid(kPeriod, 8, 32.0, 64, 2);
    FloquetHamiltonian k(grid, model);
    auto spectrum = FloquetSpectrum::compute(k);
    auto theta = thresholds(model, kPeriod);
    auto theta_hat = refined_thresholds(model, kPeriod, ClusterDecomposition::coarsest(3), {}, &spectrum);
    const double lambda0 = 0.5;
    if (theta_hat.d0(lambda0) < 0.1 * grid.omega()) return {false, fmt("lambda0 too close to Theta-hat: %g", theta_hat.d0(lambda0))};

    GrafPartition partition(g);
    MourreConfig c;
    c.lambda0 = lambda0;
    c.delta0 = 0.1;
    c.delta = 0.05;
    c.d1 = theta.d1(lambda0);
    c.epsilon = 0.2 * *c.d1;
    bool any = false;
    std::ostringstream out;
    out << fmt("d0(Theta-hat)=%.3f d1=%.3f ", theta_hat.d0(lambda0), *c.d1);
    for (double scale : {4.0, 8.0, 16.0}) {
        c.conjugate = {ConjugateKind::Glued, 0, 0, scale, {}};
        auto r = mourre_check(k, spectrum, theta, c, &partition);
        any = any || r.passed();
        out << fmt("R=%g ritz=%.4f c=%.4f ", scale, r.computed, r.bound);
    }
    return {any, out.str()};
}

// ---- 7: virial ----

Outcome virial() {
    MassGeometry g({1.0, 1.0}, {1.0, -1.0});
    PairProfile well{PairFamily::GaussianWell, 0.5, 1.0};
    auto field = TrigSeries::from_cos_sin(1.0, 0.0, {0.2}, {});
    PotentialModel model(g, {{0, 1, well}}, AcStarkFields(g, field));
    ProductGrid grid(kPeriod, 8, 32.0, 256, 1);
    FloquetHamiltonian k(grid, model);
    auto spectrum = FloquetSpectrum::compute(k);
    GrafPartition partition(g);
    auto a = build_conjugate({ConjugateKind::Glued, 0, 0, 4.0, {}}, grid, g, &partition);
    auto r = virial_check(k, spectrum, a, 1e-6);
    return {r.passed() && spectrum.kind() == FloquetSpectrum::Kind::Dense,
            fmt("eigenvectors=%zu worst=%.2e", spectrum.count(), r.parameters["worst_residual"])};
}

// ---- 8: limiting absorption ----

Outcome limiting_absorption() {
    auto model = static_well(0.5, 1.0);
    ProductGrid grid(kPeriod, 8, 32.0, 256, 1);
    FloquetHamiltonian k(grid, model);
    auto spectrum = FloquetSpectrum::compute(k);
    auto theta_hat = refined_thresholds(model, kPeriod, ClusterDecomposition::coarsest(2), {}, &spectrum);
    auto bound = localized_eigenvalues(spectrum);
    if (bound.empty()) return {false, "no localized eigenvalue for the divergence probe"};

    LapConfig lc;
    lc.s = 0.6;
    lc.lambdas = {0.45, 0.5, 0.55};
    for (int e = 1; e <= 12; ++e) lc.epsilons.push_back(std::ldexp(1.0, -e));
    const double dist = std::min(theta_hat.d0(0.45), theta_hat.d0(0.55));
    auto flat = lap_scan(k, lc);
    auto flat_report = lap_report(flat, lc, true);

    LapConfig probe = lc;
    probe.lambdas = {bound.back()};
    auto peak = lap_scan(k, probe);
    auto peak_report = lap_report(peak, probe, false);

    const double change = *std::max_element(flat.last_rung_change.begin(), flat.last_rung_change.end());
    return {dist >= 0.1 && flat_report.passed() && peak_report.passed(),
            fmt("dist(I,Theta-hat)=%.3f last-rung change=%.4f growth at %.6f = %.1f", dist, change, bound.back(),
                peak.growth.front())};
}

// ---- 9: Floquet group ----

Outcome floquet_group() {
    auto model = static_well(0.5, 2.0);
    ProductGrid grid(kPeriod, 8, 32.0, 256, 1);
    FloquetHamiltonian k(grid, model);
    auto spectrum = FloquetSpectrum::compute(k);
    auto propagator = Propagator::for_model(grid, model);
    const double dt = propagator.step();
    std::vector<double> sigmas{0.0, 40 * dt, 256 * dt};
    PacketOptions po;
    po.momentum_fraction = 0.05;
    po.min_width_fraction = 0.08;
    po.max_width_fraction = 0.12;
    auto states = random_packets(grid, 2, 7, po);
    auto r = floquet_group_check(spectrum, propagator, states, sigmas, 5e-6);
    const double ratio = r.parameters["halving_ratio"];
    return {r.passed() && ratio > 3.5 && ratio < 4.5,
            fmt("deviation=%.2e refined=%.2e ratio=%.3f", r.computed, r.parameters["refined_deviation"], ratio)};
}

// ---- 10: Avron-Herbst ----

Outcome avron_herbst_gauge() {
    MassGeometry g({1.0, 1.0}, {1.0, -1.0});
    PairProfile well{PairFamily::GaussianWell, 0.5, 1.0};
    ProductGrid grid(kPeriod, 8, 64.0, 1024, 1);
    Vec psi(grid.spatial_size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double x = grid.position(i)[0];
        psi[i] = std::exp(-x * x / 4.0);
    }
    std::vector<double> times;
    for (int i = 1; i <= 8; ++i) times.push_back(i * kPeriod / 8);

    PotentialModel driven(g, {{0, 1, well}}, AcStarkFields(g, TrigSeries::from_cos_sin(1.0, 0.0, {0.05}, {})));
    auto r = avron_herbst_check(grid, driven, psi, times, 5e-6);
    PotentialModel undriven(g, {{0, 1, well}}, AcStarkFields(g, TrigSeries::from_cos_sin(1.0, 0.0, {0.0}, {})));
    auto r0 = avron_herbst_check(grid, undriven, psi, times, 1e-10);
    return {r.passed() && r0.passed(),
            fmt("cos field: %.2e (refined %.2e)  zero field: %.1e", r.computed, r.parameters["refined_deviation"],
                r0.computed)};
}

// ---- 11: propagation estimates ----

Outcome propagation_estimates() {
    auto model = static_well(0.5, 1.0);
    ProductGrid grid(kPeriod, 8, 320.0, 4096, 1);
    FloquetHamiltonian k(grid, model);
    auto spectrum = FloquetSpectrum::compute(k);
    auto theta = thresholds(model, kPeriod);
    auto theta_hat = refined_thresholds(model, kPeriod, ClusterDecomposition::coarsest(2), {}, &spectrum);
    auto bound = localized_eigenvalues(spectrum);
    if (bound.empty()) return {false, "no localized eigenvalue for the control"};

    EstimateConfig c;
    c.lambda0 = 0.5;
    c.delta = 0.1;
    c.s = 1.0;
    c.velocity = 0.5;
    c.sigma_max = 128.0;
    c.horizon_mass = 1e-3;

    // Mourre constant at the same window
    GrafPartition partition(model.geometry());
    MourreConfig mc;
    mc.lambda0 = c.lambda0;
    mc.delta0 = 0.2;
    mc.delta = c.delta * (1.0 - 1e-9);
    mc.d1 = theta.d1(c.lambda0);
    mc.epsilon = 0.2 * *mc.d1;
    mc.conjugate = {ConjugateKind::Glued, 0, 0, 4.0, {}};
    auto mourre = mourre_check(k, spectrum, theta, mc, &partition);

    PacketOptions po;
    po.mode_decay = 20;
    po.centre_fraction = 0.02;
    po.min_width_fraction = 0.02;
    po.max_width_fraction = 0.04;
    auto phi = random_packets(grid, 1, 5, po).front();
    auto smooth = estimate_report("smoothness", smoothness_integral(spectrum, phi, c), c, true);
    auto velocity = estimate_report("minimal-velocity", minimal_velocity_integral(spectrum, phi, c), c, true);

    // bound-state control: the state sits at the quasi-energy E + w
    po.mode_centre = 1;
    auto phi_bound = random_packets(grid, 1, 5, po).front();
    EstimateConfig cb = c;
    cb.lambda0 = bound.back();
    auto control = estimate_report("smoothness-control", smoothness_integral(spectrum, phi_bound, cb), cb, false);

    const bool pass = theta_hat.d0(c.lambda0) >= c.delta && mourre.passed() && smooth.passed() && velocity.passed() &&
                      control.passed();
    return {pass, fmt("mourre margin=%.3f smoothness change=%.4f minimal-velocity change=%.4f control ratio=%.3f",
                      mourre.margin, std::abs(smooth.parameters["ratio"] - 1.0),
                      std::abs(velocity.parameters["ratio"] - 1.0), control.parameters["ratio"])};
}

struct Check {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Check> checks = {
        {1, "commutator-identities", commutator_identities},
        {2, "free-mourre", free_mourre},
        {3, "mode-vanishing", mode_vanishing},
        {4, "graf-partition", graf_partition},
        {5, "two-body-mourre", two_body_mourre},
        {6, "three-body-mourre", three_body_mourre},
        {7, "virial", virial},
        {8, "limiting-absorption", limiting_absorption},
        {9, "floquet-group", floquet_group},
        {10, "avron-herbst", avron_herbst_gauge},
        {11, "propagation-estimates", propagation_estimates},
    };
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& check : checks) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), check.id) == wanted.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%d] %-22s %s  %s (%.1f s)\n", check.id, check.name, o.pass ? "PASS" : "FAIL", o.summary.c_str(),
                    seconds);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
