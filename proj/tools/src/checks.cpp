#include "checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fmtool {

namespace {

using fm::VerificationReport;

// "{1,2}{3}" with 1-based labels, or "max" / "min".
fm::ClusterDecomposition parse_cluster(const ExperimentConfig& c, const std::string& field, const std::string& text) {
    const int n = static_cast<int>(c.masses.size());
    if (text == "max") return fm::ClusterDecomposition::coarsest(n);
    if (text == "min") return fm::ClusterDecomposition::finest(n);
    std::vector<std::vector<int>> clusters;
    std::vector<int> seen(n, 0);
    std::size_t i = 0;
    auto bad = [&] { fail(c, field, "cannot read cluster decomposition '" + text + "' (e.g. {1,2}{3})"); };
    while (i < text.size()) {
        if (text[i] != '{') bad();
        const auto close = text.find('}', i);
        if (close == std::string::npos) bad();
        std::vector<int> cluster;
        std::stringstream items(text.substr(i + 1, close - i - 1));
        for (std::string item; std::getline(items, item, ',');) {
            int label = 0;
            try {
                label = std::stoi(item);
            } catch (const std::exception&) {
                bad();
            }
            if (label < 1 || label > n || seen[label - 1]++) bad();
            cluster.push_back(label - 1);
        }
        if (cluster.empty()) bad();
        clusters.push_back(cluster);
        i = close + 1;
    }
    for (int s : seen)
        if (s != 1) fail(c, field, "cluster decomposition '" + text + "' must cover every particle once");
    return fm::ClusterDecomposition(clusters);
}

fm::ConjugateSpec read_conjugate(const ExperimentConfig& c, Reader& r, const std::string& default_kind) {
    fm::ConjugateSpec spec;
    try {
        spec.kind = fm::parse_conjugate_kind(r.text("conjugate", default_kind));
    } catch (const fm::Error& e) {
        fail(c, r.field("conjugate"), e.what());
    }
    spec.scale = r.number("scale", 4.0);
    spec.lambda0 = r.number("conjugate_lambda0", 0.0);
    spec.delta = r.number("conjugate_delta", 0.0);
    if (r.has("cluster")) spec.cluster = parse_cluster(c, r.field("cluster"), r.text("cluster"));
    const bool needs_cluster = spec.kind == fm::ConjugateKind::DilationInternal ||
                               spec.kind == fm::ConjugateKind::DilationIntercluster ||
                               spec.kind == fm::ConjugateKind::ClusterInternal ||
                               spec.kind == fm::ConjugateKind::ClusterIntercluster ||
                               spec.kind == fm::ConjugateKind::ClusterSum;
    if (needs_cluster && !spec.cluster) fail(c, r.field("cluster"), "this conjugate operator needs a cluster");
    if (spec.kind == fm::ConjugateKind::Glued && spec.scale < 1.0) fail(c, r.field("scale"), "partition scale R must be at least 1");
    return spec;
}

fm::PacketOptions read_packets(Reader& r, fm::PacketOptions po) {
    po.packets = static_cast<int>(r.integer("packets", po.packets));
    po.centre_fraction = r.number("centre_fraction", po.centre_fraction);
    po.min_width_fraction = r.number("min_width_fraction", po.min_width_fraction);
    po.max_width_fraction = r.number("max_width_fraction", po.max_width_fraction);
    po.momentum_fraction = r.number("momentum_fraction", po.momentum_fraction);
    po.mode_decay = r.number("mode_decay", po.mode_decay);
    po.mode_centre = static_cast<int>(r.integer("mode_centre", po.mode_centre));
    return po;
}

// Runs a core validator and reports its message against the check.
template <class F>
void guarded(const ExperimentConfig& c, const std::string& field, F&& f) {
    try {
        f();
    } catch (const fm::Error& e) {
        fail(c, field, e.what());
    }
}

CheckRun plan_mourre(const ExperimentConfig& c, Reader& r) {
    fm::MourreConfig m;
    m.lambda0 = r.number("lambda0", m.lambda0);
    m.delta0 = r.number("delta0", m.delta0);
    m.delta = r.number("delta", m.delta);
    const bool has_epsilon = r.has("epsilon");
    m.epsilon = r.number("epsilon", 0.0);
    if (r.has("d1")) m.d1 = r.number("d1");
    m.conjugate = read_conjugate(c, r, "glued");
    m.closed_form = r.flag("closed_form", true);
    m.radius_fraction = r.number("radius_fraction", m.radius_fraction);
    m.leakage = r.number("leakage", m.leakage);
    m.max_projected = static_cast<int>(r.integer("max_projected", m.max_projected));
    m.tolerance = r.number("tolerance", 0.0);
    const std::vector<double> scales = r.numbers("scales", std::vector<double>{m.conjugate.scale});
    fm::MourreConfig probe = m;
    if (!has_epsilon) probe.epsilon = 1.0;  // 0.2 d1 at run time
    guarded(c, r.field("delta"), [&] { fm::validate(probe, 2.0 * std::numbers::pi / c.grid.period); });
    for (double s : scales)
        if (s < 1.0) fail(c, r.field("scales"), "partition scale R must be at least 1");

    return [m, has_epsilon, scales](Experiment& e) {
        fm::MourreConfig run = m;
        if (!run.d1) run.d1 = e.thresholds().d1(run.lambda0);
        if (!has_epsilon) run.epsilon = 0.2 * *run.d1;
        std::optional<VerificationReport> best;
        fm::Table sweep;
        sweep.columns = {"scale", "ritz", "constant", "margin"};
        for (double s : scales) {
            run.conjugate.scale = s;
            auto report = fm::mourre_check(e.hamiltonian(), e.spectrum(), e.thresholds(), run, &e.partition());
            sweep.rows.push_back({s, report.computed, report.bound, report.margin});
            const bool better = !best || (best->status == fm::CheckStatus::Skip && report.status != fm::CheckStatus::Skip) ||
                                (report.status != fm::CheckStatus::Skip && report.margin > best->margin);
            if (better) best = report;
        }
        if (scales.size() > 1) best->table = sweep;
        best->parameters["epsilon"] = run.epsilon;
        best->parameters["d1"] = *run.d1;
        return *best;
    };
}

CheckRun plan_lap(const ExperimentConfig& c, Reader& r, std::uint64_t seed) {
    fm::LapConfig lap;
    guarded(c, r.field("weight"), [&] { lap.weight = fm::parse_lap_weight(r.text("weight", "position")); });
    lap.s = r.number("s", lap.s);
    lap.lambdas = r.numbers("lambdas");
    if (r.has("epsilons")) {
        lap.epsilons = r.numbers("epsilons");
    } else {
        const auto rungs = r.integer("rungs", 12);
        if (rungs < 2) fail(c, r.field("rungs"), "need at least two rungs");
        for (int k = 1; k <= rungs; ++k) lap.epsilons.push_back(std::ldexp(1.0, -k));
    }
    lap.absorber_start = r.number("absorber_start", lap.absorber_start);
    lap.absorber_strength = r.number("absorber_strength", lap.absorber_strength);
    lap.tolerance = r.number("power_tolerance", lap.tolerance);
    lap.max_iterations = static_cast<int>(r.integer("max_iterations", lap.max_iterations));
    lap.saturation = r.number("saturation", lap.saturation);
    lap.seed = seed;
    const std::string expect = r.text("expect", "saturation");
    if (expect != "saturation" && expect != "growth") fail(c, r.field("expect"), "expected 'saturation' or 'growth'");
    std::optional<fm::ConjugateSpec> conjugate;
    if (lap.weight == fm::LapWeight::Conjugate) conjugate = read_conjugate(c, r, "glued");
    if (lap.lambdas.empty()) fail(c, r.field("lambdas"), "need at least one energy");
    if (lap.epsilons.size() < 2 || !std::is_sorted(lap.epsilons.rbegin(), lap.epsilons.rend()))
        fail(c, r.field("epsilons"), "need a decreasing ladder of at least two values");
    for (double eps : lap.epsilons)
        if (!(eps > 0.0)) fail(c, r.field("epsilons"), "epsilon must be positive");
    if (!(lap.s > 0.5)) fail(c, r.field("s"), "weight exponent s must exceed 1/2");

    return [lap, expect, conjugate](Experiment& e) {
        std::optional<fm::LinearOperator> a;
        if (conjugate) a = fm::build_conjugate(*conjugate, e.grid(), e.model().geometry(), &e.partition());
        auto result = fm::lap_scan(e.hamiltonian(), lap, a ? &*a : nullptr);
        return fm::lap_report(result, lap, expect == "saturation");
    };
}

CheckRun plan_virial(const ExperimentConfig& c, Reader& r) {
    const auto spec = read_conjugate(c, r, "glued");
    const double tol = r.number("tolerance", 1e-6);
    return [spec, tol](Experiment& e) {
        auto a = fm::build_conjugate(spec, e.grid(), e.model().geometry(), &e.partition());
        return fm::virial_check(e.hamiltonian(), e.spectrum(), a, tol);
    };
}

CheckRun plan_modes(const ExperimentConfig& c, Reader& r) {
    const double lambda0 = r.number("lambda0", 0.5), delta0 = r.number("delta0", 0.1);
    const double w = 2.0 * std::numbers::pi / c.grid.period;
    if (!(lambda0 >= 0.0 && lambda0 < w)) fail(c, r.field("lambda0"), "lambda0 must lie in [0, omega)");
    if (!(delta0 > 0.0 && delta0 < 0.25 * w)) fail(c, r.field("delta0"), "delta0 must lie in (0, omega/4)");
    return [lambda0, delta0](Experiment& e) { return fm::mode_diagnostics(e.grid(), lambda0, delta0); };
}

CheckRun plan_eta(const ExperimentConfig& c, Reader& r) {
    const double scale = r.number("scale", 2.0 * std::numbers::pi / c.grid.period);
    const std::string variable = r.text("variable", "free-energy");
    if (variable != "free-energy" && variable != "negative-mode-frequency")
        fail(c, r.field("variable"), "expected 'free-energy' or 'negative-mode-frequency'");
    if (!(scale > 0.0)) fail(c, r.field("scale"), "eta scale must be positive");
    const auto v = variable == "free-energy" ? fm::EtaVariable::FreeEnergy : fm::EtaVariable::NegativeModeFrequency;
    return [scale, v](Experiment& e) { return fm::eta_partition_diagnostics(e.grid(), scale, v); };
}

CheckRun plan_ladder(const ExperimentConfig& c, Reader& r) {
    if (c.masses.size() != 3) fail(c, r.field("name"), "the ladder check needs three particles");
    const auto a = parse_cluster(c, r.field("cluster"), r.text("cluster", "{1,2}{3}"));
    if (a.cluster_count() != 2) fail(c, r.field("cluster"), "the ladder check needs a pair cluster");
    fm::LadderConfig l;
    l.lambda0 = r.number("lambda0", l.lambda0);
    l.delta0 = r.number("delta0", l.delta0);
    l.delta = r.number("delta", l.delta);
    l.epsilon = r.number("epsilon", l.epsilon);
    l.scale = r.number("scale", l.scale);
    l.modes = static_cast<int>(r.integer("modes", l.modes));
    l.points = static_cast<int>(r.integer("points", l.points));
    l.half_width = r.number("half_width", l.half_width);
    l.fiber_step = r.number("fiber_step", l.fiber_step);
    l.fiber_max = r.number("fiber_max", l.fiber_max);
    fm::MourreConfig probe;
    probe.lambda0 = l.lambda0;
    probe.delta0 = l.delta0;
    probe.delta = l.delta;
    probe.epsilon = l.epsilon;
    guarded(c, r.field("delta"), [&] { fm::validate(probe, 2.0 * std::numbers::pi / c.grid.period); });
    const double period = c.grid.period;
    return [a, l, period](Experiment& e) { return fm::three_body_ladder_check(e.model(), period, a, l); };
}

CheckRun plan_group(const ExperimentConfig& c, Reader& r, std::uint64_t seed) {
    fm::PacketOptions defaults;
    defaults.momentum_fraction = 0.05;
    defaults.min_width_fraction = 0.08;
    defaults.max_width_fraction = 0.12;
    const auto po = read_packets(r, defaults);
    const auto states = r.integer("states", 2);
    fm::PropagatorOptions opt;
    opt.steps_per_period = static_cast<int>(r.integer("steps_per_period", opt.steps_per_period));
    const auto steps = r.numbers("sigma_steps", std::vector<double>{0, 40, 256});
    const double tol = r.number("tolerance", 5e-6);
    if (states < 1) fail(c, r.field("states"), "need at least one state");
    if (opt.steps_per_period < 1) fail(c, r.field("steps_per_period"), "steps per period must be positive");
    for (double s : steps)
        if (s != std::round(s)) fail(c, r.field("sigma_steps"), "sigma is given in whole time steps");
    return [po, states, opt, steps, tol, seed](Experiment& e) {
        auto propagator = fm::Propagator::for_model(e.grid(), e.model(), opt);
        std::vector<double> sigmas;
        for (double s : steps) sigmas.push_back(s * propagator.step());
        auto packets = fm::random_packets(e.grid(), static_cast<std::size_t>(states), seed, po);
        return fm::floquet_group_check(e.spectrum(), propagator, packets, sigmas, tol);
    };
}

CheckRun plan_gauge(const ExperimentConfig& c, Reader& r) {
    if (!c.field) fail(c, r.field("name"), "the Avron-Herbst check needs a [field] table");
    const double width = r.number("packet_width", std::sqrt(2.0));
    const auto samples = r.integer("samples_per_period", 8);
    const auto periods = r.integer("periods", 1);
    const double tol = r.number("tolerance", 5e-6);
    fm::PropagatorOptions opt;
    opt.steps_per_period = static_cast<int>(r.integer("steps_per_period", opt.steps_per_period));
    if (!(width > 0.0)) fail(c, r.field("packet_width"), "packet width must be positive");
    if (samples < 1 || periods < 1) fail(c, r.field("samples_per_period"), "need at least one sample time");
    if (opt.steps_per_period % samples != 0)
        fail(c, r.field("samples_per_period"), "sample times must fall on the step grid");
    return [width, samples, periods, tol, opt](Experiment& e) {
        const auto& g = e.grid();
        fm::Vec psi(g.spatial_size());
        for (std::size_t i = 0; i < psi.size(); ++i) {
            const auto x = g.position(i);
            double r2 = 0.0;
            for (int d = 0; d < g.dim(); ++d) r2 += x[d] * x[d];
            psi[i] = std::exp(-r2 / (2.0 * width * width));
        }
        std::vector<double> times;
        for (int k = 1; k <= samples * periods; ++k) times.push_back(k * g.period() / samples);
        return fm::avron_herbst_check(g, e.model(), psi, times, tol, opt);
    };
}

CheckRun plan_estimate(const ExperimentConfig& c, Reader& r, std::uint64_t seed, bool velocity) {
    fm::EstimateConfig ec;
    ec.lambda0 = r.number("lambda0", ec.lambda0);
    ec.delta = r.number("delta", ec.delta);
    ec.s = r.number("s", ec.s);
    ec.velocity = r.number("velocity", ec.velocity);
    ec.sigma_max = r.number("sigma_max", ec.sigma_max);
    ec.sigma_step = r.number("sigma_step", ec.sigma_step);
    ec.horizon_fraction = r.number("horizon_fraction", ec.horizon_fraction);
    ec.horizon_mass = r.number("horizon_mass", ec.horizon_mass);
    ec.stabilization = r.number("stabilization", ec.stabilization);
    const std::string expect = r.text("expect", "bounded");
    if (expect != "bounded" && expect != "growing") fail(c, r.field("expect"), "expected 'bounded' or 'growing'");
    fm::PacketOptions defaults;
    defaults.mode_decay = 20;
    defaults.centre_fraction = 0.02;
    defaults.min_width_fraction = 0.02;
    defaults.max_width_fraction = 0.04;
    const auto po = read_packets(r, defaults);
    guarded(c, r.field("s"), [&] { fm::validate(ec); });
    return [ec, expect, po, seed, velocity](Experiment& e) {
        const auto phi = fm::random_packets(e.grid(), 1, seed, po).front();
        auto integral = velocity ? fm::minimal_velocity_integral(e.spectrum(), phi, ec)
                                 : fm::smoothness_integral(e.spectrum(), phi, ec);
        return fm::estimate_report(velocity ? "minimal-velocity" : "smoothness", integral, ec, expect == "bounded");
    };
}

}  // namespace

Experiment::Experiment(const ExperimentConfig& config)
    : config_(config),
      model_(config.model()),
      grid_(config.product_grid()),
      hamiltonian_(grid_, model_),
      partition_(model_.geometry()) {}

const fm::FloquetSpectrum& Experiment::spectrum() {
    std::call_once(spectrum_once_, [this] {
        spectrum_ = std::make_unique<fm::FloquetSpectrum>(fm::FloquetSpectrum::compute(hamiltonian_));
    });
    return *spectrum_;
}

const fm::ThresholdSet& Experiment::thresholds() {
    std::call_once(thresholds_once_, [this] {
        thresholds_ = std::make_unique<fm::ThresholdSet>(fm::thresholds(model_, grid_.period()));
    });
    return *thresholds_;
}

CheckRun plan_check(const ExperimentConfig& config, const CheckSpec& check, std::uint64_t seed) {
    json params = check.params;
    params["name"] = check.name;  // so diagnostics can point at the check itself
    Reader r(config, params, check.where);
    r.text("name");
    CheckRun run;
    const auto& n = check.name;
    if (n == "mourre") run = plan_mourre(config, r);
    else if (n == "lap") run = plan_lap(config, r, seed);
    else if (n == "virial") run = plan_virial(config, r);
    else if (n == "modes") run = plan_modes(config, r);
    else if (n == "eta") run = plan_eta(config, r);
    else if (n == "ladder") run = plan_ladder(config, r);
    else if (n == "floquet-group") run = plan_group(config, r, seed);
    else if (n == "avron-herbst") run = plan_gauge(config, r);
    else if (n == "smoothness") run = plan_estimate(config, r, seed, false);
    else if (n == "minimal-velocity") run = plan_estimate(config, r, seed, true);
    else fail(config, check.where + ".name", "unknown check '" + n + "'");
    r.finish();
    return run;
}

void validate_checks(const ExperimentConfig& config) {
    for (const auto& check : config.checks) plan_check(config, check, config.seed);
}

}  // namespace fmtool
