#include "fm/verify.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_map>

namespace fm {

namespace {

Eigen::VectorXcd as_eigen(const Vec& v) { return Eigen::Map<const Eigen::VectorXcd>(v.data(), v.size()); }

Eigen::VectorXcd apply_op(const LinearOperator& op, const Eigen::VectorXcd& v) {
    Eigen::VectorXcd out(v.size());
    op.apply(std::span<const cplx>(v.data(), v.size()), std::span<cplx>(out.data(), out.size()));
    return out;
}

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& m) { return 0.5 * (m + m.adjoint()); }

double smallest_eigenvalue(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

std::vector<double> smallest_eigenvalues(const Eigen::MatrixXcd& m, std::size_t count) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < es.eigenvalues().size() && out.size() < count; ++i) out.push_back(es.eigenvalues()(i));
    return out;
}

std::string format(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

std::string_view to_string(CheckStatus status) {
    switch (status) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skip: return "SKIP";
    }
    return "?";
}

VerificationReport VerificationReport::judge(std::string check, double computed, double bound, double tolerance) {
    VerificationReport r;
    r.check = std::move(check);
    r.computed = computed;
    r.bound = bound;
    r.margin = computed - bound;
    r.tolerance = tolerance;
    r.status = r.margin >= -tolerance ? CheckStatus::Pass : CheckStatus::Fail;
    return r;
}

VerificationReport VerificationReport::skipped(std::string check, std::string why) {
    VerificationReport r;
    r.check = std::move(check);
    r.status = CheckStatus::Skip;
    r.note = std::move(why);
    return r;
}

std::string fingerprint(const ProductGrid& grid) {
    std::ostringstream os;
    os << "T=" << format(grid.period()) << ";M=" << grid.modes() << ";L=" << format(grid.half_width())
       << ";n=" << grid.points() << ";d=" << grid.dim();
    return os.str();
}

// ---- Mourre -----------------------------------------------------------------------------------

void validate(const MourreConfig& c, double omega) {
    require(c.lambda0 >= 0.0 && c.lambda0 < omega, ErrorKind::InvalidInput, "lambda0 must lie in [0, omega)");
    require(c.delta0 > 0.0 && c.delta0 < 0.25 * omega, ErrorKind::InvalidInput, "delta0 must lie in (0, omega/4)");
    require(c.delta > 0.0 && c.delta < c.delta0, ErrorKind::InvalidInput,
            "ordering rule 0 < delta < delta0 < omega/4 violated (delta=" + format(c.delta) +
                ", delta0=" + format(c.delta0) + ")");
    require(c.epsilon > 0.0, ErrorKind::InvalidInput, "epsilon must be positive");
    require(c.conjugate.kind != ConjugateKind::Glued || c.conjugate.scale >= 1.0, ErrorKind::InvalidInput,
            "partition scale R must be at least 1");
}

double mourre_constant(double lambda0, double delta0, double epsilon, double d1, double omega) {
    const double denom = 1.5 * omega;
    if (lambda0 >= delta0 && lambda0 <= omega - delta0) return (2.0 * (d1 - delta0) - epsilon) / denom;
    return -epsilon / denom;
}

VerificationReport mourre_check(const FloquetHamiltonian& k, const FloquetSpectrum& spectrum,
                                const ThresholdSet& thresholds, const MourreConfig& config,
                                const GrafPartition* partition) {
    const ProductGrid& grid = k.grid();
    const double w = grid.omega();
    validate(config, w);
    const double d1 = config.d1.value_or(thresholds.d1(config.lambda0));
    const double c = mourre_constant(config.lambda0, config.delta0, config.epsilon, d1, w);

    auto window = spectrum.in_window(config.lambda0 - config.delta, config.lambda0 + config.delta);
    if (window.empty()) {
        auto r = VerificationReport::skipped("mourre", "vacuous-window: no spectrum of K within the filter support");
        r.bound = c;
        r.grid = fingerprint(grid);
        r.parameters = {{"lambda0", config.lambda0}, {"delta0", config.delta0}, {"delta", config.delta},
                        {"epsilon", config.epsilon}, {"R", config.conjugate.scale}, {"d1", d1}, {"window", 0.0}};
        return r;
    }

    const LinearOperator form =
        config.closed_form
            ? commutator_closed_form(k, config.conjugate, partition)
            : commutator(k.full(), build_conjugate(config.conjugate, grid, k.geometry(), partition));

    const std::size_t n = window.size();
    Eigen::MatrixXcd vecs(grid.size(), n);
    std::vector<double> leak(n);
    const double radius = config.radius_fraction * grid.half_width();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec v = spectrum.vector(window[i]);
        vecs.col(i) = as_eigen(v);
        leak[i] = mass_outside(grid, v, radius);
    }
    Eigen::MatrixXcd image(grid.size(), n);
    for (std::size_t i = 0; i < n; ++i) image.col(i) = apply_op(form, vecs.col(i));
    const Eigen::MatrixXcd gram = vecs.adjoint() * image;
    const double hermiticity = (gram - gram.adjoint()).norm() / std::max(1e-300, gram.norm());

    // Localized eigenvectors, most localized first, up to the cap.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return leak[a] < leak[b]; });
    std::vector<char> projected(n, 0);
    std::size_t removed = 0;
    for (std::size_t i : order) {
        if (leak[i] >= config.leakage) break;
        if (config.max_projected >= 0 && removed >= static_cast<std::size_t>(config.max_projected)) break;
        projected[i] = 1;
        ++removed;
    }
    std::vector<Eigen::Index> keep;
    for (std::size_t i = 0; i < n; ++i)
        if (!projected[i]) keep.push_back(static_cast<Eigen::Index>(i));

    const auto before = smallest_eigenvalues(gram, 5);
    VerificationReport r;
    if (keep.empty()) {
        r = VerificationReport::skipped("mourre", "vacuous-window: every window eigenvector is localized");
        r.bound = c;
    } else {
        Eigen::MatrixXcd reduced(keep.size(), keep.size());
        for (std::size_t i = 0; i < keep.size(); ++i)
            for (std::size_t j = 0; j < keep.size(); ++j) reduced(i, j) = gram(keep[i], keep[j]);
        r = VerificationReport::judge("mourre", smallest_eigenvalue(reduced), c, config.tolerance);
    }
    r.grid = fingerprint(grid);
    r.parameters = {{"lambda0", config.lambda0}, {"delta0", config.delta0}, {"delta", config.delta},
                    {"epsilon", config.epsilon}, {"R", config.conjugate.scale}, {"d1", d1},
                    {"window", static_cast<double>(n)}, {"projected", static_cast<double>(removed)},
                    {"hermiticity", hermiticity}, {"closed_form", config.closed_form ? 1.0 : 0.0}};
    r.series["ritz_before_projection"] = before;
    std::vector<double> projected_values;
    for (std::size_t i = 0; i < n; ++i)
        if (projected[i]) projected_values.push_back(spectrum.value(window[i]));
    r.series["projected_eigenvalues"] = projected_values;
    if (r.note.empty()) r.note = "conjugate=" + std::string(to_string(config.conjugate.kind));
    return r;
}

MourreSearch mourre_search(const FloquetHamiltonian& k, const FloquetSpectrum& spectrum, const ThresholdSet& thresholds,
                           MourreConfig config, const GrafPartition& partition, std::vector<double> scales,
                           int halvings) {
    MourreSearch out;
    for (double scale : scales) {
        config.conjugate.kind = ConjugateKind::Glued;
        config.conjugate.scale = scale;
        double best = -std::numeric_limits<double>::infinity();
        double delta = config.delta0;
        for (int h = 0; h < halvings; ++h) {
            delta *= 0.5;
            config.delta = delta;
            auto r = mourre_check(k, spectrum, thresholds, config, &partition);
            if (r.status != CheckStatus::Skip) best = std::max(best, r.margin);
            if (r.passed() && !out.first_pass) out.first_pass = std::make_pair(scale, delta);
            out.reports.push_back(std::move(r));
        }
        out.best_margin_by_scale.push_back(best);
    }
    return out;
}

// ---- virial -----------------------------------------------------------------------------------

double virial_residual(const LinearOperator& k, const LinearOperator& a, double lambda, std::span<const cplx> phi,
                       double residual_limit) {
    const Vec kp = k(phi);
    const double nrm = norm(phi);
    Vec r(kp.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = kp[i] - lambda * phi[i];
    require(norm(r) <= residual_limit * nrm, ErrorKind::InvalidInput,
            "not an eigenpair: residual " + format(norm(r) / nrm) + " exceeds " + format(residual_limit));
    const Vec ap = a(phi);
    // <phi, i[K,A] phi> = -2 Im <K phi, A phi>
    return std::abs(2.0 * dot(kp, ap).imag()) / (nrm * nrm);
}

VerificationReport virial_check(const FloquetHamiltonian& k, const FloquetSpectrum& spectrum, const LinearOperator& a,
                                double tolerance) {
    double worst = 0.0, worst_value = 0.0;
    std::vector<double> residuals;
    residuals.reserve(spectrum.count());
    for (std::size_t i = 0; i < spectrum.count(); ++i) {
        const Vec v = spectrum.vector(i);
        const double res = virial_residual(k.full(), a, spectrum.value(i), v, 1e-8);
        residuals.push_back(res);
        if (res > worst) {
            worst = res;
            worst_value = spectrum.value(i);
        }
    }
    auto r = VerificationReport::judge("virial", -worst, -tolerance, 0.0);
    r.grid = fingerprint(k.grid());
    r.parameters = {{"eigenvectors", static_cast<double>(spectrum.count())}, {"worst_residual", worst},
                    {"worst_eigenvalue", worst_value}};
    r.table.columns = {"eigenvalue", "virial_residual"};
    for (std::size_t i = 0; i < residuals.size(); ++i) r.table.rows.push_back({spectrum.value(i), residuals[i]});
    return r;
}

// ---- free diagnostics -------------------------------------------------------------------------

VerificationReport mode_diagnostics(const ProductGrid& grid, double lambda0, double delta0) {
    const double w = grid.omega();
    require(lambda0 >= 0.0 && lambda0 < w, ErrorKind::InvalidInput, "lambda0 must lie in [0, omega)");
    require(delta0 > 0.0 && delta0 < 0.25 * w, ErrorKind::InvalidInput, "delta0 must lie in (0, omega/4)");
    const RealVec h = kinetic_symbol(grid);
    const double lower_mode_bound = (lambda0 + w - delta0) / (2.5 * w);

    double worst_margin = std::numeric_limits<double>::infinity();
    double high_mode_norm = 0.0;
    bool lower_ok = true;
    Table table;
    table.columns = {"mode", "filter_norm", "ritz_min", "constant"};
    for (int m = 0; m < grid.modes(); ++m) {
        const int n = grid.mode_number(m);
        double fnorm = 0.0, ritz = std::numeric_limits<double>::infinity();
        for (double e : h) {
            const double f = bump(n * w + e - lambda0, delta0);
            fnorm = std::max(fnorm, std::abs(f));
            if (f > 0.0 && n <= 1) ritz = std::min(ritz, e / (1.5 * w - n * w));
        }
        double constant = std::numeric_limits<double>::quiet_NaN();
        if (n >= 2) {
            high_mode_norm = std::max(high_mode_norm, fnorm);
        } else if (fnorm > 0.0) {
            constant = std::max(0.0, lambda0 - n * w - delta0) / (1.5 * w - n * w);
            worst_margin = std::min(worst_margin, ritz - constant);
            if (n <= -1 && constant < lower_mode_bound - 1e-14) lower_ok = false;
        }
        table.rows.push_back({static_cast<double>(n), fnorm, fnorm > 0.0 && n <= 1 ? ritz : std::nan(""), constant});
    }
    if (!std::isfinite(worst_margin)) worst_margin = 0.0;
    auto r = VerificationReport::judge("modes", worst_margin, 0.0, 1e-8);
    if (high_mode_norm != 0.0 || !lower_ok) r.status = CheckStatus::Fail;
    r.grid = fingerprint(grid);
    r.parameters = {{"lambda0", lambda0}, {"delta0", delta0}, {"high_mode_filter_norm", high_mode_norm},
                    {"lower_mode_bound", lower_mode_bound}, {"lower_modes_ok", lower_ok ? 1.0 : 0.0}};
    r.table = std::move(table);
    return r;
}

VerificationReport eta_partition_diagnostics(const ProductGrid& grid, double scale, EtaVariable variable) {
    require(scale > 0.0, ErrorKind::InvalidInput, "eta scale must be positive");
    const double w = grid.omega();
    std::vector<double> taus;
    if (variable == EtaVariable::FreeEnergy) {
        for (double e : kinetic_symbol(grid)) taus.push_back(e);
    } else {
        for (int m = 0; m < grid.modes(); ++m) taus.push_back(-grid.mode_number(m) * w);
    }
    for (int i = 0; i <= 4000; ++i) taus.push_back(4.0 * scale * i / 4000.0);  // through the ramp
    double identity = 0.0;
    for (double t : taus) {
        const double a = eta(t / scale), b = eta_bar(t / scale);
        identity = std::max(identity, std::abs(a * a + b * b - 1.0));
    }
    auto r = VerificationReport::judge("eta", -identity, -1e-10, 0.0);
    r.grid = fingerprint(grid);
    r.parameters = {{"scale", scale}, {"identity_residual", identity},
                    {"variable", variable == EtaVariable::FreeEnergy ? 0.0 : 1.0}};
    if (variable == EtaVariable::FreeEnergy && std::abs(scale - w) <= 1e-12 * w) {
        double split = std::numeric_limits<double>::infinity(), pbound = 0.0;
        for (double e : kinetic_symbol(grid)) {
            if (eta(e / scale) > 0.0) split = std::min(split, e / (0.25 * w + e) - w / (1.25 * w));
            pbound = std::max(pbound, std::sqrt(1.0 + 2.0 * e) * eta_bar(e / scale));
        }
        if (!std::isfinite(split)) split = 0.0;
        const double plimit = std::sqrt(1.0 + 4.0 * w);
        r.parameters["split_margin"] = split;
        r.parameters["p_eta_bar_norm"] = pbound;
        r.parameters["p_eta_bar_limit"] = plimit;
        if (split < -1e-8 || pbound > plimit) r.status = CheckStatus::Fail;
    }
    return r;
}

// ---- limiting absorption ----------------------------------------------------------------------

std::string_view to_string(LapWeight weight) {
    switch (weight) {
    case LapWeight::Position: return "position";
    case LapWeight::Conjugate: return "conjugate";
    case LapWeight::Refined: return "refined";
    case LapWeight::Identity: return "identity";
    }
    return "?";
}

LapWeight parse_lap_weight(std::string_view name) {
    for (auto w : {LapWeight::Position, LapWeight::Conjugate, LapWeight::Refined, LapWeight::Identity})
        if (to_string(w) == name) return w;
    throw Error(ErrorKind::InvalidInput, "unknown LAP weight '" + std::string(name) + "'");
}

bool LapResult::saturated() const {
    return std::all_of(last_rung_change.begin(), last_rung_change.end(), [&](double c) { return c <= saturation; });
}

namespace {

// Left weight W and its adjoint as matrix-free maps.
struct Weight {
    std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)> left, right;  // W and W*
};

Weight make_weight(const ProductGrid& grid, const LapConfig& cfg, const LinearOperator* conjugate) {
    const double s = cfg.s;
    auto id = [](const Eigen::VectorXcd& v) { return v; };
    Vec bracket_x(grid.spatial_size());
    for (std::size_t i = 0; i < bracket_x.size(); ++i) {
        const auto x = grid.position(i);
        bracket_x[i] = std::pow(1.0 + x[0] * x[0] + x[1] * x[1], -0.5 * s);
    }
    const LinearOperator wx = position_multiplier(grid, bracket_x, "<x>^-s");
    switch (cfg.weight) {
    case LapWeight::Identity:
        return {id, id};
    case LapWeight::Position: {
        auto f = [wx](const Eigen::VectorXcd& v) { return apply_op(wx, v); };
        return {f, f};
    }
    case LapWeight::Refined: {
        Vec modes(grid.modes());
        for (int m = 0; m < grid.modes(); ++m) {
            const double n = grid.mode_number(m) * grid.omega();
            modes[m] = std::pow(1.0 + n * n, -0.25 * s);
        }
        Vec bracket_p(grid.spatial_size());
        for (std::size_t i = 0; i < bracket_p.size(); ++i) {
            const auto k = grid.momentum(i);
            bracket_p[i] = std::pow(1.0 + k[0] * k[0] + k[1] * k[1], 0.5 * s);
        }
        const LinearOperator wt = mode_multiplier(grid, modes, "<Dt>^-s/2");
        const LinearOperator wp = momentum_multiplier(grid, bracket_p, "<p>^s");
        const LinearOperator left = wt * wx * wp;
        return {[left](const Eigen::VectorXcd& v) { return apply_op(left, v); },
                [left](const Eigen::VectorXcd& v) {
                    Eigen::VectorXcd out(v.size());
                    left.apply_adjoint(std::span<const cplx>(v.data(), v.size()), std::span<cplx>(out.data(), out.size()));
                    return out;
                }};
    }
    case LapWeight::Conjugate: {
        require(conjugate != nullptr, ErrorKind::InvalidInput, "the <A> weight needs a conjugate operator");
        auto eig = std::make_shared<const Eigensystem>(hermitian_eigensystem(to_dense(*conjugate)));
        const LinearOperator wa =
            function_of(grid, eig, [s](double a) { return cplx(std::pow(1.0 + a * a, -0.5 * s)); }, "<A>^-s");
        auto f = [wa](const Eigen::VectorXcd& v) { return apply_op(wa, v); };
        return {f, f};
    }
    }
    throw Error(ErrorKind::InvalidInput, "unknown LAP weight");
}

}  // namespace

LapResult lap_scan(const FloquetHamiltonian& k, const LapConfig& config, const LinearOperator* conjugate) {
    const ProductGrid& grid = k.grid();
    require(config.s > 0.0 || config.weight == LapWeight::Identity, ErrorKind::InvalidInput, "weight exponent s must be positive");
    require(!config.lambdas.empty() && config.epsilons.size() >= 2, ErrorKind::InvalidInput,
            "LAP scan needs energies and at least two epsilon rungs");
    require(std::is_sorted(config.epsilons.rbegin(), config.epsilons.rend()), ErrorKind::InvalidInput,
            "epsilon ladder must decrease");

    Eigen::MatrixXcd h = to_dense(k.full());
    const double L = grid.half_width();
    const double start = config.absorber_start * L;
    const std::size_t s = grid.spatial_size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto x = grid.position(i % s);
        double gamma = 0.0;
        for (int d = 0; d < grid.dim(); ++d) {
            const double excess = std::abs(x[d]) - start;
            if (excess > 0.0) gamma += config.absorber_strength * std::pow(excess / (L - start), 2);
        }
        h(i, i) -= cplx(0.0, gamma);
    }
    const HessenbergSolver solver(h);
    const Weight weight = make_weight(grid, config, conjugate);

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> gauss;
    Eigen::VectorXcd start_vec(grid.size());
    for (auto& z : start_vec) z = cplx(gauss(rng), gauss(rng));
    start_vec.normalize();

    LapResult result;
    result.saturation = config.saturation;
    for (double lambda : config.lambdas) {
        std::vector<double> norms;
        for (double eps : config.epsilons) {
            const auto shifted = solver.shifted(cplx(lambda, eps));
            Eigen::VectorXcd v = start_vec;
            double est = 0.0;
            int it = 0;
            for (; it < config.max_iterations; ++it) {
                const Eigen::VectorXcd u = weight.left(shifted.solve(weight.right(v)));
                const Eigen::VectorXcd t = weight.left(shifted.solve_adjoint(weight.right(u)));
                const double nt = t.norm();
                const double next = std::sqrt(nt);
                if (nt == 0.0) break;
                v = t / nt;
                const bool done = it > 0 && std::abs(next - est) <= config.tolerance * next;
                est = next;
                if (done) break;
            }
            norms.push_back(est);
            result.points.push_back({lambda, eps, est, it + 1});
        }
        result.last_rung_change.push_back(std::abs(norms.back() / norms[norms.size() - 2] - 1.0));
        result.growth.push_back(norms.back() / norms.front());
    }

    // Descriptive Hölder fit from differences at the smallest epsilon.
    const std::size_t ne = config.epsilons.size();
    if (config.lambdas.size() >= 3) {
        std::vector<double> logs_h, logs_d;
        for (std::size_t step = 1; step < config.lambdas.size(); step *= 2) {
            double d = 0.0;
            for (std::size_t i = 0; i + step < config.lambdas.size(); ++i)
                d = std::max(d, std::abs(result.points[(i + step) * ne + ne - 1].norm - result.points[i * ne + ne - 1].norm));
            const double hstep = std::abs(config.lambdas[step] - config.lambdas[0]);
            if (d > 0.0 && hstep > 0.0) {
                logs_h.push_back(std::log(hstep));
                logs_d.push_back(std::log(d));
            }
        }
        if (logs_h.size() >= 2) {
            const double n = static_cast<double>(logs_h.size());
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (std::size_t i = 0; i < logs_h.size(); ++i) {
                sx += logs_h[i];
                sy += logs_d[i];
                sxx += logs_h[i] * logs_h[i];
                sxy += logs_h[i] * logs_d[i];
            }
            const double den = n * sxx - sx * sx;
            if (den > 0.0) result.holder_exponent = (n * sxy - sx * sy) / den;
        }
    }
    return result;
}

VerificationReport lap_report(const LapResult& result, const LapConfig& config, bool expect_saturation) {
    VerificationReport r;
    if (expect_saturation) {
        const double worst = *std::max_element(result.last_rung_change.begin(), result.last_rung_change.end());
        r = VerificationReport::judge("lap", -worst, -config.saturation, 0.0);
        r.note = "relative change of the weighted resolvent norm between the last two epsilon rungs";
    } else {
        const double least = *std::min_element(result.growth.begin(), result.growth.end());
        r = VerificationReport::judge("lap-divergence", least, 10.0, 0.0);
        r.note = "growth of the weighted resolvent norm from the first to the last epsilon rung";
    }
    r.parameters = {{"s", config.s}, {"weight", static_cast<double>(config.weight)},
                    {"absorber_start", config.absorber_start}, {"absorber_strength", config.absorber_strength}};
    if (result.holder_exponent) r.parameters["holder_exponent"] = *result.holder_exponent;
    r.table.columns = {"lambda", "epsilon", "norm", "iterations"};
    for (const auto& p : result.points) r.table.rows.push_back({p.lambda, p.epsilon, p.norm, double(p.iterations)});
    return r;
}

// ---- three-body ladder ------------------------------------------------------------------------

PotentialModel pair_subsystem(const PotentialModel& model, const ClusterDecomposition& a) {
    const MassGeometry& g = model.geometry();
    require(g.particles() == 3 && a.cluster_count() == 2, ErrorKind::InvalidInput,
            "pair subsystems exist for two-cluster decompositions of three particles");
    std::vector<int> pair;
    for (const auto& c : a.clusters())
        if (c.size() == 2) pair = c;
    std::vector<double> masses{g.masses()[pair[0]], g.masses()[pair[1]]};
    std::vector<double> charges;
    if (!g.charges().empty()) charges = {g.charges()[pair[0]], g.charges()[pair[1]]};
    MassGeometry sub(masses, charges);
    std::vector<PairInteraction> pairs;
    for (const auto& p : model.pairs())
        if ((p.first == pair[0] && p.second == pair[1]) || (p.first == pair[1] && p.second == pair[0]))
            pairs.push_back({p.first == pair[0] ? 0 : 1, p.first == pair[0] ? 1 : 0, p.profile});
    std::optional<AcStarkFields> fields;
    if (model.fields()) fields.emplace(sub, model.fields()->field());
    return PotentialModel(std::move(sub), std::move(pairs), std::move(fields));
}

VerificationReport three_body_ladder_check(const PotentialModel& model, double period, const ClusterDecomposition& a,
                                           const LadderConfig& config) {
    const PotentialModel sub = pair_subsystem(model, a);
    const ProductGrid grid(period, config.modes, config.half_width, config.points, 1);
    const double w = grid.omega();
    require(config.delta > 0.0 && config.delta < config.delta0 && config.delta0 < 0.25 * w, ErrorKind::InvalidInput,
            "ordering rule 0 < delta < delta0 < omega/4 violated");
    const FloquetHamiltonian k(grid, sub);
    const FloquetSpectrum spectrum = FloquetSpectrum::compute(k);
    const GrafPartition partition(sub.geometry());
    const ConjugateSpec spec{ConjugateKind::Glued, 0.0, 0.0, config.scale, {}};
    const LinearOperator form = commutator_closed_form(k, spec, &partition);

    const ThresholdSet refined = refined_thresholds(model, period, a, config.thresholds);
    const double d1 = refined.d1(config.lambda0);
    const bool inside = config.lambda0 >= config.delta0 && config.lambda0 <= w - config.delta0;
    const double target = inside ? (2.0 * (d1 - config.delta0) - 0.25 * config.epsilon) / (1.5 * w)
                                 : -0.25 * config.epsilon / (1.5 * w);
    const double fiber_max = config.fiber_max > 0.0 ? config.fiber_max : config.lambda0 + 2.0 * w;

    // Every subsystem eigenvector any fiber window can reach.
    auto touched = spectrum.in_window(config.lambda0 - fiber_max - config.delta, config.lambda0 + config.delta);
    std::unordered_map<std::size_t, Eigen::Index> slot;
    Eigen::MatrixXcd vecs(grid.size(), touched.size()), image(grid.size(), touched.size());
    for (std::size_t i = 0; i < touched.size(); ++i) {
        slot[touched[i]] = static_cast<Eigen::Index>(i);
        vecs.col(i) = as_eigen(spectrum.vector(touched[i]));
        image.col(i) = apply_op(form, vecs.col(i));
    }
    const Eigen::MatrixXcd gram = vecs.adjoint() * image;

    Table table;
    table.columns = {"lambda_a", "bin", "window", "commutator_min", "fiber_constant", "form_min"};
    double worst = std::numeric_limits<double>::infinity();
    std::size_t fibers = 0;
    for (double la = 0.0; la <= fiber_max + 1e-12; la += config.fiber_step) {
        const auto idx = spectrum.in_window(config.lambda0 - la - config.delta, config.lambda0 - la + config.delta);
        const int bin = la <= config.lambda0 ? 0 : static_cast<int>(std::ceil((la - config.lambda0) / w - 1e-12));
        const double fiber = 2.0 * la / (0.25 * w + la);
        if (idx.empty()) continue;
        Eigen::MatrixXcd b(idx.size(), idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j) b(i, j) = gram(slot.at(idx[i]), slot.at(idx[j]));
        const double cmin = smallest_eigenvalue(b);
        const double total = cmin + fiber;
        worst = std::min(worst, total);
        ++fibers;
        table.rows.push_back({la, double(bin), double(idx.size()), cmin, fiber, total});
    }
    VerificationReport r;
    if (fibers == 0) {
        r = VerificationReport::skipped("ladder", "vacuous-window: no fiber meets the subsystem spectrum");
        r.bound = target;
    } else {
        r = VerificationReport::judge("ladder", worst, target, 1e-6);
    }
    r.grid = fingerprint(grid);
    r.parameters = {{"lambda0", config.lambda0}, {"delta0", config.delta0}, {"delta", config.delta},
                    {"epsilon", config.epsilon}, {"R", config.scale}, {"d1_refined", d1},
                    {"fibers", double(fibers)}};
    r.series["refined_thresholds"] = refined.bases();
    r.note = "cluster " + a.label();
    r.table = std::move(table);
    return r;
}

}  // namespace fm
