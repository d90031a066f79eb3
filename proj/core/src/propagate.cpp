#include "fm/propagate.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fm {

namespace {

double relative_norm_change(double before, double after) { return before > 0.0 ? std::abs(after / before - 1.0) : 0.0; }

double distance(std::span<const cplx> a, std::span<const cplx> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s);
}

std::span<const cplx> block(std::span<const cplx> state, const ProductGrid& grid, int m) {
    return state.subspan(m * grid.spatial_size(), grid.spatial_size());
}

}  // namespace

// ---- propagator -------------------------------------------------------------------------------

Propagator::Propagator(ProductGrid grid, SplitStep::PotentialAt potential, PropagatorOptions options)
    : potential_(potential), stepper_(grid, std::move(potential), kinetic_symbol(grid)), options_(options) {
    require(options_.steps_per_period >= 1, ErrorKind::InvalidInput, "steps per period must be positive");
    require(options_.drift_limit > 0.0, ErrorKind::InvalidInput, "drift limit must be positive");
}

Propagator Propagator::for_model(const ProductGrid& grid, const PotentialModel& model, PropagatorOptions options) {
    if (model.time_independent()) {
        auto fixed = std::make_shared<const Vec>(model.sample_at(grid, 0.0));
        return Propagator(grid, [fixed](double) { return *fixed; }, options);
    }
    return Propagator(grid, [model, grid](double t) { return model.sample_at(grid, t); }, options);
}

int Propagator::steps_between(double t0, double t1) const {
    const double ratio = std::abs(t1 - t0) / step();
    const double steps = std::round(ratio);
    require(std::abs(ratio - steps) <= 1e-9 * std::max(1.0, ratio), ErrorKind::InvalidInput,
            "time step does not divide the interval");
    return static_cast<int>(steps);
}

Propagator Propagator::refined() const {
    PropagatorOptions o = options_;
    o.steps_per_period *= 2;
    return Propagator(grid(), potential_, o);
}

void Propagator::propagate(Eigen::MatrixXcd& states, double t0, double t1) const {
    const int steps = steps_between(t0, t1);
    if (steps == 0) return;
    const Eigen::VectorXd before = states.colwise().norm();
    stepper_.propagate(states, t0, t1, steps);
    const Eigen::VectorXd after = states.colwise().norm();
    for (Eigen::Index c = 0; c < states.cols(); ++c) {
        const double d = relative_norm_change(before(c), after(c));
        drift_ = std::max(drift_, d);
        if (d > options_.drift_limit) {
            std::ostringstream os;
            os << "unitarity drift " << d << " exceeds " << options_.drift_limit;
            throw Error(ErrorKind::PropagationAccuracy, os.str());
        }
    }
}

Vec Propagator::propagate(std::span<const cplx> state, double t0, double t1) const {
    Eigen::MatrixXcd m = Eigen::Map<const Eigen::VectorXcd>(state.data(), state.size());
    propagate(m, t0, t1);
    return Vec(m.data(), m.data() + m.size());
}

double richardson_error(const Propagator& propagator, std::span<const cplx> state, double t0, double t1) {
    const Vec coarse = propagator.propagate(state, t0, t1);
    const Vec fine = propagator.refined().propagate(state, t0, t1);
    return distance(coarse, fine) / 3.0;
}

// ---- Floquet group ----------------------------------------------------------------------------

Vec floquet_evolve(const FloquetSpectrum& spectrum, std::span<const cplx> state, double sigma) {
    require(spectrum.complete(), ErrorKind::InvalidInput, "e^{-i sigma K} needs the complete spectrum");
    Vec out(state.size(), cplx{});
    for (std::size_t i = 0; i < spectrum.count(); ++i) {
        const Vec v = spectrum.vector(i);
        const cplx c = dot(v, state) * std::polar(1.0, -sigma * spectrum.value(i));
        axpy(c, v, out);
    }
    return out;
}

Vec assembled_group(const Propagator& propagator, std::span<const cplx> state, double sigma) {
    const ProductGrid& grid = propagator.grid();
    const std::size_t s = grid.spatial_size();
    const int modes = grid.modes();
    require(state.size() == grid.size(), ErrorKind::InvalidInput, "state does not match the grid");
    Vec out(grid.size());
    for (int k = 0; k < modes; ++k) {
        const double t = grid.time_sample(k);
        // Phi(t - sigma) = sum_n phi_n e^{i n w (t - sigma)} / sqrt(M)
        Vec start(s, cplx{});
        for (int m = 0; m < modes; ++m) {
            const cplx phase = std::polar(1.0 / std::sqrt(double(modes)), grid.mode_number(m) * grid.omega() * (t - sigma));
            const auto b = block(state, grid, m);
            for (std::size_t i = 0; i < s; ++i) start[i] += phase * b[i];
        }
        const Vec evolved = propagator.propagate(start, t - sigma, t);
        std::copy(evolved.begin(), evolved.end(), out.begin() + k * s);
    }
    grid.time_to_modes(out);
    return out;
}

VerificationReport floquet_group_check(const FloquetSpectrum& spectrum, const Propagator& propagator,
                                       std::span<const Vec> states, std::span<const double> sigmas,
                                       double tolerance) {
    require(spectrum.grid().same_shape(propagator.grid()), ErrorKind::InvalidInput, "spectrum and propagator grids differ");
    const Propagator fine = propagator.refined();
    double coarse_dev = 0.0, fine_dev = 0.0;
    std::vector<double> per_sigma;
    for (double sigma : sigmas) {
        double worst = 0.0;
        for (const auto& phi : states) {
            const Vec exact = floquet_evolve(spectrum, phi, sigma);
            const double scale = std::max(norm(phi), 1e-300);
            const double d = distance(exact, assembled_group(propagator, phi, sigma)) / scale;
            worst = std::max(worst, d);
            fine_dev = std::max(fine_dev, distance(exact, assembled_group(fine, phi, sigma)) / scale);
        }
        per_sigma.push_back(worst);
        coarse_dev = std::max(coarse_dev, worst);
    }
    auto r = VerificationReport::judge("floquet-group", -coarse_dev, -tolerance, 0.0);
    r.computed = coarse_dev;
    r.bound = tolerance;
    r.margin = tolerance - coarse_dev;
    r.grid = fingerprint(propagator.grid());
    r.parameters = {{"dt", propagator.step()}, {"deviation", coarse_dev}, {"refined_deviation", fine_dev},
                    {"halving_ratio", fine_dev > 0.0 ? coarse_dev / fine_dev : 0.0},
                    {"states", double(states.size())}};
    r.series["sigma"] = std::vector<double>(sigmas.begin(), sigmas.end());
    r.series["deviation"] = per_sigma;
    return r;
}

// ---- Avron-Herbst -----------------------------------------------------------------------------

namespace {

Vec shifted(const ProductGrid& grid, const Eigen::VectorXd& c, std::span<const cplx> state) {
    // psi(x - c) through the Fourier multiplier e^{-i c.k}
    const std::size_t s = grid.spatial_size();
    Vec v(state.begin(), state.end());
    grid.forward_space_block(v);
    for (std::size_t i = 0; i < s; ++i) {
        const auto k = grid.momentum(i);
        double phase = 0.0;
        for (int d = 0; d < grid.dim(); ++d) phase += c(d) * k[d];
        v[i] *= std::polar(1.0 / double(s), -phase);
    }
    grid.backward_space_block(v);
    return v;
}

double block_mass_outside(const ProductGrid& grid, std::span<const cplx> state, double radius) {
    double mass = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const auto x = grid.position(i);
        bool out = false;
        for (int d = 0; d < grid.dim(); ++d) out = out || std::abs(x[d]) > radius;
        if (out) mass += std::norm(state[i]);
    }
    return mass;
}

}  // namespace

Vec gauge_map(const ProductGrid& grid, const AcStarkFields& fields, double t, std::span<const cplx> state) {
    Vec v = shifted(grid, fields.c(t), state);
    const Eigen::VectorXd b = fields.b(t);
    const double a = fields.a(t);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto x = grid.position(i);
        double bx = 0.0;
        for (int d = 0; d < grid.dim(); ++d) bx += b(d) * x[d];
        v[i] *= std::polar(1.0, bx - a);
    }
    return v;
}

Vec gauge_map_inverse(const ProductGrid& grid, const AcStarkFields& fields, double t, std::span<const cplx> state) {
    Vec v(state.begin(), state.end());
    const Eigen::VectorXd b = fields.b(t);
    const double a = fields.a(t);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto x = grid.position(i);
        double bx = 0.0;
        for (int d = 0; d < grid.dim(); ++d) bx += b(d) * x[d];
        v[i] *= std::polar(1.0, a - bx);
    }
    return shifted(grid, -fields.c(t), v);
}

AvronHerbstResult avron_herbst(const ProductGrid& grid, const PotentialModel& model, std::span<const cplx> state,
                               std::span<const double> times, PropagatorOptions options, double shift_margin) {
    require(model.fields().has_value(), ErrorKind::InvalidInput, "Avron-Herbst check needs a field");
    const AcStarkFields& fields = *model.fields();
    require(std::abs(fields.field_mean()) <= 1e-14, ErrorKind::UnsupportedConfiguration,
            "Avron-Herbst check needs a field with zero mean");
    require(state.size() == grid.spatial_size(), ErrorKind::InvalidInput, "state must be one spatial block");
    require(std::is_sorted(times.begin(), times.end()) && !times.empty() && times.front() >= 0.0,
            ErrorKind::InvalidInput, "times must be sorted and non-negative");

    double max_shift = 0.0;
    for (int i = 0; i <= 256; ++i) max_shift = std::max(max_shift, fields.c(grid.period() * i / 256.0).norm());
    if (max_shift > shift_margin * grid.half_width()) {
        std::ostringstream os;
        os << "displacement " << max_shift << " exceeds box margin " << shift_margin * grid.half_width();
        throw Error(ErrorKind::OutOfBox, os.str());
    }

    const PotentialModel bare(model.geometry(), model.pairs());
    const auto fixed = std::make_shared<const Vec>(bare.sample_at(grid, 0.0));
    const ProductGrid g = grid;
    const auto length_gauge = [fixed, g, fields](double t) {
        Vec w = *fixed;
        const Eigen::VectorXd e = fields.E(t);
        for (std::size_t i = 0; i < w.size(); ++i) {
            const auto x = g.position(i);
            double ex = 0.0;
            for (int d = 0; d < g.dim(); ++d) ex += e(d) * x[d];
            w[i] -= ex;
        }
        return w;
    };

    const double norm2 = std::pow(norm(state), 2);
    auto run = [&](PropagatorOptions opt, std::vector<double>* out) {
        const Propagator direct(grid, length_gauge, opt);
        const Propagator moving = Propagator::for_model(grid, model, opt);
        Vec hat(state.begin(), state.end());
        Vec frame = gauge_map_inverse(grid, fields, 0.0, state);
        double t = 0.0, worst = 0.0;
        for (double next : times) {
            hat = direct.propagate(hat, t, next);
            frame = moving.propagate(frame, t, next);
            t = next;
            // The length-gauge potential jumps at the box edge; the state must stay clear of it.
            if (block_mass_outside(grid, hat, 0.75 * grid.half_width()) > 1e-12 * norm2)
                throw Error(ErrorKind::OutOfBox, "state reached the outer quarter of the box during propagation");
            const double d = distance(hat, gauge_map(grid, fields, t, frame)) / norm(state);
            worst = std::max(worst, d);
            if (out) out->push_back(d);
        }
        return worst;
    };

    AvronHerbstResult r;
    r.times.assign(times.begin(), times.end());
    r.deviation = run(options, &r.deviations);
    PropagatorOptions fine = options;
    fine.steps_per_period *= 2;
    r.refined_deviation = run(fine, nullptr);
    return r;
}

VerificationReport avron_herbst_check(const ProductGrid& grid, const PotentialModel& model,
                                      std::span<const cplx> state, std::span<const double> times, double tolerance,
                                      PropagatorOptions options) {
    const AvronHerbstResult res = avron_herbst(grid, model, state, times, options);
    auto r = VerificationReport::judge("avron-herbst", -res.deviation, -tolerance, 0.0);
    r.computed = res.deviation;
    r.bound = tolerance;
    r.margin = tolerance - res.deviation;
    r.grid = fingerprint(grid);
    r.parameters = {{"dt", grid.period() / options.steps_per_period},
                    {"deviation", res.deviation},
                    {"refined_deviation", res.refined_deviation},
                    {"field_vanishes", model.fields()->vanishes() ? 1.0 : 0.0}};
    r.series["t"] = res.times;
    r.series["deviation"] = res.deviations;
    return r;
}

// ---- propagation estimates --------------------------------------------------------------------

void validate(const EstimateConfig& c) {
    require(c.delta > 0.0, ErrorKind::InvalidInput, "delta must be positive");
    require(c.s > 0.5, ErrorKind::InvalidInput, "weight exponent s must exceed 1/2");
    require(c.velocity >= 0.0, ErrorKind::InvalidInput, "velocity cut must be non-negative");
    require(c.c1 < c.c2, ErrorKind::InvalidInput, "A-window needs c1 < c2");
    require(c.sigma_max >= 8.0, ErrorKind::InvalidInput, "sigma_max must be at least 8");
    require(c.sigma_step > 0.0 && c.sigma_step < c.sigma_max / 16, ErrorKind::InvalidInput, "sigma step too coarse");
}

double EstimateIntegral::relative_change() const {
    if (half_value <= 0.0) return value <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(value / half_value - 1.0);
}

namespace {

// The filtered state in the window eigenbasis: columns v_i and coefficients f(lambda_i) <v_i, Phi>.
struct FilteredState {
    Eigen::MatrixXcd vectors;
    Eigen::VectorXcd coefficients;
    Eigen::VectorXd values;
};

FilteredState filtered(const FloquetSpectrum& spectrum, std::span<const cplx> state, double lambda0, double delta) {
    require(state.size() == spectrum.grid().size(), ErrorKind::InvalidInput, "state does not match the grid");
    std::vector<std::size_t> keep;
    std::vector<cplx> coeff;
    std::vector<Vec> vecs;
    double largest = 0.0;
    for (std::size_t i : spectrum.in_window(lambda0 - delta, lambda0 + delta)) {
        Vec v = spectrum.vector(i);
        const cplx c = bump(spectrum.value(i) - lambda0, delta) * dot(v, state);
        largest = std::max(largest, std::abs(c));
        keep.push_back(i);
        coeff.push_back(c);
        vecs.push_back(std::move(v));
    }
    FilteredState f;
    std::vector<std::size_t> used;
    for (std::size_t j = 0; j < keep.size(); ++j)
        if (std::abs(coeff[j]) > 1e-14 * largest) used.push_back(j);
    f.vectors.resize(spectrum.grid().size(), used.size());
    f.coefficients.resize(used.size());
    f.values.resize(used.size());
    for (std::size_t j = 0; j < used.size(); ++j) {
        f.vectors.col(j) = Eigen::Map<const Eigen::VectorXcd>(vecs[used[j]].data(), vecs[used[j]].size());
        f.coefficients(j) = coeff[used[j]];
        f.values(j) = spectrum.value(keep[used[j]]);
    }
    return f;
}

Eigen::VectorXcd evolved(const FilteredState& f, double sigma) {
    Eigen::VectorXcd c = f.coefficients;
    for (Eigen::Index j = 0; j < c.size(); ++j) c(j) *= std::polar(1.0, -sigma * f.values(j));
    return f.vectors * c;
}

// Spatial masks repeated over modes.
Eigen::VectorXd outer_mask(const ProductGrid& grid, double radius) {
    Eigen::VectorXd m(grid.size());
    const std::size_t s = grid.spatial_size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto x = grid.position(i % s);
        bool out = false;
        for (int d = 0; d < grid.dim(); ++d) out = out || std::abs(x[d]) > radius;
        m(i) = out ? 1.0 : 0.0;
    }
    return m;
}

Eigen::VectorXd radius_of(const ProductGrid& grid) {
    Eigen::VectorXd r(grid.size());
    const std::size_t s = grid.spatial_size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto x = grid.position(i % s);
        r(i) = std::hypot(x[0], x[1]);
    }
    return r;
}

void check_horizon(const ProductGrid& grid, const Eigen::VectorXcd& psi, const Eigen::VectorXd& outer, double total,
                   double sigma, const EstimateConfig& config) {
    const double mass = outer.dot(psi.cwiseAbs2());
    if (mass > config.horizon_mass * total) {
        std::ostringstream os;
        os << "evolved state reaches |x| > " << config.horizon_fraction * grid.half_width()
           << " at sigma = " << sigma << " (requested " << config.sigma_max << ")";
        throw Error(ErrorKind::TruncatedHorizon, os.str());
    }
}

// Trapezoid on a uniform grid from `from` to sigma_max, value at sigma_max/2 recorded.
template <class Integrand>
EstimateIntegral integrate(const EstimateConfig& config, double from, Integrand&& integrand) {
    const int steps = 2 * static_cast<int>(std::ceil((config.sigma_max - from) / (2.0 * config.sigma_step)));
    const double h = (config.sigma_max - from) / steps;
    EstimateIntegral out;
    double acc = 0.0, prev = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double sigma = from + i * h;
        const double v = integrand(sigma);
        out.sigma.push_back(sigma);
        out.integrand.push_back(v);
        if (i > 0) acc += 0.5 * h * (prev + v);
        prev = v;
        if (2 * i == steps) out.half_value = acc;
    }
    out.value = acc;
    return out;
}

}  // namespace

EstimateIntegral smoothness_integral(const FloquetSpectrum& spectrum, std::span<const cplx> state,
                                     const EstimateConfig& config) {
    validate(config);
    const ProductGrid& grid = spectrum.grid();
    const FilteredState f = filtered(spectrum, state, config.lambda0, config.delta);
    const double phi2 = std::pow(norm(state), 2);
    const double total = f.coefficients.squaredNorm();
    const Eigen::VectorXd outer = outer_mask(grid, config.horizon_fraction * grid.half_width());
    const Eigen::VectorXd r = radius_of(grid);
    const Eigen::VectorXd weight2 = (1.0 + r.array().square()).pow(-config.s).matrix();

    auto side = [&](double sign) {
        return integrate(config, 0.0, [&](double sigma) {
            if (total == 0.0) return 0.0;
            const Eigen::VectorXcd psi = evolved(f, sign * sigma);
            check_horizon(grid, psi, outer, total, sign * sigma, config);
            return weight2.dot(psi.cwiseAbs2()) / phi2;
        });
    };
    EstimateIntegral plus = side(1.0);
    const EstimateIntegral minus = side(-1.0);
    plus.value += minus.value;
    plus.half_value += minus.half_value;
    std::vector<double> sigma, integrand;
    for (std::size_t i = minus.sigma.size(); i-- > 1;) {
        sigma.push_back(-minus.sigma[i]);
        integrand.push_back(minus.integrand[i]);
    }
    sigma.insert(sigma.end(), plus.sigma.begin(), plus.sigma.end());
    integrand.insert(integrand.end(), plus.integrand.begin(), plus.integrand.end());
    plus.sigma = std::move(sigma);
    plus.integrand = std::move(integrand);
    plus.norm = total;
    return plus;
}

EstimateIntegral minimal_velocity_integral(const FloquetSpectrum& spectrum, std::span<const cplx> state,
                                           const EstimateConfig& config) {
    validate(config);
    const ProductGrid& grid = spectrum.grid();
    const FilteredState f = filtered(spectrum, state, config.lambda0, config.delta);
    const double phi2 = std::pow(norm(state), 2);
    const double total = f.coefficients.squaredNorm();
    const Eigen::VectorXd outer = outer_mask(grid, config.horizon_fraction * grid.half_width());
    const Eigen::VectorXd r = radius_of(grid);
    auto out = integrate(config, 1.0, [&](double sigma) {
        if (total == 0.0) return 0.0;
        const Eigen::VectorXcd psi = evolved(f, sigma);
        check_horizon(grid, psi, outer, total, sigma, config);
        double inside = 0.0;
        for (Eigen::Index i = 0; i < psi.size(); ++i)
            if (r(i) < config.velocity * sigma) inside += std::norm(psi(i));
        return inside / phi2 / sigma;
    });
    out.norm = total;
    return out;
}

EstimateIntegral a_window_integral(const FloquetSpectrum& spectrum, const LinearOperator& a,
                                   std::span<const cplx> state, const EstimateConfig& config) {
    validate(config);
    const ProductGrid& grid = spectrum.grid();
    const std::size_t s = grid.spatial_size();
    require(s <= kDenseLimit, ErrorKind::TooLarge, "A-window needs dense mode blocks of A");
    const FilteredState f = filtered(spectrum, state, config.lambda0, config.delta);
    const double phi2 = std::pow(norm(state), 2);
    const double total = f.coefficients.squaredNorm();
    const Eigen::VectorXd outer = outer_mask(grid, config.horizon_fraction * grid.half_width());

    // Per mode block with weight: eigenvalues of A and the window vectors in A's eigenbasis.
    struct Block {
        Eigen::VectorXd values;
        Eigen::MatrixXcd projected;  // U^* V_m
    };
    std::vector<Block> blocks;
    for (int m = 0; m < grid.modes() && total > 0.0; ++m) {
        const Eigen::MatrixXcd vm = f.vectors.middleRows(m * s, s);
        if (vm.norm() == 0.0) continue;
        Eigen::MatrixXcd dense(s, s);
        Vec unit(grid.size(), cplx{}), col(grid.size());
        for (std::size_t j = 0; j < s; ++j) {
            unit[m * s + j] = 1.0;
            a.apply(unit, col);
            unit[m * s + j] = 0.0;
            double leak = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (i / s == static_cast<std::size_t>(m)) dense(i % s, j) = col[i];
                else leak += std::norm(col[i]);
            }
            require(leak <= 1e-20, ErrorKind::UnsupportedConfiguration, "A couples temporal modes");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (dense + dense.adjoint()));
        blocks.push_back({es.eigenvalues(), es.eigenvectors().adjoint() * vm});
    }

    auto out = integrate(config, 1.0, [&](double sigma) {
        if (total == 0.0) return 0.0;
        check_horizon(grid, evolved(f, sigma), outer, total, sigma, config);
        Eigen::VectorXcd c = f.coefficients;
        for (Eigen::Index j = 0; j < c.size(); ++j) c(j) *= std::polar(1.0, -sigma * f.values(j));
        const double lo = sigma * (config.a_centre - config.c2), hi = sigma * (config.a_centre - config.c1);
        double mass = 0.0;
        for (const auto& b : blocks) {
            const Eigen::VectorXcd g = b.projected * c;
            for (Eigen::Index i = 0; i < g.size(); ++i)
                if (b.values(i) >= lo && b.values(i) <= hi) mass += std::norm(g(i));
        }
        return mass / phi2 / sigma;
    });
    out.norm = total;
    return out;
}

VerificationReport estimate_report(std::string check, const EstimateIntegral& integral, const EstimateConfig& config,
                                   bool expect_bounded) {
    VerificationReport r;
    const double ratio = integral.half_value > 0.0 ? integral.value / integral.half_value : 0.0;
    if (expect_bounded) {
        r = VerificationReport::judge(std::move(check), -integral.relative_change(), -config.stabilization, 0.0);
        r.note = "relative change of the integral under sigma_max doubling";
    } else {
        r = VerificationReport::judge(std::move(check), ratio, 1.8, 0.0);
        r.note = "growth ratio of the integral under sigma_max doubling (linear growth gives 2)";
    }
    r.parameters = {{"lambda0", config.lambda0}, {"delta", config.delta}, {"sigma_max", config.sigma_max},
                    {"value", integral.value}, {"half_value", integral.half_value}, {"ratio", ratio},
                    {"filtered_norm", integral.norm}, {"velocity", config.velocity}, {"s", config.s}};
    r.table.columns = {"sigma", "integrand"};
    for (std::size_t i = 0; i < integral.sigma.size(); i += std::max<std::size_t>(1, integral.sigma.size() / 512))
        r.table.rows.push_back({integral.sigma[i], integral.integrand[i]});
    return r;
}

}  // namespace fm
