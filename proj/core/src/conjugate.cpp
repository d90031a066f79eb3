#include "fm/conjugate.hpp"

#include <cmath>

namespace fm {

namespace {

struct KindName {
    ConjugateKind kind;
    std::string_view name;
};

constexpr KindName kKinds[] = {
    {ConjugateKind::Dilation, "dilation"},
    {ConjugateKind::DilationInternal, "dilation-internal"},
    {ConjugateKind::DilationIntercluster, "dilation-intercluster"},
    {ConjugateKind::Yokoyama, "yokoyama"},
    {ConjugateKind::Ak, "ak"},
    {ConjugateKind::ClusterInternal, "cluster-internal"},
    {ConjugateKind::ClusterIntercluster, "cluster-intercluster"},
    {ConjugateKind::ClusterSum, "cluster-sum"},
    {ConjugateKind::Glued, "glued"},
};

struct FormName {
    ClosedForm form;
    std::string_view name;
};

constexpr FormName kForms[] = {
    {ClosedForm::Dilation, "dilation"},
    {ClosedForm::DilationDouble, "dilation-double"},
    {ClosedForm::Resolvent, "resolvent"},
    {ClosedForm::ResolventDouble, "resolvent-double"},
    {ClosedForm::Localization, "localization"},
    {ClosedForm::ClusterDifference, "cluster-difference"},
    {ClosedForm::Ims, "ims"},
};

bool vanishes(const Eigen::MatrixXd& p) { return p.norm() < 1e-12; }

// k.Pk for every wavevector.
RealVec quadratic_symbol(const ProductGrid& grid, const Eigen::MatrixXd& projector) {
    RealVec out = projected_kinetic_symbol(grid, projector);
    for (double& v : out) v *= 2.0;
    return out;
}

const ClusterDecomposition& require_cluster(const ConjugateSpec& spec) {
    require(spec.cluster.has_value(), ErrorKind::InvalidInput,
            std::string("conjugate kind ") + std::string(to_string(spec.kind)) + " needs a cluster decomposition");
    return *spec.cluster;
}

Vec shifted_mode_resolvent(const ProductGrid& grid, double shift) {
    const double w = grid.omega();
    require(std::abs(shift - w * std::round(shift / w)) >= 1e-9 * w, ErrorKind::SingularResolvent,
            "resolvent shift " + std::to_string(shift) + " lies on omega*Z");
    Vec v(grid.modes());
    for (int m = 0; m < grid.modes(); ++m) v[m] = 1.0 / (shift - grid.mode_number(m) * w);
    return v;
}

// Every non-glued kind is a sum of dilation terms.
std::vector<DilationTerm> terms_for(const ConjugateSpec& spec, const ProductGrid& grid, const MassGeometry& geometry) {
    const int dim = geometry.internal_dim();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
    switch (spec.kind) {
    case ConjugateKind::Dilation:
        return {{id, {}, {}}};
    case ConjugateKind::DilationInternal: {
        auto p = geometry.intra_projector(require_cluster(spec));
        if (vanishes(p)) return {};
        return {{p, {}, {}}};
    }
    case ConjugateKind::DilationIntercluster: {
        auto p = geometry.inter_projector(require_cluster(spec));
        if (vanishes(p)) return {};
        return {{p, {}, {}}};
    }
    case ConjugateKind::Yokoyama: {
        RealVec g = kinetic_symbol(grid);
        for (double& v : g) v = 1.0 / (1.0 + v);
        return {{id, {}, std::move(g)}};
    }
    case ConjugateKind::Ak:
        return {{id, shifted_mode_resolvent(grid, spec.lambda0 - spec.delta), {}}};
    case ConjugateKind::ClusterInternal:
        return cluster_terms(grid, geometry, require_cluster(spec), true, false);
    case ConjugateKind::ClusterIntercluster:
        return cluster_terms(grid, geometry, require_cluster(spec), false, true);
    case ConjugateKind::ClusterSum:
        return cluster_terms(grid, geometry, require_cluster(spec), true, true);
    case ConjugateKind::Glued:
        break;
    }
    throw Error(ErrorKind::InvalidInput, "glued conjugate operator is not a single dilation sum");
}

LinearOperator sum_of_terms(const ProductGrid& grid, const std::vector<DilationTerm>& terms, bool commutator) {
    std::vector<LinearOperator> ops;
    for (const auto& t : terms) ops.push_back(commutator ? dilation_commutator(grid, t) : dilation_operator(grid, t));
    return sum(grid, ops);
}

}  // namespace

std::string_view to_string(ConjugateKind kind) {
    for (const auto& k : kKinds)
        if (k.kind == kind) return k.name;
    return "unknown";
}

ConjugateKind parse_conjugate_kind(std::string_view name) {
    for (const auto& k : kKinds)
        if (k.name == name) return k.kind;
    throw Error(ErrorKind::InvalidInput, "unknown conjugate kind '" + std::string(name) + "'");
}

std::string_view to_string(ClosedForm form) {
    for (const auto& f : kForms)
        if (f.form == form) return f.name;
    return "unknown";
}

ClosedForm parse_closed_form(std::string_view name) {
    for (const auto& f : kForms)
        if (f.name == name) return f.form;
    throw Error(ErrorKind::InvalidInput, "unknown closed-form identity '" + std::string(name) + "'");
}

LinearOperator dilation_operator(const ProductGrid& grid, const DilationTerm& term) {
    const int dim = grid.dim();
    require(term.projector.rows() == dim, ErrorKind::InvalidInput, "projector does not match grid dimension");
    std::vector<LinearOperator> parts;
    for (int i = 0; i < dim; ++i) {
        Vec y(grid.spatial_size());  // (Px)_i
        bool any = false;
        for (std::size_t s = 0; s < y.size(); ++s) {
            const auto x = grid.position(s);
            double v = 0.0;
            for (int j = 0; j < dim; ++j) v += term.projector(i, j) * x[j];
            y[s] = v;
            any = any || v != 0.0;
        }
        if (!any) continue;
        parts.push_back(momentum_component(grid, i) * position_multiplier(grid, std::move(y), "(Px)" + std::to_string(i)));
    }
    if (parts.empty()) return zero(grid);
    LinearOperator t = sum(grid, parts);
    if (!term.momentum_factor.empty()) {
        Vec g(term.momentum_factor.begin(), term.momentum_factor.end());
        t = momentum_multiplier(grid, std::move(g), "g(p)") * t;
    }
    LinearOperator re = real_part(t);
    if (!term.mode_factor.empty()) re = mode_multiplier(grid, term.mode_factor, "m(Dt)") * re;
    // A mode factor commutes with every spatial operator, so the product is self-adjoint.
    return custom_operator(
        grid, [re](std::span<const cplx> in, std::span<cplx> out) { re.apply(in, out); },
        [re](std::span<const cplx> in, std::span<cplx> out) { re.apply(in, out); }, true, re.describe());
}

LinearOperator dilation_commutator(const ProductGrid& grid, const DilationTerm& term) {
    const RealVec q = quadratic_symbol(grid, term.projector);
    const std::size_t s = grid.spatial_size();
    Vec values(grid.size());
    for (int m = 0; m < grid.modes(); ++m) {
        const cplx mf = term.mode_factor.empty() ? cplx(1.0) : term.mode_factor[m];
        for (std::size_t i = 0; i < s; ++i) {
            const double g = term.momentum_factor.empty() ? 1.0 : term.momentum_factor[i];
            values[m * s + i] = mf * g * q[i];
        }
    }
    return spectral_multiplier(grid, std::move(values), "i[K0,A]");
}

std::vector<DilationTerm> cluster_terms(const ProductGrid& grid, const MassGeometry& geometry,
                                        const ClusterDecomposition& a, bool internal, bool intercluster) {
    std::vector<DilationTerm> out;
    const double w = grid.omega();
    if (internal) {
        auto p = geometry.intra_projector(a);
        if (!vanishes(p)) out.push_back({p, shifted_mode_resolvent(grid, 1.5 * w), {}});
    }
    if (intercluster) {
        auto p = geometry.inter_projector(a);
        if (!vanishes(p)) {
            RealVec g = projected_kinetic_symbol(grid, p);
            for (double& v : g) v = 1.0 / (0.25 * w + v);
            out.push_back({p, {}, std::move(g)});
        }
    }
    return out;
}

LinearOperator partition_multiplier(const ProductGrid& grid, const SampledPartition& sampled, std::size_t cluster) {
    const auto& v = sampled.values.at(cluster);
    return position_multiplier(grid, Vec(v.begin(), v.end()), "j" + sampled.clusters[cluster].label());
}

LinearOperator partition_gradient(const ProductGrid& grid, const SampledPartition& sampled, std::size_t cluster) {
    std::vector<LinearOperator> parts;
    for (int d = 0; d < grid.dim(); ++d) {
        const auto& g = sampled.gradient.at(cluster)[d];
        parts.push_back(position_multiplier(grid, Vec(g.begin(), g.end()), "dj") * momentum_component(grid, d));
    }
    return real_part(sum(grid, parts));
}

LinearOperator build_conjugate(const ConjugateSpec& spec, const ProductGrid& grid, const MassGeometry& geometry,
                               const GrafPartition* partition) {
    require(grid.dim() == geometry.internal_dim(), ErrorKind::InvalidInput, "grid dimension does not match geometry");
    if (spec.kind != ConjugateKind::Glued) return sum_of_terms(grid, terms_for(spec, grid, geometry), false);

    require(partition != nullptr, ErrorKind::InvalidInput, "glued conjugate operator needs a Graf partition");
    const SampledPartition sampled = partition->sample(grid, spec.scale);
    std::vector<LinearOperator> pieces;
    for (std::size_t a = 0; a < sampled.clusters.size(); ++a) {
        const auto terms = cluster_terms(grid, geometry, sampled.clusters[a], true, true);
        if (terms.empty()) continue;
        const LinearOperator j = partition_multiplier(grid, sampled, a);
        pieces.push_back(j * sum_of_terms(grid, terms, false) * j);
    }
    const LinearOperator total = sum(grid, pieces);
    return custom_operator(
        grid, [total](std::span<const cplx> in, std::span<cplx> out) { total.apply(in, out); },
        [total](std::span<const cplx> in, std::span<cplx> out) { total.apply(in, out); }, true,
        "A(R=" + std::to_string(spec.scale) + ")");
}

LinearOperator commutator(const LinearOperator& k, const LinearOperator& a) {
    require(k.grid().same_shape(a.grid()), ErrorKind::InvalidInput, "operators live on different grids");
    const bool sa = k.is_self_adjoint() && a.is_self_adjoint();
    auto form = [](const LinearOperator& x, const LinearOperator& y, bool adj) {
        return [x, y, adj](std::span<const cplx> in, std::span<cplx> out) {
            Vec t1(in.size()), t2(in.size()), t3(in.size());
            if (!adj) {
                y.apply(in, t1);
                x.apply(t1, out);
                x.apply(in, t2);
                y.apply(t2, t3);
            } else {
                // (i(XY - YX))* = i(X*Y* - Y*X*)
                y.apply_adjoint(in, t1);
                x.apply_adjoint(t1, out);
                x.apply_adjoint(in, t2);
                y.apply_adjoint(t2, t3);
            }
            const cplx i(0.0, 1.0);
            for (std::size_t n = 0; n < out.size(); ++n) out[n] = i * (out[n] - t3[n]);
        };
    };
    return custom_operator(k.grid(), form(k, a, false), form(k, a, true), sa,
                           "i[" + k.describe() + "," + a.describe() + "]");
}

LinearOperator commutator_closed_form(const FloquetHamiltonian& k, const ConjugateSpec& spec,
                                      const GrafPartition* partition) {
    const ProductGrid& grid = k.grid();
    const MassGeometry& geometry = k.geometry();
    const LinearOperator a = build_conjugate(spec, grid, geometry, partition);
    const LinearOperator potential_part = commutator(k.potential(), a);
    if (spec.kind != ConjugateKind::Glued)
        return sum_of_terms(grid, terms_for(spec, grid, geometry), true) + potential_part;

    const SampledPartition sampled = partition->sample(grid, spec.scale);
    std::vector<LinearOperator> pieces;
    for (std::size_t c = 0; c < sampled.clusters.size(); ++c) {
        const auto terms = cluster_terms(grid, geometry, sampled.clusters[c], true, true);
        if (terms.empty()) continue;
        const LinearOperator j = partition_multiplier(grid, sampled, c);
        const LinearOperator g = partition_gradient(grid, sampled, c);
        const LinearOperator ac = sum_of_terms(grid, terms, false);
        const LinearOperator kc = sum_of_terms(grid, terms, true);
        pieces.push_back(g * ac * j + j * ac * g + j * kc * j);
    }
    pieces.push_back(potential_part);
    const LinearOperator total = sum(grid, pieces);
    return custom_operator(
        grid, [total](std::span<const cplx> in, std::span<cplx> out) { total.apply(in, out); },
        [total](std::span<const cplx> in, std::span<cplx> out) { total.apply(in, out); }, true,
        "i[K,A(R)] closed form");
}

LinearOperator closed_form(ClosedForm form, const ProductGrid& grid, const SampledPartition* partition,
                           std::size_t cluster) {
    const double w = grid.omega();
    const RealVec kin = kinetic_symbol(grid);
    const std::size_t s = grid.spatial_size();
    auto joint = [&](auto f, std::string label) {
        Vec v(grid.size());
        for (int m = 0; m < grid.modes(); ++m) {
            const double n = grid.mode_number(m) * w;
            for (std::size_t i = 0; i < s; ++i) v[m * s + i] = f(n, kin[i]);
        }
        return spectral_multiplier(grid, std::move(v), std::move(label));
    };
    switch (form) {
    case ClosedForm::Dilation:
        return joint([&](double n, double h) { return 2.0 * h / (1.5 * w - n); }, "(3w/2-Dt)^-1 p^2");
    case ClosedForm::DilationDouble:
        return joint([&](double n, double h) { return 4.0 * h / ((1.5 * w - n) * (1.5 * w - n)); },
                     "4(3w/2-Dt)^-2 H0");
    case ClosedForm::Resolvent:
        return joint([&](double, double h) { return 2.0 * (1.0 - 0.25 * w / (0.25 * w + h)); },
                     "2(1-(w/4)(w/4+H0)^-1)");
    case ClosedForm::ResolventDouble:
        return joint([&](double, double h) { return w * h / std::pow(0.25 * w + h, 3); }, "w(w/4+H0)^-3 H0");
    case ClosedForm::ClusterDifference:
        return joint([&](double n, double h) { return 2.0 * (1.25 * w - n - h) * h / ((1.5 * w - n) * (0.25 * w + h)); },
                     "2(3w/2-Dt)^-1(5w/4-K0)(w/4+H0)^-1 H0");
    case ClosedForm::Localization:
        require(partition != nullptr, ErrorKind::InvalidInput, "localization identity needs a sampled partition");
        return cplx(-1.0) * partition_gradient(grid, *partition, cluster);
    case ClosedForm::Ims: {
        require(partition != nullptr, ErrorKind::InvalidInput, "IMS identity needs a sampled partition");
        const LinearOperator p2 = cplx(2.0) * kinetic(grid);
        std::vector<LinearOperator> terms;
        Vec grad2(s, cplx{});
        for (std::size_t a = 0; a < partition->clusters.size(); ++a) {
            const LinearOperator j = partition_multiplier(grid, *partition, a);
            terms.push_back(j * p2 * j);
            for (int d = 0; d < grid.dim(); ++d)
                for (std::size_t i = 0; i < s; ++i) grad2[i] += partition->gradient[a][d][i] * partition->gradient[a][d][i];
        }
        terms.push_back(cplx(-1.0) * position_multiplier(grid, std::move(grad2), "|grad j|^2"));
        return sum(grid, terms);
    }
    }
    throw Error(ErrorKind::InvalidInput, "unknown closed-form identity");
}

LinearOperator nelson_operator(const ProductGrid& grid) {
    Vec modes(grid.modes());
    for (int m = 0; m < grid.modes(); ++m) {
        const double n = grid.mode_number(m) * grid.omega();
        modes[m] = std::sqrt(1.0 + n * n);
    }
    Vec harmonic(grid.spatial_size());
    for (std::size_t i = 0; i < harmonic.size(); ++i) {
        const auto x = grid.position(i);
        harmonic[i] = 0.5 * (x[0] * x[0] + x[1] * x[1]);
    }
    return mode_multiplier(grid, std::move(modes), "<Dt>") + kinetic(grid) +
           position_multiplier(grid, std::move(harmonic), "x^2/2");
}

NelsonBounds nelson_bounds(const LinearOperator& a, std::span<const Vec> states) {
    const LinearOperator n0 = nelson_operator(a.grid());
    NelsonBounds out;
    out.floor = std::numeric_limits<double>::infinity();
    for (const Vec& phi : states) {
        const Vec ap = a(phi), np = n0(phi);
        const double quad = dot(phi, np).real();
        const double nn = norm(phi);
        out.floor = std::min(out.floor, quad / (nn * nn));
        out.relative_bound = std::max(out.relative_bound, norm(ap) / norm(np));
        out.commutator_bound = std::max(out.commutator_bound, 2.0 * std::abs(dot(ap, np).imag()) / quad);
        ++out.samples;
    }
    if (out.samples == 0) out.floor = 0.0;
    return out;
}

}  // namespace fm
