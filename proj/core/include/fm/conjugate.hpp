#pragma once

#include "fm/floquet.hpp"
#include "fm/partition.hpp"

#include <optional>
#include <string_view>

namespace fm {

enum class ConjugateKind {
    Dilation,              // Re(p.x)
    DilationInternal,      // Re(p^a.x^a)
    DilationIntercluster,  // Re(p_a.x_a)
    Yokoyama,              // Re((1+p^2/2)^{-1} p.x)
    Ak,                    // (lambda0 - delta - D_t)^{-1} Re(p.x)
    ClusterInternal,       // (3w/2 - D_t)^{-1} Re(p^a.x^a)
    ClusterIntercluster,   // Re((w/4 + p_a^2/2)^{-1} p_a.x_a)
    ClusterSum,            // internal + intercluster
    Glued,                 // sum_a j_{a,R} A_a j_{a,R}
};

std::string_view to_string(ConjugateKind kind);
ConjugateKind parse_conjugate_kind(std::string_view name);

struct ConjugateSpec {
    ConjugateKind kind = ConjugateKind::Dilation;
    double lambda0 = 0.0;  // Ak only
    double delta = 0.0;    // Ak only
    double scale = 1.0;    // Glued: R
    std::optional<ClusterDecomposition> cluster;  // the cluster kinds
};

// Pieces shared by every conjugate operator: Re(m(D_t) g(p) p.Px) with a projector P on X.
// The commutator with the free K0 is the multiplier m(n) g(k) (k.Pk).
struct DilationTerm {
    Eigen::MatrixXd projector;
    Vec mode_factor;      // per mode; empty means 1
    RealVec momentum_factor;  // per wavevector; empty means 1
};

LinearOperator dilation_operator(const ProductGrid& grid, const DilationTerm& term);
LinearOperator dilation_commutator(const ProductGrid& grid, const DilationTerm& term);  // i[K0, .]

// A_a split into its internal and intercluster terms (empty terms are dropped, so A^{a_min}
// and the intercluster part of a_max vanish structurally).
std::vector<DilationTerm> cluster_terms(const ProductGrid& grid, const MassGeometry& geometry,
                                        const ClusterDecomposition& a, bool internal, bool intercluster);

LinearOperator build_conjugate(const ConjugateSpec& spec, const ProductGrid& grid, const MassGeometry& geometry,
                               const GrafPartition* partition = nullptr);

// i(KA - AK), matrix free.
LinearOperator commutator(const LinearOperator& k, const LinearOperator& a);

// i[K, A] with the kinetic part of each term from its closed form, the localisation gradients
// of the glued operator analytic, and only the potential part i[V, A] evaluated numerically.
// On a finite grid the numerical i[K, A] vanishes on every eigenvector of K; this form does not.
LinearOperator commutator_closed_form(const FloquetHamiltonian& k, const ConjugateSpec& spec,
                                      const GrafPartition* partition = nullptr);

// Closed-form right-hand sides of the free commutator identities.
enum class ClosedForm {
    Dilation,            // i[K0, A^{a_max}] = (3w/2 - D_t)^{-1} p^2
    DilationDouble,      // i[i[K0, A^{a_max}], A^{a_max}] = 4 (3w/2 - D_t)^{-2} (K0 - D_t)
    Resolvent,           // i[K0, A~_{w/4,a_min}] = 2{1 - (w/4)(w/4 + p^2/2)^{-1}}
    ResolventDouble,     // i[i[K0, A~], A~] = w (w/4 + p^2/2)^{-3} p^2/2
    Localization,        // i[j, p^2/2] = -Re(grad j . p)
    ClusterDifference,   // i[K0, A_{a_min}] - i[K0, A_{a_max}] = 2 (3w/2 - D_t)^{-1}(5w/4 - K0)(w/4 + H0)^{-1} H0
    Ims,                 // sum_a j_a p^2 j_a - sum_a |grad j_a|^2  (= p^2)
};

std::string_view to_string(ClosedForm form);
ClosedForm parse_closed_form(std::string_view name);

// partition and cluster index are needed by Localization (one j) and Ims (all j).
LinearOperator closed_form(ClosedForm form, const ProductGrid& grid, const SampledPartition* partition = nullptr,
                           std::size_t cluster = 0);

// Position multiplier by j_{a,R} and the first-order operator Re(grad j_{a,R} . p).
LinearOperator partition_multiplier(const ProductGrid& grid, const SampledPartition& sampled, std::size_t cluster);
LinearOperator partition_gradient(const ProductGrid& grid, const SampledPartition& sampled, std::size_t cluster);

// N0 = <D_t> + p^2/2 + x^2/2 and the empirical constants bounding A against it.
LinearOperator nelson_operator(const ProductGrid& grid);

struct NelsonBounds {
    double relative_bound = 0.0;  // max ||A phi|| / ||N0 phi||
    double commutator_bound = 0.0;  // max |<A phi, N0 phi> - <N0 phi, A phi>| / <phi, N0 phi>
    double floor = 0.0;  // smallest Rayleigh quotient of N0 over the sample
    std::size_t samples = 0;
};

NelsonBounds nelson_bounds(const LinearOperator& a, std::span<const Vec> states);

}  // namespace fm
