#include "fm/types.hpp"

#include <cmath>

namespace fm {

std::string_view error_tag(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidInput: return "invalid-input";
        case ErrorKind::UnsupportedConfiguration: return "unsupported-configuration";
        case ErrorKind::TooLarge: return "too-large";
        case ErrorKind::SingularResolvent: return "singular-resolvent";
        case ErrorKind::SpectralBound: return "spectral-bound-error";
        case ErrorKind::PartitionConstruction: return "partition-construction-failure";
        case ErrorKind::DecayViolation: return "decay-violation";
        case ErrorKind::TruncatedHorizon: return "truncated-horizon";
        case ErrorKind::PropagationAccuracy: return "propagation-accuracy";
        case ErrorKind::OutOfBox: return "out-of-box";
        case ErrorKind::Ordering: return "ordering-error";
        case ErrorKind::InconclusiveWindow: return "inconclusive-window";
    }
    return "error";
}

double norm(std::span<const cplx> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(cplx alpha, std::span<cplx> x) {
    for (auto& z : x) z *= alpha;
}

}  // namespace fm
