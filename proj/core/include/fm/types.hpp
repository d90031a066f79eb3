#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fm {

using cplx = std::complex<double>;
using Vec = std::vector<cplx>;
using RealVec = std::vector<double>;

enum class ErrorKind {
    InvalidInput,
    UnsupportedConfiguration,
    TooLarge,
    SingularResolvent,
    SpectralBound,
    PartitionConstruction,
    DecayViolation,
    TruncatedHorizon,
    PropagationAccuracy,
    OutOfBox,
    Ordering,
    InconclusiveWindow,
};

std::string_view error_tag(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_tag(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool ok, ErrorKind kind, const std::string& what) {
    if (!ok) throw Error(kind, what);
}

double norm(std::span<const cplx> v);
cplx dot(std::span<const cplx> a, std::span<const cplx> b);  // conjugates a
void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
void scale(cplx alpha, std::span<cplx> x);

}  // namespace fm
