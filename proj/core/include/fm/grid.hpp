#pragma once

#include "fm/types.hpp"

#include <array>
#include <memory>

namespace fm {

class FftPlans;

// Tensor grid for L^2(torus) ⊗ L^2(box): M temporal Fourier modes n = -M/2 .. M/2-1 times
// a periodic position grid x = -L + i*dx (i < n) in each internal coordinate.
// A state is stored mode-major: value(mode, spatial) at mode * spatial_size() + spatial.
class ProductGrid {
public:
    ProductGrid(double period, int modes, double half_width, int points, int dim);

    double period() const { return period_; }
    double omega() const;
    int modes() const { return modes_; }
    double half_width() const { return half_width_; }
    int points() const { return points_; }
    int dim() const { return dim_; }
    double spacing() const { return 2.0 * half_width_ / points_; }

    std::size_t spatial_size() const { return spatial_size_; }
    std::size_t size() const { return spatial_size_ * static_cast<std::size_t>(modes_); }

    int mode_number(int index) const { return index - modes_ / 2; }
    double time_sample(int k) const { return period_ * k / modes_; }
    double coordinate(int i) const { return -half_width_ + i * spacing(); }
    // Wavenumber carried by index m of the unshifted discrete transform.
    double wavenumber(int m) const;

    // Coordinates of a flat spatial index (axis 0 outermost).
    std::array<int, 2> split(std::size_t spatial) const;
    std::array<double, 2> position(std::size_t spatial) const;
    std::array<double, 2> momentum(std::size_t spatial) const;

    // Unnormalised in-place transforms acting on every mode block (or on one spatial block).
    void forward_space(std::span<cplx> state) const;
    void backward_space(std::span<cplx> state) const;
    void forward_space_block(std::span<cplx> block) const;
    void backward_space_block(std::span<cplx> block) const;
    // Unitary maps between temporal modes and the M time samples t_k = kT/M.
    void modes_to_time(std::span<cplx> state) const;
    void time_to_modes(std::span<cplx> state) const;

    bool same_shape(const ProductGrid& other) const;

private:
    double period_;
    int modes_;
    double half_width_;
    int points_;
    int dim_;
    std::size_t spatial_size_;
    std::shared_ptr<const FftPlans> plans_;
};

}  // namespace fm
