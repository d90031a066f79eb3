#include "fm/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace fm {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

// FFTW plans are created once per grid shape; execution through the new-array interface is
// thread safe, planning is not and is serialised.
class FftPlans {
public:
    FftPlans(int modes, int points, int dim) : modes_(modes), spatial_(1) {
        for (int d = 0; d < dim; ++d) spatial_ *= points;
        std::vector<cplx> scratch(static_cast<std::size_t>(modes) * spatial_);
        int shape[2] = {points, points};
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        std::lock_guard lock(planner_mutex());
        auto* buf = as_fftw(scratch.data());
        const int sp = static_cast<int>(spatial_);
        space_fwd_ = fftw_plan_many_dft(dim, shape, modes, buf, nullptr, 1, sp, buf, nullptr, 1, sp,
                                        FFTW_FORWARD, flags);
        space_bwd_ = fftw_plan_many_dft(dim, shape, modes, buf, nullptr, 1, sp, buf, nullptr, 1, sp,
                                        FFTW_BACKWARD, flags);
        block_fwd_ = fftw_plan_many_dft(dim, shape, 1, buf, nullptr, 1, sp, buf, nullptr, 1, sp,
                                        FFTW_FORWARD, flags);
        block_bwd_ = fftw_plan_many_dft(dim, shape, 1, buf, nullptr, 1, sp, buf, nullptr, 1, sp,
                                        FFTW_BACKWARD, flags);
        int m[1] = {modes};
        time_fwd_ = fftw_plan_many_dft(1, m, sp, buf, nullptr, sp, 1, buf, nullptr, sp, 1, FFTW_FORWARD, flags);
        time_bwd_ = fftw_plan_many_dft(1, m, sp, buf, nullptr, sp, 1, buf, nullptr, sp, 1, FFTW_BACKWARD, flags);
    }
    ~FftPlans() {
        std::lock_guard lock(planner_mutex());
        for (auto p : {space_fwd_, space_bwd_, block_fwd_, block_bwd_, time_fwd_, time_bwd_}) fftw_destroy_plan(p);
    }
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

    void run(fftw_plan p, std::span<cplx> data) const { fftw_execute_dft(p, as_fftw(data.data()), as_fftw(data.data())); }

    int modes_;
    std::size_t spatial_;
    fftw_plan space_fwd_, space_bwd_, block_fwd_, block_bwd_, time_fwd_, time_bwd_;
};

ProductGrid::ProductGrid(double period, int modes, double half_width, int points, int dim)
    : period_(period), modes_(modes), half_width_(half_width), points_(points), dim_(dim) {
    require(std::isfinite(period) && period > 0.0, ErrorKind::InvalidInput, "period must be positive");
    require(modes >= 4 && modes % 2 == 0, ErrorKind::InvalidInput, "mode count must be even and at least 4");
    require(std::isfinite(half_width) && half_width > 0.0, ErrorKind::InvalidInput, "box half width must be positive");
    require(points >= 8 && (points & (points - 1)) == 0, ErrorKind::InvalidInput,
            "points per axis must be a power of two and at least 8");
    require(dim == 1 || dim == 2, ErrorKind::UnsupportedConfiguration, "internal dimension must be 1 or 2");
    spatial_size_ = dim == 1 ? static_cast<std::size_t>(points) : static_cast<std::size_t>(points) * points;
    plans_ = std::make_shared<FftPlans>(modes, points, dim);
}

double ProductGrid::omega() const { return 2.0 * std::numbers::pi / period_; }

double ProductGrid::wavenumber(int m) const {
    const int shifted = m < points_ / 2 ? m : m - points_;
    return std::numbers::pi / half_width_ * shifted;
}

std::array<int, 2> ProductGrid::split(std::size_t spatial) const {
    if (dim_ == 1) return {static_cast<int>(spatial), 0};
    return {static_cast<int>(spatial / points_), static_cast<int>(spatial % points_)};
}

std::array<double, 2> ProductGrid::position(std::size_t spatial) const {
    auto idx = split(spatial);
    return {coordinate(idx[0]), dim_ == 2 ? coordinate(idx[1]) : 0.0};
}

std::array<double, 2> ProductGrid::momentum(std::size_t spatial) const {
    auto idx = split(spatial);
    return {wavenumber(idx[0]), dim_ == 2 ? wavenumber(idx[1]) : 0.0};
}

void ProductGrid::forward_space(std::span<cplx> state) const { plans_->run(plans_->space_fwd_, state); }
void ProductGrid::backward_space(std::span<cplx> state) const { plans_->run(plans_->space_bwd_, state); }
void ProductGrid::forward_space_block(std::span<cplx> block) const { plans_->run(plans_->block_fwd_, block); }
void ProductGrid::backward_space_block(std::span<cplx> block) const { plans_->run(plans_->block_bwd_, block); }

// phi(t_k) = M^{-1/2} sum_n c_n e^{i n w t_k}; with n = idx - M/2 the shift contributes (-1)^k.
void ProductGrid::modes_to_time(std::span<cplx> state) const {
    plans_->run(plans_->time_bwd_, state);
    const double norm = 1.0 / std::sqrt(static_cast<double>(modes_));
    for (int k = 0; k < modes_; ++k) {
        const double s = (k % 2 ? -norm : norm);
        for (std::size_t i = 0; i < spatial_size_; ++i) state[k * spatial_size_ + i] *= s;
    }
}

void ProductGrid::time_to_modes(std::span<cplx> state) const {
    const double norm = 1.0 / std::sqrt(static_cast<double>(modes_));
    for (int k = 0; k < modes_; ++k) {
        const double s = (k % 2 ? -norm : norm);
        for (std::size_t i = 0; i < spatial_size_; ++i) state[k * spatial_size_ + i] *= s;
    }
    plans_->run(plans_->time_fwd_, state);
}

bool ProductGrid::same_shape(const ProductGrid& other) const {
    return period_ == other.period_ && modes_ == other.modes_ && half_width_ == other.half_width_ &&
           points_ == other.points_ && dim_ == other.dim_;
}

}  // namespace fm
