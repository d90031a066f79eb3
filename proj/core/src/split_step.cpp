#include "fm/split_step.hpp"

#include <cmath>

namespace fm {

SplitStep::SplitStep(ProductGrid grid, PotentialAt potential, RealVec kinetic_symbol)
    : grid_(std::move(grid)), potential_(std::move(potential)), kinetic_(std::move(kinetic_symbol)) {
    require(kinetic_.size() == grid_.spatial_size(), ErrorKind::InvalidInput, "kinetic symbol does not match grid");
}

void SplitStep::propagate(Eigen::MatrixXcd& states, double t0, double t1, int steps) const {
    require(steps >= 1, ErrorKind::InvalidInput, "need at least one time step");
    require(static_cast<std::size_t>(states.rows()) == grid_.spatial_size(), ErrorKind::InvalidInput,
            "state block has wrong length");
    const std::size_t s = grid_.spatial_size();
    const double dt = (t1 - t0) / steps;
    const double inv = 1.0 / static_cast<double>(s);
    std::vector<cplx> half(s), full(s);
    for (std::size_t i = 0; i < s; ++i) {
        half[i] = std::polar(inv, -0.5 * dt * kinetic_[i]);
        full[i] = std::polar(1.0, -dt * kinetic_[i]);
    }
    const Eigen::Index cols = states.cols();
    auto column = [&](Eigen::Index c) { return std::span<cplx>(states.col(c).data(), s); };
    // Momentum space between potential kicks; the 1/s normalisation is folded into the first half step.
    for (Eigen::Index c = 0; c < cols; ++c) {
        auto v = column(c);
        grid_.forward_space_block(v);
        for (std::size_t i = 0; i < s; ++i) v[i] *= half[i];
    }
    for (int n = 0; n < steps; ++n) {
        const Vec w = potential_(t0 + (n + 0.5) * dt);
        std::vector<cplx> kick(s);
        for (std::size_t i = 0; i < s; ++i) kick[i] = std::exp(cplx(0.0, -dt) * w[i]) * inv;
        const bool last = n + 1 == steps;
        for (Eigen::Index c = 0; c < cols; ++c) {
            auto v = column(c);
            grid_.backward_space_block(v);
            for (std::size_t i = 0; i < s; ++i) v[i] *= kick[i];
            grid_.forward_space_block(v);
            if (last) {
                for (std::size_t i = 0; i < s; ++i) v[i] *= half[i] * static_cast<double>(s);
            } else {
                for (std::size_t i = 0; i < s; ++i) v[i] *= full[i];
            }
        }
    }
    for (Eigen::Index c = 0; c < cols; ++c) grid_.backward_space_block(column(c));
}

Vec SplitStep::propagate(std::span<const cplx> state, double t0, double t1, int steps) const {
    Eigen::MatrixXcd m(state.size(), 1);
    for (std::size_t i = 0; i < state.size(); ++i) m(i, 0) = state[i];
    propagate(m, t0, t1, steps);
    return Vec(m.data(), m.data() + m.size());
}

}  // namespace fm
