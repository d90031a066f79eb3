#pragma once

#include "fm/grid.hpp"

#include <Eigen/Dense>

#include <functional>

namespace fm {

// Strang splitting for i d/dt psi = (kinetic(p) + W(t, x)) psi on one spatial block of a grid:
// half kinetic step, potential sampled at the step midpoint, half kinetic step.
class SplitStep {
public:
    using PotentialAt = std::function<Vec(double)>;  // spatial samples of W(t, .)

    SplitStep(ProductGrid grid, PotentialAt potential, RealVec kinetic_symbol);

    const ProductGrid& grid() const { return grid_; }

    // Propagates every column of `states` (spatial_size rows) from t0 to t1 in `steps` steps.
    void propagate(Eigen::MatrixXcd& states, double t0, double t1, int steps) const;
    Vec propagate(std::span<const cplx> state, double t0, double t1, int steps) const;

private:
    ProductGrid grid_;
    PotentialAt potential_;
    RealVec kinetic_;
};

}  // namespace fm
