#pragma once

#include "fm/grid.hpp"

#include <cstdint>

namespace fm {

// Random smooth states: per mode a few Gaussian packets near the origin with random
// centre, width, momentum and complex amplitude. Deterministic for a given seed.
struct PacketOptions {
    int packets = 3;
    double centre_fraction = 0.1;               // |centre| <= fraction * L per axis
    double min_width_fraction = 0.03;           // width in [min, max] * L
    double max_width_fraction = 0.06;
    double momentum_fraction = 0.2;             // |k| <= fraction * k_max per axis
    double mode_decay = 0.5;                    // amplitude ~ exp(-decay * (n - mode_centre)^2)
    int mode_centre = 0;
};

std::vector<Vec> random_packets(const ProductGrid& grid, std::size_t count, std::uint64_t seed,
                                const PacketOptions& options = {});

// Mass (squared norm) of a full state outside the cube |x_i| <= radius.
double mass_outside_cube(const ProductGrid& grid, std::span<const cplx> state, double radius);

// In-box certification: relative mass outside |x_i| <= L/2 is below tol.
bool in_box(const ProductGrid& grid, std::span<const cplx> state, double tol = 1e-8);

}  // namespace fm
