#include "fm/sampling.hpp"

#include <cmath>
#include <random>

namespace fm {

std::vector<Vec> random_packets(const ProductGrid& grid, std::size_t count, std::uint64_t seed,
                                const PacketOptions& options) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> fraction(options.min_width_fraction, options.max_width_fraction);
    std::normal_distribution<double> normal;
    const double L = grid.half_width();
    const double kmax = M_PI / grid.spacing();
    const std::size_t s = grid.spatial_size();
    const int dim = grid.dim();

    std::vector<Vec> out;
    out.reserve(count);
    for (std::size_t c = 0; c < count; ++c) {
        Vec state(grid.size(), cplx{});
        for (int m = 0; m < grid.modes(); ++m) {
            const int n = grid.mode_number(m);
            const double mode_weight = std::exp(-options.mode_decay * (n - options.mode_centre) * (n - options.mode_centre));
            for (int p = 0; p < options.packets; ++p) {
                std::array<double, 2> centre{}, momentum{}, width{};
                for (int d = 0; d < dim; ++d) {
                    centre[d] = options.centre_fraction * L * unit(rng);
                    momentum[d] = options.momentum_fraction * kmax * unit(rng);
                    width[d] = fraction(rng) * L;
                }
                const cplx amp = mode_weight * cplx(normal(rng), normal(rng));
                for (std::size_t i = 0; i < s; ++i) {
                    const auto x = grid.position(i);
                    double arg = 0.0, phase = 0.0;
                    for (int d = 0; d < dim; ++d) {
                        const double y = (x[d] - centre[d]) / width[d];
                        arg += 0.5 * y * y;
                        phase += momentum[d] * x[d];
                    }
                    state[m * s + i] += amp * std::exp(-arg) * std::polar(1.0, phase);
                }
            }
        }
        const double nrm = norm(state);
        for (auto& v : state) v /= nrm;
        out.push_back(std::move(state));
    }
    return out;
}

double mass_outside_cube(const ProductGrid& grid, std::span<const cplx> state, double radius) {
    const std::size_t s = grid.spatial_size();
    double mass = 0.0;
    for (int m = 0; m < grid.modes(); ++m)
        for (std::size_t i = 0; i < s; ++i) {
            const auto x = grid.position(i);
            bool outside = false;
            for (int d = 0; d < grid.dim(); ++d) outside = outside || std::abs(x[d]) > radius;
            if (outside) mass += std::norm(state[m * s + i]);
        }
    return mass;
}

bool in_box(const ProductGrid& grid, std::span<const cplx> state, double tol) {
    const double total = norm(state);
    return mass_outside_cube(grid, state, 0.5 * grid.half_width()) <= tol * total * total;
}

}  // namespace fm
