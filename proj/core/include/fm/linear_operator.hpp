#pragma once

#include "fm/grid.hpp"
#include "fm/types.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>

namespace fm {

class OperatorNode {
public:
    virtual ~OperatorNode() = default;
    virtual void apply(std::span<const cplx> in, std::span<cplx> out) const = 0;
    virtual void apply_adjoint(std::span<const cplx> in, std::span<cplx> out) const = 0;
    virtual bool self_adjoint() const = 0;
    virtual std::string describe() const = 0;
};

// Matrix-free operator on a product grid, built as an immutable composition tree.
class LinearOperator {
public:
    LinearOperator(ProductGrid grid, std::shared_ptr<const OperatorNode> node);

    const ProductGrid& grid() const { return grid_; }
    std::size_t dim() const { return grid_.size(); }

    void apply(std::span<const cplx> in, std::span<cplx> out) const;
    void apply_adjoint(std::span<const cplx> in, std::span<cplx> out) const;
    Vec operator()(std::span<const cplx> in) const;

    LinearOperator adjoint() const;
    bool is_self_adjoint() const { return node_->self_adjoint(); }
    std::string describe() const { return node_->describe(); }
    const std::shared_ptr<const OperatorNode>& node() const { return node_; }

private:
    ProductGrid grid_;
    std::shared_ptr<const OperatorNode> node_;
};

LinearOperator operator+(const LinearOperator& a, const LinearOperator& b);
LinearOperator operator-(const LinearOperator& a, const LinearOperator& b);
LinearOperator operator*(const LinearOperator& a, const LinearOperator& b);  // a after b
LinearOperator operator*(cplx c, const LinearOperator& a);
LinearOperator sum(const ProductGrid& grid, const std::vector<LinearOperator>& terms);
LinearOperator real_part(const LinearOperator& t);  // (T + T*)/2

LinearOperator identity(const ProductGrid& grid);
LinearOperator zero(const ProductGrid& grid);

// Multiplier by a function of the temporal mode index (length M).
LinearOperator mode_multiplier(const ProductGrid& grid, Vec values, std::string label);
// Multiplier by a function of the spatial wavevector (length spatial_size, transform order).
LinearOperator momentum_multiplier(const ProductGrid& grid, Vec values, std::string label);
// Joint multiplier in (mode, wavevector) (length size(), mode-major, transform order).
LinearOperator spectral_multiplier(const ProductGrid& grid, Vec values, std::string label);
// Multiplication by a time independent function of position (length spatial_size).
LinearOperator position_multiplier(const ProductGrid& grid, Vec values, std::string label);
// Multiplication by a function sampled at the M time samples (length size(), sample-major).
LinearOperator time_position_multiplier(const ProductGrid& grid, Vec values, std::string label);

// (shift - D_t)^{-1}; rejects shifts on the mode ladder omega*Z.
LinearOperator mode_resolvent(const ProductGrid& grid, double shift);
// (shift + symbol(p))^{-1} for a real momentum symbol; rejects |shift + symbol| < guard.
LinearOperator momentum_resolvent(const ProductGrid& grid, double shift, const RealVec& symbol, std::string label,
                                  double guard = 1e-12);

LinearOperator dense_operator(const ProductGrid& grid, Eigen::MatrixXcd matrix, std::string label);
LinearOperator custom_operator(const ProductGrid& grid,
                               std::function<void(std::span<const cplx>, std::span<cplx>)> apply,
                               std::function<void(std::span<const cplx>, std::span<cplx>)> apply_adjoint,
                               bool self_adjoint, std::string label);

// Common building blocks.
LinearOperator momentum_component(const ProductGrid& grid, int axis);        // p_axis
LinearOperator position_component(const ProductGrid& grid, int axis);        // x_axis
LinearOperator kinetic(const ProductGrid& grid);                             // p^2/2
LinearOperator mode_frequency(const ProductGrid& grid);                      // D_t
RealVec kinetic_symbol(const ProductGrid& grid);                             // |k|^2/2 per wavevector
RealVec projected_kinetic_symbol(const ProductGrid& grid, const Eigen::MatrixXd& projector);

inline constexpr std::size_t kDenseLimit = 4096;
Eigen::MatrixXcd to_dense(const LinearOperator& op, std::size_t max_dim = kDenseLimit);

}  // namespace fm
