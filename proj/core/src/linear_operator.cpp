#include "fm/linear_operator.hpp"

#include <algorithm>
#include <cmath>

namespace fm {

namespace {

bool all_real(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](cplx z) { return z.imag() == 0.0; });
}

Vec conjugated(const Vec& v) {
    Vec out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](cplx z) { return std::conj(z); });
    return out;
}

class ModeMultiplier final : public OperatorNode {
public:
    ModeMultiplier(const ProductGrid& g, Vec v, std::string label)
        : spatial_(g.spatial_size()), values_(std::move(v)), label_(std::move(label)), real_(all_real(values_)) {}
    void apply(std::span<const cplx> in, std::span<cplx> out) const override { run(values_, in, out, false); }
    void apply_adjoint(std::span<const cplx> in, std::span<cplx> out) const override { run(values_, in, out, true); }
    bool self_adjoint() const override { return real_; }
    std::string describe() const override { return "mode[" + label_ + "]"; }

private:
    void run(const Vec& v, std::span<const cplx> in, std::span<cplx> out, bool conj) const {
        for (std::size_t m = 0; m < v.size(); ++m) {
            const cplx f = conj ? std::conj(v[m]) : v[m];
            for (std::size_t i = 0; i < spatial_; ++i) out[m * spatial_ + i] = f * in[m * spatial_ + i];
        }
    }
    std::size_t spatial_;
    Vec values_;
    std::string label_;
    bool real_;
};

// Fourier multiplier in the spatial variables; values either per wavevector (broadcast over
// modes) or per (mode, wavevector).
class MomentumMultiplier final : public OperatorNode {
public:
    MomentumMultiplier(const ProductGrid& g, Vec v, std::string label, bool per_mode)
        : grid_(g), values_(std::move(v)), adj_(conjugated(values_)), label_(std::move(label)),
          per_mode_(per_mode), real_(all_real(values_)) {}
    void apply(std::span<const cplx> in, std::span<cplx> out) const override { run(values_, in, out); }
    void apply_adjoint(std::span<const cplx> in, std::span<cplx> out) const override { run(adj_, in, out); }
    bool self_adjoint() const override { return real_; }
    std::string describe() const override { return (per_mode_ ? "spec[" : "mom[") + label_ + "]"; }

private:
    void run(const Vec& v, std::span<const cplx> in, std::span<cplx> out) const {
        std::copy(in.begin(), in.end(), out.begin());
        grid_.forward_space(out);
        const std::size_t s = grid_.spatial_size();
        const double norm = 1.0 / static_cast<double>(s);
        for (int m = 0; m < grid_.modes(); ++m) {
            const std::size_t off = per_mode_ ? m * s : 0;
            for (std::size_t i = 0; i < s; ++i) out[m * s + i] *= v[off + i] * norm;
        }
        grid_.backward_space(out);
    }
    ProductGrid grid_;
    Vec values_, adj_;
    std::string label_;
    bool per_mode_;
    bool real_;
};

class PositionMultiplier final : public OperatorNode {
public:
    PositionMultiplier(const ProductGrid& g, Vec v, std::string label)
        : spatial_(g.spatial_size()), modes_(g.modes()), values_(std::move(v)), label_(std::move(label)),
          real_(all_real(values_)) {}
    void apply(std::span<const cplx> in, std::span<cplx> out) const override { run(in, out, false); }
    void apply_adjoint(std::span<const cplx> in, std::span<cplx> out) const override { run(in, out, true); }
    bool self_adjoint() const override { return real_; }
    std::string describe() const override { return "pos[" + label_ + "]"; }

private:
    void run(std::span<const cplx> in, std::span<cplx> out, bool conj) const {
        for (int m = 0; m < modes_; ++m)
            for (std::size_t i = 0; i < spatial_; ++i) {
                const cplx f = conj ? std::conj(values_[i]) : values_[i];
                out[m * spatial_ + i] = f * in[m * spatial_ + i];
            }
    }
    std::size_t spatial_;
    int modes_;
    Vec values_;
    std::string label_;
    bool real_;
};

class TimePositionMultiplier final : public OperatorNode {
public:
    TimePositionMultiplier(const ProductGrid& g, Vec v, std::string label)
        : grid_(g), values_(std::move(v)), adj_(conjugated(values_)), label_(std::move(label)),
          real_(all_real(values_)) {}
    void apply(std::span<const cplx> in, std::span<cplx> out) const override { run(values_, in, out); }
    void apply_adjoint(std::span<const cplx> in, std::span<cplx> out) const override { run(adj_, in, out); }
    bool self_adjoint() const override { return real_; }
    std::string describe() const override { return "tpos[" + label_ + "]"; }

private:
    void run(const Vec& v, std::span<const cplx> in, std::span<cplx> out) const {
        std::copy(in.begin(), in.end(), out.begin());
        grid_.modes_to_time(out);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] *= v[i];
        grid_.time_to_modes(out);
    }
    ProductGrid grid_;
    Vec values_, adj_;
    std::string label_;
    bool real_;
};

class SumNode final : public OperatorNode {
public:
    explicit SumNode(std::vector<std::shared_ptr<const OperatorNode>> terms) : terms_(std::move(terms)) {}
    void apply(std::span<const cplx> in, std::span<cplx> out) const override { run(in, out, false); }
    void apply_adjoint(std::span<const cplx> in, std::span<cplx> out) const override { run(in, out, true); }
    bool self_adjoint() const override {
        return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t->self_adjoint(); });
    }
    std::string describe() const override {
        std::string s = "(";
        for (std::size_t i = 0; i < terms_.size(); ++i) s += (i ? " + " : "") + terms_[i]->describe();
        return s + ")";
    }

private:
    void run(std::span<const cplx> in, std::span<cplx> out, bool adj) const {
        std::fill(out.begin(), out.end(), cplx{});
        Vec tmp(in.size());
        for (const auto& t : terms_) {
            adj ? t->apply_adjoint(in, tmp) : t->apply(in, tmp);
            for (std::size_t i = 0; i < tmp.size(); ++i) out[i] += tmp[i];
        }
    }
    std::vector<std::shared_ptr<const OperatorNode>> terms_;
};

class ProductNode final : public OperatorNode {
public:
    ProductNode(std::shared_ptr<const OperatorNode> left, std::shared_ptr<const OperatorNode> right)
        : left_(std::move(left)), right_(std::move(right)) {}
    void apply(std::span<const cplx> in, std::span<cplx> out) const override {
        Vec tmp(in.size());
        right_->apply(in, tmp);
        left_->apply(tmp, out);
    }
    void apply_adjoint(std::span<const cplx> in, std::span<cplx> out) const override {
        Vec tmp(in.size());
        left_->apply_adjoint(in, tmp);
        right_->apply_adjoint(tmp, out);
    }
    bool self_adjoint() const override { return false; }
    std::string describe() const override { return left_->describe() + "·" + right_->describe(); }

private:
    std::shared_ptr<const OperatorNode> left_, right_;
};

class ScaledNode final : public OperatorNode {
public:
    ScaledNode(cplx c, std::shared_ptr<const OperatorNode> t) : c_(c), t_(std::move(t)) {}
    void apply(std::span<const cplx> in, std::span<cplx> out) const override {
        t_->apply(in, out);
        scale(c_, out);
    }
    void apply_adjoint(std::span<const cplx> in, std::span<cplx> out) const override {
        t_->apply_adjoint(in, out);
        scale(std::conj(c_), out);
    }
    bool self_adjoint() const override { return c_.imag() == 0.0 && t_->self_adjoint(); }
    std::string describe() const override {
        return "(" + std::to_string(c_.real()) + (c_.imag() != 0.0 ? "+" + std::to_string(c_.imag()) + "i" : "") +
               ")" + t_->describe();
    }

private:
    cplx c_;
    std::shared_ptr<const OperatorNode> t_;
};

class RealPartNode final : public OperatorNode {
public:
    explicit RealPartNode(std::shared_ptr<const OperatorNode> t) : t_(std::move(t)) {}
    void apply(std::span<const cplx> in, std::span<cplx> out) const override {
        Vec tmp(in.size());
        t_->apply(in, out);
        t_->apply_adjoint(in, tmp);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (out[i] + tmp[i]);
    }
    void apply_adjoint(std::span<const cplx> in, std::span<cplx> out) const override { apply(in, out); }
    bool self_adjoint() const override { return true; }
    std::string describe() const override { return "Re(" + t_->describe() + ")"; }

private:
    std::shared_ptr<const OperatorNode> t_;
};

class AdjointNode final : public OperatorNode {
public:
    explicit AdjointNode(std::shared_ptr<const OperatorNode> t) : t_(std::move(t)) {}
    void apply(std::span<const cplx> in, std::span<cplx> out) const override { t_->apply_adjoint(in, out); }
    void apply_adjoint(std::span<const cplx> in, std::span<cplx> out) const override { t_->apply(in, out); }
    bool self_adjoint() const override { return t_->self_adjoint(); }
    std::string describe() const override { return "(" + t_->describe() + ")*"; }

private:
    std::shared_ptr<const OperatorNode> t_;
};

class IdentityNode final : public OperatorNode {
public:
    void apply(std::span<const cplx> in, std::span<cplx> out) const override { std::copy(in.begin(), in.end(), out.begin()); }
    void apply_adjoint(std::span<const cplx> in, std::span<cplx> out) const override { apply(in, out); }
    bool self_adjoint() const override { return true; }
    std::string describe() const override { return "I"; }
};

class ZeroNode final : public OperatorNode {
public:
    void apply(std::span<const cplx>, std::span<cplx> out) const override { std::fill(out.begin(), out.end(), cplx{}); }
    void apply_adjoint(std::span<const cplx> in, std::span<cplx> out) const override { apply(in, out); }
    bool self_adjoint() const override { return true; }
    std::string describe() const override { return "0"; }
};

class DenseNode final : public OperatorNode {
public:
    DenseNode(Eigen::MatrixXcd m, std::string label)
        : m_(std::move(m)), label_(std::move(label)), sa_((m_ - m_.adjoint()).norm() <= 1e-14 * (1.0 + m_.norm())) {}
    void apply(std::span<const cplx> in, std::span<cplx> out) const override {
        Eigen::Map<const Eigen::VectorXcd> x(in.data(), in.size());
        Eigen::Map<Eigen::VectorXcd> y(out.data(), out.size());
        y.noalias() = m_ * x;
    }
    void apply_adjoint(std::span<const cplx> in, std::span<cplx> out) const override {
        Eigen::Map<const Eigen::VectorXcd> x(in.data(), in.size());
        Eigen::Map<Eigen::VectorXcd> y(out.data(), out.size());
        y.noalias() = m_.adjoint() * x;
    }
    bool self_adjoint() const override { return sa_; }
    std::string describe() const override { return "dense[" + label_ + "]"; }

private:
    Eigen::MatrixXcd m_;
    std::string label_;
    bool sa_;
};

class CustomNode final : public OperatorNode {
public:
    using Fn = std::function<void(std::span<const cplx>, std::span<cplx>)>;
    CustomNode(Fn a, Fn b, bool sa, std::string label) : a_(std::move(a)), b_(std::move(b)), sa_(sa), label_(std::move(label)) {}
    void apply(std::span<const cplx> in, std::span<cplx> out) const override { a_(in, out); }
    void apply_adjoint(std::span<const cplx> in, std::span<cplx> out) const override { b_(in, out); }
    bool self_adjoint() const override { return sa_; }
    std::string describe() const override { return label_; }

private:
    Fn a_, b_;
    bool sa_;
    std::string label_;
};

void check_same(const LinearOperator& a, const LinearOperator& b) {
    require(a.grid().same_shape(b.grid()), ErrorKind::InvalidInput, "operators live on different grids");
}

}  // namespace

LinearOperator::LinearOperator(ProductGrid grid, std::shared_ptr<const OperatorNode> node)
    : grid_(std::move(grid)), node_(std::move(node)) {}

void LinearOperator::apply(std::span<const cplx> in, std::span<cplx> out) const {
    require(in.size() == dim() && out.size() == dim(), ErrorKind::InvalidInput, "state has wrong length");
    node_->apply(in, out);
}

void LinearOperator::apply_adjoint(std::span<const cplx> in, std::span<cplx> out) const {
    require(in.size() == dim() && out.size() == dim(), ErrorKind::InvalidInput, "state has wrong length");
    node_->apply_adjoint(in, out);
}

Vec LinearOperator::operator()(std::span<const cplx> in) const {
    Vec out(dim());
    apply(in, out);
    return out;
}

LinearOperator LinearOperator::adjoint() const {
    if (is_self_adjoint()) return *this;
    return {grid_, std::make_shared<AdjointNode>(node_)};
}

LinearOperator operator+(const LinearOperator& a, const LinearOperator& b) {
    check_same(a, b);
    return {a.grid(), std::make_shared<SumNode>(std::vector{a.node(), b.node()})};
}

LinearOperator operator-(const LinearOperator& a, const LinearOperator& b) { return a + cplx(-1.0) * b; }

LinearOperator operator*(const LinearOperator& a, const LinearOperator& b) {
    check_same(a, b);
    return {a.grid(), std::make_shared<ProductNode>(a.node(), b.node())};
}

LinearOperator operator*(cplx c, const LinearOperator& a) { return {a.grid(), std::make_shared<ScaledNode>(c, a.node())}; }

LinearOperator sum(const ProductGrid& grid, const std::vector<LinearOperator>& terms) {
    if (terms.empty()) return zero(grid);
    if (terms.size() == 1) return terms.front();
    std::vector<std::shared_ptr<const OperatorNode>> nodes;
    for (const auto& t : terms) {
        require(t.grid().same_shape(grid), ErrorKind::InvalidInput, "operators live on different grids");
        nodes.push_back(t.node());
    }
    return {grid, std::make_shared<SumNode>(std::move(nodes))};
}

LinearOperator real_part(const LinearOperator& t) {
    if (t.is_self_adjoint()) return t;
    return {t.grid(), std::make_shared<RealPartNode>(t.node())};
}

LinearOperator identity(const ProductGrid& grid) { return {grid, std::make_shared<IdentityNode>()}; }
LinearOperator zero(const ProductGrid& grid) { return {grid, std::make_shared<ZeroNode>()}; }

LinearOperator mode_multiplier(const ProductGrid& grid, Vec values, std::string label) {
    require(values.size() == static_cast<std::size_t>(grid.modes()), ErrorKind::InvalidInput, "one value per mode");
    return {grid, std::make_shared<ModeMultiplier>(grid, std::move(values), std::move(label))};
}

LinearOperator momentum_multiplier(const ProductGrid& grid, Vec values, std::string label) {
    require(values.size() == grid.spatial_size(), ErrorKind::InvalidInput, "one value per wavevector");
    return {grid, std::make_shared<MomentumMultiplier>(grid, std::move(values), std::move(label), false)};
}

LinearOperator spectral_multiplier(const ProductGrid& grid, Vec values, std::string label) {
    require(values.size() == grid.size(), ErrorKind::InvalidInput, "one value per (mode, wavevector)");
    return {grid, std::make_shared<MomentumMultiplier>(grid, std::move(values), std::move(label), true)};
}

LinearOperator position_multiplier(const ProductGrid& grid, Vec values, std::string label) {
    require(values.size() == grid.spatial_size(), ErrorKind::InvalidInput, "one value per grid point");
    return {grid, std::make_shared<PositionMultiplier>(grid, std::move(values), std::move(label))};
}

LinearOperator time_position_multiplier(const ProductGrid& grid, Vec values, std::string label) {
    require(values.size() == grid.size(), ErrorKind::InvalidInput, "one value per (time sample, grid point)");
    return {grid, std::make_shared<TimePositionMultiplier>(grid, std::move(values), std::move(label))};
}

LinearOperator mode_resolvent(const ProductGrid& grid, double shift) {
    const double w = grid.omega();
    const double dist = std::abs(shift - w * std::round(shift / w));
    require(dist >= 1e-9 * w, ErrorKind::SingularResolvent,
            "shift " + std::to_string(shift) + " lies on the mode ladder omega*Z");
    Vec v(grid.modes());
    for (int m = 0; m < grid.modes(); ++m) v[m] = 1.0 / (shift - grid.mode_number(m) * w);
    return mode_multiplier(grid, std::move(v), "(" + std::to_string(shift) + "-Dt)^-1");
}

LinearOperator momentum_resolvent(const ProductGrid& grid, double shift, const RealVec& symbol, std::string label,
                                  double guard) {
    require(symbol.size() == grid.spatial_size(), ErrorKind::InvalidInput, "one symbol value per wavevector");
    Vec v(symbol.size());
    for (std::size_t i = 0; i < symbol.size(); ++i) {
        const double d = shift + symbol[i];
        require(std::abs(d) >= guard, ErrorKind::SingularResolvent, "resolvent pole on the momentum grid");
        v[i] = 1.0 / d;
    }
    return momentum_multiplier(grid, std::move(v), "(" + std::to_string(shift) + "+" + label + ")^-1");
}

LinearOperator dense_operator(const ProductGrid& grid, Eigen::MatrixXcd matrix, std::string label) {
    require(static_cast<std::size_t>(matrix.rows()) == grid.size() && matrix.rows() == matrix.cols(),
            ErrorKind::InvalidInput, "dense matrix does not match grid");
    return {grid, std::make_shared<DenseNode>(std::move(matrix), std::move(label))};
}

LinearOperator custom_operator(const ProductGrid& grid, std::function<void(std::span<const cplx>, std::span<cplx>)> apply,
                               std::function<void(std::span<const cplx>, std::span<cplx>)> apply_adjoint,
                               bool self_adjoint, std::string label) {
    return {grid, std::make_shared<CustomNode>(std::move(apply), std::move(apply_adjoint), self_adjoint, std::move(label))};
}

LinearOperator momentum_component(const ProductGrid& grid, int axis) {
    require(axis >= 0 && axis < grid.dim(), ErrorKind::InvalidInput, "axis out of range");
    Vec v(grid.spatial_size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = grid.momentum(i)[axis];
    return momentum_multiplier(grid, std::move(v), "p" + std::to_string(axis));
}

LinearOperator position_component(const ProductGrid& grid, int axis) {
    require(axis >= 0 && axis < grid.dim(), ErrorKind::InvalidInput, "axis out of range");
    Vec v(grid.spatial_size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = grid.position(i)[axis];
    return position_multiplier(grid, std::move(v), "x" + std::to_string(axis));
}

RealVec kinetic_symbol(const ProductGrid& grid) {
    RealVec v(grid.spatial_size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto k = grid.momentum(i);
        v[i] = 0.5 * (k[0] * k[0] + k[1] * k[1]);
    }
    return v;
}

RealVec projected_kinetic_symbol(const ProductGrid& grid, const Eigen::MatrixXd& projector) {
    require(projector.rows() == grid.dim() && projector.cols() == grid.dim(), ErrorKind::InvalidInput,
            "projector does not match grid dimension");
    RealVec v(grid.spatial_size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto k = grid.momentum(i);
        Eigen::VectorXd kv(grid.dim());
        for (int d = 0; d < grid.dim(); ++d) kv(d) = k[d];
        v[i] = 0.5 * kv.dot(projector * kv);
    }
    return v;
}

LinearOperator kinetic(const ProductGrid& grid) {
    auto s = kinetic_symbol(grid);
    return momentum_multiplier(grid, Vec(s.begin(), s.end()), "p^2/2");
}

LinearOperator mode_frequency(const ProductGrid& grid) {
    Vec v(grid.modes());
    for (int m = 0; m < grid.modes(); ++m) v[m] = grid.mode_number(m) * grid.omega();
    return mode_multiplier(grid, std::move(v), "Dt");
}

Eigen::MatrixXcd to_dense(const LinearOperator& op, std::size_t max_dim) {
    const std::size_t n = op.dim();
    require(n <= max_dim, ErrorKind::TooLarge,
            "dimension " + std::to_string(n) + " exceeds dense limit " + std::to_string(max_dim));
    Eigen::MatrixXcd out(n, n);
    Vec e(n, cplx{}), col(n);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        op.apply(e, col);
        e[j] = 0.0;
        for (std::size_t i = 0; i < n; ++i) out(i, j) = col[i];
    }
    return out;
}

}  // namespace fm
