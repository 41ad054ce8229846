#pragma once

// Dense 2-D tensors with reverse-mode differentiation.
//
// A Tensor is a shared handle: copies alias the same storage and gradient.
// Operations on tensors that require gradients record their inputs and a
// backward closure; Tensor::backward() walks that record in reverse
// topological order and accumulates into every reachable leaf's grad.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace tsg::nn {

namespace detail {

struct Node {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> value;
    std::vector<double> grad;  // allocated on first use
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward;

    std::vector<double>& ensure_grad() {
        if (grad.empty()) grad.assign(value.size(), 0.0);
        return grad;
    }
};

}  // namespace detail

class Tensor {
public:
    Tensor() = default;
    Tensor(std::size_t rows, std::size_t cols, bool requires_grad = false);
    Tensor(std::size_t rows, std::size_t cols, std::vector<double> values, bool requires_grad = false);

    bool defined() const noexcept { return node_ != nullptr; }
    std::size_t rows() const noexcept { return node_->rows; }
    std::size_t cols() const noexcept { return node_->cols; }
    std::size_t size() const noexcept { return node_->value.size(); }

    std::span<const double> values() const noexcept { return node_->value; }
    std::span<double> mutable_values() noexcept { return node_->value; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return node_->value[r * node_->cols + c]; }
    /// Value of a 1x1 tensor.
    double item() const;

    /// Empty until a backward pass reaches this tensor.
    std::span<const double> grad() const noexcept { return node_->grad; }
    std::span<double> mutable_grad() { return node_->ensure_grad(); }
    void zero_grad();

    bool requires_grad() const noexcept { return node_->requires_grad; }
    bool has_history() const noexcept { return static_cast<bool>(node_->backward); }

    /// Seeds d(this)/d(this) = 1 and propagates. The tensor must be 1x1 and
    /// produced by recorded operations.
    void backward() const;

    /// Builds an op result. History is kept only if some parent requires grad.
    static Tensor make_result(std::size_t rows, std::size_t cols, std::vector<double> values,
                              std::vector<Tensor> parents, std::function<void(detail::Node&)> backward);

    detail::Node& node() const noexcept { return *node_; }

private:
    std::shared_ptr<detail::Node> node_;
};

}  // namespace tsg::nn
