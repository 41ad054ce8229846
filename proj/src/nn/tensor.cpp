#include "tsgraph/nn/tensor.hpp"

#include "tsgraph/error.hpp"

#include <unordered_set>
#include <utility>

namespace tsg::nn {

Tensor::Tensor(std::size_t rows, std::size_t cols, bool requires_grad)
    : Tensor(rows, cols, std::vector<double>(rows * cols, 0.0), requires_grad) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> values, bool requires_grad)
    : node_(std::make_shared<detail::Node>()) {
    if (values.size() != rows * cols) throw ShapeError("tensor values do not match shape");
    node_->rows = rows;
    node_->cols = cols;
    node_->value = std::move(values);
    node_->requires_grad = requires_grad;
}

double Tensor::item() const {
    if (size() != 1) throw ShapeError("item() on a tensor with " + std::to_string(size()) + " elements");
    return node_->value[0];
}

void Tensor::zero_grad() {
    if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

Tensor Tensor::make_result(std::size_t rows, std::size_t cols, std::vector<double> values,
                           std::vector<Tensor> parents, std::function<void(detail::Node&)> backward) {
    Tensor out(rows, cols, std::move(values));
    bool needs = false;
    for (const auto& p : parents) needs = needs || p.requires_grad();
    if (needs) {
        out.node_->requires_grad = true;
        out.node_->parents.reserve(parents.size());
        for (auto& p : parents) out.node_->parents.push_back(std::move(p.node_));
        out.node_->backward = std::move(backward);
    }
    return out;
}

void Tensor::backward() const {
    if (!defined() || !has_history()) {
        throw StateError("backward() called on a tensor with no recorded forward pass");
    }
    if (size() != 1) throw ShapeError("backward() needs a scalar loss");

    // iterative post-order DFS gives a topological order
    std::vector<detail::Node*> order;
    std::unordered_set<detail::Node*> seen;
    std::vector<std::pair<detail::Node*, std::size_t>> stack{{node_.get(), 0}};
    seen.insert(node_.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            detail::Node* p = node->parents[next++].get();
            if (p->requires_grad && p->backward && seen.insert(p).second) stack.emplace_back(p, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    for (auto* n : order) {
        n->grad.assign(n->value.size(), 0.0);
    }
    node_->grad[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        (*it)->backward(**it);
    }
}

}  // namespace tsg::nn
