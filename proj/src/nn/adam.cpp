#include "tsgraph/nn/adam.hpp"

#include "tsgraph/error.hpp"

#include <cmath>

namespace tsg::nn {

void adam_step(std::span<Tensor> params, AdamState& state, const AdamConfig& cfg) {
    if (state.m.empty()) {
        for (const auto& p : params) {
            state.m.emplace_back(p.size(), 0.0);
            state.v.emplace_back(p.size(), 0.0);
        }
    }
    if (state.m.size() != params.size()) throw ShapeError("Adam state does not match the parameter list");
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto& p = params[k];
        auto& m = state.m[k];
        auto& v = state.v[k];
        if (m.size() != p.size()) throw ShapeError("Adam state does not match parameter " + std::to_string(k));
        const auto grad = p.grad();
        auto val = p.mutable_values();
        for (std::size_t i = 0; i < val.size(); ++i) {
            double g = grad.empty() ? 0.0 : grad[i];
            g += cfg.weight_decay * val[i];
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
            val[i] -= cfg.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.eps);
        }
    }
}

}  // namespace tsg::nn
