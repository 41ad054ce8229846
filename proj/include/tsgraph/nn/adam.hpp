#pragma once

#include "tsgraph/nn/tensor.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace tsg::nn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;  // L2 term added to the gradient
};

struct AdamState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    std::size_t step = 0;
};

/// One bias-corrected Adam update from the parameters' accumulated grads.
/// Parameters without a grad buffer are treated as having zero gradient.
void adam_step(std::span<Tensor> params, AdamState& state, const AdamConfig& cfg);

}  // namespace tsg::nn
