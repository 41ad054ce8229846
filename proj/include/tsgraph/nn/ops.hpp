#pragma once

#include "tsgraph/nn/tensor.hpp"

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace tsg::nn {

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
/// a (n x c) + bias (1 x c) broadcast over rows.
Tensor add_row(const Tensor& a, const Tensor& bias);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
/// Elementwise mean of equally shaped tensors.
Tensor mean_of(std::span<const Tensor> parts);

Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor elu(const Tensor& a, double alpha = 1.0);
Tensor leaky_relu(const Tensor& a, double slope);

Tensor concat_cols(std::span<const Tensor> parts);
Tensor concat_rows(std::span<const Tensor> parts);
Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t count);
Tensor reshape(const Tensor& a, std::size_t rows, std::size_t cols);

/// Column means, n x D -> 1 x D.
Tensor mean_rows(const Tensor& a);
/// Sum of all entries, -> 1 x 1.
Tensor sum(const Tensor& a);

/// Row-wise log-softmax with max subtraction.
Tensor log_softmax_rows(const Tensor& a);
/// Mean over rows of -logp[b, labels[b]], -> 1 x 1.
Tensor nll_loss(const Tensor& logp, std::span<const int> labels);

/// Inverted dropout: zero with probability p, scale survivors by 1 / (1 - p).
Tensor dropout(const Tensor& a, double p, std::mt19937_64& rng);

}  // namespace tsg::nn
