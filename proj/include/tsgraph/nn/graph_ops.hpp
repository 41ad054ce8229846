#pragma once

// Sparse graph-attention primitives. Per-edge quantities are E x 1 tensors
// laid out in the adjacency's CSR order (row i holds the neighbors of i,
// including i itself).

#include "tsgraph/graph.hpp"
#include "tsgraph/nn/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace tsg::nn {

struct Adjacency {
    std::size_t n = 0;
    std::vector<std::size_t> offsets;       // n + 1
    std::vector<std::uint32_t> neighbors;   // sorted within each row
    std::vector<std::size_t> reverse;       // entry (i, j) -> position of entry (j, i)

    std::size_t entry_count() const noexcept { return neighbors.size(); }

    /// Undirected edges mirrored in both directions plus a self-loop per node.
    static std::shared_ptr<const Adjacency> from_edges(std::size_t n, std::span<const Edge> edges);
};

using AdjacencyPtr = std::shared_ptr<const Adjacency>;

/// e_ij = LeakyReLU(a^T [z_i || z_j]) for each j in N(i); z is n x F, a is 2F x 1.
Tensor attention_scores(const Tensor& z, const Tensor& a, const AdjacencyPtr& adj, double slope);

/// Softmax of the scores within each neighborhood.
Tensor attention_normalize(const Tensor& scores, const AdjacencyPtr& adj);

/// attention_normalize(attention_scores(z, a, adj, slope), adj) as one op.
Tensor attention_coefficients(const Tensor& z, const Tensor& a, const AdjacencyPtr& adj, double slope);

/// out_i = sum_j alpha_ij z_j.
Tensor attention_aggregate(const Tensor& alpha, const Tensor& z, const AdjacencyPtr& adj);

}  // namespace tsg::nn
