#pragma once

// Graph attention + LSTM classifier.
//
//   node features (n x F)
//     -> GAT layers (multi-head; hidden layers concatenate heads, the final
//        layer averages or concatenates per config), ELU after each head
//     -> global mean pool (1 x D)
//     -> reshape to seq_len steps of width D / seq_len (or, with
//        lstm_input = node_sequence, the n node embeddings in node order)
//     -> LSTM, final hidden state (1 x H)
//     -> affine head + log-softmax (1 x C)
//
// Every neighborhood includes its own node, so isolated nodes still attend
// to themselves.

#include "tsgraph/graph.hpp"
#include "tsgraph/nn/graph_ops.hpp"
#include "tsgraph/nn/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace tsg::nn {

enum class HeadMerge { concat, mean };
enum class LstmInput { reshape, node_sequence };

struct ModelConfig {
    std::size_t input_dim = 32;
    std::size_t heads = 4;
    std::size_t hidden_per_head = 16;
    std::size_t gat_layers = 2;
    HeadMerge final_merge = HeadMerge::mean;
    std::size_t pooled_dim = 64;
    LstmInput lstm_input = LstmInput::reshape;
    std::size_t seq_len = 4;
    std::size_t lstm_hidden = 32;
    std::size_t classes = 10;
    double leaky_slope = 0.2;
    double elu_alpha = 1.0;
    double dropout = 0.0;

    /// Throws ConfigError when the dimension chain does not close.
    void validate() const;

    /// Output width per head of GAT layer `layer`.
    std::size_t head_dim(std::size_t layer) const;
    std::size_t layer_input_dim(std::size_t layer) const;
    std::size_t lstm_input_dim() const;

    bool operator==(const ModelConfig&) const = default;
};

struct GatLayerParams {
    std::vector<Tensor> weight;     // per head, F_in x F_out
    std::vector<Tensor> attention;  // per head, 2 F_out x 1
    HeadMerge merge = HeadMerge::concat;
    double leaky_slope = 0.2;

    std::size_t heads() const noexcept { return weight.size(); }
};

/// Gate weights act on [h_{t-1} || x_t], shape (H + d_in) x H.
struct LstmParams {
    Tensor w_input, w_forget, w_output, w_candidate;
    Tensor b_input, b_forget, b_output, b_candidate;  // 1 x H

    std::size_t hidden() const noexcept { return b_input.cols(); }
};

struct ClassifierHead {
    Tensor weight;  // H x C
    Tensor bias;    // 1 x C
};

struct NamedTensor {
    std::string name;
    Tensor tensor;
};

/// Graph prepared for the model: features n x F and the self-looped adjacency.
struct GraphInput {
    Tensor features;
    AdjacencyPtr adjacency;
    int label = 0;
};

GraphInput make_graph_input(const SimilarityGraph& g);

/// Attention coefficients recorded during a forward pass, [layer][head].
struct ForwardTrace {
    std::vector<std::vector<Tensor>> attention;
    Tensor pooled;
};

Tensor gat_forward(const Tensor& h, const AdjacencyPtr& adj, const GatLayerParams& layer, double elu_alpha,
                   std::vector<Tensor>* attention_out = nullptr);
Tensor global_mean_pool(const Tensor& h);
/// 1 x D -> steps x (D / steps), row-major.
Tensor reshape_to_sequence(const Tensor& pooled, std::size_t steps);
/// Runs from h = c = 0 and returns the final hidden state (1 x H).
Tensor lstm_forward(const Tensor& seq, const LstmParams& params);
Tensor classify_forward(const Tensor& hidden, const ClassifierHead& head);

class Model {
public:
    /// Glorot-uniform weights from `seed`, zero biases.
    Model(ModelConfig config, std::uint64_t seed);

    Model(const Model& other);
    Model& operator=(const Model& other);
    Model(Model&&) noexcept = default;
    Model& operator=(Model&&) noexcept = default;

    const ModelConfig& config() const noexcept { return config_; }

    std::vector<GatLayerParams>& gat_layers() noexcept { return gat_; }
    const std::vector<GatLayerParams>& gat_layers() const noexcept { return gat_; }
    LstmParams& lstm() noexcept { return lstm_; }
    const LstmParams& lstm() const noexcept { return lstm_; }
    ClassifierHead& head() noexcept { return head_; }
    const ClassifierHead& head() const noexcept { return head_; }

    /// Stable order: GAT layers (per head W then a), LSTM, head.
    std::vector<NamedTensor> named_parameters() const;
    std::vector<Tensor> parameters() const;
    std::size_t parameter_count() const;

    /// Log-probabilities, 1 x C. `dropout_rng` enables dropout on GAT inputs.
    Tensor forward(const GraphInput& g, ForwardTrace* trace = nullptr,
                   std::mt19937_64* dropout_rng = nullptr) const;

    /// Pooled graph vector, 1 x D.
    Tensor embed(const GraphInput& g) const;

    void zero_grad();

private:
    Tensor node_embeddings(const GraphInput& g, ForwardTrace* trace, std::mt19937_64* dropout_rng) const;

    ModelConfig config_;
    std::vector<GatLayerParams> gat_;
    LstmParams lstm_;
    ClassifierHead head_;
};

}  // namespace tsg::nn
