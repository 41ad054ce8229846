#include "tsgraph/nn/model.hpp"

#include "tsgraph/error.hpp"
#include "tsgraph/nn/ops.hpp"

#include <cmath>

namespace tsg::nn {

void ModelConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("model config: " + msg); };
    if (input_dim == 0) fail("input_dim must be positive");
    if (heads == 0) fail("heads must be positive");
    if (hidden_per_head == 0) fail("hidden_per_head must be positive");
    if (gat_layers == 0) fail("at least one GAT layer is required");
    if (pooled_dim == 0) fail("pooled_dim must be positive");
    if (lstm_hidden == 0) fail("lstm_hidden must be positive");
    if (classes < 2) fail("at least two classes are required");
    if (final_merge == HeadMerge::concat && pooled_dim % heads != 0) {
        fail("pooled_dim " + std::to_string(pooled_dim) + " is not divisible by heads " + std::to_string(heads));
    }
    if (lstm_input == LstmInput::reshape) {
        if (seq_len == 0) fail("seq_len must be positive");
        if (pooled_dim % seq_len != 0) {
            fail("pooled_dim " + std::to_string(pooled_dim) + " is not divisible by seq_len " +
                 std::to_string(seq_len));
        }
    }
    if (!(leaky_slope >= 0.0)) fail("leaky_slope must be non-negative");
    if (!(elu_alpha > 0.0)) fail("elu_alpha must be positive");
    if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
}

std::size_t ModelConfig::head_dim(std::size_t layer) const {
    if (layer + 1 < gat_layers) return hidden_per_head;
    return final_merge == HeadMerge::mean ? pooled_dim : pooled_dim / heads;
}

std::size_t ModelConfig::layer_input_dim(std::size_t layer) const {
    return layer == 0 ? input_dim : heads * hidden_per_head;
}

std::size_t ModelConfig::lstm_input_dim() const {
    return lstm_input == LstmInput::reshape ? pooled_dim / seq_len : pooled_dim;
}

GraphInput make_graph_input(const SimilarityGraph& g) {
    const std::size_t n = g.node_count();
    if (n == 0) throw ArgumentError("graph without nodes");
    std::vector<double> feats(g.node_features.begin(), g.node_features.end());
    if (feats.size() != n * g.feature_dim()) throw ShapeError("graph feature buffer does not match its shape");
    return {Tensor(n, g.feature_dim(), std::move(feats)), Adjacency::from_edges(n, g.edges), g.label};
}

Tensor gat_forward(const Tensor& h, const AdjacencyPtr& adj, const GatLayerParams& layer, double elu_alpha,
                   std::vector<Tensor>* attention_out) {
    if (layer.heads() == 0 || layer.attention.size() != layer.heads()) throw ShapeError("malformed GAT layer");
    std::vector<Tensor> outs;
    outs.reserve(layer.heads());
    for (std::size_t k = 0; k < layer.heads(); ++k) {
        if (h.cols() != layer.weight[k].rows()) {
            throw ShapeError("gat_forward: features have " + std::to_string(h.cols()) + " columns, W expects " +
                             std::to_string(layer.weight[k].rows()));
        }
        const Tensor z = matmul(h, layer.weight[k]);
        const Tensor alpha = attention_coefficients(z, layer.attention[k], adj, layer.leaky_slope);
        if (attention_out) attention_out->push_back(alpha);
        outs.push_back(elu(attention_aggregate(alpha, z, adj), elu_alpha));
    }
    if (outs.size() == 1) return outs.front();
    return layer.merge == HeadMerge::concat ? concat_cols(outs) : mean_of(outs);
}

Tensor global_mean_pool(const Tensor& h) { return mean_rows(h); }

Tensor reshape_to_sequence(const Tensor& pooled, std::size_t steps) {
    if (pooled.rows() != 1) throw ShapeError("reshape_to_sequence expects a 1 x D vector");
    if (steps == 0 || pooled.cols() % steps != 0) {
        throw ConfigError("pooled width " + std::to_string(pooled.cols()) + " is not divisible by " +
                          std::to_string(steps) + " steps");
    }
    return reshape(pooled, steps, pooled.cols() / steps);
}

Tensor lstm_forward(const Tensor& seq, const LstmParams& p) {
    const std::size_t hdim = p.hidden();
    if (p.w_input.rows() != hdim + seq.cols() || p.w_input.cols() != hdim) {
        throw ShapeError("lstm_forward: input width " + std::to_string(seq.cols()) +
                         " does not match the gate weights");
    }
    Tensor h(1, hdim), c(1, hdim);
    auto gate = [](const Tensor& hx, const Tensor& w, const Tensor& b) { return add_row(matmul(hx, w), b); };
    for (std::size_t t = 0; t < seq.rows(); ++t) {
        const Tensor parts[] = {h, slice_rows(seq, t, 1)};
        const Tensor hx = concat_cols(parts);
        const Tensor f = sigmoid(gate(hx, p.w_forget, p.b_forget));
        const Tensor i = sigmoid(gate(hx, p.w_input, p.b_input));
        const Tensor cand = tanh(gate(hx, p.w_candidate, p.b_candidate));
        const Tensor o = sigmoid(gate(hx, p.w_output, p.b_output));
        c = add(mul(f, c), mul(i, cand));
        h = mul(o, tanh(c));
    }
    return h;
}

Tensor classify_forward(const Tensor& hidden, const ClassifierHead& head) {
    if (hidden.cols() != head.weight.rows()) throw ShapeError("classify_forward: hidden width mismatch");
    return log_softmax_rows(add_row(matmul(hidden, head.weight), head.bias));
}

namespace {

class Initializer {
public:
    explicit Initializer(std::uint64_t seed) : rng_(seed) {}

    Tensor glorot(std::size_t rows, std::size_t cols, std::size_t fan_in, std::size_t fan_out) {
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::vector<double> v(rows * cols);
        for (auto& x : v) {
            const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
            x = (2.0 * u - 1.0) * limit;
        }
        return Tensor(rows, cols, std::move(v), true);
    }
    Tensor glorot(std::size_t rows, std::size_t cols) { return glorot(rows, cols, rows, cols); }

private:
    std::mt19937_64 rng_;
};

Tensor deep_copy(const Tensor& t) {
    return Tensor(t.rows(), t.cols(), std::vector<double>(t.values().begin(), t.values().end()),
                  t.requires_grad());
}

}  // namespace

Model::Model(ModelConfig config, std::uint64_t seed) : config_(config) {
    config_.validate();
    Initializer init(seed);
    for (std::size_t l = 0; l < config_.gat_layers; ++l) {
        GatLayerParams layer;
        layer.merge = l + 1 < config_.gat_layers ? HeadMerge::concat : config_.final_merge;
        layer.leaky_slope = config_.leaky_slope;
        const std::size_t fin = config_.layer_input_dim(l), fout = config_.head_dim(l);
        for (std::size_t k = 0; k < config_.heads; ++k) {
            layer.weight.push_back(init.glorot(fin, fout));
            layer.attention.push_back(init.glorot(2 * fout, 1));
        }
        gat_.push_back(std::move(layer));
    }
    const std::size_t hdim = config_.lstm_hidden, din = config_.lstm_input_dim();
    lstm_.w_input = init.glorot(hdim + din, hdim);
    lstm_.w_forget = init.glorot(hdim + din, hdim);
    lstm_.w_output = init.glorot(hdim + din, hdim);
    lstm_.w_candidate = init.glorot(hdim + din, hdim);
    lstm_.b_input = Tensor(1, hdim, true);
    lstm_.b_forget = Tensor(1, hdim, true);
    lstm_.b_output = Tensor(1, hdim, true);
    lstm_.b_candidate = Tensor(1, hdim, true);
    head_.weight = init.glorot(hdim, config_.classes);
    head_.bias = Tensor(1, config_.classes, true);
}

Model::Model(const Model& other) : config_(other.config_), lstm_(other.lstm_), head_(other.head_) {
    gat_ = other.gat_;
    for (auto& layer : gat_) {
        for (auto& w : layer.weight) w = deep_copy(w);
        for (auto& a : layer.attention) a = deep_copy(a);
    }
    for (Tensor* t : {&lstm_.w_input, &lstm_.w_forget, &lstm_.w_output, &lstm_.w_candidate, &lstm_.b_input,
                      &lstm_.b_forget, &lstm_.b_output, &lstm_.b_candidate, &head_.weight, &head_.bias}) {
        *t = deep_copy(*t);
    }
}

Model& Model::operator=(const Model& other) {
    if (this != &other) *this = Model(other);
    return *this;
}

std::vector<NamedTensor> Model::named_parameters() const {
    std::vector<NamedTensor> out;
    for (std::size_t l = 0; l < gat_.size(); ++l) {
        for (std::size_t k = 0; k < gat_[l].heads(); ++k) {
            const std::string prefix = "gat" + std::to_string(l) + ".head" + std::to_string(k);
            out.push_back({prefix + ".W", gat_[l].weight[k]});
            out.push_back({prefix + ".a", gat_[l].attention[k]});
        }
    }
    out.push_back({"lstm.W_input", lstm_.w_input});
    out.push_back({"lstm.W_forget", lstm_.w_forget});
    out.push_back({"lstm.W_output", lstm_.w_output});
    out.push_back({"lstm.W_candidate", lstm_.w_candidate});
    out.push_back({"lstm.b_input", lstm_.b_input});
    out.push_back({"lstm.b_forget", lstm_.b_forget});
    out.push_back({"lstm.b_output", lstm_.b_output});
    out.push_back({"lstm.b_candidate", lstm_.b_candidate});
    out.push_back({"head.W", head_.weight});
    out.push_back({"head.b", head_.bias});
    return out;
}

std::vector<Tensor> Model::parameters() const {
    std::vector<Tensor> out;
    for (auto& p : named_parameters()) out.push_back(p.tensor);
    return out;
}

std::size_t Model::parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : named_parameters()) n += p.tensor.size();
    return n;
}

void Model::zero_grad() {
    for (auto& p : parameters()) p.zero_grad();
}

Tensor Model::node_embeddings(const GraphInput& g, ForwardTrace* trace, std::mt19937_64* dropout_rng) const {
    if (g.features.cols() != config_.input_dim) {
        throw ShapeError("graph feature width " + std::to_string(g.features.cols()) + " does not match model input " +
                         std::to_string(config_.input_dim));
    }
    Tensor h = g.features;
    for (const auto& layer : gat_) {
        if (dropout_rng && config_.dropout > 0.0) h = dropout(h, config_.dropout, *dropout_rng);
        std::vector<Tensor> alphas;
        h = gat_forward(h, g.adjacency, layer, config_.elu_alpha, trace ? &alphas : nullptr);
        if (trace) trace->attention.push_back(std::move(alphas));
    }
    return h;
}

Tensor Model::forward(const GraphInput& g, ForwardTrace* trace, std::mt19937_64* dropout_rng) const {
    const Tensor nodes = node_embeddings(g, trace, dropout_rng);
    const Tensor pooled = global_mean_pool(nodes);
    if (trace) trace->pooled = pooled;
    const Tensor seq =
        config_.lstm_input == LstmInput::reshape ? reshape_to_sequence(pooled, config_.seq_len) : nodes;
    return classify_forward(lstm_forward(seq, lstm_), head_);
}

Tensor Model::embed(const GraphInput& g) const { return global_mean_pool(node_embeddings(g, nullptr, nullptr)); }

}  // namespace tsg::nn
