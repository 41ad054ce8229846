#pragma once

// Flat key/value run configuration. Loaded from a JSON object, then
// overridden key by key ("--key=value" on the command line). Unknown keys
// and inconsistent dimensions raise ConfigError.

#include "tsgraph/eval/trainer.hpp"
#include "tsgraph/graph.hpp"
#include "tsgraph/nn/model.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tsg {

struct RunConfig {
    // samples
    std::size_t sample_len = 1024;
    std::size_t stride = 512;
    std::size_t max_per_class = 0;  // 0 keeps all

    // window scan
    std::vector<std::size_t> windows = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    std::size_t scan_step = 0;  // 0: w / 2
    int bins = 16;
    std::size_t scan_recordings = 20;

    // graphs
    std::size_t window = 0;      // 0: use the scan's w*
    std::size_t graph_step = 0;  // 0: w / 2
    std::string tau_policy = "quantile";
    double tau = 0.5;  // quantile q, or the fixed threshold
    long band = -1;    // Sakoe-Chiba radius; negative: exact DTW

    // model
    std::size_t heads = 4;
    std::size_t hidden_per_head = 16;
    std::size_t gat_layers = 2;
    std::string final_merge = "mean";
    std::size_t pooled_dim = 64;
    std::string lstm_input = "reshape";
    std::size_t seq_len = 4;
    std::size_t lstm_hidden = 32;
    double leaky_slope = 0.2;
    double elu_alpha = 1.0;
    double dropout = 0.0;

    // training
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
    std::size_t epochs = 60;
    std::size_t batch = 16;
    std::size_t folds = 5;
    bool stratified = true;
    std::uint64_t seed = 7;
    std::size_t normal_class = 0;
    std::size_t threads = 1;

    // synthetic data ("--data synthetic")
    std::size_t synthetic_classes = 3;
    std::size_t synthetic_per_class = 30;
    std::size_t synthetic_length = 1024;
    std::uint64_t synthetic_seed = 7;

    /// Sets one key from its JSON value, or from text that is parsed as JSON
    /// when possible and taken as a bare string otherwise.
    void set(const std::string& key, const std::string& text);
    void apply_json(const std::string& json_object);
    std::string to_json() const;

    /// Throws ConfigError on out-of-range values or a broken dimension chain.
    void validate() const;

    static std::vector<std::string> keys();

    GraphOptions graph_options(std::size_t resolved_window) const;
    nn::ModelConfig model_config(std::size_t input_dim, std::size_t classes) const;
    eval::TrainOptions train_options() const;
};

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace tsg
