#pragma once

// Training loop and K-fold cross-validation over prepared graphs.

#include "tsgraph/eval/kfold.hpp"
#include "tsgraph/eval/metrics.hpp"
#include "tsgraph/graph.hpp"
#include "tsgraph/matrix.hpp"
#include "tsgraph/nn/adam.hpp"
#include "tsgraph/nn/model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tsg::eval {

struct TrainOptions {
    std::size_t epochs = 60;
    std::size_t batch = 16;  // graphs per Adam step
    nn::AdamConfig adam;
    std::uint64_t seed = 7;
    std::size_t normal_class = 0;
    std::size_t threads = 1;  // folds trained concurrently
};

struct EpochRecord {
    std::size_t fold = 0;
    std::size_t epoch = 0;  // 1-based
    double loss = 0.0;      // mean batch loss over the epoch
};

struct Predictions {
    std::vector<int> pred;
    std::vector<int> truth;
    Matrix logp;  // B x C
};

/// Derives an independent 64-bit seed from (seed, stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

std::vector<nn::GraphInput> make_inputs(std::span<const SimilarityGraph> graphs);

/// Inference on `indices` (all inputs when empty).
Predictions predict(const nn::Model& model, std::span<const nn::GraphInput> inputs,
                    std::span<const std::size_t> indices = {});

/// Trains `model` in place on `indices`. Throws NumericalError on a
/// non-finite loss.
void fit(nn::Model& model, std::span<const nn::GraphInput> inputs, std::span<const std::size_t> indices,
         const TrainOptions& opts, std::uint64_t shuffle_seed, std::size_t fold_id,
         std::vector<EpochRecord>* log = nullptr);

EvalReport evaluate(const nn::Model& model, std::span<const nn::GraphInput> inputs, std::size_t normal_class = 0,
                    std::span<const std::size_t> indices = {});

struct FoldResult {
    std::size_t fold = 0;
    nn::Model model;
    std::vector<std::size_t> test_indices;
    Predictions predictions;
    EvalReport report;
};

struct FoldMean {
    double acc = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    std::optional<double> dr;
    std::optional<double> far;
    std::optional<double> auc_macro;
};

struct CrossValidation {
    std::vector<FoldResult> folds;
    std::vector<EpochRecord> log;  // fold-major, epoch-minor
    EvalReport aggregate;          // pooled out-of-fold predictions
    FoldMean fold_mean;            // unweighted mean of per-fold metrics
};

/// Fold f trains a fresh Model(config, derive_seed(seed, 2f)) on the other
/// folds and is scored on its own.
CrossValidation cross_validate(const nn::ModelConfig& config, std::span<const nn::GraphInput> inputs,
                               const FoldPlan& plan, const TrainOptions& opts);

/// Inference-only evaluation of `model` on graphs from another dataset.
/// ConfigError when feature width or labels do not fit the model.
EvalReport cross_eval(const nn::Model& model, std::span<const SimilarityGraph> graphs, std::size_t normal_class = 0);

}  // namespace tsg::eval
