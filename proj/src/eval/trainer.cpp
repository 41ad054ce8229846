#include "tsgraph/eval/trainer.hpp"

#include "tsgraph/error.hpp"
#include "tsgraph/nn/ops.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

namespace tsg::eval {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over the combined value
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<nn::GraphInput> make_inputs(std::span<const SimilarityGraph> graphs) {
    std::vector<nn::GraphInput> out;
    out.reserve(graphs.size());
    for (const auto& g : graphs) out.push_back(nn::make_graph_input(g));
    return out;
}

namespace {

std::vector<std::size_t> all_or(std::span<const std::size_t> indices, std::size_t n) {
    if (!indices.empty()) return {indices.begin(), indices.end()};
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    return all;
}

}  // namespace

Predictions predict(const nn::Model& model, std::span<const nn::GraphInput> inputs,
                    std::span<const std::size_t> indices) {
    const auto idx = all_or(indices, inputs.size());
    const std::size_t classes = model.config().classes;
    Predictions p;
    p.logp = Matrix(idx.size(), classes);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const auto& g = inputs[idx[r]];
        const nn::Tensor logp = model.forward(g);
        const auto out = logp.values();
        std::size_t best = 0;
        for (std::size_t c = 0; c < classes; ++c) {
            p.logp(r, c) = out[c];
            if (out[c] > out[best]) best = c;
        }
        p.pred.push_back(static_cast<int>(best));
        p.truth.push_back(g.label);
    }
    return p;
}

void fit(nn::Model& model, std::span<const nn::GraphInput> inputs, std::span<const std::size_t> indices,
         const TrainOptions& opts, std::uint64_t shuffle_seed, std::size_t fold_id, std::vector<EpochRecord>* log) {
    if (opts.batch == 0) throw ConfigError("batch size must be positive");
    std::vector<std::size_t> order = all_or(indices, inputs.size());
    if (order.empty()) throw ArgumentError("fit: no training graphs");
    for (auto i : order) {
        if (inputs[i].label < 0 || static_cast<std::size_t>(inputs[i].label) >= model.config().classes) {
            throw ConfigError("graph label " + std::to_string(inputs[i].label) + " outside the model's " +
                              std::to_string(model.config().classes) + " classes");
        }
    }

    std::mt19937_64 rng(shuffle_seed);
    std::mt19937_64 dropout_rng(derive_seed(shuffle_seed, 1));
    auto params = model.parameters();
    nn::AdamState state;

    for (std::size_t epoch = 1; epoch <= opts.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng() % i)]);
        }
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += opts.batch) {
            const std::size_t end = std::min(order.size(), start + opts.batch);
            // Per-graph backward of loss_b / B accumulates the batch-mean
            // gradient while only one graph's tape is alive.
            model.zero_grad();
            const double inv = 1.0 / static_cast<double>(end - start);
            double value = 0.0;
            for (std::size_t b = start; b < end; ++b) {
                const auto& g = inputs[order[b]];
                const int label[] = {g.label};
                nn::Tensor loss = nn::scale(nn::nll_loss(model.forward(g, nullptr, &dropout_rng), label), inv);
                const double v = loss.item();
                if (!std::isfinite(v)) {
                    throw NumericalError("fold " + std::to_string(fold_id) + ": non-finite loss at epoch " +
                                         std::to_string(epoch) + ", batch " + std::to_string(batches + 1));
                }
                loss.backward();
                value += v;
            }
            nn::adam_step(params, state, opts.adam);
            loss_sum += value;
            ++batches;
        }
        if (log) log->push_back({fold_id, epoch, loss_sum / static_cast<double>(batches)});
    }
}

EvalReport evaluate(const nn::Model& model, std::span<const nn::GraphInput> inputs, std::size_t normal_class,
                    std::span<const std::size_t> indices) {
    const auto p = predict(model, inputs, indices);
    return make_report(p.pred, p.truth, model.config().classes, &p.logp, normal_class);
}

CrossValidation cross_validate(const nn::ModelConfig& config, std::span<const nn::GraphInput> inputs,
                               const FoldPlan& plan, const TrainOptions& opts) {
    if (inputs.empty()) throw ArgumentError("cross_validate: no graphs");
    if (plan.assignments.size() != inputs.size()) throw ArgumentError("fold plan does not cover the graph set");
    config.validate();
    for (const auto& g : inputs) {
        if (g.features.cols() != config.input_dim) {
            throw ConfigError("graph feature width " + std::to_string(g.features.cols()) +
                              " does not match input_dim " + std::to_string(config.input_dim));
        }
    }

    const std::size_t k = plan.k;
    std::vector<std::optional<FoldResult>> results(k);
    std::vector<std::vector<EpochRecord>> logs(k);
    std::vector<std::exception_ptr> errors(k);

    auto run_fold = [&](std::size_t f) {
        try {
            nn::Model model(config, derive_seed(opts.seed, 2 * f));
            const auto train = plan.train_indices(f);
            fit(model, inputs, train, opts, derive_seed(opts.seed, 2 * f + 1), f, &logs[f]);
            FoldResult r{f, model, plan.fold_indices(f), {}, {}};
            r.predictions = predict(r.model, inputs, r.test_indices);
            r.report = make_report(r.predictions.pred, r.predictions.truth, config.classes, &r.predictions.logp,
                                   opts.normal_class);
            results[f].emplace(std::move(r));
        } catch (...) {
            errors[f] = std::current_exception();
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(opts.threads, 1, k);
    if (workers == 1) {
        for (std::size_t f = 0; f < k; ++f) run_fold(f);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (std::size_t f; (f = next.fetch_add(1)) < k;) run_fold(f);
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    CrossValidation cv;
    cv.aggregate.normal_class = opts.normal_class;
    cv.aggregate.confusion = Confusion(config.classes);
    std::vector<int> pooled_truth;
    Matrix pooled_logp(inputs.size(), config.classes);
    std::size_t row = 0;
    std::size_t dr_n = 0, far_n = 0, auc_n = 0;
    double dr_sum = 0.0, far_sum = 0.0, auc_sum = 0.0;
    for (std::size_t f = 0; f < k; ++f) {
        FoldResult& r = *results[f];
        cv.log.insert(cv.log.end(), logs[f].begin(), logs[f].end());
        cv.aggregate.confusion += r.report.confusion;
        for (std::size_t i = 0; i < r.predictions.truth.size(); ++i, ++row) {
            pooled_truth.push_back(r.predictions.truth[i]);
            for (std::size_t c = 0; c < config.classes; ++c) pooled_logp(row, c) = r.predictions.logp(i, c);
        }
        auto& m = cv.fold_mean;
        m.acc += r.report.acc;
        m.macro_precision += r.report.macro.precision;
        m.macro_recall += r.report.macro.recall;
        m.macro_f1 += r.report.macro.f1;
        if (r.report.dr) dr_sum += *r.report.dr, ++dr_n;
        if (r.report.far) far_sum += *r.report.far, ++far_n;
        if (r.report.auc_macro) auc_sum += *r.report.auc_macro, ++auc_n;
        cv.folds.push_back(std::move(r));
    }
    const double kd = static_cast<double>(k);
    cv.fold_mean.acc /= kd;
    cv.fold_mean.macro_precision /= kd;
    cv.fold_mean.macro_recall /= kd;
    cv.fold_mean.macro_f1 /= kd;
    if (dr_n) cv.fold_mean.dr = dr_sum / static_cast<double>(dr_n);
    if (far_n) cv.fold_mean.far = far_sum / static_cast<double>(far_n);
    if (auc_n) cv.fold_mean.auc_macro = auc_sum / static_cast<double>(auc_n);

    fill_from_confusion(cv.aggregate);
    std::vector<bool> seen(config.classes, false);
    for (int t : pooled_truth) seen[static_cast<std::size_t>(t)] = true;
    if (std::count(seen.begin(), seen.end(), true) >= 2) {
        cv.aggregate.auc_macro = roc_auc_macro(pooled_logp, pooled_truth, &cv.aggregate.auc_skipped);
    }
    return cv;
}

EvalReport cross_eval(const nn::Model& model, std::span<const SimilarityGraph> graphs, std::size_t normal_class) {
    const auto& cfg = model.config();
    for (const auto& g : graphs) {
        if (g.feature_dim() != cfg.input_dim) {
            throw ConfigError("graph feature width " + std::to_string(g.feature_dim()) +
                              " does not match the model input " + std::to_string(cfg.input_dim));
        }
        if (g.label < 0 || static_cast<std::size_t>(g.label) >= cfg.classes) {
            throw ConfigError("label " + std::to_string(g.label) + " outside the model's " +
                              std::to_string(cfg.classes) + " classes");
        }
    }
    if (graphs.empty()) throw ArgumentError("cross_eval: no graphs");
    const auto inputs = make_inputs(graphs);
    return evaluate(model, inputs, normal_class);
}

}  // namespace tsg::eval
