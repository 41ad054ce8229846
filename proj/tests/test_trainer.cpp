#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tsgraph/error.hpp"
#include "tsgraph/eval/kfold.hpp"
#include "tsgraph/eval/report_io.hpp"
#include "tsgraph/eval/trainer.hpp"
#include "tsgraph/graph.hpp"
#include "tsgraph/synthetic.hpp"

#include <cmath>

using namespace tsg;
using namespace tsg::eval;

namespace {

std::vector<SimilarityGraph> small_graphs(std::size_t per_class, int classes = 3) {
    const auto recs = generate_synthetic_dataset(classes, per_class, 256, 7);
    GraphOptions opts;
    opts.window = 32;
    std::vector<SimilarityGraph> out;
    for (const auto& s : make_dataset_samples(recs, 256, 256)) out.push_back(sample_to_graph(s, opts));
    return out;
}

nn::ModelConfig config_for(std::size_t input_dim, std::size_t classes) {
    nn::ModelConfig cfg;
    cfg.input_dim = input_dim;
    cfg.classes = classes;
    return cfg;
}

std::vector<int> labels_of(const std::vector<SimilarityGraph>& gs) {
    std::vector<int> out;
    for (const auto& g : gs) out.push_back(g.label);
    return out;
}

}  // namespace

TEST_CASE("seed derivation") {
    CHECK(derive_seed(7, 0) == derive_seed(7, 0));
    CHECK(derive_seed(7, 0) != derive_seed(7, 1));
    CHECK(derive_seed(7, 0) != derive_seed(8, 0));
}

TEST_CASE("untrained model scores near chance") {
    const auto graphs = small_graphs(10);
    const auto inputs = make_inputs(graphs);
    double mean_acc = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        TrainOptions opts;
        opts.epochs = 0;
        opts.seed = seed;
        const auto cv = cross_validate(config_for(32, 3), inputs, kfold_plan(labels_of(graphs), 5, true, seed), opts);
        CHECK(cv.log.empty());
        mean_acc += cv.aggregate.acc / 5.0;
    }
    CHECK(std::abs(mean_acc - 1.0 / 3.0) < 0.15);
}

TEST_CASE("training reduces the loss and learns the synthetic classes") {
    const auto graphs = small_graphs(10);
    const auto inputs = make_inputs(graphs);
    nn::Model model(config_for(32, 3), 3);
    std::vector<std::size_t> all(inputs.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    TrainOptions opts;
    opts.epochs = 25;
    std::vector<EpochRecord> log;
    fit(model, inputs, all, opts, 11, 0, &log);
    REQUIRE(log.size() == 25);
    CHECK(log.front().epoch == 1);
    CHECK(log.back().loss < log.front().loss);
    const auto train_report = evaluate(model, inputs);
    CHECK(train_report.acc >= 0.9);
}

TEST_CASE("cross-validation is deterministic and its folds cover every sample") {
    const auto graphs = small_graphs(6);
    const auto inputs = make_inputs(graphs);
    const auto plan = kfold_plan(labels_of(graphs), 3, true, 7);
    TrainOptions opts;
    opts.epochs = 3;
    const auto a = cross_validate(config_for(32, 3), inputs, plan, opts);
    const auto b = cross_validate(config_for(32, 3), inputs, plan, opts);
    CHECK(training_log_csv(a.log) == training_log_csv(b.log));
    CHECK(cross_validation_to_json(a) == cross_validation_to_json(b));
    CHECK(a.log.size() == 9);
    CHECK(a.aggregate.samples() == inputs.size());
    CHECK(a.folds.size() == 3);

    // concurrent folds give the same result
    opts.threads = 3;
    const auto c = cross_validate(config_for(32, 3), inputs, plan, opts);
    CHECK(training_log_csv(a.log) == training_log_csv(c.log));
    CHECK(cross_validation_to_json(a) == cross_validation_to_json(c));
}

TEST_CASE("evaluation on the training set is at least as good as held-out") {
    const auto graphs = small_graphs(6);
    const auto inputs = make_inputs(graphs);
    const auto plan = kfold_plan(labels_of(graphs), 3, true, 1);
    TrainOptions opts;
    opts.epochs = 10;
    const auto cv = cross_validate(config_for(32, 3), inputs, plan, opts);
    double train_acc = 0.0;
    for (const auto& f : cv.folds) train_acc += evaluate(f.model, inputs, 0, plan.train_indices(f.fold)).acc / 3.0;
    CHECK(train_acc >= cv.fold_mean.acc);
}

TEST_CASE("cross_eval rejects incompatible graphs") {
    const auto graphs = small_graphs(2);
    nn::Model model(config_for(32, 3), 1);
    const auto r = cross_eval(model, graphs);
    CHECK(r.samples() == graphs.size());

    nn::Model wide(config_for(16, 3), 1);
    CHECK_THROWS_AS(cross_eval(wide, graphs), ConfigError);
    nn::Model two(config_for(32, 2), 1);
    CHECK_THROWS_AS(cross_eval(two, graphs), ConfigError);
}

TEST_CASE("fit validates labels") {
    auto graphs = small_graphs(2);
    graphs[0].label = 5;
    const auto inputs = make_inputs(graphs);
    nn::Model model(config_for(32, 3), 1);
    std::vector<std::size_t> idx = {0, 1};
    TrainOptions opts;
    opts.epochs = 1;
    CHECK_THROWS_AS(fit(model, inputs, idx, opts, 1, 0), ConfigError);
}

TEST_CASE("report serialization") {
    const auto graphs = small_graphs(4);
    const auto inputs = make_inputs(graphs);
    const auto plan = kfold_plan(labels_of(graphs), 2, true, 1);
    TrainOptions opts;
    opts.epochs = 1;
    const auto cv = cross_validate(config_for(32, 3), inputs, plan, opts);
    const auto csv = per_class_csv(cv.aggregate);
    CHECK(csv.rfind("class,precision,recall,f1,support\n", 0) == 0);
    CHECK(training_log_csv(cv.log).rfind("fold,epoch,loss\n", 0) == 0);
    const auto text = cross_validation_to_text(cv);
    CHECK(text.find("ATBTSGM") != std::string::npos);
}
