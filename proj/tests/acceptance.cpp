// Acceptance gate: one PASS/FAIL line per primary criterion. Exit status is
// nonzero when any criterion fails.

#include "oracles.hpp"
#include "tsgraph/cli.hpp"
#include "tsgraph/dtw.hpp"
#include "tsgraph/entropy.hpp"
#include "tsgraph/eval/metrics.hpp"
#include "tsgraph/nn/grad_check.hpp"
#include "tsgraph/nn/model.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace tsg;

namespace {

enum class Outcome { pass, fail, skip };

struct Verdict {
    Outcome outcome = Outcome::fail;
    std::string detail;
};

Verdict verdict(bool ok, std::string detail) { return {ok ? Outcome::pass : Outcome::fail, std::move(detail)}; }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "tsgraph");
    std::vector<char*> argv;
    for (auto& s : args) argv.push_back(s.data());
    return cli::run(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("tsgraph_acceptance_" + name);
    fs::remove_all(p);
    return p;
}

SimilarityGraph random_graph(std::mt19937_64& rng, std::size_t nodes, std::size_t width) {
    SimilarityGraph g;
    g.window = width;
    g.channels = 1;
    std::normal_distribution<double> nd;
    for (std::size_t k = 0; k < nodes * width; ++k) g.node_features.push_back(static_cast<float>(nd(rng)));
    for (std::size_t k = 0; k < nodes; ++k) g.node_order.push_back(k * width);
    std::bernoulli_distribution coin(0.1 + 0.8 * std::uniform_real_distribution<double>()(rng));
    for (std::uint32_t i = 0; i < nodes; ++i)
        for (std::uint32_t j = i + 1; j < nodes; ++j)
            if (coin(rng)) g.edges.push_back({i, j, 0.75f});
    return g;
}

nn::ModelConfig default_model(std::size_t input_dim, std::size_t classes) {
    nn::ModelConfig cfg;
    cfg.input_dim = input_dim;
    cfg.classes = classes;
    return cfg;
}

// ---------------------------------------------------------------------------

Verdict dtw_oracle() {
    std::mt19937_64 rng(20240501);
    std::uniform_int_distribution<int> value(-9, 9);
    std::uniform_int_distribution<std::size_t> len(1, 12);
    std::size_t mismatches = 0;
    double dtw_seconds = 0.0;
    const Stopwatch total;
    for (int pair = 0; pair < 200; ++pair) {
        Matrix x(1, len(rng)), y(1, len(rng));
        for (auto& v : x.data()) v = value(rng);
        for (auto& v : y.data()) v = value(rng);
        const Stopwatch sw;
        const double d = dtw_distance(x, y);
        dtw_seconds += sw.seconds();
        if (d != oracle::dtw_all_paths(x, y)) ++mismatches;
    }
    const double t = total.seconds();
    return verdict(mismatches == 0 && t < 10.0,
                   fmt("200 integer pairs, %zu mismatches, dtw %.4f s, with enumeration %.2f s (limit 10 s)",
                       mismatches, dtw_seconds, t));
}

Verdict gradient_fidelity() {
    const Stopwatch sw;
    nn::Model model(default_model(8, 10), 1);
    const auto g = nn::make_graph_input(nn::make_check_graph(1, 5, 8, 3));
    const auto r = nn::finite_difference_check(model, g, 1e-4);
    const double t = sw.seconds();
    return verdict(r.max_rel_error < 1e-4 && r.checked == model.parameter_count() && t < 60.0,
                   fmt("%zu parameters, max rel error %.3e at %s[%zu] (limit 1e-4), %.1f s (limit 60 s)",
                       r.checked, r.max_rel_error, r.worst_tensor.c_str(), r.worst_index, t));
}

Verdict attention_normalization() {
    std::mt19937_64 rng(99);
    double worst = 0.0;
    std::size_t rows = 0;
    for (int k = 0; k < 100; ++k) {
        const std::size_t nodes = 2 + rng() % 40, width = 4 + rng() % 29;
        const auto g = random_graph(rng, nodes, width);
        const nn::Model model(default_model(width, 10), rng());
        const auto in = nn::make_graph_input(g);
        nn::ForwardTrace trace;
        model.forward(in, &trace);
        const auto& adj = *in.adjacency;
        for (const auto& layer : trace.attention)
            for (const auto& alpha : layer) {
                const auto a = alpha.values();
                for (std::size_t i = 0; i < adj.n; ++i) {
                    double s = 0.0;
                    for (std::size_t q = adj.offsets[i]; q < adj.offsets[i + 1]; ++q) s += a[q];
                    worst = std::max(worst, std::abs(s - 1.0));
                    ++rows;
                }
            }
    }
    return verdict(worst <= 1e-6, fmt("100 graphs, %zu attention rows, max |sum - 1| %.3e (limit 1e-6)", rows, worst));
}

Verdict permutation_invariance() {
    std::mt19937_64 rng(5);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const std::size_t nodes = 3 + rng() % 60, width = 8 + rng() % 25;
        const auto g = random_graph(rng, nodes, width);
        std::vector<std::uint32_t> perm(nodes);
        std::iota(perm.begin(), perm.end(), 0u);
        std::shuffle(perm.begin(), perm.end(), rng);
        SimilarityGraph p = g;
        for (std::size_t i = 0; i < nodes; ++i) {
            std::copy_n(g.node_features.begin() + i * width, width, p.node_features.begin() + perm[i] * width);
        }
        for (auto& e : p.edges) {
            const auto a = perm[e.i], b = perm[e.j];
            e.i = std::min(a, b);
            e.j = std::max(a, b);
        }
        const nn::Model model(default_model(width, 10), rng());
        const auto ea = model.embed(nn::make_graph_input(g)), eb = model.embed(nn::make_graph_input(p));
        for (std::size_t c = 0; c < ea.size(); ++c) worst = std::max(worst, std::abs(ea.values()[c] - eb.values()[c]));
    }
    return verdict(worst <= 1e-9, fmt("20 permuted graphs, max pooled |diff| %.3e (limit 1e-9)", worst));
}

double pair_counting_auc(const std::vector<double>& scores, const std::vector<int>& positive) {
    double wins = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i)
        for (std::size_t j = 0; j < scores.size(); ++j)
            if (positive[i] && !positive[j]) {
                pairs += 1.0;
                wins += scores[i] > scores[j] ? 1.0 : scores[i] == scores[j] ? 0.5 : 0.0;
            }
    return wins / pairs;
}

Verdict metrics_oracle() {
    using namespace eval;
    std::vector<std::string> failures;
    auto expect = [&](bool ok, const char* what) {
        if (!ok) failures.emplace_back(what);
    };

    const std::vector<int> truth = {0, 0, 1}, preds = {0, 1, 1};
    const auto cm = confusion_matrix(preds, truth, 2);
    expect(cm.at(0, 0) == 1 && cm.at(0, 1) == 1 && cm.at(1, 0) == 0 && cm.at(1, 1) == 1, "confusion [[1,1],[0,1]]");

    Confusion b(2);
    b.at(0, 0) = 5, b.at(0, 1) = 1, b.at(1, 0) = 2, b.at(1, 1) = 8;
    const auto m = precision_recall_f1(b, 1);
    expect(m.precision == 8.0 / 9.0 && m.recall == 8.0 / 10.0, "P/R on [[5,1],[2,8]]");
    expect(m.f1 == 2.0 * (8.0 / 9.0) * 0.8 / (8.0 / 9.0 + 0.8), "F1 on [[5,1],[2,8]]");
    expect(std::abs(m.f1 - 0.842105) < 5e-7, "F1 ~ 0.842105");
    expect(accuracy(b) == 13.0 / 16.0, "ACC on [[5,1],[2,8]]");
    expect(*detection_rate(b) == 0.8 && *false_alarm_rate(b) == 1.0 / 6.0, "DR/FAR on [[5,1],[2,8]]");

    Confusion diag(3);
    for (std::size_t c = 0; c < 3; ++c) diag.at(c, c) = 4;
    expect(accuracy(diag) == 1.0 && *detection_rate(diag) == 1.0 && *false_alarm_rate(diag) == 0.0,
           "perfect classifier");

    Confusion far(2);
    far.at(0, 0) = 9, far.at(0, 1) = 1, far.at(1, 1) = 5;
    expect(*false_alarm_rate(far) == 0.1, "FAR 10 normal, 1 flagged");
    Confusion no_normal(2);
    no_normal.at(1, 1) = 3;
    expect(!false_alarm_rate(no_normal).has_value(), "FAR absent without normal samples");

    expect(roc_auc_binary(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<int>{0, 0, 1, 1}) == 0.75,
           "binary AUC 0.75");

    std::mt19937_64 rng(3);
    double auc_err = 0.0;
    bool micro_ok = true;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t c = 2 + rng() % 9, n = 20 + rng() % 80;
        Matrix logp(n, c);
        std::vector<int> t(n), p(n);
        std::gamma_distribution<double> gd(1.0);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = static_cast<int>(i < c ? i : rng() % c);
            double z = 0.0;
            for (std::size_t k = 0; k < c; ++k) z += logp(i, k) = gd(rng);
            std::size_t arg = 0;
            for (std::size_t k = 0; k < c; ++k) {
                logp(i, k) = std::log(logp(i, k) / z);
                if (logp(i, k) > logp(i, arg)) arg = k;
            }
            p[i] = static_cast<int>(arg);
        }
        double oracle_mean = 0.0;
        for (std::size_t k = 0; k < c; ++k) {
            std::vector<double> scores(n);
            std::vector<int> pos(n);
            for (std::size_t i = 0; i < n; ++i) scores[i] = std::exp(logp(i, k)), pos[i] = t[i] == static_cast<int>(k);
            oracle_mean += pair_counting_auc(scores, pos) / static_cast<double>(c);
        }
        const auto r = make_report(p, t, c, &logp);
        auc_err = std::max(auc_err, std::abs(*r.auc_macro - oracle_mean));
        micro_ok = micro_ok && std::abs(r.micro.recall - r.acc) <= 1e-12;
    }
    expect(auc_err <= 1e-9, "macro AUC vs pair counting");
    expect(micro_ok, "micro recall = ACC");

    std::string detail = fmt("fixed examples exact, macro AUC max err %.2e over 200 batches (limit 1e-9)", auc_err);
    if (!failures.empty()) {
        detail = "mismatch:";
        for (const auto& f : failures) detail += " [" + f + "]";
    }
    return verdict(failures.empty(), detail);
}

Verdict entropy_properties() {
    SignalRecording flat;
    flat.channels = {std::vector<double>(2048, 0.7)};
    flat.sample_rate_hz = 12000;
    const auto cands = default_window_candidates();
    const auto scan = optimal_window(flat, cands, std::nullopt);
    bool zero = true;
    for (const auto& e : scan.per_size) zero = zero && e.h_bar == 0.0 && e.h_norm == 0.0;
    const bool tie = scan.best_window == *std::min_element(cands.begin(), cands.end());

    std::mt19937_64 rng(77);
    std::size_t agree = 0;
    for (int k = 0; k < 20; ++k) {
        SignalRecording rec;
        rec.sample_rate_hz = 12000;
        rec.channels = {oracle::random_matrix(rng, 1, 1024).data()};
        // colored noise so the scan has structure to find
        for (std::size_t i = 1; i < 1024; ++i) rec.channels[0][i] += 0.8 * rec.channels[0][i - 1];
        const double a = 0.1 + 10.0 * std::uniform_real_distribution<double>()(rng);
        const double b = std::normal_distribution<double>(0.0, 50.0)(rng);
        SignalRecording scaled = rec;
        for (auto& v : scaled.channels[0]) v = a * v + b;
        if (optimal_window(rec, cands, std::nullopt).best_window ==
            optimal_window(scaled, cands, std::nullopt).best_window)
            ++agree;
    }
    return verdict(zero && tie && agree == 20,
                   fmt("constant scan zero=%s, w*=%zu (min candidate), affine invariance %zu/20", zero ? "yes" : "no",
                       scan.best_window, agree));
}

struct TrainRun {
    int code = -1;
    double seconds = 0.0;
    fs::path dir;
};

TrainRun train_synthetic(const std::string& name) {
    TrainRun r;
    r.dir = scratch(name);
    const Stopwatch sw;
    r.code = run_cli({"train", "--data", "synthetic", "--out", r.dir.string()});
    r.seconds = sw.seconds();
    return r;
}

Verdict synthetic_end_to_end(const TrainRun& run) {
    if (run.code != 0) return verdict(false, fmt("train exited with %d", run.code));
    const auto report = nlohmann::json::parse(slurp(run.dir / "report.json"));
    const auto& agg = report.at("aggregate");
    const double acc = agg.at("acc").get<double>();
    const double far = agg.at("far").is_null() ? 1.0 : agg.at("far").get<double>();
    return verdict(acc >= 0.95 && far <= 0.05 && run.seconds < 300.0,
                   fmt("3x30 samples, 5-fold: acc %.4f (>= 0.95), FAR %.2f%% (<= 5%%), %.1f s (< 300 s)", acc,
                       100.0 * far, run.seconds));
}

Verdict determinism(const TrainRun& a, const TrainRun& b) {
    if (a.code != 0 || b.code != 0) return verdict(false, fmt("train exited with %d / %d", a.code, b.code));
    std::string diffs;
    for (const char* f : {"train_log.csv", "report.json", "report.txt", "per_class.csv"}) {
        if (slurp(a.dir / f) != slurp(b.dir / f)) diffs += std::string(" ") + f;
    }
    return verdict(diffs.empty(), diffs.empty() ? "two default train runs: train_log.csv, report.json, report.txt, "
                                                  "per_class.csv byte-identical"
                                                : "differing:" + diffs);
}

Verdict cwru_subset() {
    const char* env = std::getenv("TSGRAPH_CWRU_MANIFEST");
    if (env == nullptr || !fs::exists(env)) {
        return {Outcome::skip, "converted Dataset A not found; set TSGRAPH_CWRU_MANIFEST to its manifest.json"};
    }
    const auto dir = scratch("cwru");
    const Stopwatch sw;
    const int code = run_cli({"train", "--data", env, "--out", dir.string(), "--max_per_class=200",
                              "--sample_len=1024", "--stride=512"});
    const double t = sw.seconds();
    if (code != 0) return verdict(false, fmt("train exited with %d", code));
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    const auto config = nlohmann::json::parse(slurp(dir / "config.json"));
    const double acc = report.at("aggregate").at("acc").get<double>();
    const auto w = config.at("window").get<std::size_t>();
    return verdict(acc >= 0.90 && w >= 30 && w <= 40 && t < 1800.0,
                   fmt("acc %.4f (>= 0.90), w* %zu (in [30, 40]), %.1f s (< 1800 s)", acc, w, t));
}

}  // namespace

int main() {
    int failed = 0;
    auto report = [&](const char* name, const std::function<Verdict()>& check) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {Outcome::fail, std::string("exception: ") + e.what()};
        }
        const char* tag = v.outcome == Outcome::pass ? "PASS" : v.outcome == Outcome::fail ? "FAIL" : "SKIP";
        if (v.outcome == Outcome::fail) ++failed;
        std::printf("%s %-28s %s\n", tag, name, v.detail.c_str());
        std::fflush(stdout);
    };

    report("dtw_oracle_equivalence", dtw_oracle);
    report("gradient_fidelity", gradient_fidelity);
    report("attention_normalization", attention_normalization);
    report("permutation_invariance", permutation_invariance);
    report("metrics_oracle", metrics_oracle);
    report("entropy_window_properties", entropy_properties);

    const auto first = train_synthetic("train_a");
    report("synthetic_end_to_end", [&] { return synthetic_end_to_end(first); });
    report("cwru_subset", cwru_subset);
    const auto second = train_synthetic("train_b");
    report("determinism", [&] { return determinism(first, second); });

    std::printf("%s\n", failed == 0 ? "acceptance: all criteria met" : fmt("acceptance: %d FAILED", failed).c_str());
    return failed == 0 ? 0 : 1;
}
