#include "tsgraph/cli.hpp"

#include "tsgraph/config.hpp"
#include "tsgraph/entropy.hpp"
#include "tsgraph/error.hpp"
#include "tsgraph/eval/report_io.hpp"
#include "tsgraph/eval/stats.hpp"
#include "tsgraph/eval/trainer.hpp"
#include "tsgraph/graph.hpp"
#include "tsgraph/nn/checkpoint.hpp"
#include "tsgraph/nn/grad_check.hpp"
#include "tsgraph/signal_io.hpp"
#include "tsgraph/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

namespace tsg::cli {

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
    std::string config;
    std::string data;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
};

class UsageError : public Error {
public:
    using Error::Error;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config, "flat JSON config file");
    sub->add_option("--data", args.data, "dataset manifest, or 'synthetic'");
    sub->add_option("--out", args.out, "output directory")->capture_default_str();
    sub->add_option("--seed", args.seed, "training seed (overrides 'seed')");
    sub->add_option("--threads", args.threads, "worker threads (overrides 'threads')");
    sub->allow_extras();
    sub->footer("Any config key can be set with --key=value; see README for the key list.");
}

RunConfig resolve_config(const CommonArgs& args, const std::vector<std::string>& extras) {
    RunConfig cfg;
    if (!args.config.empty()) cfg = load_run_config(args.config);
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& a = extras[i];
        if (a.rfind("--", 0) != 0) throw UsageError("unexpected argument '" + a + "'");
        std::string key = a.substr(2), value;
        const auto eq = key.find('=');
        if (eq != std::string::npos) {
            value = key.substr(eq + 1);
            key.resize(eq);
        } else if (i + 1 < extras.size() && extras[i + 1].rfind("--", 0) != 0) {
            value = extras[++i];
        } else {
            throw UsageError("option '" + a + "' needs a value");
        }
        std::replace(key.begin(), key.end(), '-', '_');
        cfg.set(key, value);
    }
    if (args.seed) cfg.seed = *args.seed;
    if (args.threads) cfg.threads = std::max<std::size_t>(1, *args.threads);
    cfg.validate();
    return cfg;
}

void write_file(const fs::path& path, const std::string& bytes) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn fn) {
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                    next = n;
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

struct Dataset {
    std::vector<SignalRecording> recordings;
    std::size_t classes = 0;
    std::size_t channels = 0;
};

Dataset load_data(const std::string& spec, const RunConfig& cfg, const char* flag = "--data") {
    if (spec.empty()) throw UsageError(std::string("missing ") + flag + " (manifest path or 'synthetic')");
    Dataset d;
    if (spec == "synthetic") {
        d.recordings = generate_synthetic_dataset(static_cast<int>(cfg.synthetic_classes), cfg.synthetic_per_class,
                                                  cfg.synthetic_length, cfg.synthetic_seed);
        d.classes = cfg.synthetic_classes;
    } else {
        if (!fs::exists(spec)) throw UsageError(std::string(flag) + " path does not exist: " + spec);
        const auto manifest = read_manifest(spec);
        d.classes = static_cast<std::size_t>(manifest.class_count);
        for (const auto& e : manifest.entries) d.recordings.push_back(load_recording(e.path, e));
    }
    if (d.recordings.empty()) throw UsageError("dataset " + spec + " has no recordings");
    d.channels = d.recordings.front().channel_count();
    for (const auto& r : d.recordings) {
        if (r.channel_count() != d.channels) {
            throw FormatError(r.source_id + ": " + std::to_string(r.channel_count()) + " channels, expected " +
                              std::to_string(d.channels));
        }
    }
    if (cfg.normal_class >= d.classes) throw ConfigError("normal_class is outside the dataset's classes");
    return d;
}

WindowScan run_scan(const Dataset& d, const RunConfig& cfg) {
    const std::size_t n = std::min(cfg.scan_recordings, d.recordings.size());
    const std::span<const SignalRecording> recs(d.recordings.data(), n);
    std::optional<std::size_t> step;
    if (cfg.scan_step != 0) step = cfg.scan_step;
    return optimal_window(recs, cfg.windows, step, cfg.bins);
}

std::vector<SimilarityGraph> build_graphs(const std::vector<LabeledSample>& samples, const GraphOptions& opts,
                                          std::size_t threads) {
    std::vector<SimilarityGraph> graphs(samples.size());
    parallel_for(samples.size(), threads, [&](std::size_t i) { graphs[i] = sample_to_graph(samples[i], opts); });
    return graphs;
}

struct Prepared {
    std::optional<WindowScan> scan;
    std::size_t window = 0;
    std::vector<LabeledSample> samples;
    std::vector<SimilarityGraph> graphs;
};

Prepared prepare(const Dataset& d, const RunConfig& cfg, std::size_t forced_window = 0) {
    Prepared p;
    p.window = forced_window != 0 ? forced_window : cfg.window;
    if (p.window == 0) {
        p.scan = run_scan(d, cfg);
        p.window = p.scan->best_window;
    }
    if (p.window > cfg.sample_len) throw ConfigError("window exceeds sample_len");
    p.samples = make_dataset_samples(d.recordings, cfg.sample_len, cfg.stride, cfg.max_per_class);
    p.graphs = build_graphs(p.samples, cfg.graph_options(p.window), cfg.threads);
    return p;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string timing_json(double seconds) {
    nlohmann::ordered_json j;
    j["runtime_s"] = seconds;
    return j.dump(2) + "\n";
}

void print_summary(const eval::EvalReport& r) {
    std::printf("samples %zu  acc %.4f  dr %s  far %s  auc %s\n", r.samples(), r.acc,
                r.dr ? std::to_string(*r.dr).c_str() : "-", r.far ? std::to_string(*r.far).c_str() : "-",
                r.auc_macro ? std::to_string(*r.auc_macro).c_str() : "-");
}

void write_report_files(const fs::path& out, const eval::EvalReport& r, const std::string& title) {
    write_file(out / "report.json", eval::report_to_json(r));
    write_file(out / "report.txt", eval::report_to_text(r, title));
    write_file(out / "per_class.csv", eval::per_class_csv(r));
}

// ---- commands -------------------------------------------------------------

int cmd_scan(const CommonArgs& args, const std::vector<std::string>& extras) {
    const RunConfig cfg = resolve_config(args, extras);
    const Dataset d = load_data(args.data, cfg);
    const WindowScan scan = run_scan(d, cfg);
    write_file(fs::path(args.out) / "window_scan.csv", scan.to_csv());
    for (const auto& e : scan.per_size) std::printf("w=%-4zu H_bar=%.6f H_norm=%.6f n=%zu\n", e.w, e.h_bar, e.h_norm, e.segment_count);
    std::printf("w* = %zu\n", scan.best_window);
    return kOk;
}

int cmd_build_graph(const CommonArgs& args, const std::vector<std::string>& extras) {
    const RunConfig cfg = resolve_config(args, extras);
    const Dataset d = load_data(args.data, cfg);
    const Prepared p = prepare(d, cfg);
    const fs::path out(args.out);

    nlohmann::ordered_json summary;
    summary["graphs"] = p.graphs.size();
    summary["window"] = p.window;
    summary["step"] = cfg.graph_options(p.window).effective_step();
    summary["channels"] = d.channels;
    summary["tau_policy"] = cfg.tau_policy;
    summary["tau"] = cfg.tau;
    std::size_t edgeless = 0, node_total = 0, edge_total = 0;
    std::size_t edge_min = SIZE_MAX, edge_max = 0;
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    std::error_code ec;
    fs::create_directories(out / "graphs", ec);
    if (ec) throw IoError("cannot create " + (out / "graphs").string() + ": " + ec.message());
    for (std::size_t i = 0; i < p.graphs.size(); ++i) {
        const auto& g = p.graphs[i];
        char name[32];
        std::snprintf(name, sizeof name, "graph_%05zu.atg", i);
        write_graph(out / "graphs" / name, g);
        edgeless += g.edges.empty() ? 1 : 0;
        node_total += g.node_count();
        edge_total += g.edges.size();
        edge_min = std::min(edge_min, g.edges.size());
        edge_max = std::max(edge_max, g.edges.size());
        files.push_back({{"file", std::string("graphs/") + name},
                         {"label", g.label},
                         {"source", p.samples[i].source_id},
                         {"start", p.samples[i].start_index},
                         {"nodes", g.node_count()},
                         {"edges", g.edges.size()},
                         {"tau_used", g.tau_used}});
    }
    const double count = static_cast<double>(std::max<std::size_t>(1, p.graphs.size()));
    summary["nodes_mean"] = static_cast<double>(node_total) / count;
    summary["edges_mean"] = static_cast<double>(edge_total) / count;
    summary["edges_min"] = p.graphs.empty() ? 0 : edge_min;
    summary["edges_max"] = edge_max;
    summary["edgeless_graphs"] = edgeless;
    nlohmann::ordered_json warnings = nlohmann::ordered_json::array();
    if (edgeless == p.graphs.size() && !p.graphs.empty()) {
        warnings.push_back("all graphs are edgeless; attention reduces to self-loops");
    } else if (edgeless > 0) {
        warnings.push_back(std::to_string(edgeless) + " graphs are edgeless");
    }
    summary["warnings"] = warnings;
    summary["files"] = std::move(files);
    write_file(out / "graph_summary.json", summary.dump(2) + "\n");
    if (p.scan) write_file(out / "window_scan.csv", p.scan->to_csv());
    for (const auto& w : warnings) std::cerr << "warning: " << w.get<std::string>() << "\n";
    std::printf("%zu graphs, window %zu, mean %.1f nodes, mean %.1f edges\n", p.graphs.size(), p.window,
                summary["nodes_mean"].get<double>(), summary["edges_mean"].get<double>());
    return kOk;
}

int cmd_train(const CommonArgs& args, const std::vector<std::string>& extras) {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = resolve_config(args, extras);
    const Dataset d = load_data(args.data, cfg);
    const Prepared p = prepare(d, cfg);
    const nn::ModelConfig mcfg = cfg.model_config(p.window * d.channels, d.classes);
    mcfg.validate();

    std::vector<int> labels;
    for (const auto& g : p.graphs) labels.push_back(g.label);
    const auto plan = eval::kfold_plan(labels, cfg.folds, cfg.stratified, cfg.seed);
    const auto inputs = eval::make_inputs(p.graphs);
    const auto cv = eval::cross_validate(mcfg, inputs, plan, cfg.train_options());

    const fs::path out(args.out);
    RunConfig resolved = cfg;
    resolved.window = p.window;
    write_file(out / "config.json", resolved.to_json());
    if (p.scan) write_file(out / "window_scan.csv", p.scan->to_csv());
    write_file(out / "train_log.csv", eval::training_log_csv(cv.log));
    write_file(out / "report.json", eval::cross_validation_to_json(cv));
    write_file(out / "report.txt", eval::cross_validation_to_text(cv));
    write_file(out / "per_class.csv", eval::per_class_csv(cv.aggregate));
    for (const auto& f : cv.folds) {
        const fs::path path = out / "models" / ("fold_" + std::to_string(f.fold) + ".atm");
        write_file(path, nn::serialize_model(f.model));
    }
    const double runtime = seconds_since(t0);
    write_file(out / "timing.json", timing_json(runtime));
    std::printf("%zu graphs, window %zu, %zu folds\n", p.graphs.size(), p.window, cv.folds.size());
    print_summary(cv.aggregate);
    std::printf("runtime %.1f s\n", runtime);
    return kOk;
}

std::size_t window_for_model(const nn::ModelConfig& m, const RunConfig& cfg, std::size_t channels) {
    if (m.input_dim % channels != 0) {
        throw ConfigError("model input width " + std::to_string(m.input_dim) + " is not a multiple of " +
                          std::to_string(channels) + " channels");
    }
    const std::size_t w = m.input_dim / channels;
    if (cfg.window != 0 && cfg.window != w) {
        throw ConfigError("window " + std::to_string(cfg.window) + " does not match the model's input width " +
                          std::to_string(m.input_dim));
    }
    return w;
}

eval::EvalReport evaluate_on(const nn::Model& model, const Dataset& d, const RunConfig& cfg, std::size_t& window) {
    if (d.classes != model.config().classes) {
        throw ConfigError("dataset has " + std::to_string(d.classes) + " classes, model expects " +
                          std::to_string(model.config().classes));
    }
    window = window_for_model(model.config(), cfg, d.channels);
    const Prepared p = prepare(d, cfg, window);
    return eval::cross_eval(model, p.graphs, cfg.normal_class);
}

int cmd_eval(const CommonArgs& args, const std::vector<std::string>& extras, const std::string& model_path) {
    const auto t0 = std::chrono::steady_clock::now();
    const RunConfig cfg = resolve_config(args, extras);
    if (model_path.empty()) throw UsageError("eval needs --model");
    const nn::Model model = nn::load_checkpoint(model_path);
    const Dataset d = load_data(args.data, cfg);
    std::size_t window = 0;
    const auto report = evaluate_on(model, d, cfg, window);
    const fs::path out(args.out);
    write_report_files(out, report, "evaluation of " + fs::path(model_path).filename().string());
    write_file(out / "timing.json", timing_json(seconds_since(t0)));
    print_summary(report);
    return kOk;
}

int cmd_cross_eval(const CommonArgs& args, const std::vector<std::string>& extras, const std::string& target,
                   const std::string& model_path) {
    const auto t0 = std::chrono::steady_clock::now();
    const RunConfig cfg = resolve_config(args, extras);
    const Dataset test = load_data(target, cfg, "--target");
    const fs::path out(args.out);

    std::optional<nn::Model> model;
    if (!model_path.empty()) {
        model = nn::load_checkpoint(model_path);
    } else {
        const Dataset train = load_data(args.data, cfg);
        if (train.channels != test.channels || train.classes != test.classes) {
            throw ConfigError("source and target datasets differ in channels or classes");
        }
        const Prepared p = prepare(train, cfg);
        model.emplace(cfg.model_config(p.window * train.channels, train.classes), eval::derive_seed(cfg.seed, 0));
        const auto inputs = eval::make_inputs(p.graphs);
        std::vector<eval::EpochRecord> log;
        eval::fit(*model, inputs, {}, cfg.train_options(), eval::derive_seed(cfg.seed, 1), 0, &log);
        write_file(out / "train_log.csv", eval::training_log_csv(log));
        write_file(out / "model.atm", nn::serialize_model(*model));
    }
    std::size_t window = 0;
    const auto report = evaluate_on(*model, test, cfg, window);
    write_report_files(out, report, "transfer evaluation on " + target);
    write_file(out / "timing.json", timing_json(seconds_since(t0)));
    print_summary(report);
    return kOk;
}

std::vector<double> pooled_values(const Dataset& d) {
    std::vector<double> v;
    for (const auto& r : d.recordings) v.insert(v.end(), r.channels.front().begin(), r.channels.front().end());
    return v;
}

int cmd_stats(const CommonArgs& args, const std::vector<std::string>& extras, const std::string& other) {
    const RunConfig cfg = resolve_config(args, extras);
    const Dataset a = load_data(args.data, cfg);
    const Dataset b = load_data(other, cfg, "--other");
    const auto x = pooled_values(a), y = pooled_values(b);
    const auto t = eval::welch_t_test(x, y);
    const auto ks = eval::ks_two_sample(x, y);
    nlohmann::ordered_json j;
    j["n_x"] = x.size();
    j["n_y"] = y.size();
    j["welch"] = {{"t", t.statistic}, {"df", t.df}, {"p", t.p_value}};
    j["ks"] = {{"D", ks.statistic}, {"p", ks.p_value}};
    write_file(fs::path(args.out) / "stats.json", j.dump(2) + "\n");
    std::printf("Welch t = %.6g (df %.1f), p = %.6g\n", t.statistic, t.df, t.p_value);
    std::printf("KS D = %.6g, p = %.6g\n", ks.statistic, ks.p_value);
    return kOk;
}

struct GradCheckArgs {
    std::size_t nodes = 5;
    std::size_t window = 8;
    std::size_t classes = 10;
    double eps = 1e-4;
    double tolerance = 1e-4;
};

int cmd_grad_check(const CommonArgs& args, const std::vector<std::string>& extras, const GradCheckArgs& gc) {
    const RunConfig cfg = resolve_config(args, extras);
    const auto t0 = std::chrono::steady_clock::now();
    const auto graph = nn::make_check_graph(cfg.seed, gc.nodes, gc.window, static_cast<int>(cfg.seed % gc.classes));
    nn::Model model(cfg.model_config(gc.window, gc.classes), cfg.seed);
    const auto input = nn::make_graph_input(graph);
    const auto r = nn::finite_difference_check(model, input, gc.eps);
    for (const auto& t : r.tensors) {
        std::printf("%-18s %7zu  max rel %.3e  max abs %.3e\n", t.name.c_str(), t.size, t.max_rel_error, t.max_abs_error);
    }
    const bool ok = r.max_rel_error < gc.tolerance;
    std::printf("%zu entries, max rel err %.3e (%s[%zu]) %s %.0e, %.1f s\n", r.checked, r.max_rel_error,
                r.worst_tensor.c_str(), r.worst_index, ok ? "<" : ">=", gc.tolerance, seconds_since(t0));
    return ok ? kOk : kNumeric;
}

int cmd_synth(const CommonArgs& args, const std::vector<std::string>& extras) {
    const RunConfig cfg = resolve_config(args, extras);
    const auto recs = generate_synthetic_dataset(static_cast<int>(cfg.synthetic_classes), cfg.synthetic_per_class,
                                                 cfg.synthetic_length, cfg.synthetic_seed);
    const fs::path out(args.out);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());
    DatasetManifest m;
    m.class_count = static_cast<int>(cfg.synthetic_classes);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        char name[48];
        std::snprintf(name, sizeof name, "class%d_%04zu.tsg", recs[i].label, i);
        write_recording(out / name, recs[i]);
        m.entries.push_back({out / name, {0}, recs[i].label, recs[i].sample_rate_hz});
    }
    write_manifest(out / "manifest.json", m);
    std::printf("%zu recordings written to %s\n", recs.size(), out.string().c_str());
    return kOk;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"tsgraph: entropy-windowed DTW similarity graphs and a GAT+LSTM classifier"};
    app.require_subcommand(1);
    CommonArgs common;
    std::string model_path, target, other;
    GradCheckArgs gc;

    auto* scan = app.add_subcommand("scan", "entropy window scan; writes window_scan.csv");
    auto* build = app.add_subcommand("build-graph", "one graph file per sample plus graph_summary.json");
    auto* train = app.add_subcommand("train", "K-fold cross-validation; reports, logs and fold checkpoints");
    auto* evalc = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
    auto* cross = app.add_subcommand("cross-eval", "train on --data (or load --model), evaluate on --target");
    auto* stats = app.add_subcommand("stats", "Welch t-test and KS test between --data and --other");
    auto* grad = app.add_subcommand("grad-check", "finite-difference gradient check of the full model");
    auto* synth = app.add_subcommand("synth", "write the synthetic dataset as TSG1 files plus manifest.json");
    for (auto* s : {scan, build, train, evalc, cross, stats, grad, synth}) add_common(s, common);
    evalc->add_option("--model", model_path, "checkpoint (.atm)")->required();
    cross->add_option("--model", model_path, "checkpoint; skips training on --data");
    cross->add_option("--target", target, "manifest or 'synthetic' to evaluate on")->required();
    stats->add_option("--other", other, "second dataset")->required();
    grad->add_option("--nodes", gc.nodes)->capture_default_str();
    grad->add_option("--window", gc.window)->capture_default_str();
    grad->add_option("--classes", gc.classes)->capture_default_str();
    grad->add_option("--eps", gc.eps)->capture_default_str();
    grad->add_option("--tolerance", gc.tolerance)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        auto* sub = app.get_subcommands().front();
        const auto extras = sub->remaining();
        if (sub == scan) return cmd_scan(common, extras);
        if (sub == build) return cmd_build_graph(common, extras);
        if (sub == train) return cmd_train(common, extras);
        if (sub == evalc) return cmd_eval(common, extras, model_path);
        if (sub == cross) return cmd_cross_eval(common, extras, target, model_path);
        if (sub == stats) return cmd_stats(common, extras, other);
        if (sub == grad) return cmd_grad_check(common, extras, gc);
        if (sub == synth) return cmd_synth(common, extras);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const ArgumentError& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kUsage;
    } catch (const InsufficientDataError& e) {
        std::cerr << "insufficient data: " << e.what() << "\n";
        return kUsage;
    } catch (const InfeasibleBandError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIo;
    } catch (const FormatError& e) {
        std::cerr << "malformed input: " << e.what() << "\n";
        return kIo;
    } catch (const DataError& e) {
        std::cerr << "bad data: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}

}  // namespace tsg::cli
