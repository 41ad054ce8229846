#include "tsgraph/config.hpp"

#include "tsgraph/error.hpp"

#include <json.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace tsg {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

template <typename T>
T as(const json& v, const std::string& key) {
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (v.is_string()) {
                const auto s = v.get<std::string>();
                if (s == "true") return true;
                if (s == "false") return false;
            }
            if (!v.is_boolean()) throw ConfigError("");
        } else if constexpr (std::is_unsigned_v<T>) {
            if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError("");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError("");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError("");
        } else {
            if (!v.is_string()) throw ConfigError("");
        }
        return v.get<T>();
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': invalid value " + v.dump());
    }
}

std::vector<std::size_t> as_sizes(const json& v, const std::string& key) {
    std::vector<std::size_t> out;
    if (v.is_string()) {
        std::stringstream ss(v.get<std::string>());
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t used = 0;
                const long long n = std::stoll(item, &used);
                if (used != item.size() || n < 0) throw std::invalid_argument(item);
                out.push_back(static_cast<std::size_t>(n));
            } catch (const std::exception&) {
                throw ConfigError("config key '" + key + "': invalid list item '" + item + "'");
            }
        }
        return out;
    }
    if (!v.is_array()) throw ConfigError("config key '" + key + "': expected a list of integers");
    for (const auto& x : v) out.push_back(as<std::size_t>(x, key));
    return out;
}

struct Field {
    std::function<void(RunConfig&, const json&)> set;
    std::function<json(const RunConfig&)> get;
};

template <typename T>
Field field(T RunConfig::*member, const std::string& key) {
    return {[member, key](RunConfig& c, const json& v) { c.*member = as<T>(v, key); },
            [member](const RunConfig& c) { return json(c.*member); }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table = [] {
        std::vector<std::pair<std::string, Field>> t;
#define TSG_FIELD(name) t.emplace_back(#name, field(&RunConfig::name, #name))
        TSG_FIELD(sample_len);
        TSG_FIELD(stride);
        TSG_FIELD(max_per_class);
        t.emplace_back("windows", Field{[](RunConfig& c, const json& v) { c.windows = as_sizes(v, "windows"); },
                                        [](const RunConfig& c) { return json(c.windows); }});
        TSG_FIELD(scan_step);
        TSG_FIELD(bins);
        TSG_FIELD(scan_recordings);
        TSG_FIELD(window);
        TSG_FIELD(graph_step);
        TSG_FIELD(tau_policy);
        TSG_FIELD(tau);
        TSG_FIELD(band);
        TSG_FIELD(heads);
        TSG_FIELD(hidden_per_head);
        TSG_FIELD(gat_layers);
        TSG_FIELD(final_merge);
        TSG_FIELD(pooled_dim);
        TSG_FIELD(lstm_input);
        TSG_FIELD(seq_len);
        TSG_FIELD(lstm_hidden);
        TSG_FIELD(leaky_slope);
        TSG_FIELD(elu_alpha);
        TSG_FIELD(dropout);
        TSG_FIELD(lr);
        TSG_FIELD(beta1);
        TSG_FIELD(beta2);
        TSG_FIELD(eps);
        TSG_FIELD(weight_decay);
        TSG_FIELD(epochs);
        TSG_FIELD(batch);
        TSG_FIELD(folds);
        TSG_FIELD(stratified);
        TSG_FIELD(seed);
        TSG_FIELD(normal_class);
        TSG_FIELD(threads);
        TSG_FIELD(synthetic_classes);
        TSG_FIELD(synthetic_per_class);
        TSG_FIELD(synthetic_length);
        TSG_FIELD(synthetic_seed);
#undef TSG_FIELD
        return t;
    }();
    return table;
}

const Field& lookup(const std::string& key) {
    for (const auto& [name, f] : fields()) {
        if (name == key) return f;
    }
    throw ConfigError("unknown config key '" + key + "'");
}

nn::HeadMerge parse_merge(const std::string& s) {
    if (s == "mean") return nn::HeadMerge::mean;
    if (s == "concat") return nn::HeadMerge::concat;
    throw ConfigError("final_merge must be 'mean' or 'concat', got '" + s + "'");
}

nn::LstmInput parse_lstm_input(const std::string& s) {
    if (s == "reshape") return nn::LstmInput::reshape;
    if (s == "node_sequence") return nn::LstmInput::node_sequence;
    throw ConfigError("lstm_input must be 'reshape' or 'node_sequence', got '" + s + "'");
}

}  // namespace

std::vector<std::string> RunConfig::keys() {
    std::vector<std::string> out;
    for (const auto& [name, f] : fields()) out.push_back(name);
    return out;
}

void RunConfig::set(const std::string& key, const std::string& text) {
    const Field& f = lookup(key);
    json v;
    try {
        v = json::parse(text);
    } catch (const json::exception&) {
        v = text;
    }
    f.set(*this, v);
}

void RunConfig::apply_json(const std::string& json_object) {
    json doc;
    try {
        doc = json::parse(json_object);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : doc.items()) lookup(key).set(*this, value);
}

std::string RunConfig::to_json() const {
    ordered_json doc;
    for (const auto& [name, f] : fields()) doc[name] = f.get(*this);
    return doc.dump(2) + "\n";
}

void RunConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (sample_len == 0 || stride == 0) fail("sample_len and stride must be positive");
    if (windows.empty() && window == 0) fail("windows is empty and no fixed window is set");
    for (auto w : windows) {
        if (w < 2) fail("window candidates must be at least 2");
        if (w > sample_len) fail("window candidate " + std::to_string(w) + " exceeds sample_len");
    }
    if (window == 1) fail("window must be at least 2");
    if (window > sample_len) fail("window exceeds sample_len");
    if (bins < 2) fail("bins must be at least 2");
    if (scan_recordings == 0) fail("scan_recordings must be positive");
    if (tau_policy != "quantile" && tau_policy != "fixed") fail("tau_policy must be 'quantile' or 'fixed'");
    if (tau_policy == "quantile" && !(tau >= 0.0 && tau <= 1.0)) fail("quantile tau must lie in [0, 1]");
    if (tau_policy == "fixed" && !(tau >= 0.0)) fail("fixed tau must be non-negative");
    if (epochs > 0 && batch == 0) fail("batch must be positive");
    if (folds < 2) fail("folds must be at least 2");
    if (!(lr > 0.0)) fail("lr must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) fail("betas must lie in [0, 1)");
    if (!(eps > 0.0)) fail("eps must be positive");
    if (!(weight_decay >= 0.0)) fail("weight_decay must be non-negative");
    if (synthetic_classes < 2) fail("synthetic_classes must be at least 2");
    parse_merge(final_merge);
    parse_lstm_input(lstm_input);
    // Closes the GAT -> pool -> LSTM chain with a placeholder input width.
    model_config(1, std::max<std::size_t>(2, normal_class + 1)).validate();
}

GraphOptions RunConfig::graph_options(std::size_t resolved_window) const {
    GraphOptions g;
    g.window = resolved_window;
    g.step = graph_step;
    g.tau = tau_policy == "fixed" ? TauPolicy::fixed(tau) : TauPolicy::quantile(tau);
    if (band >= 0) g.band = static_cast<std::size_t>(band);
    g.threads = 1;
    return g;
}

nn::ModelConfig RunConfig::model_config(std::size_t input_dim, std::size_t classes) const {
    nn::ModelConfig m;
    m.input_dim = input_dim;
    m.heads = heads;
    m.hidden_per_head = hidden_per_head;
    m.gat_layers = gat_layers;
    m.final_merge = parse_merge(final_merge);
    m.pooled_dim = pooled_dim;
    m.lstm_input = parse_lstm_input(lstm_input);
    m.seq_len = seq_len;
    m.lstm_hidden = lstm_hidden;
    m.classes = classes;
    m.leaky_slope = leaky_slope;
    m.elu_alpha = elu_alpha;
    m.dropout = dropout;
    return m;
}

eval::TrainOptions RunConfig::train_options() const {
    eval::TrainOptions t;
    t.epochs = epochs;
    t.batch = batch;
    t.adam = {lr, beta1, beta2, eps, weight_decay};
    t.seed = seed;
    t.normal_class = normal_class;
    t.threads = threads;
    return t;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    RunConfig cfg;
    cfg.apply_json(ss.str());
    return cfg;
}

}  // namespace tsg
