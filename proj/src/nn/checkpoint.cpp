#include "tsgraph/nn/checkpoint.hpp"

#include "tsgraph/error.hpp"
#include "tsgraph/le_io.hpp"

#include <json.hpp>

#include <fstream>

namespace tsg::nn {

namespace {
constexpr char kModelMagic[4] = {'A', 'T', 'M', '1'};
}

std::string config_to_json(const ModelConfig& c) {
    nlohmann::json j;
    j["input_dim"] = c.input_dim;
    j["heads"] = c.heads;
    j["hidden_per_head"] = c.hidden_per_head;
    j["gat_layers"] = c.gat_layers;
    j["final_merge"] = c.final_merge == HeadMerge::mean ? "mean" : "concat";
    j["pooled_dim"] = c.pooled_dim;
    j["lstm_input"] = c.lstm_input == LstmInput::reshape ? "reshape" : "node_sequence";
    j["seq_len"] = c.seq_len;
    j["lstm_hidden"] = c.lstm_hidden;
    j["classes"] = c.classes;
    j["leaky_slope"] = c.leaky_slope;
    j["elu_alpha"] = c.elu_alpha;
    j["dropout"] = c.dropout;
    return j.dump();
}

ModelConfig config_from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        ModelConfig c;
        c.input_dim = j.at("input_dim").get<std::size_t>();
        c.heads = j.at("heads").get<std::size_t>();
        c.hidden_per_head = j.at("hidden_per_head").get<std::size_t>();
        c.gat_layers = j.at("gat_layers").get<std::size_t>();
        c.final_merge = j.at("final_merge").get<std::string>() == "mean" ? HeadMerge::mean : HeadMerge::concat;
        c.pooled_dim = j.at("pooled_dim").get<std::size_t>();
        c.lstm_input =
            j.at("lstm_input").get<std::string>() == "reshape" ? LstmInput::reshape : LstmInput::node_sequence;
        c.seq_len = j.at("seq_len").get<std::size_t>();
        c.lstm_hidden = j.at("lstm_hidden").get<std::size_t>();
        c.classes = j.at("classes").get<std::size_t>();
        c.leaky_slope = j.at("leaky_slope").get<double>();
        c.elu_alpha = j.at("elu_alpha").get<double>();
        c.dropout = j.at("dropout").get<double>();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("checkpoint config: ") + e.what());
    }
}

std::string serialize_model(const Model& model) {
    ByteWriter w;
    w.raw(kModelMagic, 4);
    const auto cfg = config_to_json(model.config());
    w.u32(static_cast<std::uint32_t>(cfg.size()));
    w.raw(cfg.data(), cfg.size());
    const auto params = model.named_parameters();
    w.u32(static_cast<std::uint32_t>(params.size()));
    for (const auto& p : params) {
        w.u32(static_cast<std::uint32_t>(p.tensor.rows()));
        w.u32(static_cast<std::uint32_t>(p.tensor.cols()));
        for (double v : p.tensor.values()) w.f64(v);
    }
    return w.take();
}

Model deserialize_model(std::string_view bytes, const std::optional<ModelConfig>& expected) {
    if (bytes.size() < 4 || bytes.substr(0, 4) != std::string_view(kModelMagic, 4)) {
        throw FormatError("not an ATM1 checkpoint");
    }
    ByteReader rd(bytes);
    rd.skip(4);
    const auto len = rd.u32();
    const ModelConfig cfg = config_from_json(rd.take(len));
    if (expected && !(*expected == cfg)) {
        throw ConfigError("checkpoint config " + config_to_json(cfg) + " does not match expected " +
                          config_to_json(*expected));
    }
    Model model(cfg, 0);
    auto params = model.named_parameters();
    if (rd.u32() != params.size()) throw FormatError("checkpoint tensor count does not match its config");
    for (auto& p : params) {
        const std::size_t r = rd.u32(), c = rd.u32();
        if (r != p.tensor.rows() || c != p.tensor.cols()) throw FormatError("checkpoint tensor " + p.name + " has wrong shape");
        for (auto& v : p.tensor.mutable_values()) v = rd.f64();
    }
    if (rd.remaining() != 0) throw FormatError("trailing bytes after checkpoint");
    return model;
}

void save_checkpoint(const std::filesystem::path& path, const Model& model) {
    const auto bytes = serialize_model(model);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Model load_checkpoint(const std::filesystem::path& path, const std::optional<ModelConfig>& expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_model(bytes, expected);
}

}  // namespace tsg::nn
