#include "tsgraph/graph.hpp"

#include "tsgraph/error.hpp"
#include "tsgraph/le_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

namespace tsg {

namespace {
constexpr char kGraphMagic[4] = {'A', 'T', 'G', '1'};
constexpr std::uint32_t kGraphVersion = 1;
}  // namespace

std::vector<double> znormalize_segment(const Matrix& values) {
    std::vector<double> out(values.size(), 0.0);
    const std::size_t w = values.cols();
    for (std::size_t c = 0; c < values.rows(); ++c) {
        const auto row = values.row(c);
        double mean = 0.0;
        for (double v : row) mean += v;
        mean /= static_cast<double>(w);
        double var = 0.0;
        for (double v : row) var += (v - mean) * (v - mean);
        var /= static_cast<double>(w);
        if (!(var > 0.0)) continue;
        const double inv_sd = 1.0 / std::sqrt(var);
        for (std::size_t t = 0; t < w; ++t) out[c * w + t] = (row[t] - mean) * inv_sd;
    }
    return out;
}

SimilarityGraph build_graph(std::span<const Segment> segments, const SimilarityMatrix& sim, double tau,
                            int label) {
    if (!(tau >= 0.0)) throw ArgumentError("similarity threshold must be non-negative");
    if (segments.empty()) throw ArgumentError("graph of zero segments");
    if (sim.n != segments.size()) throw ArgumentError("similarity matrix does not match segment count");

    SimilarityGraph g;
    g.window = segments.front().width();
    g.channels = segments.front().channels();
    g.label = label;
    g.tau_used = static_cast<float>(tau);
    g.node_features.reserve(segments.size() * g.feature_dim());
    for (std::size_t k = 0; k < segments.size(); ++k) {
        const auto& s = segments[k];
        if (s.width() != g.window || s.channels() != g.channels) {
            throw ArgumentError("segments differ in shape");
        }
        if (k > 0 && s.start_index <= segments[k - 1].start_index) {
            throw ArgumentError("segments must be in strictly increasing start order");
        }
        g.node_order.push_back(s.start_index);
        for (double v : znormalize_segment(s.values)) g.node_features.push_back(static_cast<float>(v));
    }

    if (tau >= 1.0) {
        std::clog << "warning: similarity threshold " << tau << " >= 1 leaves the graph edgeless\n";
    }
    for (std::size_t i = 0; i < sim.n; ++i) {
        for (std::size_t j = i + 1; j < sim.n; ++j) {
            const float w = static_cast<float>(sim.values(i, j));
            if (w > g.tau_used) {
                g.edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), w});
            }
        }
    }
    return g;
}

double threshold_from_quantile(const SimilarityMatrix& sim, double q) {
    if (sim.n < 2) throw ArgumentError("quantile threshold needs at least 2 nodes");
    if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("quantile must lie in [0, 1]");
    std::vector<double> vals;
    vals.reserve(sim.n * (sim.n - 1) / 2);
    for (std::size_t i = 0; i < sim.n; ++i) {
        for (std::size_t j = i + 1; j < sim.n; ++j) vals.push_back(sim.values(i, j));
    }
    std::sort(vals.begin(), vals.end());
    const double pos = q * static_cast<double>(vals.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, vals.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return vals[lo] + frac * (vals[hi] - vals[lo]);
}

SimilarityGraph sample_to_graph(const LabeledSample& sample, const GraphOptions& opts) {
    if (opts.window > sample.length()) {
        throw InsufficientDataError("graph window " + std::to_string(opts.window) +
                                    " exceeds sample length " + std::to_string(sample.length()));
    }
    const auto segments = segment_series(sample.data, opts.window, opts.effective_step());
    const auto sim = pairwise_similarity(segments, opts.band, opts.threads);
    double tau = opts.tau.value;
    if (opts.tau.kind == TauPolicy::Kind::quantile) {
        // a single node has no pairs to threshold
        tau = sim.n >= 2 ? threshold_from_quantile(sim, opts.tau.value) : 0.0;
    }
    return build_graph(segments, sim, tau, sample.label);
}

std::string serialize_graph(const SimilarityGraph& g) {
    const std::size_t n = g.node_count();
    if (g.node_features.size() != n * g.feature_dim()) throw ArgumentError("graph feature size mismatch");
    ByteWriter w;
    w.raw(kGraphMagic, 4);
    w.u32(kGraphVersion);
    w.u32(static_cast<std::uint32_t>(n));
    w.u32(static_cast<std::uint32_t>(g.window));
    w.u32(static_cast<std::uint32_t>(g.channels));
    w.u32(static_cast<std::uint32_t>(g.edges.size()));
    w.i32(g.label);
    w.f32(g.tau_used);
    for (auto s : g.node_order) w.u64(s);
    for (float v : g.node_features) w.f32(v);
    for (const auto& e : g.edges) {
        w.u32(e.i);
        w.u32(e.j);
        w.f32(e.weight);
    }
    return w.take();
}

SimilarityGraph deserialize_graph(std::string_view bytes) {
    if (bytes.size() < 8 || bytes.substr(0, 4) != std::string_view(kGraphMagic, 4)) {
        throw FormatError("not an ATG1 graph container");
    }
    ByteReader rd(bytes);
    rd.skip(4);
    const auto version = rd.u32();
    if (version != kGraphVersion) {
        throw FormatError("unsupported graph container version " + std::to_string(version));
    }
    SimilarityGraph g;
    const std::size_t n = rd.u32();
    g.window = rd.u32();
    g.channels = rd.u32();
    const std::size_t e = rd.u32();
    g.label = rd.i32();
    g.tau_used = rd.f32();
    const std::size_t expected = 8 * n + 4 * n * g.feature_dim() + 12 * e;
    if (rd.remaining() != expected) throw FormatError("graph container size does not match its header");
    g.node_order.resize(n);
    for (auto& s : g.node_order) s = rd.u64();
    g.node_features.resize(n * g.feature_dim());
    for (auto& v : g.node_features) v = rd.f32();
    g.edges.resize(e);
    for (auto& edge : g.edges) {
        edge.i = rd.u32();
        edge.j = rd.u32();
        edge.weight = rd.f32();
        if (edge.i >= n || edge.j >= n || edge.i == edge.j) throw FormatError("graph edge index out of range");
    }
    return g;
}

void write_graph(const std::filesystem::path& path, const SimilarityGraph& g) {
    const auto bytes = serialize_graph(g);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + path.string());
}

SimilarityGraph read_graph(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_graph(bytes);
}

std::string graph_to_json(const SimilarityGraph& g) {
    nlohmann::json doc;
    doc["label"] = g.label;
    doc["tau"] = g.tau_used;
    doc["window"] = g.window;
    doc["channels"] = g.channels;
    doc["nodes"] = nlohmann::json::array();
    const std::size_t f = g.feature_dim();
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        doc["nodes"].push_back({{"start", g.node_order[k]},
                                {"features", std::vector<float>(g.node_features.begin() + static_cast<std::ptrdiff_t>(k * f),
                                                                g.node_features.begin() + static_cast<std::ptrdiff_t>((k + 1) * f))}});
    }
    doc["edges"] = nlohmann::json::array();
    for (const auto& e : g.edges) doc["edges"].push_back({e.i, e.j, e.weight});
    return doc.dump(2);
}

}  // namespace tsg
