#pragma once

// Similarity graphs built from one labeled sample.
//
// Nodes are the sample's windows in start-index order; node features are the
// window values z-normalized per channel and flattened channel-major
// (F = window * channels). Similarities and features are stored as binary32,
// and the edge rule compares binary32 values, so a graph survives the ATG1
// container bit-exactly and every stored weight is strictly above tau_used.
//
// ATG1 layout, little-endian:
//   magic "ATG1" | u32 version (1) | u32 node count n | u32 window
//   | u32 channels | u32 edge count E | i32 label | f32 tau
//   | n x u64 node start index | n*F x f32 features | E x (u32 i, u32 j, f32 weight)
// for a total of 32 + 8n + 4nF + 12E bytes. Edges are undirected, stored once
// with i < j.

#include "tsgraph/dtw.hpp"
#include "tsgraph/segment.hpp"
#include "tsgraph/signal_io.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsg {

struct Edge {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    float weight = 0.0f;

    bool operator==(const Edge&) const = default;
};

struct SimilarityGraph {
    std::size_t window = 0;
    std::size_t channels = 0;
    std::vector<float> node_features;  // n x F row-major
    std::vector<Edge> edges;
    std::vector<std::uint64_t> node_order;
    int label = 0;
    float tau_used = 0.0f;

    std::size_t node_count() const noexcept { return node_order.size(); }
    std::size_t feature_dim() const noexcept { return window * channels; }

    bool operator==(const SimilarityGraph&) const = default;
};

struct TauPolicy {
    enum class Kind { fixed, quantile };
    Kind kind = Kind::quantile;
    double value = 0.5;

    static TauPolicy fixed(double tau) { return {Kind::fixed, tau}; }
    static TauPolicy quantile(double q) { return {Kind::quantile, q}; }
};

/// Per-channel z-normalization, channel-major flattening. Zero-variance
/// channels map to zeros.
std::vector<double> znormalize_segment(const Matrix& values);

/// Edge (i, j) iff binary32 Sim(i, j) > binary32 tau. tau >= 1 yields an
/// edgeless graph.
SimilarityGraph build_graph(std::span<const Segment> segments, const SimilarityMatrix& sim, double tau,
                            int label = 0);

/// Linear-interpolation q-quantile of the off-diagonal upper-triangle values.
double threshold_from_quantile(const SimilarityMatrix& sim, double q);

struct GraphOptions {
    std::size_t window = 32;
    std::size_t step = 0;  // 0: window / 2
    TauPolicy tau;
    std::optional<std::size_t> band;
    std::size_t threads = 1;

    std::size_t effective_step() const noexcept { return step != 0 ? step : std::max<std::size_t>(1, window / 2); }
};

SimilarityGraph sample_to_graph(const LabeledSample& sample, const GraphOptions& opts);

std::string serialize_graph(const SimilarityGraph& g);
SimilarityGraph deserialize_graph(std::string_view bytes);

void write_graph(const std::filesystem::path& path, const SimilarityGraph& g);
SimilarityGraph read_graph(const std::filesystem::path& path);

/// Debug export: {"label", "tau", "window", "channels", "nodes": [{"start", "features"}],
/// "edges": [[i, j, w], ...]}.
std::string graph_to_json(const SimilarityGraph& g);

}  // namespace tsg
