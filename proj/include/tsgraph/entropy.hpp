#pragma once

// Entropy-guided window selection. Entropies are in nats; the argmax over
// window sizes does not depend on the logarithm base since numerator and
// denominator of the normalized score scale together.

#include "tsgraph/segment.hpp"
#include "tsgraph/signal_io.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tsg {

constexpr int kDefaultEntropyBins = 16;

/// -sum p ln p over the empirical symbol frequencies.
double shannon_entropy(std::span<const int> symbols);

/// Per-channel min-max histogram binning: floor(bins * (x - min) / (max - min))
/// clamped to [0, bins - 1]. Constant channels map to symbol 0. Channel
/// streams are concatenated.
std::vector<int> discretize(const Matrix& segment, int bins);

struct AverageEntropy {
    double h_bar = 0.0;
    std::size_t segment_count = 0;
};

/// Mean segment entropy for window w and step s over one recording.
AverageEntropy average_entropy(const SignalRecording& rec, std::size_t w, std::size_t step, int bins);

/// Segments of all recordings are pooled into one mean.
AverageEntropy average_entropy(std::span<const SignalRecording> recs, std::size_t w,
                               std::size_t step, int bins);

/// H_bar / ln(w).
double normalized_entropy(double h_bar, std::size_t w);

struct WindowScanEntry {
    std::size_t w = 0;
    std::size_t step = 0;
    double h_bar = 0.0;
    double h_norm = 0.0;
    std::size_t segment_count = 0;
};

struct WindowScan {
    std::vector<std::size_t> candidate_sizes;
    std::optional<std::size_t> fixed_step;  // nullopt: step = w / 2
    int bins = kDefaultEntropyBins;
    std::vector<WindowScanEntry> per_size;
    std::size_t best_window = 0;

    /// "w,step,H_bar,H_norm,n" rows with 17 significant digits.
    std::string to_csv() const;
};

std::vector<std::size_t> default_window_candidates();

/// step for window w: the fixed step if given, otherwise max(1, w / 2).
std::size_t scan_step(std::size_t w, std::optional<std::size_t> fixed_step);

/// argmax of the normalized entropy over the candidates; ties go to the
/// smallest w.
WindowScan optimal_window(std::span<const SignalRecording> recs, std::span<const std::size_t> candidates,
                          std::optional<std::size_t> fixed_step, int bins = kDefaultEntropyBins);

WindowScan optimal_window(const SignalRecording& rec, std::span<const std::size_t> candidates,
                          std::optional<std::size_t> fixed_step, int bins = kDefaultEntropyBins);

}  // namespace tsg
