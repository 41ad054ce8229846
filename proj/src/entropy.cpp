#include "tsgraph/entropy.hpp"

#include "tsgraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tsg {

double shannon_entropy(std::span<const int> symbols) {
    if (symbols.empty()) throw ArgumentError("entropy of an empty symbol sequence");
    std::vector<int> sorted(symbols.begin(), symbols.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double h = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double p = static_cast<double>(j - i) / n;
        h -= p * std::log(p);
        i = j;
    }
    // a single symbol gives -1 * ln 1 = -0.0
    return h == 0.0 ? 0.0 : h;
}

namespace {

template <class ValueAt>
void discretize_channel(ValueAt value_at, std::size_t w, int bins, std::vector<int>& out) {
    double lo = value_at(0), hi = value_at(0);
    for (std::size_t t = 1; t < w; ++t) {
        lo = std::min(lo, value_at(t));
        hi = std::max(hi, value_at(t));
    }
    const double range = hi - lo;
    for (std::size_t t = 0; t < w; ++t) {
        if (!(range > 0)) {
            out.push_back(0);
            continue;
        }
        const double scaled = std::floor(bins * (value_at(t) - lo) / range);
        out.push_back(static_cast<int>(std::clamp(scaled, 0.0, static_cast<double>(bins - 1))));
    }
}

}  // namespace

std::vector<int> discretize(const Matrix& segment, int bins) {
    if (bins < 2) throw ArgumentError("discretize needs at least 2 bins");
    std::vector<int> out;
    out.reserve(segment.size());
    for (std::size_t c = 0; c < segment.rows(); ++c) {
        const auto row = segment.row(c);
        discretize_channel([&](std::size_t t) { return row[t]; }, row.size(), bins, out);
    }
    return out;
}

namespace {

struct EntropySum {
    double total = 0.0;
    std::size_t count = 0;
};

EntropySum entropy_sum(const SignalRecording& rec, std::size_t w, std::size_t step, int bins) {
    if (w < 2) throw ArgumentError("window size must be at least 2");
    if (bins < 2) throw ArgumentError("discretize needs at least 2 bins");
    const std::size_t n = window_count(rec.length(), w, step);
    EntropySum acc;
    std::vector<int> symbols;
    symbols.reserve(w * rec.channel_count());
    for (std::size_t k = 0; k < n; ++k) {
        symbols.clear();
        const std::size_t start = k * step;
        for (const auto& ch : rec.channels) {
            discretize_channel([&](std::size_t t) { return ch[start + t]; }, w, bins, symbols);
        }
        acc.total += shannon_entropy(symbols);
    }
    acc.count = n;
    return acc;
}

}  // namespace

AverageEntropy average_entropy(const SignalRecording& rec, std::size_t w, std::size_t step, int bins) {
    const auto acc = entropy_sum(rec, w, step, bins);
    return {acc.total / static_cast<double>(acc.count), acc.count};
}

AverageEntropy average_entropy(std::span<const SignalRecording> recs, std::size_t w,
                               std::size_t step, int bins) {
    if (recs.empty()) throw ArgumentError("average entropy over no recordings");
    EntropySum acc;
    for (const auto& rec : recs) {
        const auto part = entropy_sum(rec, w, step, bins);
        acc.total += part.total;
        acc.count += part.count;
    }
    return {acc.total / static_cast<double>(acc.count), acc.count};
}

double normalized_entropy(double h_bar, std::size_t w) {
    if (w < 2) throw ArgumentError("normalized entropy needs w >= 2");
    return h_bar / std::log(static_cast<double>(w));
}

std::vector<std::size_t> default_window_candidates() {
    return {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
}

std::size_t scan_step(std::size_t w, std::optional<std::size_t> fixed_step) {
    if (fixed_step) {
        if (*fixed_step == 0) throw ArgumentError("scan step must be positive");
        return *fixed_step;
    }
    return std::max<std::size_t>(1, w / 2);
}

WindowScan optimal_window(std::span<const SignalRecording> recs, std::span<const std::size_t> candidates,
                          std::optional<std::size_t> fixed_step, int bins) {
    if (candidates.empty()) throw ArgumentError("empty window candidate set");
    WindowScan scan;
    scan.candidate_sizes.assign(candidates.begin(), candidates.end());
    std::sort(scan.candidate_sizes.begin(), scan.candidate_sizes.end());
    scan.candidate_sizes.erase(std::unique(scan.candidate_sizes.begin(), scan.candidate_sizes.end()),
                               scan.candidate_sizes.end());
    scan.fixed_step = fixed_step;
    scan.bins = bins;

    double best = -1.0;
    for (const auto w : scan.candidate_sizes) {
        WindowScanEntry e;
        e.w = w;
        e.step = scan_step(w, fixed_step);
        const auto avg = average_entropy(recs, w, e.step, bins);
        e.h_bar = avg.h_bar;
        e.segment_count = avg.segment_count;
        e.h_norm = normalized_entropy(e.h_bar, w);
        if (e.h_norm > best) {
            best = e.h_norm;
            scan.best_window = w;
        }
        scan.per_size.push_back(e);
    }
    return scan;
}

WindowScan optimal_window(const SignalRecording& rec, std::span<const std::size_t> candidates,
                          std::optional<std::size_t> fixed_step, int bins) {
    return optimal_window(std::span<const SignalRecording>(&rec, 1), candidates, fixed_step, bins);
}

std::string WindowScan::to_csv() const {
    std::string out = "w,step,H_bar,H_norm,n\n";
    char buf[160];
    for (const auto& e : per_size) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%zu\n", e.w, e.step, e.h_bar, e.h_norm,
                      e.segment_count);
        out += buf;
    }
    return out;
}

}  // namespace tsg
