#pragma once

// Dynamic time warping over channel-major series (rows = channels,
// cols = time). The local cost is the Euclidean norm across channels at the
// aligned time indices, and the distance is the raw cumulative path cost
// (no path-length normalization). Segments compared inside one graph share
// the same width, so raw costs stay comparable.

#include "tsgraph/matrix.hpp"
#include "tsgraph/segment.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace tsg {

double dtw_distance(const Matrix& x, const Matrix& y);

/// Sakoe-Chiba band |i - j| <= radius. Never below the exact distance and
/// equal to it whenever the optimal path fits in the band.
double dtw_distance_banded(const Matrix& x, const Matrix& y, std::size_t radius);

/// 1 / (1 + d).
double similarity(double distance);

struct SimilarityMatrix {
    std::size_t n = 0;
    Matrix values;                    // symmetric, unit diagonal
    std::size_t window = 0;
    std::optional<std::size_t> band;  // nullopt: exact DTW

    std::string to_csv() const;
};

/// Upper triangle computed, mirrored, diagonal fixed to 1. `threads` > 1
/// splits rows across workers; the result does not depend on it.
SimilarityMatrix pairwise_similarity(std::span<const Segment> segments,
                                     std::optional<std::size_t> band = std::nullopt,
                                     std::size_t threads = 1);

}  // namespace tsg
