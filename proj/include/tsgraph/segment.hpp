#pragma once

#include "tsgraph/matrix.hpp"

#include <cstddef>
#include <vector>

namespace tsg {

/// Contiguous window of a sample; values are channels x w.
struct Segment {
    Matrix values;
    std::size_t start_index = 0;

    std::size_t width() const noexcept { return values.cols(); }
    std::size_t channels() const noexcept { return values.rows(); }
};

/// Number of windows of width w at the given step: floor((n - w) / step) + 1.
std::size_t window_count(std::size_t n, std::size_t w, std::size_t step);

/// Slices a channels x N matrix into windows U_i = T[i : i + w], i = 0, step, ...
std::vector<Segment> segment_series(const Matrix& series, std::size_t w, std::size_t step);

}  // namespace tsg
