#include "tsgraph/segment.hpp"

#include "tsgraph/error.hpp"

#include <algorithm>
#include <string>

namespace tsg {

std::size_t window_count(std::size_t n, std::size_t w, std::size_t step) {
    if (w == 0 || step == 0) throw ArgumentError("window and step must be positive");
    if (w > n) {
        throw InsufficientDataError("window " + std::to_string(w) + " exceeds series length " +
                                    std::to_string(n));
    }
    return (n - w) / step + 1;
}

std::vector<Segment> segment_series(const Matrix& series, std::size_t w, std::size_t step) {
    const std::size_t count = window_count(series.cols(), w, step);
    std::vector<Segment> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        Segment seg{Matrix(series.rows(), w), k * step};
        for (std::size_t c = 0; c < series.rows(); ++c) {
            const auto src = series.row(c).subspan(seg.start_index, w);
            std::copy(src.begin(), src.end(), seg.values.row(c).begin());
        }
        out.push_back(std::move(seg));
    }
    return out;
}

}  // namespace tsg
