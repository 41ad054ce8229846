#include "tsgraph/dtw.hpp"

#include "tsgraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>
#include <vector>

namespace tsg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_pair(const Matrix& x, const Matrix& y) {
    if (x.cols() == 0 || y.cols() == 0 || x.rows() == 0 || y.rows() == 0) {
        throw ArgumentError("DTW of an empty sequence");
    }
    if (x.rows() != y.rows()) {
        throw ArgumentError("DTW channel mismatch: " + std::to_string(x.rows()) + " vs " +
                            std::to_string(y.rows()));
    }
}

double local_cost(const Matrix& x, std::size_t i, const Matrix& y, std::size_t j) {
    if (x.rows() == 1) return std::abs(x(0, i) - y(0, j));
    double s = 0.0;
    for (std::size_t c = 0; c < x.rows(); ++c) {
        const double d = x(c, i) - y(c, j);
        s += d * d;
    }
    return std::sqrt(s);
}

// Two rolling rows over y; cells outside |i - j| <= radius stay infinite.
double dtw_rows(const Matrix& x, const Matrix& y, std::size_t radius) {
    const std::size_t p = x.cols(), q = y.cols();
    std::vector<double> prev(q, kInf), cur(q, kInf);
    for (std::size_t i = 0; i < p; ++i) {
        const std::size_t j_lo = i > radius ? i - radius : 0;
        const std::size_t j_hi = std::min(q - 1, i + radius);
        std::fill(cur.begin(), cur.end(), kInf);
        for (std::size_t j = j_lo; j <= j_hi; ++j) {
            double best;
            if (i == 0 && j == 0) {
                best = 0.0;
            } else {
                best = kInf;
                if (i > 0) best = std::min(best, prev[j]);
                if (j > 0) best = std::min(best, cur[j - 1]);
                if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
            }
            cur[j] = local_cost(x, i, y, j) + best;
        }
        std::swap(prev, cur);
    }
    return prev[q - 1];
}

}  // namespace

double dtw_distance(const Matrix& x, const Matrix& y) {
    check_pair(x, y);
    // the recurrence is symmetric, so iterate rows over the longer series
    if (y.cols() > x.cols()) return dtw_rows(y, x, std::max(x.cols(), y.cols()));
    return dtw_rows(x, y, std::max(x.cols(), y.cols()));
}

double dtw_distance_banded(const Matrix& x, const Matrix& y, std::size_t radius) {
    check_pair(x, y);
    const std::size_t p = x.cols(), q = y.cols();
    const std::size_t gap = p > q ? p - q : q - p;
    if (gap > radius) {
        throw InfeasibleBandError("band radius " + std::to_string(radius) +
                                  " excludes the terminal cell (length gap " + std::to_string(gap) + ")");
    }
    return dtw_rows(x, y, radius);
}

double similarity(double distance) {
    if (!(distance >= 0.0)) throw ArgumentError("similarity of a negative distance");
    return 1.0 / (1.0 + distance);
}

SimilarityMatrix pairwise_similarity(std::span<const Segment> segments, std::optional<std::size_t> band,
                                     std::size_t threads) {
    if (segments.empty()) throw ArgumentError("pairwise similarity of zero segments");
    const std::size_t n = segments.size();
    for (const auto& s : segments) {
        if (s.channels() != segments.front().channels()) {
            throw ArgumentError("segments have differing channel counts");
        }
    }

    SimilarityMatrix sim;
    sim.n = n;
    sim.values = Matrix(n, n, 1.0);
    sim.window = segments.front().width();
    sim.band = band;

    auto fill_rows = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < n; i += stride) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = band ? dtw_distance_banded(segments[i].values, segments[j].values, *band)
                                      : dtw_distance(segments[i].values, segments[j].values);
                sim.values(i, j) = similarity(d);
            }
        }
    };

    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        fill_rows(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(fill_rows, t, threads);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) sim.values(j, i) = sim.values(i, j);
    }
    return sim;
}

std::string SimilarityMatrix::to_csv() const {
    std::string out;
    char buf[32];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", values(i, j));
            out += buf;
            out += j + 1 < n ? ',' : '\n';
        }
    }
    return out;
}

}  // namespace tsg
