#pragma once

// Inner loops shared by the dense and graph operations.

#include <cstddef>
#include <experimental/simd>

namespace tsg::nn::kernels {

namespace stdx = std::experimental;
using block8 = stdx::fixed_size_simd<double, 8>;
using block16 = stdx::fixed_size_simd<double, 16>;

// out[k] += sum over p in [lo, hi) of weight(p) * row(p)[k], k < f.
// Partial sums for 16 (then 8) columns at a time stay in registers.
template <typename Weight, typename Row>
inline void gather_accumulate(double* out, std::size_t f, std::size_t lo, std::size_t hi, Weight weight, Row row) {
    std::size_t k0 = 0;
    for (; k0 + 16 <= f; k0 += 16) {
        block16 acc = 0.0;
        for (std::size_t p = lo; p < hi; ++p) acc += weight(p) * block16(row(p) + k0, stdx::element_aligned);
        (block16(out + k0, stdx::element_aligned) + acc).copy_to(out + k0, stdx::element_aligned);
    }
    for (; k0 + 8 <= f; k0 += 8) {
        block8 acc = 0.0;
        for (std::size_t p = lo; p < hi; ++p) acc += weight(p) * block8(row(p) + k0, stdx::element_aligned);
        (block8(out + k0, stdx::element_aligned) + acc).copy_to(out + k0, stdx::element_aligned);
    }
    for (; k0 < f; ++k0) {
        double acc = 0.0;
        for (std::size_t p = lo; p < hi; ++p) acc += weight(p) * row(p)[k0];
        out[k0] += acc;
    }
}

inline double dot(const double* x, const double* y, std::size_t n) {
    std::size_t k = 0;
    double s = 0.0;
    if (n >= 8) {
        block8 acc = 0.0;
        for (; k + 8 <= n; k += 8) {
            acc += block8(x + k, stdx::element_aligned) * block8(y + k, stdx::element_aligned);
        }
        s = stdx::reduce(acc);
    }
    for (; k < n; ++k) s += x[k] * y[k];
    return s;
}

}  // namespace tsg::nn::kernels
