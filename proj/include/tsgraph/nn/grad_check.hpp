#pragma once

#include "tsgraph/graph.hpp"
#include "tsgraph/nn/model.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tsg::nn {

struct GradCheckTensor {
    std::string name;
    std::size_t size = 0;
    double max_rel_error = 0.0;
    double max_abs_error = 0.0;
};

struct GradCheckResult {
    std::vector<GradCheckTensor> tensors;
    double max_rel_error = 0.0;
    std::string worst_tensor;
    std::size_t worst_index = 0;
    std::size_t checked = 0;
};

/// Relative error |a - b| / max(|a|, |b|, floor). The floor sits above the
/// central-difference round-off level (~1e-11 for eps = 1e-4 and an O(1)
/// loss), so entries whose true gradient is ~0 do not turn noise into ratios.
double relative_error(double analytic, double numeric, double floor = 1e-6);

/// Random graph with z-normalized features and a seeded edge set.
SimilarityGraph make_check_graph(std::uint64_t seed, std::size_t nodes = 5, std::size_t window = 8,
                                 int label = 0);

/// Central differences of the NLL loss over every parameter entry.
GradCheckResult finite_difference_check(Model& model, const GraphInput& g, double eps = 1e-4);

}  // namespace tsg::nn
