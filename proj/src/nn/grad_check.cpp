#include "tsgraph/nn/grad_check.hpp"

#include "tsgraph/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tsg::nn {

double relative_error(double analytic, double numeric, double floor) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
    return std::abs(analytic - numeric) / denom;
}

SimilarityGraph make_check_graph(std::uint64_t seed, std::size_t nodes, std::size_t window, int label) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    std::vector<Segment> segments;
    for (std::size_t k = 0; k < nodes; ++k) {
        Segment s{Matrix(1, window), k * window};
        for (auto& v : s.values.data()) v = normal(rng);
        segments.push_back(std::move(s));
    }
    SimilarityMatrix sim;
    sim.n = nodes;
    sim.window = window;
    sim.values = Matrix(nodes, nodes, 1.0);
    for (std::size_t i = 0; i < nodes; ++i) {
        for (std::size_t j = i + 1; j < nodes; ++j) {
            const double v = coin(rng) ? 0.9 : 0.1;
            sim.values(i, j) = sim.values(j, i) = v;
        }
    }
    return build_graph(segments, sim, 0.5, label);
}

GradCheckResult finite_difference_check(Model& model, const GraphInput& g, double eps) {
    const int labels[] = {g.label};
    auto loss_value = [&] { return nll_loss(model.forward(g), labels).item(); };

    model.zero_grad();
    nll_loss(model.forward(g), labels).backward();

    GradCheckResult result;
    for (auto& [name, tensor] : model.named_parameters()) {
        GradCheckTensor entry{name, tensor.size(), 0.0, 0.0};
        const std::vector<double> analytic = tensor.grad().empty()
                                                 ? std::vector<double>(tensor.size(), 0.0)
                                                 : std::vector<double>(tensor.grad().begin(), tensor.grad().end());
        auto vals = tensor.mutable_values();
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const double saved = vals[i];
            vals[i] = saved + eps;
            const double up = loss_value();
            vals[i] = saved - eps;
            const double down = loss_value();
            vals[i] = saved;
            const double numeric = (up - down) / (2 * eps);
            const double rel = relative_error(analytic[i], numeric);
            entry.max_rel_error = std::max(entry.max_rel_error, rel);
            entry.max_abs_error = std::max(entry.max_abs_error, std::abs(analytic[i] - numeric));
            if (rel > result.max_rel_error) {
                result.max_rel_error = rel;
                result.worst_tensor = name;
                result.worst_index = i;
            }
            ++result.checked;
        }
        result.tensors.push_back(entry);
    }
    return result;
}

}  // namespace tsg::nn
