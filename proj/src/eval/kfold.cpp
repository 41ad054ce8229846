#include "tsgraph/eval/kfold.hpp"

#include "tsgraph/error.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

namespace tsg::eval {

std::vector<std::size_t> FoldPlan::fold_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] == fold) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] != fold) out.push_back(i);
    }
    return out;
}

namespace {

// Fisher-Yates with an explicit index draw; std::shuffle's algorithm is
// implementation-defined.
void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace

FoldPlan kfold_plan(std::span<const int> labels, std::size_t k, bool stratified, std::uint64_t seed) {
    const std::size_t n = labels.size();
    if (k < 2) throw ArgumentError("kfold_plan: k must be at least 2");
    if (k > n) throw ArgumentError("kfold_plan: k=" + std::to_string(k) + " exceeds sample count " + std::to_string(n));

    FoldPlan plan;
    plan.k = k;
    plan.stratified = stratified;
    plan.seed = seed;
    plan.assignments.assign(n, 0);
    std::mt19937_64 rng(seed);

    std::map<int, std::vector<std::size_t>> groups;
    if (stratified) {
        for (std::size_t i = 0; i < n; ++i) groups[labels[i]].push_back(i);
        for (const auto& [label, idx] : groups) {
            if (idx.size() < k) {
                throw ArgumentError("kfold_plan: class " + std::to_string(label) + " has " +
                                    std::to_string(idx.size()) + " samples, fewer than k=" + std::to_string(k));
            }
        }
    } else {
        auto& all = groups[0];
        all.resize(n);
        std::iota(all.begin(), all.end(), 0);
    }

    // Continue the round-robin across classes so fold sizes stay within one.
    std::size_t next = 0;
    for (auto& [label, idx] : groups) {
        shuffle(idx, rng);
        for (std::size_t i : idx) {
            plan.assignments[i] = next;
            next = (next + 1) % k;
        }
    }
    return plan;
}

}  // namespace tsg::eval
