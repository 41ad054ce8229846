#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tsg::eval {

struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::size_t> assignments;  // sample index -> fold id
    bool stratified = true;
    std::uint64_t seed = 0;

    std::vector<std::size_t> fold_indices(std::size_t fold) const;
    std::vector<std::size_t> train_indices(std::size_t fold) const;
    bool operator==(const FoldPlan&) const = default;
};

/// Shuffles with `seed`, then deals indices round-robin into k folds (per
/// class when stratified). ArgumentError when k < 2, k > n, or, when
/// stratified, k exceeds the smallest class count.
FoldPlan kfold_plan(std::span<const int> labels, std::size_t k, bool stratified = true, std::uint64_t seed = 0);

}  // namespace tsg::eval
