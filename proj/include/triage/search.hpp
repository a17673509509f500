#pragma once

#include "triage/forest.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace triage {

/// Candidate values per hyperparameter. Each sampled setting draws one value
/// uniformly from every list, in declaration order.
struct SearchSpace {
    std::vector<std::size_t> n_trees;
    std::vector<std::optional<std::size_t>> max_depth;
    std::vector<std::size_t> min_samples_split;
    std::vector<std::size_t> min_leaf;
    std::vector<MaxFeaturesRule> features_rule;
    std::vector<bool> bootstrap;

    /// n_trees 50..500 step 50, depth 4..32 step 4 or unbounded,
    /// min_samples_split 2..16, min_leaf 1..8, sqrt/log2, bootstrap on.
    static SearchSpace defaults();
    /// Throws Error(invalid_argument) if any list is empty.
    void validate() const;
};

struct SearchResult {
    HyperParams params;
    double mean_accuracy = 0.0;
    std::size_t fits = 0;  // forests trained (iterations x folds)
    /// Every sampled setting with its mean fold accuracy, in draw order.
    std::vector<std::pair<HyperParams, double>> trials;
};

struct SearchOptions {
    std::vector<std::size_t> allowed_columns;
    std::size_t workers = 0;
};

/// Samples `iters` settings from Rng(seed), scores each by mean accuracy over
/// one stratified k-fold partition (kfold_split with `seed`; fold f trains
/// with forest seed `seed + f`) and returns the best. The earlier iteration
/// wins ties. min_leaf is clamped to min_samples_split. Throws
/// Error(unstratifiable) when labels cannot be split into `folds`.
SearchResult random_search(const Matrix& x, std::span<const Label> labels, const SearchSpace& space,
                           std::size_t iters, std::size_t folds, std::uint64_t seed,
                           const SearchOptions& options = {});

}  // namespace triage
