#include "triage/search.hpp"

#include "triage/error.hpp"
#include "triage/eval.hpp"
#include "triage/rng.hpp"

#include <algorithm>

namespace triage {

SearchSpace SearchSpace::defaults() {
    SearchSpace s;
    for (std::size_t n = 50; n <= 500; n += 50) s.n_trees.push_back(n);
    for (std::size_t d = 4; d <= 32; d += 4) s.max_depth.emplace_back(d);
    s.max_depth.emplace_back(std::nullopt);
    for (std::size_t v = 2; v <= 16; ++v) s.min_samples_split.push_back(v);
    for (std::size_t v = 1; v <= 8; ++v) s.min_leaf.push_back(v);
    s.features_rule = {MaxFeaturesRule::sqrt, MaxFeaturesRule::log2};
    s.bootstrap = {true};
    return s;
}

void SearchSpace::validate() const {
    if (n_trees.empty() || max_depth.empty() || min_samples_split.empty() || min_leaf.empty() ||
        features_rule.empty() || bootstrap.empty()) {
        throw Error(ErrorKind::invalid_argument, "search space has an empty value list");
    }
}

namespace {

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& values) {
    return values[rng.below(values.size())];
}

HyperParams sample(Rng& rng, const SearchSpace& space) {
    HyperParams p;
    p.n_trees = pick(rng, space.n_trees);
    p.max_depth = pick(rng, space.max_depth);
    p.min_samples_split = pick(rng, space.min_samples_split);
    p.min_leaf = std::min(pick(rng, space.min_leaf), p.min_samples_split);
    p.features_rule = pick(rng, space.features_rule);
    p.bootstrap = space.bootstrap[rng.below(space.bootstrap.size())];
    return p;
}

}  // namespace

SearchResult random_search(const Matrix& x, std::span<const Label> labels, const SearchSpace& space,
                           std::size_t iters, std::size_t folds, std::uint64_t seed, const SearchOptions& options) {
    space.validate();
    if (iters == 0) throw Error(ErrorKind::invalid_argument, "iters must be >= 1");
    if (labels.size() != x.rows()) throw Error(ErrorKind::shape, "labels/rows mismatch");
    const auto partition = kfold_split(labels, folds, seed);

    // Per-fold training data is the same for every trial; build it once.
    std::vector<Matrix> train_x(folds);
    std::vector<std::vector<Label>> train_y(folds);
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> train;
        for (std::size_t g = 0; g < folds; ++g) {
            if (g != f) train.insert(train.end(), partition[g].begin(), partition[g].end());
        }
        std::sort(train.begin(), train.end());
        train_x[f] = x.select_rows(train);
        for (auto i : train) train_y[f].push_back(labels[i]);
    }

    Rng rng(seed);
    SearchResult result;
    bool have_best = false;
    for (std::size_t it = 0; it < iters; ++it) {
        const HyperParams params = sample(rng, space);
        double sum = 0.0;
        for (std::size_t f = 0; f < folds; ++f) {
            const Forest forest =
                fit_forest(train_x[f], train_y[f], params, seed + f, FitOptions{options.allowed_columns, options.workers});
            ++result.fits;
            std::size_t correct = 0;
            for (auto i : partition[f]) correct += predict(forest, x.row(i)) == labels[i];
            sum += static_cast<double>(correct) / static_cast<double>(partition[f].size());
        }
        const double mean = sum / static_cast<double>(folds);
        result.trials.emplace_back(params, mean);
        if (!have_best || mean > result.mean_accuracy) {
            result.params = params;
            result.mean_accuracy = mean;
            have_best = true;
        }
    }
    return result;
}

}  // namespace triage
