#pragma once

#include "triage/labels.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace triage {

/// Dense row-major matrix of encoded features.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    void append_row(std::span<const double> values);
    /// Rows at `indices`, in that order.
    Matrix select_rows(std::span<const std::size_t> indices) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// 1 - sum (c_i / n)^2. Throws Error(empty_node) for all-zero counts.
double gini(const ClassCounts& counts);

ClassCounts count_labels(std::span<const Label> labels, std::span<const std::size_t> rows);

struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity_decrease = 0.0;
};

/// Best axis-aligned split of `rows` (indices into x/labels, duplicates
/// allowed). Thresholds are midpoints of consecutive distinct values;
/// values <= threshold go left. Maximizes gini(parent) - weighted child
/// impurity subject to both children holding >= min_leaf rows; ties go to the
/// lower feature index, then the lower threshold. nullopt when no legal split
/// decreases impurity.
std::optional<Split> best_split(const Matrix& x, std::span<const Label> labels, std::span<const std::size_t> rows,
                                std::span<const std::size_t> candidate_features, std::size_t min_leaf);

enum class MaxFeaturesRule { sqrt, log2, all, count };

struct HyperParams {
    std::size_t n_trees = 100;
    std::optional<std::size_t> max_depth;  // nullopt = unbounded
    std::size_t min_samples_split = 2;
    std::size_t min_leaf = 1;
    MaxFeaturesRule features_rule = MaxFeaturesRule::sqrt;
    std::size_t features_count = 0;  // used when features_rule == count
    bool bootstrap = true;

    /// Throws Error(invalid_argument) unless all counts >= 1 and
    /// min_leaf <= min_samples_split.
    void validate() const;
    /// Features drawn per split out of `available`.
    std::size_t features_per_split(std::size_t available) const;

    std::string describe() const;
    bool operator==(const HyperParams&) const = default;
};

std::string_view to_string(MaxFeaturesRule r);
std::optional<MaxFeaturesRule> parse_max_features_rule(std::string_view text);

struct TreeNode {
    std::int32_t feature = -1;  // -1 for leaves
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    ClassCounts counts{};  // training rows reaching this node

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

/// Decision tree stored as a flat node array; node 0 is the root.
struct Tree {
    std::vector<TreeNode> nodes;

    std::size_t leaf_index(std::span<const double> row) const;
    /// Node indices from root to leaf.
    std::vector<std::size_t> path(std::span<const double> row) const;
    ClassProbabilities leaf_probabilities(std::span<const double> row) const;
    std::size_t depth() const;

    bool operator==(const Tree&) const = default;
};

ClassProbabilities frequencies(const ClassCounts& counts);

struct Forest {
    std::vector<Tree> trees;
    HyperParams params;
    std::uint64_t seed = 0;
    std::size_t width = 0;
    /// Encoded columns trees were allowed to split on.
    std::vector<std::size_t> allowed_columns;

    bool operator==(const Forest&) const = default;
};

struct FitOptions {
    /// Columns eligible for splits; empty means every column.
    std::vector<std::size_t> allowed_columns;
    /// Worker threads for tree fitting; 0 picks hardware concurrency.
    /// Results do not depend on this value.
    std::size_t workers = 0;
};

/// Tree t is grown from Rng(seed + t): bootstrap resample (if enabled), then
/// a fresh candidate-feature subset at every split. Throws Error(shape) if
/// rows and labels disagree and Error(invalid_argument) for bad params.
Forest fit_forest(const Matrix& x, std::span<const Label> labels, const HyperParams& params, std::uint64_t seed,
                  const FitOptions& options = {});

/// Grows one tree on `rows` (may contain duplicates).
Tree fit_tree(const Matrix& x, std::span<const Label> labels, std::span<const std::size_t> rows,
              const HyperParams& params, std::span<const std::size_t> allowed_columns, std::uint64_t seed);

/// Mean of per-tree leaf class frequencies. Throws Error(shape) on a width
/// mismatch.
ClassProbabilities predict_proba(const Forest& forest, std::span<const double> row);
Label predict(const Forest& forest, std::span<const double> row);

/// Mean decrease in impurity per encoded column: sum over nodes of
/// (node rows / root rows) x impurity decrease, averaged over trees,
/// normalized to sum 1 (all zeros when no tree splits).
std::vector<double> column_importance(const Forest& forest);

/// Folds column importances onto `sources` groups (column i contributes to
/// group source_of[i]) and renormalizes.
std::vector<double> fold_importance(std::span<const double> column_importance, std::span<const std::size_t> source_of,
                                    std::size_t groups);

}  // namespace triage
