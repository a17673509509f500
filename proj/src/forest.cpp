#include "triage/forest.hpp"

#include "triage/error.hpp"
#include "triage/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

namespace triage {

void Matrix::append_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    if (values.size() != cols_) throw Error(ErrorKind::shape, "row width mismatch");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const auto src = row(indices[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

double gini(const ClassCounts& counts) {
    const double n = static_cast<double>(counts[0]) + counts[1] + counts[2];
    if (n == 0) throw Error(ErrorKind::empty_node, "gini of an empty node");
    double sum_sq = 0.0;
    for (auto c : counts) {
        const double p = c / n;
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

ClassCounts count_labels(std::span<const Label> labels, std::span<const std::size_t> rows) {
    ClassCounts c{};
    for (auto r : rows) ++c[index_of(labels[r])];
    return c;
}

ClassProbabilities frequencies(const ClassCounts& counts) {
    const double n = static_cast<double>(counts[0]) + counts[1] + counts[2];
    ClassProbabilities p{};
    if (n == 0) return p;
    for (std::size_t i = 0; i < kClassCount; ++i) p[i] = counts[i] / n;
    return p;
}

// ---------------------------------------------------------------------------
// Hyperparameters

std::string_view to_string(MaxFeaturesRule r) {
    switch (r) {
    case MaxFeaturesRule::sqrt: return "sqrt";
    case MaxFeaturesRule::log2: return "log2";
    case MaxFeaturesRule::all: return "all";
    case MaxFeaturesRule::count: return "count";
    }
    return "sqrt";
}

std::optional<MaxFeaturesRule> parse_max_features_rule(std::string_view text) {
    for (auto r : {MaxFeaturesRule::sqrt, MaxFeaturesRule::log2, MaxFeaturesRule::all, MaxFeaturesRule::count}) {
        if (to_string(r) == text) return r;
    }
    return std::nullopt;
}

void HyperParams::validate() const {
    if (n_trees < 1 || min_samples_split < 1 || min_leaf < 1 || (max_depth && *max_depth < 1) ||
        (features_rule == MaxFeaturesRule::count && features_count < 1)) {
        throw Error(ErrorKind::invalid_argument, "hyperparameter counts must be >= 1: " + describe());
    }
    if (min_leaf > min_samples_split) {
        throw Error(ErrorKind::invalid_argument, "min_leaf must not exceed min_samples_split: " + describe());
    }
}

std::size_t HyperParams::features_per_split(std::size_t available) const {
    if (available == 0) return 0;
    std::size_t m = available;
    switch (features_rule) {
    case MaxFeaturesRule::sqrt: m = static_cast<std::size_t>(std::sqrt(static_cast<double>(available))); break;
    case MaxFeaturesRule::log2: m = static_cast<std::size_t>(std::log2(static_cast<double>(available))); break;
    case MaxFeaturesRule::all: m = available; break;
    case MaxFeaturesRule::count: m = features_count; break;
    }
    return std::clamp<std::size_t>(m, 1, available);
}

std::string HyperParams::describe() const {
    std::ostringstream os;
    os << "n_trees=" << n_trees << " max_depth=" << (max_depth ? std::to_string(*max_depth) : "none")
       << " min_samples_split=" << min_samples_split << " min_leaf=" << min_leaf
       << " features_per_split=" << (features_rule == MaxFeaturesRule::count ? std::to_string(features_count)
                                                                             : std::string(to_string(features_rule)))
       << " bootstrap=" << (bootstrap ? "true" : "false");
    return os.str();
}

// ---------------------------------------------------------------------------
// Trees

std::size_t Tree::leaf_index(std::span<const double> row) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const auto& n = nodes[i];
        i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return i;
}

std::vector<std::size_t> Tree::path(std::span<const double> row) const {
    std::vector<std::size_t> out{0};
    while (!nodes[out.back()].is_leaf()) {
        const auto& n = nodes[out.back()];
        out.push_back(static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right));
    }
    return out;
}

ClassProbabilities Tree::leaf_probabilities(std::span<const double> row) const {
    return frequencies(nodes[leaf_index(row)].counts);
}

std::size_t Tree::depth() const {
    std::vector<std::size_t> depth(nodes.size(), 0);
    std::size_t best = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].is_leaf()) continue;
        for (auto c : {nodes[i].left, nodes[i].right}) {
            depth[static_cast<std::size_t>(c)] = depth[i] + 1;
            best = std::max(best, depth[i] + 1);
        }
    }
    return best;
}

namespace {

constexpr double kTieEpsilon = 1e-12;

/// Per-column sorted distinct values and each row's rank among them, so a
/// node can scan a feature in O(rows) via counting instead of sorting.
struct ColumnIndex {
    std::vector<std::vector<double>> values;
    std::vector<std::vector<std::uint32_t>> rank;

    ColumnIndex(const Matrix& x, std::span<const std::size_t> columns) : values(x.cols()), rank(x.cols()) {
        std::vector<double> scratch(x.rows());
        for (auto c : columns) {
            for (std::size_t r = 0; r < x.rows(); ++r) scratch[r] = x.at(r, c);
            auto& v = values[c];
            v = scratch;
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
            auto& rk = rank[c];
            rk.resize(x.rows());
            for (std::size_t r = 0; r < x.rows(); ++r) {
                rk[r] = static_cast<std::uint32_t>(std::lower_bound(v.begin(), v.end(), scratch[r]) - v.begin());
            }
        }
    }
};

double midpoint(double a, double b) {
    double m = a / 2.0 + b / 2.0;
    if (!(m > a) || !(m < b)) m = a;  // adjacent doubles
    return m;
}

double weighted_child_impurity(const ClassCounts& left, const ClassCounts& right, double n) {
    const double nl = static_cast<double>(left[0]) + left[1] + left[2];
    const double nr = static_cast<double>(right[0]) + right[1] + right[2];
    return (nl / n) * gini(left) + (nr / n) * gini(right);
}

class SplitFinder {
public:
    SplitFinder(const ColumnIndex& index, std::span<const Label> labels) : index_(index), labels_(labels) {}

    std::optional<Split> find(std::span<const std::size_t> rows, std::span<const std::size_t> features,
                              std::size_t min_leaf) {
        const ClassCounts parent = count_labels(labels_, rows);
        const double n = static_cast<double>(rows.size());
        const double parent_gini = gini(parent);
        std::optional<Split> best;
        if (parent_gini <= 0.0) return best;

        for (auto f : features) {
            const auto& values = index_.values[f];
            if (values.size() < 2) continue;
            const auto& rank = index_.rank[f];
            const std::size_t d = values.size();
            // Sweep present ranks in increasing order, accumulating left counts.
            ClassCounts left{};
            std::size_t n_left = 0;
            auto consider = [&](std::uint32_t lo_rank, std::uint32_t hi_rank) {
                if (n_left < min_leaf || rows.size() - n_left < min_leaf) return;
                ClassCounts right;
                for (std::size_t c = 0; c < kClassCount; ++c) right[c] = parent[c] - left[c];
                const double decrease = parent_gini - weighted_child_impurity(left, right, n);
                if (decrease <= kTieEpsilon) return;
                if (!best || decrease > best->impurity_decrease + kTieEpsilon) {
                    best = Split{f, midpoint(values[lo_rank], values[hi_rank]), decrease};
                }
            };

            if (d <= 4 * rows.size()) {
                buckets_.assign(d, ClassCounts{});
                for (auto r : rows) ++buckets_[rank[r]][index_of(labels_[r])];
                std::optional<std::uint32_t> prev;
                for (std::uint32_t k = 0; k < d; ++k) {
                    const auto& b = buckets_[k];
                    const std::size_t cnt = b[0] + b[1] + b[2];
                    if (cnt == 0) continue;
                    if (prev) consider(*prev, k);
                    for (std::size_t c = 0; c < kClassCount; ++c) left[c] += b[c];
                    n_left += cnt;
                    prev = k;
                }
            } else {
                pairs_.clear();
                for (auto r : rows) pairs_.emplace_back(rank[r], index_of(labels_[r]));
                std::sort(pairs_.begin(), pairs_.end());
                for (std::size_t i = 0; i < pairs_.size();) {
                    const auto k = pairs_[i].first;
                    if (i > 0) consider(pairs_[i - 1].first, k);
                    for (; i < pairs_.size() && pairs_[i].first == k; ++i) {
                        ++left[pairs_[i].second];
                        ++n_left;
                    }
                }
            }
        }
        return best;
    }

private:
    const ColumnIndex& index_;
    std::span<const Label> labels_;
    std::vector<ClassCounts> buckets_;
    std::vector<std::pair<std::uint32_t, std::size_t>> pairs_;
};

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, const ColumnIndex& index, std::span<const Label> labels, const HyperParams& params,
                std::span<const std::size_t> allowed, std::uint64_t seed)
        : x_(x), finder_(index, labels), labels_(labels), params_(params),
          pool_(allowed.begin(), allowed.end()), rng_(seed) {}

    Tree build(std::vector<std::size_t> rows) {
        rows_ = std::move(rows);
        grow(0, rows_.size(), 0);
        return std::move(tree_);
    }

    Rng& rng() { return rng_; }

private:
    std::int32_t grow(std::size_t begin, std::size_t end, std::size_t depth) {
        const auto id = static_cast<std::int32_t>(tree_.nodes.size());
        const std::span<const std::size_t> node_rows(rows_.data() + begin, end - begin);
        tree_.nodes.push_back(TreeNode{});
        tree_.nodes.back().counts = count_labels(labels_, node_rows);

        const std::size_t n = end - begin;
        const bool depth_ok = !params_.max_depth || depth < *params_.max_depth;
        if (n < params_.min_samples_split || n < 2 * params_.min_leaf || !depth_ok || pool_.empty()) return id;

        const std::size_t m = params_.features_per_split(pool_.size());
        for (std::size_t i = 0; i < m; ++i) std::swap(pool_[i], pool_[i + rng_.below(pool_.size() - i)]);
        std::vector<std::size_t> candidates(pool_.begin(), pool_.begin() + static_cast<std::ptrdiff_t>(m));
        std::sort(candidates.begin(), candidates.end());

        const auto split = finder_.find(node_rows, candidates, params_.min_leaf);
        if (!split) return id;

        const auto mid = std::stable_partition(rows_.begin() + static_cast<std::ptrdiff_t>(begin),
                                               rows_.begin() + static_cast<std::ptrdiff_t>(end),
                                               [&](std::size_t r) { return x_.at(r, split->feature) <= split->threshold; });
        const auto split_at = static_cast<std::size_t>(mid - rows_.begin());
        const auto left = grow(begin, split_at, depth + 1);
        const auto right = grow(split_at, end, depth + 1);
        auto& node = tree_.nodes[static_cast<std::size_t>(id)];
        node.feature = static_cast<std::int32_t>(split->feature);
        node.threshold = split->threshold;
        node.left = left;
        node.right = right;
        return id;
    }

    const Matrix& x_;
    SplitFinder finder_;
    std::span<const Label> labels_;
    const HyperParams& params_;
    std::vector<std::size_t> pool_;
    Rng rng_;
    std::vector<std::size_t> rows_;
    Tree tree_;
};

std::vector<std::size_t> all_columns(std::size_t n) {
    std::vector<std::size_t> out(n);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
}

Tree grow_tree(const Matrix& x, const ColumnIndex& index, std::span<const Label> labels,
               std::span<const std::size_t> base_rows, const HyperParams& params,
               std::span<const std::size_t> allowed, std::uint64_t seed, bool resample) {
    TreeBuilder builder(x, index, labels, params, allowed, seed);
    std::vector<std::size_t> rows;
    if (resample) {
        rows.resize(base_rows.size());
        for (auto& r : rows) r = base_rows[builder.rng().below(base_rows.size())];
    } else {
        rows.assign(base_rows.begin(), base_rows.end());
    }
    return builder.build(std::move(rows));
}

}  // namespace

std::optional<Split> best_split(const Matrix& x, std::span<const Label> labels, std::span<const std::size_t> rows,
                                std::span<const std::size_t> candidate_features, std::size_t min_leaf) {
    if (labels.size() != x.rows()) throw Error(ErrorKind::shape, "labels/rows mismatch");
    if (rows.size() < 2) return std::nullopt;
    std::vector<std::size_t> features(candidate_features.begin(), candidate_features.end());
    std::sort(features.begin(), features.end());
    features.erase(std::unique(features.begin(), features.end()), features.end());
    const ColumnIndex index(x, features);
    SplitFinder finder(index, labels);
    return finder.find(rows, features, std::max<std::size_t>(min_leaf, 1));
}

Tree fit_tree(const Matrix& x, std::span<const Label> labels, std::span<const std::size_t> rows,
              const HyperParams& params, std::span<const std::size_t> allowed_columns, std::uint64_t seed) {
    params.validate();
    if (labels.size() != x.rows()) throw Error(ErrorKind::shape, "labels/rows mismatch");
    if (rows.empty()) throw Error(ErrorKind::empty_node, "cannot fit a tree on zero rows");
    const auto allowed = allowed_columns.empty() ? all_columns(x.cols())
                                                 : std::vector<std::size_t>(allowed_columns.begin(), allowed_columns.end());
    const ColumnIndex index(x, allowed);
    return grow_tree(x, index, labels, rows, params, allowed, seed, false);
}

Forest fit_forest(const Matrix& x, std::span<const Label> labels, const HyperParams& params, std::uint64_t seed,
                  const FitOptions& options) {
    params.validate();
    if (labels.size() != x.rows()) throw Error(ErrorKind::shape, "labels/rows mismatch");
    if (x.rows() == 0) throw Error(ErrorKind::empty_node, "cannot fit a forest on zero rows");

    Forest forest;
    forest.params = params;
    forest.seed = seed;
    forest.width = x.cols();
    forest.allowed_columns = options.allowed_columns.empty() ? all_columns(x.cols()) : options.allowed_columns;
    std::sort(forest.allowed_columns.begin(), forest.allowed_columns.end());
    for (auto c : forest.allowed_columns) {
        if (c >= x.cols()) throw Error(ErrorKind::shape, "allowed column out of range");
    }

    const ColumnIndex index(x, forest.allowed_columns);
    const auto rows = all_columns(x.rows());
    forest.trees.resize(params.n_trees);

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t t = next++; t < params.n_trees; t = next++) {
            forest.trees[t] = grow_tree(x, index, labels, rows, params, forest.allowed_columns, seed + t, params.bootstrap);
        }
    };
    std::size_t workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, params.n_trees);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
    }
    return forest;
}

ClassProbabilities predict_proba(const Forest& forest, std::span<const double> row) {
    if (row.size() != forest.width) {
        throw Error(ErrorKind::shape, "row width " + std::to_string(row.size()) + " does not match model width " +
                                          std::to_string(forest.width));
    }
    ClassProbabilities sum{};
    for (const auto& tree : forest.trees) {
        const auto p = tree.leaf_probabilities(row);
        for (std::size_t c = 0; c < kClassCount; ++c) sum[c] += p[c];
    }
    const double n = static_cast<double>(forest.trees.size());
    for (auto& v : sum) v /= n;
    return sum;
}

Label predict(const Forest& forest, std::span<const double> row) { return argmax(predict_proba(forest, row)); }

std::vector<double> column_importance(const Forest& forest) {
    std::vector<double> total(forest.width, 0.0);
    for (const auto& tree : forest.trees) {
        const auto& root = tree.nodes.front().counts;
        const double n_root = static_cast<double>(root[0]) + root[1] + root[2];
        for (const auto& node : tree.nodes) {
            if (node.is_leaf()) continue;
            const auto& l = tree.nodes[static_cast<std::size_t>(node.left)].counts;
            const auto& r = tree.nodes[static_cast<std::size_t>(node.right)].counts;
            const double n = static_cast<double>(node.counts[0]) + node.counts[1] + node.counts[2];
            const double decrease = gini(node.counts) - weighted_child_impurity(l, r, n);
            total[static_cast<std::size_t>(node.feature)] += (n / n_root) * decrease;
        }
    }
    for (auto& v : total) v /= static_cast<double>(forest.trees.size());
    const double sum = std::accumulate(total.begin(), total.end(), 0.0);
    if (sum > 0) {
        for (auto& v : total) v /= sum;
    }
    return total;
}

std::vector<double> fold_importance(std::span<const double> column_importance, std::span<const std::size_t> source_of,
                                    std::size_t groups) {
    if (column_importance.size() != source_of.size()) throw Error(ErrorKind::shape, "importance/source size mismatch");
    std::vector<double> out(groups, 0.0);
    for (std::size_t i = 0; i < column_importance.size(); ++i) out.at(source_of[i]) += column_importance[i];
    const double sum = std::accumulate(out.begin(), out.end(), 0.0);
    if (sum > 0) {
        for (auto& v : out) v /= sum;
    }
    return out;
}

}  // namespace triage
