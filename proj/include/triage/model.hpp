#pragma once

#include "triage/features.hpp"
#include "triage/forest.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace triage {

/// A trained classifier: the fitted encoder, the forest over its columns and
/// the feature set the forest was restricted to.
struct Model {
    Encoder encoder;
    Forest forest;
    FeatureSet feature_set = FeatureSet::all;

    std::array<bool, kSourceCount> mask() const { return category_mask(feature_set); }
    /// Source feature of every encoded column.
    std::vector<std::size_t> source_of() const;

    bool operator==(const Model&) const = default;
};

inline constexpr std::size_t kDefaultVocabulary = 30;

Matrix encode(const Encoder& encoder, std::span<const FeatureVector> vectors);

struct TrainOptions {
    FeatureSet feature_set = FeatureSet::all;
    std::size_t vocabulary = kDefaultVocabulary;
    std::size_t workers = 0;
};

/// Fits the encoder on `vectors`, then a forest restricted to the columns of
/// the feature set.
Model train_model(std::span<const FeatureVector> vectors, std::span<const Label> labels, const HyperParams& params,
                  std::uint64_t seed, const TrainOptions& options = {});

ClassProbabilities classify(const Model& model, const FeatureVector& v);

/// Mean-decrease-impurity importance per source feature (kSourceCount
/// entries, summing to 1 when any split exists).
std::vector<double> source_importance(const Model& model);

/// One step of a decision path: the split column and the change in the
/// class frequency from parent to child.
struct PathStep {
    std::size_t column;
    double delta;
};

/// Root-to-leaf steps of `tree` for `row`, measured for class `cls`. The
/// deltas telescope to leaf frequency minus root frequency.
std::vector<PathStep> path_contributions(const Tree& tree, std::span<const double> row, std::size_t cls);

/// Per encoded column: path contributions summed over trees, divided by the
/// number of trees.
std::vector<double> column_contributions(const Forest& forest, std::span<const double> row, std::size_t cls);

struct Attribution {
    FeatureId feature;
    double contribution;

    bool operator==(const Attribution&) const = default;
};

struct Explanation {
    ClassProbabilities probabilities{};
    Label predicted = Label::disinformation;
    /// Contribution toward `predicted` per source feature.
    std::array<double, kSourceCount> contributions{};
    /// Up to `top` features used anywhere in the forest, by descending
    /// |contribution|; ties go to the better importance rank, availability
    /// indicators last.
    std::vector<Attribution> top;
};

Explanation explain(const Model& model, const FeatureVector& v, std::size_t top = 3);
Explanation explain_row(const Model& model, std::span<const double> row, std::size_t top = 3);

/// Source features split on by at least one node of the forest.
std::array<bool, kSourceCount> used_sources(const Model& model);

struct Prediction {
    std::string domain;
    ClassProbabilities probabilities{};
    Label predicted_class = Label::disinformation;
    std::vector<Attribution> top_features;
    std::string model_version;

    bool operator==(const Prediction&) const = default;
};

Prediction predict_domain(const Model& model, std::string model_version, std::string domain, const FeatureVector& v);

}  // namespace triage
