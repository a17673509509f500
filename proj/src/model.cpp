#include "triage/model.hpp"

#include "triage/error.hpp"

#include <algorithm>
#include <cmath>

namespace triage {

std::vector<std::size_t> Model::source_of() const {
    std::vector<std::size_t> out;
    out.reserve(encoder.width());
    for (const auto& c : encoder.columns()) out.push_back(c.source);
    return out;
}

Matrix encode(const Encoder& encoder, std::span<const FeatureVector> vectors) {
    Matrix m(vectors.size(), encoder.width());
    for (std::size_t i = 0; i < vectors.size(); ++i) encoder.transform_into(vectors[i], m.row(i));
    return m;
}

Model train_model(std::span<const FeatureVector> vectors, std::span<const Label> labels, const HyperParams& params,
                  std::uint64_t seed, const TrainOptions& options) {
    if (vectors.size() != labels.size()) throw Error(ErrorKind::shape, "vectors/labels mismatch");
    Model model;
    model.feature_set = options.feature_set;
    model.encoder = Encoder::fit(vectors, options.vocabulary);
    const Matrix x = encode(model.encoder, vectors);
    model.forest =
        fit_forest(x, labels, params, seed, FitOptions{model.encoder.columns_for(model.mask()), options.workers});
    return model;
}

ClassProbabilities classify(const Model& model, const FeatureVector& v) {
    return predict_proba(model.forest, model.encoder.transform(v));
}

std::vector<double> source_importance(const Model& model) {
    return fold_importance(column_importance(model.forest), model.source_of(), kSourceCount);
}

std::vector<PathStep> path_contributions(const Tree& tree, std::span<const double> row, std::size_t cls) {
    std::vector<PathStep> steps;
    const auto path = tree.path(row);
    for (std::size_t i = 1; i < path.size(); ++i) {
        const auto& parent = tree.nodes[path[i - 1]];
        const auto& child = tree.nodes[path[i]];
        steps.push_back({static_cast<std::size_t>(parent.feature),
                         frequencies(child.counts)[cls] - frequencies(parent.counts)[cls]});
    }
    return steps;
}

std::vector<double> column_contributions(const Forest& forest, std::span<const double> row, std::size_t cls) {
    if (row.size() != forest.width) throw Error(ErrorKind::shape, "row width does not match model width");
    std::vector<double> out(forest.width, 0.0);
    for (const auto& tree : forest.trees) {
        for (const auto& step : path_contributions(tree, row, cls)) out[step.column] += step.delta;
    }
    for (auto& v : out) v /= static_cast<double>(forest.trees.size());
    return out;
}

std::array<bool, kSourceCount> used_sources(const Model& model) {
    std::array<bool, kSourceCount> used{};
    const auto& columns = model.encoder.columns();
    for (const auto& tree : model.forest.trees) {
        for (const auto& node : tree.nodes) {
            if (!node.is_leaf()) used[columns.at(static_cast<std::size_t>(node.feature)).source] = true;
        }
    }
    return used;
}

Explanation explain_row(const Model& model, std::span<const double> row, std::size_t top) {
    Explanation ex;
    ex.probabilities = predict_proba(model.forest, row);
    ex.predicted = argmax(ex.probabilities);
    const auto per_column = column_contributions(model.forest, row, index_of(ex.predicted));
    const auto& columns = model.encoder.columns();
    for (std::size_t i = 0; i < per_column.size(); ++i) ex.contributions[columns[i].source] += per_column[i];

    const auto used = used_sources(model);
    std::vector<std::size_t> candidates;
    for (std::size_t s = 0; s < kSourceCount; ++s) {
        if (used[s]) candidates.push_back(s);
    }
    const auto rank_key = [](std::size_t s) {
        const int r = source_columns()[s].rank;
        return r > 0 ? r : 1000 + static_cast<int>(s);
    };
    std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        // Quantize so contributions equal up to rounding noise compare equal.
        const auto ca = std::llround(std::abs(ex.contributions[a]) * 1e12);
        const auto cb = std::llround(std::abs(ex.contributions[b]) * 1e12);
        if (ca != cb) return ca > cb;
        return rank_key(a) < rank_key(b);
    });
    candidates.resize(std::min(candidates.size(), top));
    for (auto s : candidates) ex.top.push_back({static_cast<FeatureId>(s), ex.contributions[s]});
    return ex;
}

Explanation explain(const Model& model, const FeatureVector& v, std::size_t top) {
    return explain_row(model, model.encoder.transform(v), top);
}

Prediction predict_domain(const Model& model, std::string model_version, std::string domain, const FeatureVector& v) {
    const auto ex = explain(model, v);
    return Prediction{std::move(domain), ex.probabilities, ex.predicted, ex.top, std::move(model_version)};
}

}  // namespace triage
