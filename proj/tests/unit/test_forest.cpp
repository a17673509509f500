#include "triage/error.hpp"
#include "triage/forest.hpp"
#include "triage/rng.hpp"
#include "triage/search.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace triage;

namespace {

struct Data {
    Matrix x;
    std::vector<Label> labels;
    std::vector<std::vector<double>> rows;
};

Data make_data(Rng& rng, std::size_t n, std::size_t features, bool binary_only = false) {
    Data d{Matrix(n, features), {}, {}};
    std::vector<bool> binary(features);
    for (auto&& b : binary) b = binary_only || rng.bernoulli(0.5);
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<double> row(features);
        for (std::size_t f = 0; f < features; ++f) {
            row[f] = binary[f] ? static_cast<double>(rng.below(2)) : static_cast<double>(rng.below(8)) * 0.5;
            d.x.at(r, f) = row[f];
        }
        d.rows.push_back(row);
        d.labels.push_back(kClassOrder[rng.below(kClassCount)]);
    }
    return d;
}

std::vector<std::size_t> iota(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

HyperParams single_tree(std::optional<std::size_t> depth) {
    HyperParams p;
    p.n_trees = 1;
    p.max_depth = depth;
    p.bootstrap = false;
    p.features_rule = MaxFeaturesRule::all;
    return p;
}

}  // namespace

TEST(Gini, Examples) {
    EXPECT_NEAR(gini(ClassCounts{5, 5, 0}), 0.5, 1e-12);
    EXPECT_NEAR(gini(ClassCounts{2, 3, 5}), 0.62, 1e-12);
    EXPECT_EQ(gini(ClassCounts{7, 0, 0}), 0.0);
    try {
        gini(ClassCounts{0, 0, 0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::empty_node);
    }
}

TEST(BestSplit, MidpointExample) {
    Matrix x(4, 1);
    const double v[] = {1, 2, 9, 10};
    for (int i = 0; i < 4; ++i) x.at(i, 0) = v[i];
    const std::vector<Label> labels{Label::news, Label::news, Label::other, Label::other};
    const auto rows = iota(4);
    const std::vector<std::size_t> features{0};
    const auto s = best_split(x, labels, rows, features, 1);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->threshold, 5.5);
    EXPECT_NEAR(s->impurity_decrease, 0.5, 1e-12);
}

TEST(BestSplit, PureAndConstantNodesHaveNoSplit) {
    Matrix x(3, 1);
    const std::vector<std::size_t> rows{0, 1, 2}, features{0};
    EXPECT_FALSE(best_split(x, std::vector<Label>{Label::news, Label::other, Label::news}, rows, features, 1));
    x.at(1, 0) = 1;
    EXPECT_FALSE(best_split(x, std::vector<Label>(3, Label::news), rows, features, 1));
}

TEST(BestSplit, AgreesWithBruteForce) {
    Rng rng(21);
    for (int trial = 0; trial < 500; ++trial) {
        const auto d = make_data(rng, 2 + rng.below(40), 1 + rng.below(5));
        const std::size_t min_leaf = 1 + rng.below(3);
        const auto rows = iota(d.rows.size());
        const auto features = iota(d.x.cols());
        const auto got = best_split(d.x, d.labels, rows, features, min_leaf);
        const auto want = oracle::best_split(d.rows, d.labels, min_leaf);
        ASSERT_EQ(got.has_value(), want.has_value()) << trial;
        if (!got) continue;
        EXPECT_EQ(got->feature, want->feature) << trial;
        EXPECT_EQ(got->threshold, want->threshold) << trial;
        EXPECT_NEAR(got->impurity_decrease, want->decrease, 1e-12) << trial;
    }
}

TEST(Tree, EqualsExhaustiveOracle) {
    Rng rng(100);
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = make_data(rng, 2 + rng.below(49), 1 + rng.below(4));
        const std::size_t depth = 1 + rng.below(2);
        const auto forest = fit_forest(d.x, d.labels, single_tree(depth), trial);
        const auto reference = oracle::grow(d.rows, d.labels, 0, depth, 2, 1);
        for (int q = 0; q < 200; ++q) {
            std::vector<double> row(d.x.cols());
            for (auto& v : row) v = static_cast<double>(rng.below(10)) * 0.5 - 0.5;
            const auto got = predict_proba(forest, row);
            const auto want = oracle::predict(reference, row);
            for (std::size_t c = 0; c < kClassCount; ++c) ASSERT_NEAR(got[c], want[c], 1e-12) << trial;
        }
    }
}

TEST(Forest, ProbabilitiesAndImportancesAreDistributions) {
    Rng rng(5);
    const auto d = make_data(rng, 120, 6);
    HyperParams p;
    p.n_trees = 30;
    const auto forest = fit_forest(d.x, d.labels, p, 3);
    for (std::size_t r = 0; r < d.x.rows(); ++r) {
        const auto pr = predict_proba(forest, d.x.row(r));
        EXPECT_NEAR(pr[0] + pr[1] + pr[2], 1.0, 1e-12);
        for (double v : pr) EXPECT_TRUE(v >= 0.0 && v <= 1.0);
    }
    const auto imp = column_importance(forest);
    EXPECT_NEAR(std::accumulate(imp.begin(), imp.end(), 0.0), 1.0, 1e-9);
    for (const auto& t : forest.trees) {
        for (const auto& n : t.nodes) {
            if (!n.is_leaf()) continue;
            EXPECT_GE(n.counts[0] + n.counts[1] + n.counts[2], p.min_leaf);
        }
    }
}

TEST(Forest, NoBootstrapAllFeaturesGivesIdenticalTrees) {
    Rng rng(6);
    const auto d = make_data(rng, 80, 5);
    auto p = single_tree(std::nullopt);
    p.n_trees = 8;
    const auto forest = fit_forest(d.x, d.labels, p, 11);
    for (const auto& t : forest.trees) EXPECT_EQ(t, forest.trees.front());
}

TEST(Forest, DeterministicAcrossWorkerCounts) {
    Rng rng(7);
    const auto d = make_data(rng, 150, 8);
    HyperParams p;
    p.n_trees = 40;
    FitOptions one, many;
    one.workers = 1;
    many.workers = 8;
    EXPECT_EQ(fit_forest(d.x, d.labels, p, 9, one), fit_forest(d.x, d.labels, p, 9, many));
    EXPECT_NE(fit_forest(d.x, d.labels, p, 9, one), fit_forest(d.x, d.labels, p, 10, one));
}

TEST(Forest, ArgmaxInvariantUnderMonotoneRescaling) {
    Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        auto d = make_data(rng, 60, 4);
        const std::size_t col = rng.below(4);
        Matrix scaled = d.x;
        for (std::size_t r = 0; r < scaled.rows(); ++r) scaled.at(r, col) = std::exp(d.x.at(r, col)) * 3.0 - 100.0;
        // Midpoints move under a nonlinear map, so only rows seen by every tree are
        // guaranteed the same path; bootstrap is off while feature sampling stays on.
        HyperParams p;
        p.n_trees = 15;
        p.bootstrap = false;
        const auto a = fit_forest(d.x, d.labels, p, trial);
        const auto b = fit_forest(scaled, d.labels, p, trial);
        for (std::size_t r = 0; r < d.x.rows(); ++r) {
            EXPECT_EQ(predict(a, d.x.row(r)), predict(b, scaled.row(r))) << trial;
        }
    }
}

TEST(Forest, PredictExamples) {
    Matrix x(4, 1);
    for (int i = 0; i < 4; ++i) x.at(i, 0) = i;
    const std::vector<Label> labels{Label::news, Label::news, Label::other, Label::other};
    const auto forest = fit_forest(x, labels, single_tree(std::nullopt), 0);
    const std::vector<double> low{0.2}, high{2.7};
    EXPECT_EQ(predict_proba(forest, low), (ClassProbabilities{0, 1, 0}));
    EXPECT_EQ(predict(forest, high), Label::other);
    const std::vector<double> wrong{1.0, 2.0};
    EXPECT_THROW(predict_proba(forest, wrong), Error);
}

TEST(Forest, ShapeAndParamErrors) {
    Matrix x(3, 1);
    try {
        fit_forest(x, std::vector<Label>(2, Label::news), HyperParams{}, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::shape);
    }
    HyperParams bad;
    bad.min_leaf = 5;
    bad.min_samples_split = 2;
    try {
        fit_forest(x, std::vector<Label>(3, Label::news), bad, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_argument);
    }
}

TEST(Forest, InformativeFeatureOutranksNoise) {
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed * 7919 + 1);
        Matrix x(200, 2);
        std::vector<Label> labels;
        for (std::size_t r = 0; r < 200; ++r) {
            const auto c = rng.below(kClassCount);
            x.at(r, 0) = static_cast<double>(c) + rng.uniform() * 0.5;
            x.at(r, 1) = rng.uniform();
            labels.push_back(kClassOrder[c]);
        }
        HyperParams p;
        p.n_trees = 20;
        const auto imp = column_importance(fit_forest(x, labels, p, seed));
        wins += imp[0] > imp[1] ? 1 : 0;
    }
    EXPECT_GE(wins, 95);
}

TEST(Forest, FoldImportanceRenormalizes) {
    const std::vector<double> cols{0.1, 0.2, 0.3, 0.4};
    const std::vector<std::size_t> source{0, 0, 2, 2};
    const auto folded = fold_importance(cols, source, 3);
    const std::vector<double> want{0.3, 0.0, 0.7};
    ASSERT_EQ(folded.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(folded[i], want[i], 1e-12);
}

TEST(HyperParamsTest, FeaturesPerSplit) {
    HyperParams p;
    EXPECT_EQ(p.features_per_split(100), 10u);
    p.features_rule = MaxFeaturesRule::log2;
    EXPECT_EQ(p.features_per_split(64), 6u);
    p.features_rule = MaxFeaturesRule::all;
    EXPECT_EQ(p.features_per_split(7), 7u);
    p.features_rule = MaxFeaturesRule::count;
    p.features_count = 50;
    EXPECT_EQ(p.features_per_split(7), 7u);
}

TEST(Search, SingleSettingSpaceReturnsIt) {
    Rng rng(1);
    const auto d = make_data(rng, 45, 3);
    SearchSpace space;
    space.n_trees = {5};
    space.max_depth = {std::optional<std::size_t>{3}};
    space.min_samples_split = {4};
    space.min_leaf = {2};
    space.features_rule = {MaxFeaturesRule::sqrt};
    space.bootstrap = {true};
    std::vector<Label> labels;
    for (std::size_t i = 0; i < 45; ++i) labels.push_back(kClassOrder[i % 3]);
    const auto r = random_search(d.x, labels, space, 3, 3, 0);
    EXPECT_EQ(r.params.n_trees, 5u);
    EXPECT_EQ(r.params.max_depth, 3u);
    EXPECT_EQ(r.params.min_samples_split, 4u);
    EXPECT_EQ(r.params.min_leaf, 2u);
    EXPECT_EQ(r.fits, 9u);
}

TEST(Search, DefaultBudgetCountsFitsAndIsDeterministic) {
    Rng rng(2);
    const auto d = make_data(rng, 30, 3);
    std::vector<Label> labels;
    for (std::size_t i = 0; i < 30; ++i) labels.push_back(kClassOrder[i % 3]);
    auto space = SearchSpace::defaults();
    space.n_trees = {1, 2, 3};  // keep the 1250 fits cheap
    const auto a = random_search(d.x, labels, space, 250, 5, 4);
    EXPECT_EQ(a.fits, 1250u);
    EXPECT_EQ(a.trials.size(), 250u);
    const auto b = random_search(d.x, labels, space, 250, 5, 4);
    EXPECT_EQ(a.params, b.params);
    EXPECT_EQ(a.mean_accuracy, b.mean_accuracy);
    for (const auto& [params, acc] : a.trials) {
        EXPECT_LE(params.min_leaf, params.min_samples_split);
        EXPECT_LE(acc, a.mean_accuracy);
    }
}

TEST(Search, EmptySpaceRejected) {
    SearchSpace space = SearchSpace::defaults();
    space.bootstrap.clear();
    EXPECT_THROW(space.validate(), Error);
}
