#pragma once

#include "triage/forest.hpp"
#include "triage/labels.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace triage {

/// Stratified k-fold partition: each class is shuffled with Rng(seed) and
/// dealt round-robin across folds, continuing the dealer position from one
/// class to the next. Throws Error(unstratifiable) when k < 2, k > n or any
/// present class has fewer than k members.
std::vector<std::vector<std::size_t>> kfold_split(std::span<const Label> labels, std::size_t k, std::uint64_t seed);

struct CurvePoint {
    double threshold;
    double x;  // FPR (ROC) or recall (PR)
    double y;  // TPR (ROC) or precision (PR)
};

struct Curve {
    std::vector<CurvePoint> points;  // decreasing threshold
    double area = 0.0;
};

/// ROC curve over all distinct score thresholds (tied scores form a single
/// step), starting at (0,0) with threshold +inf; trapezoidal AUC. Throws
/// Error(degenerate) unless there is at least one positive and one negative.
Curve roc_auc(std::span<const double> scores, const std::vector<bool>& positives);

/// Precision-recall curve over distinct thresholds and average precision
/// sum (R_i - R_{i-1}) P_i. Throws Error(degenerate) without positives.
Curve pr_auc(std::span<const double> scores, const std::vector<bool>& positives);

using ConfusionMatrix = std::array<std::array<std::uint64_t, kClassCount>, kClassCount>;  // [truth][predicted]

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation over folds
};

MeanStd mean_std(std::span<const double> values);

struct ClassReport {
    MeanStd roc_auc;
    MeanStd pr_auc;
    double pooled_roc_auc = 0.0;
    double pooled_pr_auc = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    std::uint64_t support = 0;
    Curve pooled_roc;
    Curve pooled_pr;
};

struct EvalReport {
    std::size_t folds = 0;
    std::uint64_t seed = 0;
    HyperParams params;
    std::array<ClassReport, kClassCount> per_class;
    std::vector<std::array<double, kClassCount>> fold_roc_auc;
    std::vector<std::array<double, kClassCount>> fold_pr_auc;
    ConfusionMatrix confusion{};
    double accuracy = 0.0;
};

struct CvOptions {
    std::vector<std::size_t> allowed_columns;
    std::size_t workers = 0;
};

/// Fold f trains on the other folds with forest seed `seed + f` and scores
/// fold f. Per-class one-vs-rest ROC/PR are computed per fold (mean/std) and
/// on pooled out-of-fold scores; the confusion matrix aggregates argmax
/// predictions over all folds.
EvalReport evaluate_cv(const Matrix& x, std::span<const Label> labels, const HyperParams& params, std::size_t k,
                       std::uint64_t seed, const CvOptions& options = {});

nlohmann::json to_json(const EvalReport& report);

/// Writes report.json plus roc_<class>.csv / pr_<class>.csv (pooled curves)
/// into `dir`.
void write_report(const EvalReport& report, const std::filesystem::path& dir);

double accuracy(const ConfusionMatrix& m);

}  // namespace triage
