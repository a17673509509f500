#include "triage/eval.hpp"

#include "triage/error.hpp"
#include "triage/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace triage {

std::vector<std::vector<std::size_t>> kfold_split(std::span<const Label> labels, std::size_t k, std::uint64_t seed) {
    if (k < 2 || k > labels.size()) {
        throw Error(ErrorKind::unstratifiable, "need 2 <= k <= n (k=" + std::to_string(k) + ")");
    }
    std::array<std::vector<std::size_t>, kClassCount> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[index_of(labels[i])].push_back(i);
    for (std::size_t c = 0; c < kClassCount; ++c) {
        if (!by_class[c].empty() && by_class[c].size() < k) {
            throw Error(ErrorKind::unstratifiable, "class '" + std::string(to_string(kClassOrder[c])) + "' has " +
                                                       std::to_string(by_class[c].size()) + " members, fewer than k=" +
                                                       std::to_string(k));
        }
    }

    Rng rng(seed);
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t dealer = 0;
    for (auto& members : by_class) {
        rng.shuffle(std::span(members));
        for (auto i : members) {
            folds[dealer].push_back(i);
            dealer = (dealer + 1) % k;
        }
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

namespace {

struct Ranked {
    double score;
    bool positive;
};

std::vector<Ranked> rank_descending(std::span<const double> scores, const std::vector<bool>& positives) {
    if (scores.size() != positives.size()) throw Error(ErrorKind::shape, "scores/labels size mismatch");
    std::vector<Ranked> r(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) r[i] = {scores[i], positives[i]};
    std::stable_sort(r.begin(), r.end(), [](const Ranked& a, const Ranked& b) { return a.score > b.score; });
    return r;
}

}  // namespace

Curve roc_auc(std::span<const double> scores, const std::vector<bool>& positives) {
    const auto ranked = rank_descending(scores, positives);
    const auto p = static_cast<double>(std::count(positives.begin(), positives.end(), true));
    const auto n = static_cast<double>(positives.size()) - p;
    if (p == 0 || n == 0) throw Error(ErrorKind::degenerate, "ROC needs at least one positive and one negative");

    Curve curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < ranked.size();) {
        const double threshold = ranked[i].score;
        for (; i < ranked.size() && ranked[i].score == threshold; ++i) (ranked[i].positive ? tp : fp) += 1;
        const auto& prev = curve.points.back();
        const double x = fp / n, y = tp / p;
        curve.area += (x - prev.x) * (y + prev.y) / 2.0;
        curve.points.push_back({threshold, x, y});
    }
    return curve;
}

Curve pr_auc(std::span<const double> scores, const std::vector<bool>& positives) {
    const auto ranked = rank_descending(scores, positives);
    const auto p = static_cast<double>(std::count(positives.begin(), positives.end(), true));
    if (p == 0) throw Error(ErrorKind::degenerate, "average precision needs at least one positive");

    Curve curve;
    double tp = 0, fp = 0, prev_recall = 0;
    for (std::size_t i = 0; i < ranked.size();) {
        const double threshold = ranked[i].score;
        for (; i < ranked.size() && ranked[i].score == threshold; ++i) (ranked[i].positive ? tp : fp) += 1;
        const double recall = tp / p;
        const double precision = tp / (tp + fp);
        curve.area += (recall - prev_recall) * precision;
        prev_recall = recall;
        curve.points.push_back({threshold, recall, precision});
    }
    return curve;
}

MeanStd mean_std(std::span<const double> values) {
    MeanStd out;
    if (values.empty()) return out;
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size()));
    return out;
}

double accuracy(const ConfusionMatrix& m) {
    std::uint64_t total = 0, correct = 0;
    for (std::size_t t = 0; t < kClassCount; ++t) {
        for (std::size_t p = 0; p < kClassCount; ++p) {
            total += m[t][p];
            if (t == p) correct += m[t][p];
        }
    }
    return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

EvalReport evaluate_cv(const Matrix& x, std::span<const Label> labels, const HyperParams& params, std::size_t k,
                       std::uint64_t seed, const CvOptions& options) {
    if (labels.size() != x.rows()) throw Error(ErrorKind::shape, "labels/rows mismatch");
    const auto folds = kfold_split(labels, k, seed);

    EvalReport report;
    report.folds = k;
    report.seed = seed;
    report.params = params;

    std::vector<ClassProbabilities> oof(x.rows());
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<std::size_t> train;
        for (std::size_t g = 0; g < k; ++g) {
            if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
        }
        std::sort(train.begin(), train.end());
        const Matrix train_x = x.select_rows(train);
        std::vector<Label> train_y;
        train_y.reserve(train.size());
        for (auto i : train) train_y.push_back(labels[i]);

        const Forest forest =
            fit_forest(train_x, train_y, params, seed + f, FitOptions{options.allowed_columns, options.workers});

        std::array<double, kClassCount> fold_roc{}, fold_pr{};
        const auto& test = folds[f];
        std::vector<double> scores(test.size());
        for (std::size_t i = 0; i < test.size(); ++i) {
            oof[test[i]] = predict_proba(forest, x.row(test[i]));
            ++report.confusion[index_of(labels[test[i]])][index_of(argmax(oof[test[i]]))];
        }
        for (std::size_t c = 0; c < kClassCount; ++c) {
            std::vector<bool> pos(test.size());
            for (std::size_t i = 0; i < test.size(); ++i) {
                scores[i] = oof[test[i]][c];
                pos[i] = index_of(labels[test[i]]) == c;
            }
            const bool has_pos = std::find(pos.begin(), pos.end(), true) != pos.end();
            const bool has_neg = std::find(pos.begin(), pos.end(), false) != pos.end();
            fold_roc[c] = has_pos && has_neg ? roc_auc(scores, pos).area : std::nan("");
            fold_pr[c] = has_pos ? pr_auc(scores, pos).area : std::nan("");
        }
        report.fold_roc_auc.push_back(fold_roc);
        report.fold_pr_auc.push_back(fold_pr);
    }

    for (std::size_t c = 0; c < kClassCount; ++c) {
        auto& cr = report.per_class[c];
        std::vector<double> rocs, prs;
        for (std::size_t f = 0; f < k; ++f) {
            if (!std::isnan(report.fold_roc_auc[f][c])) rocs.push_back(report.fold_roc_auc[f][c]);
            if (!std::isnan(report.fold_pr_auc[f][c])) prs.push_back(report.fold_pr_auc[f][c]);
        }
        cr.roc_auc = mean_std(rocs);
        cr.pr_auc = mean_std(prs);

        std::vector<double> scores(x.rows());
        std::vector<bool> pos(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            scores[i] = oof[i][c];
            pos[i] = index_of(labels[i]) == c;
        }
        const bool has_pos = std::find(pos.begin(), pos.end(), true) != pos.end();
        const bool has_neg = std::find(pos.begin(), pos.end(), false) != pos.end();
        if (has_pos && has_neg) {
            cr.pooled_roc = roc_auc(scores, pos);
            cr.pooled_roc_auc = cr.pooled_roc.area;
        }
        if (has_pos) {
            cr.pooled_pr = pr_auc(scores, pos);
            cr.pooled_pr_auc = cr.pooled_pr.area;
        }

        std::uint64_t predicted = 0;
        for (std::size_t t = 0; t < kClassCount; ++t) predicted += report.confusion[t][c];
        for (std::size_t p = 0; p < kClassCount; ++p) cr.support += report.confusion[c][p];
        cr.precision = predicted ? static_cast<double>(report.confusion[c][c]) / static_cast<double>(predicted) : 0.0;
        cr.recall = cr.support ? static_cast<double>(report.confusion[c][c]) / static_cast<double>(cr.support) : 0.0;
    }
    report.accuracy = accuracy(report.confusion);
    return report;
}

nlohmann::json to_json(const EvalReport& report) {
    using nlohmann::json;
    json j;
    j["folds"] = report.folds;
    j["seed"] = report.seed;
    j["params"] = report.params.describe();
    j["accuracy"] = report.accuracy;
    json classes = json::object();
    for (std::size_t c = 0; c < kClassCount; ++c) {
        const auto& cr = report.per_class[c];
        classes[std::string(to_string(kClassOrder[c]))] = {
            {"roc_auc_mean", cr.roc_auc.mean},     {"roc_auc_std", cr.roc_auc.std},
            {"pr_auc_mean", cr.pr_auc.mean},       {"pr_auc_std", cr.pr_auc.std},
            {"pooled_roc_auc", cr.pooled_roc_auc}, {"pooled_pr_auc", cr.pooled_pr_auc},
            {"precision", cr.precision},           {"recall", cr.recall},
            {"support", cr.support},
        };
    }
    j["per_class"] = classes;
    json cm = json::array();
    for (const auto& row : report.confusion) cm.push_back(row);
    j["confusion_matrix"] = {{"rows", "truth"}, {"columns", "predicted"}, {"class_order", {"disinformation", "news", "other"}}, {"counts", cm}};
    json folds = json::array();
    for (std::size_t f = 0; f < report.fold_roc_auc.size(); ++f) {
        folds.push_back({{"roc_auc", report.fold_roc_auc[f]}, {"pr_auc", report.fold_pr_auc[f]}});
    }
    j["fold_metrics"] = folds;
    return j;
}

void write_report(const EvalReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "report.json", std::ios::trunc);
        if (!out) throw Error(ErrorKind::io, "cannot write " + (dir / "report.json").string());
        out << to_json(report).dump(2) << '\n';
    }
    auto write_curve = [&](const Curve& curve, const std::string& name, const char* x, const char* y) {
        std::ofstream out(dir / name, std::ios::trunc);
        if (!out) throw Error(ErrorKind::io, "cannot write " + (dir / name).string());
        out << "threshold," << x << ',' << y << '\n';
        out.precision(17);
        for (const auto& p : curve.points) out << p.threshold << ',' << p.x << ',' << p.y << '\n';
    };
    for (std::size_t c = 0; c < kClassCount; ++c) {
        const std::string cls(to_string(kClassOrder[c]));
        write_curve(report.per_class[c].pooled_roc, "roc_" + cls + ".csv", "fpr", "tpr");
        write_curve(report.per_class[c].pooled_pr, "pr_" + cls + ".csv", "recall", "precision");
    }
}

}  // namespace triage
