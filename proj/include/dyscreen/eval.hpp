#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dyscreen/forest.hpp"

namespace dyscreen {

// Disjoint fold index sets covering all rows; sizes differ by at most one
// (per class when stratified).
struct FoldPlan {
    int k = 0;
    std::uint64_t seed = 0;
    bool stratified = false;
    std::vector<int> fold_of;  // per row

    std::vector<std::vector<std::uint32_t>> folds() const;
};

FoldPlan kfold_split(std::size_t n, int k, std::uint64_t seed,
                     const std::vector<std::uint8_t>* stratify_labels = nullptr);

struct Confusion {
    std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::int64_t total() const { return tp + fp + tn + fn; }
};

Confusion confusion(std::span<const std::uint8_t> y_true,
                    std::span<const std::uint8_t> y_pred);

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // Zero-denominator cases return 0 with the matching flag cleared.
    bool precision_defined = true;
    bool recall_defined = true;
    bool f1_defined = true;
};

Metrics metrics(const Confusion& cm);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

// Threshold sweep over distinct scores, descending; equal scores collapse
// into one step. Includes (0,0) and (1,1). Requires both classes.
std::vector<RocPoint> roc_curve(std::span<const std::uint8_t> y_true,
                                std::span<const double> scores);

// Trapezoidal area under points sorted by FPR.
double auc(const std::vector<RocPoint>& points);

struct FoldResult {
    Confusion cm;
    Metrics m;
    std::vector<RocPoint> roc;
    double auc_value = 0.0;
    bool roc_ok = false;
};

struct EvalReport {
    std::vector<FoldResult> folds;
    Metrics mean;
    double mean_confusion[4] = {0, 0, 0, 0};  // tp, fp, tn, fn
    std::vector<double> mean_roc_fpr;         // fixed 101-point grid
    std::vector<double> mean_roc_tpr;
    double mean_auc = 0.0;
    int roc_fold_count = 0;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
};

// Per fold: train on the out-of-fold rows (optionally balanced with
// tune::balance_resample, training rows only), score the held-out fold at
// threshold 0.5, and collect ROC points from the probability scores. The
// mean ROC is a vertical average on a fixed FPR grid.
EvalReport cross_validate(MatrixView X, std::span<const std::uint8_t> y,
                          const HyperParams& params, const FoldPlan& plan,
                          bool balance = true, int n_threads = 1);

}  // namespace dyscreen
