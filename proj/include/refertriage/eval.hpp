#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "refertriage/embed.hpp"
#include "refertriage/model.hpp"
#include "refertriage/resample.hpp"

namespace refertriage {

struct FoldPlan {
    size_t k = 0;
    std::vector<size_t> assignments; // record index -> fold id
    uint64_t seed = 0;

    std::vector<size_t> test_indices(size_t fold) const;
    std::vector<size_t> train_indices(size_t fold) const;
};

// Within each class, indices are shuffled then dealt round-robin, which keeps
// per-fold class counts within +/-1 of exact proportionality.
FoldPlan stratified_folds(const std::vector<int>& y, size_t k, uint64_t seed);

struct MetricSet {
    double roc_auc = 0.0;
    double pr_auc = 0.0;
    double accuracy = 0.0;
    double mcc = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double threshold_used = 0.5;
};

// Names in reporting order.
const std::vector<std::string>& metric_names();
double metric_by_name(const MetricSet& m, const std::string& name);

// Predictions are score >= threshold. ROC-AUC is the tie-aware rank statistic
// (equal scores credit 0.5 per pair); PR-AUC is average precision; MCC is 0
// when its denominator vanishes, precision 0 with no predicted positives.
MetricSet binary_metrics(const std::vector<int>& y, const std::vector<double>& scores,
                         double threshold);
double roc_auc(const std::vector<int>& y, const std::vector<double>& scores);
double average_precision(const std::vector<int>& y, const std::vector<double>& scores);

struct BootstrapSpec {
    size_t n_resamples = 1000;
    double alpha = 0.05;
    uint64_t seed = 0;

    void validate() const;
};

struct CiEstimate {
    double mean = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

// Percentile bootstrap over the fold-level values: resample with replacement,
// take means, report the empirical alpha/2 and 1-alpha/2 quantiles.
CiEstimate bootstrap_ci(const std::vector<double>& values, const BootstrapSpec& boot);
CiEstimate bootstrap_ci_serial(const std::vector<double>& values, const BootstrapSpec& boot);

struct FoldScores {
    size_t fold = 0;
    std::vector<int> y;          // test-split labels, untouched by resampling
    std::vector<double> scores;
};

struct FoldCounts {
    size_t test_pos = 0;
    size_t test_neg = 0;
    size_t train_raw = 0;
    size_t train_resampled = 0;
};

struct CvReport {
    std::vector<MetricSet> fold_metrics;
    std::map<std::string, CiEstimate> summary; // keyed by metric name
    std::vector<FoldCounts> fold_counts;
    ClassifierSpec classifier;
    ResampleSpec resample;
    BootstrapSpec boot;
    VariantTag variant = VariantTag::base;
    double threshold = 0.5;
    bool grid_used = false;
    std::vector<size_t> grid_best_per_fold;    // index into the grid, per fold
    std::vector<ClassifierSpec> grid_choices;  // winning spec, per fold
};

struct CvRun {
    CvReport report;
    std::vector<FoldScores> fold_scores;
};

struct CvOptions {
    double threshold = 0.5;
    std::vector<ClassifierSpec> grid; // non-empty enables nested grid search
    size_t inner_folds = 3;
};

// Outer loop: per fold, optionally grid-search on the raw training split,
// rebalance the training split only, train, score the untouched test split.
CvRun run_cv(const EmbeddedDataset& data, const ClassifierSpec& classifier,
             const ResampleSpec& resample, const FoldPlan& folds, const BootstrapSpec& boot,
             const CvOptions& options = {});

struct ThresholdCurve {
    std::vector<double> thresholds; // 0.00 .. 1.00
    std::vector<double> precision;  // fold means, pointwise
    std::vector<double> recall;
    std::vector<double> f1;
    double optimal_threshold = 0.0; // argmax mean F1, ties to the lowest threshold
};

ThresholdCurve threshold_sweep(const std::vector<FoldScores>& folds, double step = 0.01);
void write_threshold_csv(const std::string& path, const ThresholdCurve& curve);

} // namespace refertriage
