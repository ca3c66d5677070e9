#include "refertriage/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "refertriage/errors.hpp"
#include "refertriage/rng.hpp"

namespace refertriage {

std::vector<size_t> FoldPlan::test_indices(size_t fold) const {
    std::vector<size_t> out;
    for (size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold) out.push_back(i);
    return out;
}

std::vector<size_t> FoldPlan::train_indices(size_t fold) const {
    std::vector<size_t> out;
    for (size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold) out.push_back(i);
    return out;
}

FoldPlan stratified_folds(const std::vector<int>& y, size_t k, uint64_t seed) {
    if (k < 2) throw InvalidArgument("stratified_folds: K must be >= 2");
    std::vector<size_t> by_class[2];
    for (size_t i = 0; i < y.size(); ++i) by_class[y[i] == 1 ? 1 : 0].push_back(i);
    for (int c = 0; c < 2; ++c)
        if (by_class[c].size() < k)
            throw InvalidArgument("stratified_folds: class " + std::to_string(c) + " has " +
                                  std::to_string(by_class[c].size()) + " samples, need >= K=" +
                                  std::to_string(k));

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(y.size(), 0);
    for (int c = 0; c < 2; ++c) {
        Rng rng(derive_seed(seed, 11, static_cast<uint64_t>(c)));
        rng.shuffle(by_class[c]);
        for (size_t j = 0; j < by_class[c].size(); ++j)
            plan.assignments[by_class[c][j]] = j % k;
    }
    return plan;
}

const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names = {"roc_auc", "pr_auc", "accuracy", "mcc",
                                                   "precision", "recall", "f1"};
    return names;
}

double metric_by_name(const MetricSet& m, const std::string& name) {
    if (name == "roc_auc") return m.roc_auc;
    if (name == "pr_auc") return m.pr_auc;
    if (name == "accuracy") return m.accuracy;
    if (name == "mcc") return m.mcc;
    if (name == "precision") return m.precision;
    if (name == "recall") return m.recall;
    if (name == "f1") return m.f1;
    throw InvalidArgument("unknown metric '" + name + "'");
}

namespace {

void check_scores(const std::vector<int>& y, const std::vector<double>& scores) {
    if (y.size() != scores.size())
        throw InvalidArgument("metrics: labels and scores have different lengths");
    if (y.empty()) throw InvalidArgument("metrics: empty input");
}

size_t positive_count(const std::vector<int>& y) {
    size_t pos = 0;
    for (int v : y) pos += static_cast<size_t>(v);
    return pos;
}

} // namespace

double roc_auc(const std::vector<int>& y, const std::vector<double>& scores) {
    check_scores(y, scores);
    const size_t n = y.size();
    const size_t n_pos = positive_count(y);
    const size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw InvalidArgument("roc_auc: needs both classes present");

    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    // average ranks over tied scores make each tied pair contribute 0.5
    double rank_sum_pos = 0.0;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (size_t t = i; t <= j; ++t)
            if (y[order[t]] == 1) rank_sum_pos += avg_rank;
        i = j + 1;
    }
    const double np = static_cast<double>(n_pos);
    const double nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

double average_precision(const std::vector<int>& y, const std::vector<double>& scores) {
    check_scores(y, scores);
    const size_t n_pos = positive_count(y);
    if (n_pos == 0 || n_pos == y.size())
        throw InvalidArgument("average_precision: needs both classes present");

    std::vector<size_t> order(y.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    double sum = 0.0;
    size_t hits = 0;
    for (size_t rank = 1; rank <= order.size(); ++rank) {
        if (y[order[rank - 1]] == 1) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(rank);
        }
    }
    return sum / static_cast<double>(n_pos);
}

MetricSet binary_metrics(const std::vector<int>& y, const std::vector<double>& scores,
                         double threshold) {
    check_scores(y, scores);

    MetricSet m;
    m.threshold_used = threshold;
    m.roc_auc = roc_auc(y, scores);
    m.pr_auc = average_precision(y, scores);

    double tp = 0, fp = 0, tn = 0, fn = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        const bool pred = scores[i] >= threshold;
        if (y[i] == 1)
            pred ? ++tp : ++fn;
        else
            pred ? ++fp : ++tn;
    }
    const double n = static_cast<double>(y.size());
    m.accuracy = (tp + tn) / n;
    m.precision = (tp + fp) > 0 ? tp / (tp + fp) : 0.0;
    m.recall = (tp + fn) > 0 ? tp / (tp + fn) : 0.0;
    m.f1 = (m.precision + m.recall) > 0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    const double denom =
        std::sqrt(tp + fp) * std::sqrt(tp + fn) * std::sqrt(tn + fp) * std::sqrt(tn + fn);
    m.mcc = denom > 0.0 ? (tp * tn - fp * fn) / denom : 0.0;
    return m;
}

void BootstrapSpec::validate() const {
    if (n_resamples < 1) throw InvalidArgument("bootstrap: n_resamples must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("bootstrap: alpha must be in (0,1)");
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double h = q * static_cast<double>(sorted.size() - 1);
    const size_t lo = static_cast<size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double resample_mean(const std::vector<double>& values, uint64_t seed, size_t b) {
    Rng rng(derive_seed(seed, 6, b));
    double sum = 0.0;
    for (size_t i = 0; i < values.size(); ++i)
        sum += values[static_cast<size_t>(rng.below(values.size()))];
    return sum / static_cast<double>(values.size());
}

CiEstimate bootstrap_ci_impl(const std::vector<double>& values, const BootstrapSpec& boot,
                             bool parallel) {
    boot.validate();
    if (values.empty()) throw InvalidArgument("bootstrap_ci: empty input");

    CiEstimate est;
    for (double v : values) est.mean += v;
    est.mean /= static_cast<double>(values.size());

    std::vector<double> means(boot.n_resamples);
    const int64_t nb = static_cast<int64_t>(boot.n_resamples);
#pragma omp parallel for schedule(static) if (parallel)
    for (int64_t b = 0; b < nb; ++b)
        means[static_cast<size_t>(b)] = resample_mean(values, boot.seed, static_cast<size_t>(b));

    std::sort(means.begin(), means.end());
    est.lower = quantile_sorted(means, boot.alpha / 2.0);
    est.upper = quantile_sorted(means, 1.0 - boot.alpha / 2.0);
    return est;
}

} // namespace

CiEstimate bootstrap_ci(const std::vector<double>& values, const BootstrapSpec& boot) {
    return bootstrap_ci_impl(values, boot, true);
}

CiEstimate bootstrap_ci_serial(const std::vector<double>& values, const BootstrapSpec& boot) {
    return bootstrap_ci_impl(values, boot, false);
}

namespace {

struct SplitData {
    Matrix X;
    std::vector<int> y;
};

SplitData gather(const EmbeddedDataset& data, const std::vector<size_t>& idx) {
    SplitData out;
    out.X = Matrix(idx.size(), data.matrix.dim);
    out.y.reserve(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) {
        const auto src = data.matrix.vectors.row(idx[i]);
        std::copy(src.begin(), src.end(), out.X.row(i).begin());
        out.y.push_back(data.labels[idx[i]]);
    }
    return out;
}

} // namespace

CvRun run_cv(const EmbeddedDataset& data, const ClassifierSpec& classifier,
             const ResampleSpec& resample_spec, const FoldPlan& folds, const BootstrapSpec& boot,
             const CvOptions& options) {
    const size_t n = data.matrix.vectors.rows();
    if (data.labels.size() != n)
        throw InvalidArgument("run_cv: labels not aligned with embedding rows");
    if (folds.assignments.size() != n)
        throw InvalidArgument("run_cv: fold plan does not cover the dataset");
    for (size_t a : folds.assignments)
        if (a >= folds.k) throw InvalidArgument("run_cv: fold id out of range");

    CvRun run;
    run.report.classifier = classifier;
    run.report.resample = resample_spec;
    run.report.boot = boot;
    run.report.variant = data.variant;
    run.report.threshold = options.threshold;
    run.report.grid_used = !options.grid.empty();

    for (size_t f = 0; f < folds.k; ++f) {
        try {
            const auto test_idx = folds.test_indices(f);
            const auto train_idx = folds.train_indices(f);
            SplitData train_split = gather(data, train_idx);
            SplitData test_split = gather(data, test_idx);

            FoldCounts counts;
            counts.train_raw = train_split.y.size();
            counts.test_pos = positive_count(test_split.y);
            counts.test_neg = test_split.y.size() - counts.test_pos;

            ClassifierSpec fold_spec = classifier;
            if (run.report.grid_used) {
                const auto result =
                    grid_search(train_split.X, train_split.y, options.grid, options.inner_folds,
                                derive_seed(classifier.seed, 7, f));
                fold_spec = result.best;
                run.report.grid_best_per_fold.push_back(result.best_index);
                run.report.grid_choices.push_back(result.best);
            }
            fold_spec.seed = derive_seed(classifier.seed, 8, f);

            ResampleSpec fold_resample = resample_spec;
            fold_resample.seed = derive_seed(resample_spec.seed, 9, f);
            Rebalanced balanced = rebalance(train_split.X, train_split.y, fold_resample);
            counts.train_resampled = balanced.y.size();

            const TrainedClassifier model = train(balanced.X, balanced.y, fold_spec);
            FoldScores fs;
            fs.fold = f;
            fs.scores = model.predict_scores(test_split.X);
            fs.y = std::move(test_split.y);

            run.report.fold_metrics.push_back(binary_metrics(fs.y, fs.scores, options.threshold));
            run.report.fold_counts.push_back(counts);
            run.fold_scores.push_back(std::move(fs));
        } catch (const std::runtime_error& e) {
            throw DataError("fold " + std::to_string(f) + ": " + e.what());
        }
    }

    for (size_t mi = 0; mi < metric_names().size(); ++mi) {
        const std::string& name = metric_names()[mi];
        std::vector<double> values;
        values.reserve(folds.k);
        for (const MetricSet& m : run.report.fold_metrics)
            values.push_back(metric_by_name(m, name));
        BootstrapSpec metric_boot = boot;
        metric_boot.seed = derive_seed(boot.seed, 10, mi);
        run.report.summary[name] = bootstrap_ci(values, metric_boot);
    }
    return run;
}

namespace {

// Threshold grid values normalized to 6 decimals so reported optima are exact
// grid literals (0.30, not 0.30000000000000004).
std::vector<double> threshold_grid(double step) {
    if (!(step > 0.0 && step <= 1.0))
        throw InvalidArgument("threshold_sweep: step must be in (0, 1]");
    std::vector<double> grid;
    for (size_t i = 0;; ++i) {
        const double t = std::round(static_cast<double>(i) * step * 1e6) / 1e6;
        if (t > 1.0 + 1e-12) break;
        grid.push_back(std::min(t, 1.0));
    }
    return grid;
}

} // namespace

ThresholdCurve threshold_sweep(const std::vector<FoldScores>& folds, double step) {
    if (folds.empty()) throw InvalidArgument("threshold_sweep: no folds");
    for (const FoldScores& f : folds)
        for (double s : f.scores)
            if (s < 0.0 || s > 1.0)
                throw InvalidArgument("threshold_sweep: scores must lie in [0, 1]");

    ThresholdCurve curve;
    curve.thresholds = threshold_grid(step);
    const size_t m = curve.thresholds.size();
    curve.precision.assign(m, 0.0);
    curve.recall.assign(m, 0.0);
    curve.f1.assign(m, 0.0);

    for (const FoldScores& f : folds) {
        for (size_t ti = 0; ti < m; ++ti) {
            const double t = curve.thresholds[ti];
            double tp = 0, fp = 0, fn = 0;
            for (size_t i = 0; i < f.y.size(); ++i) {
                const bool pred = f.scores[i] >= t;
                if (f.y[i] == 1)
                    pred ? ++tp : ++fn;
                else if (pred)
                    ++fp;
            }
            const double precision = (tp + fp) > 0 ? tp / (tp + fp) : 0.0;
            const double recall = (tp + fn) > 0 ? tp / (tp + fn) : 0.0;
            const double f1 =
                (precision + recall) > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
            curve.precision[ti] += precision;
            curve.recall[ti] += recall;
            curve.f1[ti] += f1;
        }
    }
    const double kf = static_cast<double>(folds.size());
    size_t best = 0;
    for (size_t ti = 0; ti < m; ++ti) {
        curve.precision[ti] /= kf;
        curve.recall[ti] /= kf;
        curve.f1[ti] /= kf;
        if (curve.f1[ti] > curve.f1[best]) best = ti; // ties keep the lowest threshold
    }
    curve.optimal_threshold = curve.thresholds[best];
    return curve;
}

void write_threshold_csv(const std::string& path, const ThresholdCurve& curve) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << "threshold,precision,recall,f1\n";
    char buf[32];
    auto put = [&](double v, char sep) {
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        out.write(buf, res.ptr - buf);
        out << sep;
    };
    for (size_t i = 0; i < curve.thresholds.size(); ++i) {
        put(curve.thresholds[i], ',');
        put(curve.precision[i], ',');
        put(curve.recall[i], ',');
        put(curve.f1[i], '\n');
    }
    if (!out) throw DataError("write failed: " + path);
}

} // namespace refertriage
