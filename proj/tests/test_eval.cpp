#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "refertriage/errors.hpp"
#include "refertriage/eval.hpp"
#include "refertriage/rng.hpp"

using namespace refertriage;

TEST_CASE("stratified folds deal classes round-robin") {
    std::vector<int> y(100, 0);
    for (size_t i = 0; i < 10; ++i) y[i * 10] = 1; // 10 positives, 90 negatives
    const auto plan = stratified_folds(y, 5, 77);

    for (size_t f = 0; f < 5; ++f) {
        size_t pos = 0, neg = 0;
        for (size_t i = 0; i < y.size(); ++i)
            if (plan.assignments[i] == f) (y[i] == 1 ? pos : neg)++;
        CHECK(pos == 2);
        CHECK(neg == 18);
    }
}

TEST_CASE("fold plans partition the indices") {
    std::vector<int> y(37, 0);
    for (size_t i = 0; i < 9; ++i) y[i] = 1;
    const auto plan = stratified_folds(y, 4, 3);
    std::vector<size_t> seen(37, 0);
    for (size_t f = 0; f < 4; ++f)
        for (size_t i : plan.test_indices(f)) seen[i]++;
    CHECK(std::all_of(seen.begin(), seen.end(), [](size_t c) { return c == 1; }));
}

TEST_CASE("K=1 and undersized classes are rejected") {
    std::vector<int> y = {0, 0, 1, 1};
    CHECK_THROWS_AS(stratified_folds(y, 1, 0), InvalidArgument);
    CHECK_THROWS_AS(stratified_folds(y, 3, 0), InvalidArgument); // 2 positives < K
}

TEST_CASE("fold assignment is deterministic") {
    std::vector<int> y(50, 0);
    for (size_t i = 0; i < 14; ++i) y[i] = 1;
    CHECK(stratified_folds(y, 5, 123).assignments == stratified_folds(y, 5, 123).assignments);
    CHECK(stratified_folds(y, 5, 123).assignments != stratified_folds(y, 5, 124).assignments);
}

TEST_CASE("stratification stays within one of proportional over random sizes") {
    Rng rng(2023);
    for (int trial = 0; trial < 200; ++trial) {
        const size_t k = 2 + rng.below(6);
        const size_t n_pos = k + rng.below(40);
        const size_t n_neg = k + rng.below(200);
        std::vector<int> y(n_pos + n_neg, 0);
        for (size_t i = 0; i < n_pos; ++i) y[i] = 1;
        Rng shuffle_rng(trial);
        shuffle_rng.shuffle(y);

        const auto plan = stratified_folds(y, k, rng.next_u64());
        const double share = static_cast<double>(n_pos) / static_cast<double>(k);
        std::vector<size_t> pos_per_fold(k, 0), count_per_fold(k, 0);
        for (size_t i = 0; i < y.size(); ++i) {
            count_per_fold[plan.assignments[i]]++;
            if (y[i] == 1) pos_per_fold[plan.assignments[i]]++;
        }
        size_t total = 0;
        for (size_t f = 0; f < k; ++f) {
            CHECK(std::fabs(static_cast<double>(pos_per_fold[f]) - share) <= 1.0);
            total += count_per_fold[f];
        }
        CHECK(total == y.size());
    }
}

TEST_CASE("roc_auc counts correctly ordered pairs") {
    // oracle: pairs (0.1,0.35),(0.1,0.8),(0.4,0.8) ordered, (0.4,0.35) not -> 3/4
    const std::vector<int> y = {0, 0, 1, 1};
    const std::vector<double> s = {0.1, 0.4, 0.35, 0.8};
    CHECK(roc_auc(y, s) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("ties credit half a pair") {
    const std::vector<int> y = {0, 1};
    const std::vector<double> s = {0.5, 0.5};
    CHECK(roc_auc(y, s) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("perfect predictions give mcc 1 and f1 1") {
    const std::vector<int> y = {0, 1, 0, 1, 1};
    const std::vector<double> s = {0.1, 0.9, 0.2, 0.8, 0.7};
    const auto m = binary_metrics(y, s, 0.5);
    CHECK(m.mcc == doctest::Approx(1.0));
    CHECK(m.f1 == doctest::Approx(1.0));
    CHECK(m.accuracy == doctest::Approx(1.0));
    CHECK(m.roc_auc == doctest::Approx(1.0));
}

TEST_CASE("mcc matches the confusion-matrix formula") {
    // TP=3 FP=1 FN=2 TN=4 -> (3*4 - 1*2) / sqrt(4*5*5*6) = 10 / sqrt(600)
    std::vector<int> y;
    std::vector<double> s;
    for (int i = 0; i < 3; ++i) { y.push_back(1); s.push_back(0.9); } // TP
    for (int i = 0; i < 1; ++i) { y.push_back(0); s.push_back(0.9); } // FP
    for (int i = 0; i < 2; ++i) { y.push_back(1); s.push_back(0.1); } // FN
    for (int i = 0; i < 4; ++i) { y.push_back(0); s.push_back(0.1); } // TN
    const auto m = binary_metrics(y, s, 0.5);
    CHECK(m.mcc == doctest::Approx(10.0 / std::sqrt(600.0)).epsilon(1e-12));
}

TEST_CASE("roc_auc is invariant under strictly monotone score transforms") {
    Rng rng(303);
    for (int trial = 0; trial < 30; ++trial) {
        const size_t n = 5 + rng.below(40);
        std::vector<int> y(n);
        std::vector<double> s(n), t(n);
        bool has0 = false, has1 = false;
        for (size_t i = 0; i < n; ++i) {
            y[i] = static_cast<int>(rng.below(2));
            s[i] = rng.uniform();
            has0 |= y[i] == 0;
            has1 |= y[i] == 1;
        }
        if (!has0) y[0] = 0;
        if (!has1) y[n - 1] = 1;
        const double a = 0.5 + rng.uniform() * 3.0;
        const double b = rng.uniform();
        for (size_t i = 0; i < n; ++i) t[i] = std::exp(a * s[i]) + b; // strictly increasing
        CHECK(roc_auc(y, s) == doctest::Approx(roc_auc(y, t)).epsilon(1e-12));
    }
}

TEST_CASE("roc_auc flips with negated scores and labels") {
    Rng rng(304);
    const size_t n = 25;
    std::vector<int> y(n), y_flip(n);
    std::vector<double> s(n), s_flip(n);
    for (size_t i = 0; i < n; ++i) {
        y[i] = static_cast<int>(rng.below(2));
        s[i] = rng.uniform();
        y_flip[i] = 1 - y[i];
        s_flip[i] = 1.0 - s[i];
    }
    if (std::count(y.begin(), y.end(), 1) == 0) { y[0] = 1; y_flip[0] = 0; }
    if (std::count(y.begin(), y.end(), 0) == 0) { y[1] = 0; y_flip[1] = 1; }
    CHECK(roc_auc(y, s) == doctest::Approx(roc_auc(y_flip, s_flip)).epsilon(1e-12));
}

TEST_CASE("mcc is symmetric under class and prediction swap") {
    Rng rng(305);
    const size_t n = 40;
    std::vector<int> y(n), y_swap(n);
    std::vector<double> s(n), s_swap(n);
    for (size_t i = 0; i < n; ++i) {
        y[i] = static_cast<int>(rng.below(2));
        // scores off the 0.5 boundary so 1-s predicts the exact complement
        s[i] = 0.05 + 0.1 * static_cast<double>(rng.below(10));
        y_swap[i] = 1 - y[i];
        s_swap[i] = 1.0 - s[i];
    }
    if (std::count(y.begin(), y.end(), 1) == 0) { y[0] = 1; y_swap[0] = 0; }
    if (std::count(y.begin(), y.end(), 0) == 0) { y[1] = 0; y_swap[1] = 1; }
    const auto a = binary_metrics(y, s, 0.5);
    const auto b = binary_metrics(y_swap, s_swap, 0.5);
    CHECK(a.mcc == doctest::Approx(b.mcc).epsilon(1e-9));
}

TEST_CASE("ranking metrics require both classes") {
    CHECK_THROWS_AS(roc_auc({1, 1}, {0.1, 0.2}), InvalidArgument);
    CHECK_THROWS_AS(average_precision({0, 0}, {0.1, 0.2}), InvalidArgument);
}

TEST_CASE("bootstrap of constant values collapses to a point") {
    BootstrapSpec boot;
    boot.seed = 9;
    const auto e = bootstrap_ci({0.8, 0.8, 0.8, 0.8, 0.8}, boot);
    CHECK(e.mean == 0.8);
    CHECK(e.lower == 0.8);
    CHECK(e.upper == 0.8);
}

TEST_CASE("bootstrap of {0,1} approaches the enumerated limits") {
    // the four equally likely resamples have means {0, 0.5, 0.5, 1}; with many
    // resamples the 2.5th percentile approaches 0 and the 97.5th approaches 1
    BootstrapSpec boot;
    boot.n_resamples = 20000;
    boot.seed = 10;
    const auto e = bootstrap_ci({0.0, 1.0}, boot);
    CHECK(e.mean == 0.5);
    CHECK(e.lower == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(e.upper == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("bootstrap is deterministic given the seed") {
    BootstrapSpec boot;
    boot.seed = 11;
    const std::vector<double> values = {0.3, 0.5, 0.9, 0.4, 0.6};
    const auto a = bootstrap_ci(values, boot);
    const auto b = bootstrap_ci(values, boot);
    CHECK(a.lower == b.lower);
    CHECK(a.upper == b.upper);
}

TEST_CASE("threshold sweep finds the first grid point above the negatives") {
    FoldScores fold;
    fold.y = {1, 1, 1, 0, 0, 0};
    fold.scores = {0.9, 0.95, 1.0, 0.1, 0.05, 0.02};
    const auto curve = threshold_sweep({fold});
    CHECK(curve.optimal_threshold == 0.11);
    for (size_t i = 0; i < curve.thresholds.size(); ++i) {
        const double t = curve.thresholds[i];
        if (t >= 0.11 && t <= 0.9)
            CHECK(curve.f1[i] == doctest::Approx(1.0));
        else
            CHECK(curve.f1[i] < 1.0);
    }
}

TEST_CASE("recall is non-increasing along the threshold grid") {
    Rng rng(47);
    FoldScores fold;
    for (size_t i = 0; i < 60; ++i) {
        fold.y.push_back(static_cast<int>(rng.below(2)));
        fold.scores.push_back(rng.uniform());
    }
    const auto curve = threshold_sweep({fold});
    for (size_t i = 1; i < curve.recall.size(); ++i)
        CHECK(curve.recall[i] <= curve.recall[i - 1] + 1e-12);
}

TEST_CASE("all-zero scores yield zero precision and f1 above threshold zero") {
    FoldScores fold;
    fold.y = {1, 0, 1, 0};
    fold.scores = {0.0, 0.0, 0.0, 0.0};
    const auto curve = threshold_sweep({fold});
    for (size_t i = 0; i < curve.thresholds.size(); ++i) {
        if (curve.thresholds[i] > 0.0) {
            CHECK(curve.precision[i] == 0.0);
            CHECK(curve.f1[i] == 0.0);
        }
    }
}

namespace {

EmbeddedDataset planted_dataset(size_t n, size_t n_pos, uint64_t seed) {
    Rng rng(seed);
    EmbeddedDataset data;
    data.matrix.dim = 6;
    data.matrix.vectors = Matrix(n, 6);
    data.labels.assign(n, 0);
    for (size_t i = 0; i < n; ++i) {
        data.matrix.record_ids.push_back("r" + std::to_string(i));
        if (i < n_pos) data.labels[i] = 1;
        for (size_t c = 0; c < 6; ++c) {
            double v = rng.uniform() * 2.0 - 1.0;
            if (data.labels[i] == 1 && c < 2) v += 2.5; // planted shift
            data.matrix.vectors.at(i, c) = v;
        }
    }
    return data;
}

} // namespace

TEST_CASE("run_cv scores partition the dataset when no resampling is used") {
    const auto data = planted_dataset(80, 16, 42);
    const auto plan = stratified_folds(data.labels, 4, 7);

    ClassifierSpec spec;
    spec.forest.n_estimators = 10;
    spec.seed = 1;
    ResampleSpec none;
    none.strategy = BalanceStrategy::none;
    BootstrapSpec boot;
    boot.n_resamples = 200;
    boot.seed = 2;

    const auto run = run_cv(data, spec, none, plan, boot);
    size_t total = 0;
    for (const auto& fs : run.fold_scores) total += fs.scores.size();
    CHECK(total == 80);
    REQUIRE(run.report.fold_metrics.size() == 4);
    for (const auto& name : metric_names()) {
        const auto& ci = run.report.summary.at(name);
        CHECK(ci.lower <= ci.mean + 1e-12);
        CHECK(ci.mean <= ci.upper + 1e-12);
    }
}

TEST_CASE("test splits keep their raw class counts under resampling") {
    const auto data = planted_dataset(90, 18, 43);
    const auto plan = stratified_folds(data.labels, 3, 8);

    ClassifierSpec spec;
    spec.forest.n_estimators = 5;
    ResampleSpec smote;
    smote.strategy = BalanceStrategy::smote;
    BootstrapSpec boot;
    boot.n_resamples = 100;

    const auto run = run_cv(data, spec, smote, plan, boot);
    for (size_t f = 0; f < 3; ++f) {
        size_t raw_pos = 0, raw_neg = 0;
        for (size_t i = 0; i < data.labels.size(); ++i)
            if (plan.assignments[i] == f) (data.labels[i] == 1 ? raw_pos : raw_neg)++;
        CHECK(run.report.fold_counts[f].test_pos == raw_pos);
        CHECK(run.report.fold_counts[f].test_neg == raw_neg);
        CHECK(run.report.fold_counts[f].train_resampled >
              run.report.fold_counts[f].train_raw); // smote grew the training side
    }
}

TEST_CASE("fold failures carry the fold id") {
    const auto data = planted_dataset(40, 8, 45);
    // hand-built plan putting every positive into fold 1: fold 0's test split
    // is single-class, so its ranking metrics must fail, annotated "fold 0"
    FoldPlan plan;
    plan.k = 2;
    plan.assignments.assign(40, 0);
    for (size_t i = 0; i < 40; ++i)
        if (data.labels[i] == 1) plan.assignments[i] = 1;
    for (size_t i = 20; i < 28; ++i) plan.assignments[i] = 1; // some negatives too

    ClassifierSpec spec;
    spec.forest.n_estimators = 3;
    ResampleSpec none;
    none.strategy = BalanceStrategy::none;
    CHECK_THROWS_WITH_AS(run_cv(data, spec, none, plan, BootstrapSpec{}),
                         doctest::Contains("fold 0"), DataError);
}

TEST_CASE("run_cv separates a planted signal") {
    const auto data = planted_dataset(200, 40, 44);
    const auto plan = stratified_folds(data.labels, 5, 9);

    ClassifierSpec spec;
    spec.forest.n_estimators = 30;
    spec.seed = 3;
    ResampleSpec smote;
    smote.strategy = BalanceStrategy::smote;
    BootstrapSpec boot;
    boot.n_resamples = 200;

    const auto run = run_cv(data, spec, smote, plan, boot);
    CHECK(run.report.summary.at("roc_auc").mean > 0.9);
}
