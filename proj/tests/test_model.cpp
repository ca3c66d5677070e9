#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "refertriage/errors.hpp"
#include "refertriage/model.hpp"
#include "refertriage/rng.hpp"

using namespace refertriage;

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < rows[r].size(); ++c) m.at(r, c) = rows[r][c];
    return m;
}

ClassifierSpec forest_spec(size_t n_trees, uint64_t seed, bool bootstrap = true) {
    ClassifierSpec spec;
    spec.kind = ModelKind::random_forest;
    spec.forest.n_estimators = n_trees;
    spec.forest.bootstrap = bootstrap;
    spec.seed = seed;
    return spec;
}

// exhaustive enumeration of (feature, midpoint) splits maximizing Gini
// decrease with the lowest-feature-then-lowest-threshold tie break
struct OracleSplit {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

double gini(size_t pos, size_t n) {
    if (n == 0) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(n);
    return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

OracleSplit oracle_best_split(const Matrix& X, const std::vector<int>& y) {
    const size_t n = X.rows();
    size_t pos_total = 0;
    for (int v : y) pos_total += static_cast<size_t>(v);
    const double parent = gini(pos_total, n);

    OracleSplit best;
    best.gain = 1e-12; // same minimum-gain rule as the builder
    for (size_t f = 0; f < X.cols(); ++f) {
        std::vector<double> values;
        for (size_t i = 0; i < n; ++i) values.push_back(X.at(i, f));
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (size_t v = 1; v < values.size(); ++v) {
            const double thr = values[v - 1] + (values[v] - values[v - 1]) / 2.0;
            size_t nl = 0, pl = 0;
            for (size_t i = 0; i < n; ++i)
                if (X.at(i, f) <= thr) {
                    ++nl;
                    pl += static_cast<size_t>(y[i]);
                }
            const size_t nr = n - nl;
            if (nl == 0 || nr == 0) continue;
            const double weighted = (static_cast<double>(nl) * gini(pl, nl) +
                                     static_cast<double>(nr) * gini(pos_total - pl, nr)) /
                                    static_cast<double>(n);
            const double gain = parent - weighted;
            if (gain > best.gain) {
                best.gain = gain;
                best.feature = static_cast<int>(f);
                best.threshold = thr;
            }
        }
    }
    return best;
}

} // namespace

TEST_CASE("a single tree separates a linearly separable 4-point set") {
    const Matrix X = from_rows({{0.0}, {1.0}, {3.0}, {4.0}});
    const std::vector<int> y = {0, 0, 1, 1};
    const auto model = train(X, y, forest_spec(1, 42, /*bootstrap=*/false));
    const auto scores = model.predict_scores(X);
    for (size_t i = 0; i < y.size(); ++i)
        CHECK((scores[i] >= 0.5) == (y[i] == 1));
}

TEST_CASE("constant features leave scores at the class prior") {
    Matrix X(60, 4); // all zeros: no split is possible
    std::vector<int> y(60, 0);
    for (size_t i = 0; i < 15; ++i) y[i] = 1; // prior 0.25

    const auto model = train(X, y, forest_spec(200, 7));
    const auto scores = model.predict_scores(X);
    for (double s : scores) CHECK(std::fabs(s - 0.25) < 0.05);
}

TEST_CASE("training twice with the same spec gives identical scores") {
    Rng rng(11);
    Matrix X(30, 5);
    std::vector<int> y(30);
    for (size_t i = 0; i < 30; ++i) {
        y[i] = static_cast<int>(rng.below(2));
        for (size_t c = 0; c < 5; ++c) X.at(i, c) = rng.uniform();
    }
    if (std::count(y.begin(), y.end(), 1) == 0) y[0] = 1;
    if (std::count(y.begin(), y.end(), 0) == 0) y[0] = 0;

    for (ModelKind kind : {ModelKind::random_forest, ModelKind::gradient_boosting,
                           ModelKind::linear_margin, ModelKind::mlp}) {
        ClassifierSpec spec;
        spec.kind = kind;
        spec.forest.n_estimators = 20;
        spec.boost.n_stages = 10;
        spec.mlp.epochs = 5;
        spec.linear.epochs = 5;
        spec.seed = 99;
        const auto a = train(X, y, spec).predict_scores(X);
        const auto b = train(X, y, spec).predict_scores(X);
        CHECK(a == b);
    }
}

TEST_CASE("scores stay inside [0, 1] for all model kinds") {
    Rng rng(13);
    Matrix X(80, 6);
    std::vector<int> y(80);
    for (size_t i = 0; i < 80; ++i) {
        y[i] = i % 3 == 0 ? 1 : 0;
        for (size_t c = 0; c < 6; ++c) X.at(i, c) = rng.uniform() * 10.0 - 5.0;
    }
    Matrix probe(1000, 6);
    for (size_t i = 0; i < probe.rows(); ++i)
        for (size_t c = 0; c < 6; ++c) probe.at(i, c) = rng.uniform() * 20.0 - 10.0;

    for (ModelKind kind : {ModelKind::random_forest, ModelKind::gradient_boosting,
                           ModelKind::linear_margin, ModelKind::mlp}) {
        ClassifierSpec spec;
        spec.kind = kind;
        spec.forest.n_estimators = 10;
        spec.boost.n_stages = 20;
        spec.mlp.epochs = 10;
        spec.linear.epochs = 10;
        spec.seed = 3;
        const auto scores = train(X, y, spec).predict_scores(probe);
        for (double s : scores) {
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
        }
    }
}

TEST_CASE("root split matches exhaustive Gini enumeration on small sets") {
    Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const size_t n = 4 + rng.below(5); // up to 8 points
        const size_t d = 1 + rng.below(3);
        Matrix X(n, d);
        std::vector<int> y(n);
        for (size_t i = 0; i < n; ++i) {
            y[i] = static_cast<int>(rng.below(2));
            for (size_t c = 0; c < d; ++c)
                X.at(i, c) = static_cast<double>(rng.below(6)); // ties likely
        }
        if (std::count(y.begin(), y.end(), 1) == 0) y[0] = 1;
        if (std::count(y.begin(), y.end(), 0) == 0) y[n - 1] = 0;

        ClassifierSpec spec = forest_spec(1, rng.next_u64(), /*bootstrap=*/false);
        spec.forest.max_features = d; // examine every feature, like the oracle
        const auto model = train(X, y, spec);
        const OracleSplit expected = oracle_best_split(X, y);
        const TreeNode& root = model.trees[0].nodes[0];
        if (expected.feature < 0) {
            CHECK(root.feature == -1);
        } else {
            CHECK(root.feature == expected.feature);
            CHECK(root.threshold == doctest::Approx(expected.threshold).epsilon(1e-12));
        }
    }
}

TEST_CASE("forest score is the mean of its trees, invariant to tree order") {
    Rng rng(5);
    Matrix X(40, 3);
    std::vector<int> y(40);
    for (size_t i = 0; i < 40; ++i) {
        y[i] = i % 4 == 0 ? 1 : 0;
        for (size_t c = 0; c < 3; ++c) X.at(i, c) = rng.uniform();
    }
    auto model = train(X, y, forest_spec(16, 77));
    const auto before = model.predict_scores(X);
    std::reverse(model.trees.begin(), model.trees.end());
    const auto after = model.predict_scores(X);
    for (size_t i = 0; i < before.size(); ++i)
        CHECK(before[i] == doctest::Approx(after[i]).epsilon(1e-12));
}

TEST_CASE("increasing min_samples_leaf never grows the tree") {
    Rng rng(6);
    Matrix X(60, 2);
    std::vector<int> y(60);
    for (size_t i = 0; i < 60; ++i) {
        y[i] = static_cast<int>(rng.below(2));
        for (size_t c = 0; c < 2; ++c) X.at(i, c) = rng.uniform();
    }
    if (std::count(y.begin(), y.end(), 1) == 0) y[0] = 1;
    if (std::count(y.begin(), y.end(), 0) == 0) y[0] = 0;

    size_t previous = SIZE_MAX;
    for (size_t leaf : {size_t{1}, size_t{2}, size_t{4}, size_t{8}}) {
        ClassifierSpec spec = forest_spec(1, 10, /*bootstrap=*/false);
        spec.forest.min_samples_leaf = leaf;
        spec.forest.max_features = 2;
        const auto model = train(X, y, spec);
        CHECK(model.trees[0].node_count() <= previous);
        previous = model.trees[0].node_count();
    }
}

TEST_CASE("gradient boosting fits a simple step pattern") {
    const Matrix X = from_rows({{0.0}, {0.5}, {1.0}, {5.0}, {5.5}, {6.0}});
    const std::vector<int> y = {0, 0, 0, 1, 1, 1};
    ClassifierSpec spec;
    spec.kind = ModelKind::gradient_boosting;
    spec.boost.n_stages = 30;
    const auto model = train(X, y, spec);
    const auto scores = model.predict_scores(X);
    for (size_t i = 0; i < y.size(); ++i)
        CHECK((scores[i] >= 0.5) == (y[i] == 1));
    CHECK(model.stages.size() == 30); // ordered stagewise ensemble
}

TEST_CASE("mlp analytic gradient matches central finite differences") {
    const Matrix X = from_rows({{0.2, -1.0}, {1.4, 0.3}, {-0.7, 0.8}, {0.0, 0.1}, {2.0, -0.5}});
    const std::vector<int> y = {0, 1, 0, 1, 1};
    const size_t hidden = 4;
    const size_t n_params = hidden * 2 + hidden + hidden + 1;

    Rng rng(321);
    std::vector<double> params(n_params);
    for (double& p : params) p = rng.uniform() * 0.8 - 0.4;

    std::vector<double> grad;
    mlp_loss_grad(params, X, y, hidden, &grad);

    const double h = 1e-6;
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < n_params; ++i) {
        std::vector<double> plus = params, minus = params;
        plus[i] += h;
        minus[i] -= h;
        const double fd = (mlp_loss_grad(plus, X, y, hidden, nullptr) -
                           mlp_loss_grad(minus, X, y, hidden, nullptr)) /
                          (2.0 * h);
        num += (grad[i] - fd) * (grad[i] - fd);
        den += grad[i] * grad[i] + fd * fd;
    }
    CHECK(std::sqrt(num) / std::sqrt(den) < 1e-4);
}

TEST_CASE("grid search returns the singleton config") {
    Rng rng(8);
    Matrix X(60, 2);
    std::vector<int> y(60);
    for (size_t i = 0; i < 60; ++i) {
        y[i] = i % 2;
        for (size_t c = 0; c < 2; ++c) X.at(i, c) = rng.uniform() + y[i];
    }
    const std::vector<ClassifierSpec> grid = {forest_spec(10, 0)};
    const auto result = grid_search(X, y, grid, 3, 55);
    CHECK(result.best_index == 0);
    CHECK(result.mean_roc_auc.size() == 1);
}

TEST_CASE("grid search prefers the config that can express the pattern") {
    // XOR-in-one-dimension band structure: y = 1 inside the middle band.
    // A depth-1 stump cannot beat chance on it, an unbounded tree can.
    Rng rng(9);
    const size_t n = 120;
    Matrix X(n, 1);
    std::vector<int> y(n);
    for (size_t i = 0; i < n; ++i) {
        const double v = rng.uniform() * 3.0;
        X.at(i, 0) = v;
        y[i] = (v >= 1.0 && v < 2.0) ? 1 : 0;
    }

    ClassifierSpec shallow = forest_spec(20, 0);
    shallow.forest.max_depth = 1;
    ClassifierSpec deep = forest_spec(20, 0);
    deep.forest.max_depth = 0;

    const auto result = grid_search(X, y, {shallow, deep}, 3, 2025);
    CHECK(result.best_index == 1);
    CHECK(result.mean_roc_auc[1] > result.mean_roc_auc[0]);
}

TEST_CASE("the 81-config default grid evaluates and picks from the domain") {
    Rng rng(10);
    const size_t n = 200;
    Matrix X(n, 4);
    std::vector<int> y(n);
    for (size_t i = 0; i < n; ++i) {
        y[i] = static_cast<int>(rng.below(2));
        for (size_t c = 0; c < 4; ++c)
            X.at(i, c) = rng.uniform() + (c == 0 ? 0.8 * y[i] : 0.0);
    }
    const auto grid = default_forest_grid(31);
    REQUIRE(grid.size() == 81);
    const auto result = grid_search(X, y, grid, 3, 31);
    const auto& best = result.best.forest;
    const bool in_domain =
        (best.n_estimators == 50 || best.n_estimators == 100 || best.n_estimators == 200) &&
        (best.max_depth == 0 || best.max_depth == 10 || best.max_depth == 20) &&
        (best.min_samples_split == 2 || best.min_samples_split == 5 ||
         best.min_samples_split == 10) &&
        (best.min_samples_leaf == 1 || best.min_samples_leaf == 2 ||
         best.min_samples_leaf == 4);
    CHECK(in_domain);
}

TEST_CASE("model files round-trip scores bit-exactly") {
    Rng rng(12);
    Matrix X(50, 3);
    std::vector<int> y(50);
    for (size_t i = 0; i < 50; ++i) {
        y[i] = i % 3 == 0 ? 1 : 0;
        for (size_t c = 0; c < 3; ++c) X.at(i, c) = rng.uniform() * 7.0 - 3.0;
    }
    Matrix probe(20, 3);
    for (size_t i = 0; i < 20; ++i)
        for (size_t c = 0; c < 3; ++c) probe.at(i, c) = rng.uniform() * 7.0 - 3.0;

    for (ModelKind kind : {ModelKind::random_forest, ModelKind::gradient_boosting,
                           ModelKind::linear_margin, ModelKind::mlp}) {
        ClassifierSpec spec;
        spec.kind = kind;
        spec.forest.n_estimators = 8;
        spec.boost.n_stages = 8;
        spec.mlp.epochs = 4;
        spec.linear.epochs = 4;
        spec.seed = 7;
        const auto model = train(X, y, spec);
        const auto path =
            (std::filesystem::temp_directory_path() / ("model_" + to_string(kind) + ".json"))
                .string();
        save_model(path, model);
        const auto loaded = load_model(path);
        CHECK(loaded.predict_scores(probe) == model.predict_scores(probe));
        std::filesystem::remove(path);
    }
}

TEST_CASE("training rejects single-class and mismatched inputs") {
    Matrix X(4, 2);
    CHECK_THROWS_AS(train(X, {0, 0, 0, 0}, forest_spec(2, 1)), InvalidArgument);
    CHECK_THROWS_AS(train(X, {0, 1}, forest_spec(2, 1)), InvalidArgument);

    const auto model = train(X, {0, 1, 0, 1}, forest_spec(2, 1));
    CHECK_THROWS_AS(model.predict_scores(Matrix(3, 5)), InvalidArgument);
}
