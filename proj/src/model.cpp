#include "refertriage/model.hpp"

#include <algorithm>
#include <cmath>

#include "refertriage/errors.hpp"
#include "refertriage/model_tree.hpp"
#include "refertriage/rng.hpp"

namespace refertriage {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::random_forest: return "random_forest";
        case ModelKind::gradient_boosting: return "gradient_boosting";
        case ModelKind::linear_margin: return "linear_margin";
        case ModelKind::mlp: return "mlp";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "random_forest") return ModelKind::random_forest;
    if (s == "gradient_boosting") return ModelKind::gradient_boosting;
    if (s == "linear_margin") return ModelKind::linear_margin;
    if (s == "mlp") return ModelKind::mlp;
    throw InvalidArgument("unknown model kind '" + s + "'");
}

void ClassifierSpec::validate() const {
    switch (kind) {
        case ModelKind::random_forest:
            if (forest.n_estimators < 1)
                throw InvalidArgument("random_forest: n_estimators must be >= 1");
            if (forest.min_samples_split < 2)
                throw InvalidArgument("random_forest: min_samples_split must be >= 2");
            if (forest.min_samples_leaf < 1)
                throw InvalidArgument("random_forest: min_samples_leaf must be >= 1");
            break;
        case ModelKind::gradient_boosting:
            if (boost.n_stages < 1) throw InvalidArgument("gradient_boosting: need >= 1 stage");
            if (boost.learning_rate <= 0.0)
                throw InvalidArgument("gradient_boosting: learning_rate must be > 0");
            break;
        case ModelKind::linear_margin:
            if (linear.l2 < 0.0) throw InvalidArgument("linear_margin: l2 must be >= 0");
            if (linear.epochs < 1) throw InvalidArgument("linear_margin: need >= 1 epoch");
            break;
        case ModelKind::mlp:
            if (mlp.hidden_units < 1) throw InvalidArgument("mlp: need >= 1 hidden unit");
            if (mlp.epochs < 1) throw InvalidArgument("mlp: need >= 1 epoch");
            if (mlp.batch_size < 1) throw InvalidArgument("mlp: batch_size must be >= 1");
            if (mlp.learning_rate <= 0.0) throw InvalidArgument("mlp: learning_rate must be > 0");
            break;
    }
}

std::vector<ClassifierSpec> default_forest_grid(uint64_t seed) {
    std::vector<ClassifierSpec> grid;
    grid.reserve(81);
    for (size_t n_estimators : {size_t{50}, size_t{100}, size_t{200}})
        for (size_t max_depth : {size_t{0}, size_t{10}, size_t{20}})
            for (size_t min_split : {size_t{2}, size_t{5}, size_t{10}})
                for (size_t min_leaf : {size_t{1}, size_t{2}, size_t{4}}) {
                    ClassifierSpec spec;
                    spec.kind = ModelKind::random_forest;
                    spec.forest.n_estimators = n_estimators;
                    spec.forest.max_depth = max_depth;
                    spec.forest.min_samples_split = min_split;
                    spec.forest.min_samples_leaf = min_leaf;
                    spec.seed = seed;
                    grid.push_back(spec);
                }
    return grid;
}

// model_mlp.cpp
TrainedClassifier train_mlp_model(const Matrix& X, const std::vector<int>& y,
                                  const ClassifierSpec& spec);

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_training_input(const Matrix& X, const std::vector<int>& y) {
    if (X.rows() != y.size()) throw InvalidArgument("train: X and y row counts differ");
    if (X.rows() < 2) throw InvalidArgument("train: need at least 2 samples");
    size_t pos = 0;
    for (int v : y) pos += static_cast<size_t>(v);
    if (pos == 0 || pos == y.size()) throw InvalidArgument("train: single-class input");
}

DecisionTree train_one_tree(const Matrix& X, const std::vector<int>& y,
                            const ForestParams& params, size_t mtry, uint64_t seed,
                            size_t tree_index) {
    Rng rng(derive_seed(seed, 3, tree_index));
    const size_t n = X.rows();
    std::vector<size_t> rows(n);
    if (params.bootstrap) {
        for (size_t i = 0; i < n; ++i) rows[i] = static_cast<size_t>(rng.below(n));
    } else {
        for (size_t i = 0; i < n; ++i) rows[i] = i;
    }
    return build_classification_tree(X, y, std::move(rows), params, mtry, rng);
}

TrainedClassifier train_forest(const Matrix& X, const std::vector<int>& y,
                               const ClassifierSpec& spec, bool parallel) {
    const ForestParams& p = spec.forest;
    const size_t mtry =
        p.max_features > 0
            ? std::min(p.max_features, X.cols())
            : std::max<size_t>(1, static_cast<size_t>(std::sqrt(static_cast<double>(X.cols()))));

    TrainedClassifier model;
    model.kind = ModelKind::random_forest;
    model.feature_dim = X.cols();
    model.spec = spec;
    model.trees.resize(p.n_estimators);

    const int64_t n_trees = static_cast<int64_t>(p.n_estimators);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int64_t t = 0; t < n_trees; ++t)
        model.trees[static_cast<size_t>(t)] =
            train_one_tree(X, y, p, mtry, spec.seed, static_cast<size_t>(t));
    return model;
}

TrainedClassifier train_boosting(const Matrix& X, const std::vector<int>& y,
                                 const ClassifierSpec& spec) {
    const BoostParams& p = spec.boost;
    const size_t n = X.rows();

    TrainedClassifier model;
    model.kind = ModelKind::gradient_boosting;
    model.feature_dim = X.cols();
    model.spec = spec;

    double pos = 0.0;
    for (int v : y) pos += v;
    const double prior = std::clamp(pos / static_cast<double>(n), 1e-12, 1.0 - 1e-12);
    model.boost_prior = std::log(prior / (1.0 - prior));

    std::vector<double> margin(n, model.boost_prior);
    std::vector<double> residual(n), hessian(n);
    model.stages.reserve(p.n_stages);

    for (size_t stage = 0; stage < p.n_stages; ++stage) {
        for (size_t i = 0; i < n; ++i) {
            const double pi = sigmoid(margin[i]);
            residual[i] = static_cast<double>(y[i]) - pi;
            hessian[i] = pi * (1.0 - pi);
        }
        DecisionTree tree = build_regression_tree(X, residual, hessian, p.max_depth);
        for (size_t i = 0; i < n; ++i) margin[i] += p.learning_rate * tree.predict(X.row(i));
        model.stages.push_back(std::move(tree));
    }
    return model;
}

// Hinge-loss linear model by SGD with L2 penalty (step 1/(1 + l2*t)); the SVM
// stand-in. Scores pass the margin through a logistic link.
TrainedClassifier train_linear(const Matrix& X, const std::vector<int>& y,
                               const ClassifierSpec& spec) {
    const LinearParams& p = spec.linear;
    const size_t n = X.rows();
    const size_t d = X.cols();

    TrainedClassifier model;
    model.kind = ModelKind::linear_margin;
    model.feature_dim = d;
    model.spec = spec;
    model.weights.assign(d, 0.0);
    model.bias = 0.0;

    Rng rng(derive_seed(spec.seed, 12));
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;

    size_t step = 0;
    for (size_t epoch = 0; epoch < p.epochs; ++epoch) {
        rng.shuffle(order);
        for (size_t idx : order) {
            ++step;
            const double eta = 1.0 / (1.0 + p.l2 * static_cast<double>(step));
            const auto x = X.row(idx);
            const double target = y[idx] == 1 ? 1.0 : -1.0;
            double m = model.bias;
            for (size_t j = 0; j < d; ++j) m += model.weights[j] * x[j];

            const double shrink = 1.0 - eta * p.l2;
            for (size_t j = 0; j < d; ++j) model.weights[j] *= shrink;
            if (target * m < 1.0) {
                for (size_t j = 0; j < d; ++j) model.weights[j] += eta * target * x[j];
                model.bias += eta * target;
            }
        }
    }
    return model;
}

TrainedClassifier train_impl(const Matrix& X, const std::vector<int>& y,
                             const ClassifierSpec& spec, bool parallel) {
    spec.validate();
    check_training_input(X, y);
    switch (spec.kind) {
        case ModelKind::random_forest: return train_forest(X, y, spec, parallel);
        case ModelKind::gradient_boosting: return train_boosting(X, y, spec);
        case ModelKind::linear_margin: return train_linear(X, y, spec);
        case ModelKind::mlp: return train_mlp_model(X, y, spec);
    }
    throw InvalidArgument("train: unknown model kind");
}

} // namespace

TrainedClassifier train(const Matrix& X, const std::vector<int>& y, const ClassifierSpec& spec) {
    return train_impl(X, y, spec, true);
}

TrainedClassifier train_serial(const Matrix& X, const std::vector<int>& y,
                               const ClassifierSpec& spec) {
    return train_impl(X, y, spec, false);
}

double TrainedClassifier::predict_score(std::span<const double> x) const {
    switch (kind) {
        case ModelKind::random_forest: {
            double sum = 0.0;
            for (const DecisionTree& t : trees) sum += t.predict(x);
            return sum / static_cast<double>(trees.size());
        }
        case ModelKind::gradient_boosting: {
            double m = boost_prior;
            for (const DecisionTree& t : stages) m += spec.boost.learning_rate * t.predict(x);
            return sigmoid(m);
        }
        case ModelKind::linear_margin: {
            double m = bias;
            for (size_t j = 0; j < weights.size(); ++j) m += weights[j] * x[j];
            return sigmoid(m);
        }
        case ModelKind::mlp: {
            const size_t h = spec.mlp.hidden_units;
            const size_t d = feature_dim;
            const double* w1 = net.data();
            const double* b1 = w1 + h * d;
            const double* w2 = b1 + h;
            const double b2 = *(w2 + h);
            double z = b2;
            for (size_t u = 0; u < h; ++u) {
                double a = b1[u];
                const double* row = w1 + u * d;
                for (size_t j = 0; j < d; ++j) a += row[j] * x[j];
                if (a > 0.0) z += w2[u] * a; // relu
            }
            return sigmoid(z);
        }
    }
    return 0.0;
}

std::vector<double> TrainedClassifier::predict_scores(const Matrix& X) const {
    if (X.cols() != feature_dim)
        throw InvalidArgument("predict: expected width " + std::to_string(feature_dim) +
                              ", got " + std::to_string(X.cols()));
    std::vector<double> scores(X.rows());
    const int64_t n = static_cast<int64_t>(X.rows());
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i)
        scores[static_cast<size_t>(i)] = predict_score(X.row(static_cast<size_t>(i)));
    return scores;
}

} // namespace refertriage
