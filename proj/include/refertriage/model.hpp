#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "refertriage/matrix.hpp"

namespace refertriage {

enum class ModelKind { random_forest, gradient_boosting, linear_margin, mlp };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct ForestParams {
    size_t n_estimators = 100;
    size_t max_depth = 0;          // 0 = unbounded
    size_t min_samples_split = 2;
    size_t min_samples_leaf = 1;
    size_t max_features = 0;       // candidate features per split; 0 = floor(sqrt(D))
    bool bootstrap = true;

    bool operator==(const ForestParams&) const = default;
};

struct BoostParams {
    size_t n_stages = 100;
    size_t max_depth = 3;
    double learning_rate = 0.1;

    bool operator==(const BoostParams&) const = default;
};

struct LinearParams {
    double l2 = 1e-4;              // ridge strength on the hinge objective
    size_t epochs = 50;

    bool operator==(const LinearParams&) const = default;
};

struct MlpParams {
    size_t hidden_units = 64;
    size_t epochs = 50;
    size_t batch_size = 32;
    double learning_rate = 0.05;

    bool operator==(const MlpParams&) const = default;
};

struct ClassifierSpec {
    ModelKind kind = ModelKind::random_forest;
    ForestParams forest;
    BoostParams boost;
    LinearParams linear;
    MlpParams mlp;
    uint64_t seed = 0;

    void validate() const;
    bool operator==(const ClassifierSpec&) const = default;
};

// The built-in 81-configuration random-forest tuning grid, enumerated in
// listing order: n_estimators {50,100,200} x max_depth {none,10,20} x
// min_samples_split {2,5,10} x min_samples_leaf {1,2,4}.
std::vector<ClassifierSpec> default_forest_grid(uint64_t seed);

struct TreeNode {
    int feature = -1;       // -1 marks a leaf
    double threshold = 0.0; // go left when x[feature] <= threshold
    int left = -1;
    int right = -1;
    double value = 0.0;     // leaf payload: class-1 fraction (forest) or stage value (boosting)

    bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes; // nodes[0] is the root

    double predict(std::span<const double> x) const;
    size_t node_count() const { return nodes.size(); }
    bool operator==(const DecisionTree&) const = default;
};

// Immutable after fit; safe for concurrent scoring.
class TrainedClassifier {
public:
    ModelKind kind = ModelKind::random_forest;
    size_t feature_dim = 0;
    ClassifierSpec spec;

    // random_forest
    std::vector<DecisionTree> trees;
    // gradient_boosting
    double boost_prior = 0.0;
    std::vector<DecisionTree> stages;
    // linear_margin
    std::vector<double> weights;
    double bias = 0.0;
    // mlp: [W1 (H*D) | b1 (H) | W2 (H) | b2 (1)]
    std::vector<double> net;

    std::vector<double> predict_scores(const Matrix& X) const;
    double predict_score(std::span<const double> x) const;
};

// Deterministic given spec.seed: every tree draws from a stream derived from
// (seed, tree index), so parallel and serial training agree bit for bit.
TrainedClassifier train(const Matrix& X, const std::vector<int>& y, const ClassifierSpec& spec);
TrainedClassifier train_serial(const Matrix& X, const std::vector<int>& y,
                               const ClassifierSpec& spec);

// Full-batch cross-entropy loss and gradient of the 1-hidden-layer network at
// `params` (layout as TrainedClassifier::net). Used by training and by the
// finite-difference gradient check.
double mlp_loss_grad(const std::vector<double>& params, const Matrix& X,
                     const std::vector<int>& y, size_t hidden_units,
                     std::vector<double>* grad);

struct GridSearchResult {
    size_t best_index = 0;
    ClassifierSpec best;
    std::vector<double> mean_roc_auc; // one entry per grid config
};

// Exhaustive evaluation of `grid` by stratified inner cross-validation on
// (X, y), mean inner-fold ROC-AUC as the criterion; ties go to the earliest
// grid entry.
GridSearchResult grid_search(const Matrix& X, const std::vector<int>& y,
                             const std::vector<ClassifierSpec>& grid, size_t inner_folds,
                             uint64_t seed);

// Self-describing single-file model format; round-trips scores bit-exactly.
void save_model(const std::string& path, const TrainedClassifier& model);
TrainedClassifier load_model(const std::string& path);

} // namespace refertriage
