#pragma once

// Internal tree builders shared by the forest and boosting trainers.

#include <vector>

#include "refertriage/matrix.hpp"
#include "refertriage/model.hpp"
#include "refertriage/rng.hpp"

namespace refertriage {

// CART with Gini impurity; `rows` may contain repeats (bootstrap sample).
// Candidate features are sampled per node; leaves hold class-1 fractions.
DecisionTree build_classification_tree(const Matrix& X, const std::vector<int>& y,
                                       std::vector<size_t> rows, const ForestParams& params,
                                       size_t mtry, Rng& rng);

// Depth-bounded MSE regression tree over all features; leaves hold the
// Newton step sum(residual)/sum(hessian) of their samples.
DecisionTree build_regression_tree(const Matrix& X, const std::vector<double>& residual,
                                   const std::vector<double>& hessian, size_t max_depth);

} // namespace refertriage
