#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "refertriage/matrix.hpp"

namespace refertriage {

enum class BalanceStrategy { none, smote, adasyn, undersample };

std::string to_string(BalanceStrategy s);
BalanceStrategy balance_from_string(const std::string& s);

struct ResampleSpec {
    BalanceStrategy strategy = BalanceStrategy::smote;
    size_t k_neighbors = 5;
    double target = 1.0;  // minority:majority ratio after resampling, in (0, 1]
    uint64_t seed = 0;

    void validate() const;
};

struct Rebalanced {
    Matrix X;
    std::vector<int> y;
};

// SMOTE/ADASYN append synthetic minority points (original rows always kept,
// input order preserved); undersampling drops majority rows uniformly at
// random. Deterministic given spec.seed; synthetic points draw from per-point
// derived streams so generation parallelizes without changing the result.
Rebalanced rebalance(const Matrix& X, const std::vector<int>& y, const ResampleSpec& spec);
Rebalanced rebalance_serial(const Matrix& X, const std::vector<int>& y, const ResampleSpec& spec);

// k nearest rows of `pool` to `query` by Euclidean distance, self excluded when
// self_index is in the pool; ties broken by lower row index.
std::vector<size_t> nearest_neighbors(const Matrix& points, std::span<const double> query,
                                      size_t k, long self_index);

} // namespace refertriage
