#include <algorithm>
#include <cmath>

#include "refertriage/model.hpp"
#include "refertriage/model_tree.hpp"
#include "refertriage/rng.hpp"

namespace refertriage {

double DecisionTree::predict(std::span<const double> x) const {
    int i = 0;
    while (nodes[static_cast<size_t>(i)].feature >= 0) {
        const TreeNode& n = nodes[static_cast<size_t>(i)];
        i = x[static_cast<size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<size_t>(i)].value;
}

namespace {

constexpr double kMinGain = 1e-12;

struct Split {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

// Best Gini split over the candidate features; candidates are scanned in
// ascending feature order and thresholds in ascending order, and only a
// strictly larger gain replaces the incumbent, which realizes the
// lowest-feature-then-lowest-threshold tie break.
Split best_gini_split(const Matrix& X, const std::vector<int>& y,
                      const std::vector<size_t>& rows, const std::vector<size_t>& features,
                      size_t min_samples_leaf, std::vector<std::pair<double, int>>& scratch) {
    const size_t n = rows.size();
    size_t pos = 0;
    for (size_t r : rows) pos += static_cast<size_t>(y[r]);
    const double nd = static_cast<double>(n);
    const double p1 = static_cast<double>(pos) / nd;
    const double parent_gini = 1.0 - p1 * p1 - (1.0 - p1) * (1.0 - p1);

    Split best;
    for (size_t f : features) {
        scratch.clear();
        for (size_t r : rows) scratch.emplace_back(X.at(r, f), y[r]);
        std::sort(scratch.begin(), scratch.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        size_t pos_left = 0;
        for (size_t i = 1; i < n; ++i) {
            pos_left += static_cast<size_t>(scratch[i - 1].second);
            if (scratch[i].first == scratch[i - 1].first) continue; // not a boundary
            const size_t n_left = i;
            const size_t n_right = n - i;
            if (n_left < min_samples_leaf || n_right < min_samples_leaf) continue;

            const double nl = static_cast<double>(n_left);
            const double nr = static_cast<double>(n_right);
            const double pl = static_cast<double>(pos_left) / nl;
            const double pr = static_cast<double>(pos - pos_left) / nr;
            const double gini_l = 1.0 - pl * pl - (1.0 - pl) * (1.0 - pl);
            const double gini_r = 1.0 - pr * pr - (1.0 - pr) * (1.0 - pr);
            const double gain = parent_gini - (nl * gini_l + nr * gini_r) / nd;
            if (gain > best.gain) {
                best.gain = gain;
                best.feature = static_cast<int>(f);
                best.threshold =
                    scratch[i - 1].first + (scratch[i].first - scratch[i - 1].first) / 2.0;
            }
        }
    }
    if (best.gain <= kMinGain) best.feature = -1;
    return best;
}

struct ClassificationBuilder {
    const Matrix& X;
    const std::vector<int>& y;
    const ForestParams& params;
    size_t mtry;
    Rng& rng;
    DecisionTree tree;
    std::vector<std::pair<double, int>> scratch;

    int build(std::vector<size_t> rows, size_t depth) {
        const size_t n = rows.size();
        size_t pos = 0;
        for (size_t r : rows) pos += static_cast<size_t>(y[r]);

        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes[static_cast<size_t>(node_id)].value =
            static_cast<double>(pos) / static_cast<double>(n);

        const bool depth_capped = params.max_depth > 0 && depth >= params.max_depth;
        if (pos == 0 || pos == n || n < params.min_samples_split || depth_capped)
            return node_id;

        std::vector<size_t> features = rng.sample_without_replacement(X.cols(), mtry);
        std::sort(features.begin(), features.end());
        const Split split =
            best_gini_split(X, y, rows, features, params.min_samples_leaf, scratch);
        if (split.feature < 0) return node_id;

        std::vector<size_t> left, right;
        left.reserve(n);
        right.reserve(n);
        for (size_t r : rows) {
            (X.at(r, static_cast<size_t>(split.feature)) <= split.threshold ? left : right)
                .push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        const int l = build(std::move(left), depth + 1);
        const int r = build(std::move(right), depth + 1);
        TreeNode& node = tree.nodes[static_cast<size_t>(node_id)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = l;
        node.right = r;
        return node_id;
    }
};

// Regression splits minimize summed squared error around child means.
Split best_mse_split(const Matrix& X, const std::vector<double>& target,
                     const std::vector<size_t>& rows, size_t min_samples_leaf,
                     std::vector<std::pair<double, double>>& scratch) {
    const size_t n = rows.size();
    double sum = 0.0, sum_sq = 0.0;
    for (size_t r : rows) {
        sum += target[r];
        sum_sq += target[r] * target[r];
    }
    const double parent_sse = sum_sq - sum * sum / static_cast<double>(n);

    Split best;
    for (size_t f = 0; f < X.cols(); ++f) {
        scratch.clear();
        for (size_t r : rows) scratch.emplace_back(X.at(r, f), target[r]);
        std::sort(scratch.begin(), scratch.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        double sum_left = 0.0, sum_sq_left = 0.0;
        for (size_t i = 1; i < n; ++i) {
            sum_left += scratch[i - 1].second;
            sum_sq_left += scratch[i - 1].second * scratch[i - 1].second;
            if (scratch[i].first == scratch[i - 1].first) continue;
            const size_t n_left = i;
            const size_t n_right = n - i;
            if (n_left < min_samples_leaf || n_right < min_samples_leaf) continue;

            const double sse_l = sum_sq_left - sum_left * sum_left / static_cast<double>(n_left);
            const double sum_r = sum - sum_left;
            const double sse_r =
                (sum_sq - sum_sq_left) - sum_r * sum_r / static_cast<double>(n_right);
            const double gain = parent_sse - sse_l - sse_r;
            if (gain > best.gain) {
                best.gain = gain;
                best.feature = static_cast<int>(f);
                best.threshold =
                    scratch[i - 1].first + (scratch[i].first - scratch[i - 1].first) / 2.0;
            }
        }
    }
    if (best.gain <= kMinGain) best.feature = -1;
    return best;
}

struct RegressionBuilder {
    const Matrix& X;
    const std::vector<double>& residual;
    const std::vector<double>& hessian;
    size_t max_depth;
    DecisionTree tree;
    std::vector<std::pair<double, double>> scratch;

    int build(std::vector<size_t> rows, size_t depth) {
        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});

        Split split;
        if (rows.size() >= 2 && depth < max_depth)
            split = best_mse_split(X, residual, rows, 1, scratch);

        if (split.feature < 0) {
            // Newton step on the logistic loss within this leaf
            double num = 0.0, den = 0.0;
            for (size_t r : rows) {
                num += residual[r];
                den += hessian[r];
            }
            tree.nodes[static_cast<size_t>(node_id)].value = den > 1e-12 ? num / den : 0.0;
            return node_id;
        }

        std::vector<size_t> left, right;
        left.reserve(rows.size());
        right.reserve(rows.size());
        for (size_t r : rows) {
            (X.at(r, static_cast<size_t>(split.feature)) <= split.threshold ? left : right)
                .push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        const int l = build(std::move(left), depth + 1);
        const int r = build(std::move(right), depth + 1);
        TreeNode& node = tree.nodes[static_cast<size_t>(node_id)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = l;
        node.right = r;
        return node_id;
    }
};

} // namespace

DecisionTree build_classification_tree(const Matrix& X, const std::vector<int>& y,
                                       std::vector<size_t> rows, const ForestParams& params,
                                       size_t mtry, Rng& rng) {
    ClassificationBuilder builder{X, y, params, mtry, rng, {}, {}};
    builder.build(std::move(rows), 0);
    return std::move(builder.tree);
}

DecisionTree build_regression_tree(const Matrix& X, const std::vector<double>& residual,
                                   const std::vector<double>& hessian, size_t max_depth) {
    std::vector<size_t> rows(X.rows());
    for (size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    RegressionBuilder builder{X, residual, hessian, max_depth, {}, {}};
    builder.build(std::move(rows), 0);
    return std::move(builder.tree);
}

} // namespace refertriage
