#include "refertriage/errors.hpp"
#include "refertriage/eval.hpp"
#include "refertriage/model.hpp"
#include "refertriage/rng.hpp"

namespace refertriage {

namespace {

struct InnerSplit {
    Matrix train_X, val_X;
    std::vector<int> train_y, val_y;
};

InnerSplit make_split(const Matrix& X, const std::vector<int>& y, const FoldPlan& plan,
                      size_t fold) {
    InnerSplit s;
    const auto val_idx = plan.test_indices(fold);
    const auto train_idx = plan.train_indices(fold);
    s.train_X = Matrix(train_idx.size(), X.cols());
    s.val_X = Matrix(val_idx.size(), X.cols());
    for (size_t i = 0; i < train_idx.size(); ++i) {
        const auto src = X.row(train_idx[i]);
        std::copy(src.begin(), src.end(), s.train_X.row(i).begin());
        s.train_y.push_back(y[train_idx[i]]);
    }
    for (size_t i = 0; i < val_idx.size(); ++i) {
        const auto src = X.row(val_idx[i]);
        std::copy(src.begin(), src.end(), s.val_X.row(i).begin());
        s.val_y.push_back(y[val_idx[i]]);
    }
    return s;
}

} // namespace

GridSearchResult grid_search(const Matrix& X, const std::vector<int>& y,
                             const std::vector<ClassifierSpec>& grid, size_t inner_folds,
                             uint64_t seed) {
    if (grid.empty()) throw InvalidArgument("grid_search: empty grid");

    const FoldPlan plan = stratified_folds(y, inner_folds, derive_seed(seed, 4));
    std::vector<InnerSplit> splits;
    splits.reserve(inner_folds);
    for (size_t f = 0; f < inner_folds; ++f) splits.push_back(make_split(X, y, plan, f));

    GridSearchResult result;
    result.mean_roc_auc.assign(grid.size(), 0.0);

    const int64_t n_configs = static_cast<int64_t>(grid.size());
#pragma omp parallel for schedule(dynamic)
    for (int64_t c = 0; c < n_configs; ++c) {
        const size_t ci = static_cast<size_t>(c);
        double sum = 0.0;
        for (size_t f = 0; f < inner_folds; ++f) {
            ClassifierSpec spec = grid[ci];
            spec.seed = derive_seed(seed, 5, ci * inner_folds + f);
            const TrainedClassifier model = train(splits[f].train_X, splits[f].train_y, spec);
            sum += roc_auc(splits[f].val_y, model.predict_scores(splits[f].val_X));
        }
        result.mean_roc_auc[ci] = sum / static_cast<double>(inner_folds);
    }

    // highest mean inner-fold ROC-AUC; ties resolve to the earliest grid entry
    result.best_index = 0;
    for (size_t ci = 1; ci < grid.size(); ++ci)
        if (result.mean_roc_auc[ci] > result.mean_roc_auc[result.best_index])
            result.best_index = ci;
    result.best = grid[result.best_index];
    return result;
}

} // namespace refertriage
