#include "refertriage/resample.hpp"

#include <algorithm>
#include <cmath>

#include "refertriage/errors.hpp"
#include "refertriage/rng.hpp"

namespace refertriage {

std::string to_string(BalanceStrategy s) {
    switch (s) {
        case BalanceStrategy::none: return "none";
        case BalanceStrategy::smote: return "smote";
        case BalanceStrategy::adasyn: return "adasyn";
        case BalanceStrategy::undersample: return "undersample";
    }
    return "?";
}

BalanceStrategy balance_from_string(const std::string& s) {
    if (s == "none") return BalanceStrategy::none;
    if (s == "smote") return BalanceStrategy::smote;
    if (s == "adasyn") return BalanceStrategy::adasyn;
    if (s == "undersample") return BalanceStrategy::undersample;
    throw InvalidArgument("unknown balance strategy '" + s +
                          "' (expected none, smote, adasyn or undersample)");
}

void ResampleSpec::validate() const {
    if (k_neighbors < 1) throw InvalidArgument("resample: k_neighbors must be >= 1");
    if (!(target > 0.0 && target <= 1.0))
        throw InvalidArgument("resample: target ratio must lie in (0, 1]");
}

std::vector<size_t> nearest_neighbors(const Matrix& points, std::span<const double> query,
                                      size_t k, long self_index) {
    std::vector<std::pair<double, size_t>> dist;
    dist.reserve(points.rows());
    for (size_t i = 0; i < points.rows(); ++i) {
        if (self_index >= 0 && i == static_cast<size_t>(self_index)) continue;
        dist.emplace_back(squared_distance(points.row(i), query), i);
    }
    // ties broken by lower row index
    std::sort(dist.begin(), dist.end());
    if (dist.size() > k) dist.resize(k);
    std::vector<size_t> out;
    out.reserve(dist.size());
    for (const auto& [d, i] : dist) out.push_back(i);
    return out;
}

namespace {

struct ClassSplit {
    std::vector<size_t> minority;  // row indices into X
    std::vector<size_t> majority;
    int minority_label = 1;
};

ClassSplit split_classes(const std::vector<int>& y) {
    std::vector<size_t> zeros, ones;
    for (size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? ones : zeros).push_back(i);
    if (y.empty()) throw InvalidArgument("rebalance: empty input");
    if (zeros.empty() || ones.empty()) throw InvalidArgument("rebalance: single-class input");

    ClassSplit split;
    if (ones.size() <= zeros.size()) { // tie: class 1 counts as the minority
        split.minority = std::move(ones);
        split.majority = std::move(zeros);
        split.minority_label = 1;
    } else {
        split.minority = std::move(zeros);
        split.majority = std::move(ones);
        split.minority_label = 0;
    }
    return split;
}

Matrix gather_rows(const Matrix& X, const std::vector<size_t>& rows) {
    Matrix out(rows.size(), X.cols());
    for (size_t i = 0; i < rows.size(); ++i) {
        auto src = X.row(rows[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

// Largest-remainder apportionment of `total` over `weights` (sum 1); ties in
// remainder go to the lower index. Equal weights therefore reduce to the
// uniform first-points-get-the-extra allocation.
std::vector<size_t> apportion(const std::vector<double>& weights, size_t total) {
    const size_t n = weights.size();
    std::vector<size_t> counts(n);
    std::vector<std::pair<double, size_t>> remainder(n);
    size_t assigned = 0;
    for (size_t i = 0; i < n; ++i) {
        const double quota = weights[i] * static_cast<double>(total);
        counts[i] = static_cast<size_t>(std::floor(quota));
        assigned += counts[i];
        remainder[i] = {-(quota - std::floor(quota)), i}; // sort descending remainder
    }
    std::sort(remainder.begin(), remainder.end());
    for (size_t j = 0; assigned < total; ++j, ++assigned) counts[remainder[j % n].second]++;
    return counts;
}

struct OversamplePlan {
    Matrix minority_points;                       // minority rows, local order
    std::vector<std::vector<size_t>> neighbors;   // minority-local kNN per point
    std::vector<size_t> source;                   // synthetic g -> minority-local index
};

// One synthetic point: x_i + lambda * (x_nn - x_i) with a per-point stream.
void make_synthetic(const OversamplePlan& plan, uint64_t seed, size_t g, std::span<double> out) {
    Rng rng(derive_seed(seed, 1, g));
    const size_t i = plan.source[g];
    const auto& nn = plan.neighbors[i];
    const size_t j = nn[static_cast<size_t>(rng.below(nn.size()))];
    const double lambda = rng.uniform();
    const auto xi = plan.minority_points.row(i);
    const auto xj = plan.minority_points.row(j);
    for (size_t c = 0; c < xi.size(); ++c) out[c] = xi[c] + lambda * (xj[c] - xi[c]);
}

OversamplePlan build_plan(const Matrix& X, const std::vector<int>& y, const ResampleSpec& spec,
                          const ClassSplit& split, size_t n_syn, bool parallel) {
    OversamplePlan plan;
    plan.minority_points = gather_rows(X, split.minority);
    const size_t n_min = split.minority.size();
    const size_t k_min = std::min(spec.k_neighbors, n_min - 1);

    plan.neighbors.resize(n_min);
    const int64_t nm = static_cast<int64_t>(n_min);
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (int64_t i = 0; i < nm; ++i)
            plan.neighbors[static_cast<size_t>(i)] = nearest_neighbors(
                plan.minority_points, plan.minority_points.row(static_cast<size_t>(i)), k_min,
                i);
    } else {
        for (int64_t i = 0; i < nm; ++i)
            plan.neighbors[static_cast<size_t>(i)] = nearest_neighbors(
                plan.minority_points, plan.minority_points.row(static_cast<size_t>(i)), k_min,
                i);
    }

    std::vector<double> weights;
    if (spec.strategy == BalanceStrategy::adasyn) {
        // density term: fraction of majority points among each minority point's
        // k nearest neighbors in the combined dataset
        const size_t k_full = std::min(spec.k_neighbors, X.rows() - 1);
        std::vector<double> r(n_min, 0.0);
        const int64_t n = static_cast<int64_t>(n_min);
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
        for (int64_t i = 0; i < n; ++i) {
            const size_t row = split.minority[static_cast<size_t>(i)];
            const auto nn = nearest_neighbors(X, X.row(row), k_full, static_cast<long>(row));
            size_t majority_hits = 0;
            for (size_t idx : nn)
                if (y[idx] != split.minority_label) ++majority_hits;
            r[static_cast<size_t>(i)] =
                static_cast<double>(majority_hits) / static_cast<double>(k_full);
        }
        double total = 0.0;
        for (double v : r) total += v;
        if (total > 0.0) {
            weights.resize(n_min);
            for (size_t i = 0; i < n_min; ++i) weights[i] = r[i] / total;
        }
        // all-zero density degenerates to SMOTE's uniform spread
    }
    if (weights.empty()) weights.assign(n_min, 1.0 / static_cast<double>(n_min));

    const auto counts = apportion(weights, n_syn);
    plan.source.reserve(n_syn);
    for (size_t i = 0; i < n_min; ++i)
        for (size_t c = 0; c < counts[i]; ++c) plan.source.push_back(i);
    return plan;
}

Rebalanced oversample(const Matrix& X, const std::vector<int>& y, const ResampleSpec& spec,
                      const ClassSplit& split, bool parallel) {
    if (split.minority.size() < 2)
        throw InvalidArgument("rebalance: SMOTE/ADASYN need at least 2 minority samples");

    const double want = spec.target * static_cast<double>(split.majority.size());
    const long long n_syn_ll = std::llround(want) - static_cast<long long>(split.minority.size());
    const size_t n_syn = n_syn_ll > 0 ? static_cast<size_t>(n_syn_ll) : 0;

    Rebalanced out;
    out.X = Matrix(X.rows() + n_syn, X.cols());
    out.y = y;
    out.y.resize(X.rows() + n_syn, split.minority_label);
    for (size_t i = 0; i < X.rows(); ++i) {
        auto src = X.row(i);
        std::copy(src.begin(), src.end(), out.X.row(i).begin());
    }
    if (n_syn == 0) return out;

    const OversamplePlan plan = build_plan(X, y, spec, split, n_syn, parallel);
    const int64_t g_end = static_cast<int64_t>(n_syn);
#pragma omp parallel for schedule(static) if (parallel)
    for (int64_t g = 0; g < g_end; ++g)
        make_synthetic(plan, spec.seed, static_cast<size_t>(g),
                       out.X.row(X.rows() + static_cast<size_t>(g)));
    return out;
}

Rebalanced undersample(const Matrix& X, const std::vector<int>& y, const ResampleSpec& spec,
                       const ClassSplit& split) {
    const size_t n_keep = std::min(
        split.majority.size(),
        static_cast<size_t>(std::llround(static_cast<double>(split.minority.size()) / spec.target)));

    Rng rng(derive_seed(spec.seed, 2));
    std::vector<size_t> majority = split.majority;
    rng.shuffle(majority);
    majority.resize(n_keep);

    std::vector<size_t> kept = split.minority;
    kept.insert(kept.end(), majority.begin(), majority.end());
    std::sort(kept.begin(), kept.end()); // preserve original row order

    Rebalanced out;
    out.X = gather_rows(X, kept);
    out.y.reserve(kept.size());
    for (size_t i : kept) out.y.push_back(y[i]);
    return out;
}

Rebalanced rebalance_impl(const Matrix& X, const std::vector<int>& y, const ResampleSpec& spec,
                          bool parallel) {
    spec.validate();
    if (X.rows() != y.size()) throw InvalidArgument("rebalance: X and y row counts differ");
    if (X.rows() == 0) throw InvalidArgument("rebalance: empty input");

    if (spec.strategy == BalanceStrategy::none) return {X, y};

    const ClassSplit split = split_classes(y);
    switch (spec.strategy) {
        case BalanceStrategy::smote:
        case BalanceStrategy::adasyn:
            return oversample(X, y, spec, split, parallel);
        case BalanceStrategy::undersample:
            return undersample(X, y, spec, split);
        default:
            return {X, y};
    }
}

} // namespace

Rebalanced rebalance(const Matrix& X, const std::vector<int>& y, const ResampleSpec& spec) {
    return rebalance_impl(X, y, spec, true);
}

Rebalanced rebalance_serial(const Matrix& X, const std::vector<int>& y,
                            const ResampleSpec& spec) {
    return rebalance_impl(X, y, spec, false);
}

} // namespace refertriage
