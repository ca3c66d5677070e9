#include "refertriage/stats.hpp"

#include <algorithm>
#include <cmath>

#include "refertriage/errors.hpp"

namespace refertriage {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

struct RankedDiffs {
    std::vector<double> ranks; // average ranks of |d|, aligned with signs
    std::vector<int> signs;    // +1 / -1
    double w_plus = 0.0;
    double tie_correction = 0.0; // sum of (t^3 - t) over tie groups
};

RankedDiffs rank_differences(const PairedSample& sample) {
    if (sample.a.size() != sample.b.size())
        throw InvalidArgument("wilcoxon: paired vectors have different lengths");
    if (sample.a.empty()) throw InvalidArgument("wilcoxon: empty sample");

    std::vector<double> diffs;
    for (size_t i = 0; i < sample.a.size(); ++i) {
        const double d = sample.a[i] - sample.b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty())
        throw InvalidArgument("wilcoxon: all differences are zero");

    std::vector<size_t> order(diffs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
        return std::fabs(diffs[x]) < std::fabs(diffs[y]);
    });

    RankedDiffs out;
    out.ranks.resize(diffs.size());
    out.signs.resize(diffs.size());
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j + 1 < order.size() &&
               std::fabs(diffs[order[j + 1]]) == std::fabs(diffs[order[i]]))
            ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        const double t = static_cast<double>(j - i + 1);
        out.tie_correction += t * t * t - t;
        for (size_t k = i; k <= j; ++k) out.ranks[order[k]] = avg_rank;
        i = j + 1;
    }
    for (size_t k = 0; k < diffs.size(); ++k) {
        out.signs[k] = diffs[k] > 0.0 ? 1 : -1;
        if (out.signs[k] > 0) out.w_plus += out.ranks[k];
    }
    return out;
}

double exact_two_sided_p(const RankedDiffs& r, bool parallel) {
    const size_t m = r.ranks.size();
    const uint64_t patterns = 1ULL << m;
    double rank_total = 0.0;
    for (double v : r.ranks) rank_total += v;

    const double w_lo = std::min(r.w_plus, rank_total - r.w_plus);
    const double w_hi = std::max(r.w_plus, rank_total - r.w_plus);
    const double eps = 1e-9;

    uint64_t extreme = 0;
    const int64_t end = static_cast<int64_t>(patterns);
#pragma omp parallel for schedule(static) reduction(+ : extreme) if (parallel)
    for (int64_t p = 0; p < end; ++p) {
        double w = 0.0;
        for (size_t bit = 0; bit < m; ++bit)
            if ((static_cast<uint64_t>(p) >> bit) & 1ULL) w += r.ranks[bit];
        if (w <= w_lo + eps || w >= w_hi - eps) ++extreme;
    }
    return std::min(1.0, static_cast<double>(extreme) / static_cast<double>(patterns));
}

double approx_two_sided_p(const RankedDiffs& r) {
    const double m = static_cast<double>(r.ranks.size());
    const double mean = m * (m + 1.0) / 4.0;
    const double var = m * (m + 1.0) * (2.0 * m + 1.0) / 24.0 - r.tie_correction / 48.0;
    if (var <= 0.0) return 1.0;
    const double z = (r.w_plus - mean) / std::sqrt(var);
    return std::min(1.0, 2.0 * (1.0 - normal_cdf(std::fabs(z))));
}

constexpr size_t kExactLimit = 25;

double wilcoxon_impl(const PairedSample& sample, bool parallel) {
    const RankedDiffs r = rank_differences(sample);
    if (r.ranks.size() <= kExactLimit) return exact_two_sided_p(r, parallel);
    return approx_two_sided_p(r);
}

} // namespace

double wilcoxon_signed_rank(const PairedSample& sample) { return wilcoxon_impl(sample, true); }

double wilcoxon_signed_rank_serial(const PairedSample& sample) {
    return wilcoxon_impl(sample, false);
}

std::vector<double> benjamini_hochberg(const std::vector<double>& p_values) {
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0))
            throw InvalidArgument("benjamini_hochberg: p-values must lie in [0, 1]");
    if (p_values.empty()) return {};

    const size_t m = p_values.size();
    std::vector<size_t> order(m);
    for (size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return p_values[a] < p_values[b]; });

    std::vector<double> q(m);
    double running_min = 1.0;
    for (size_t i = m; i-- > 0;) {
        const double adjusted =
            p_values[order[i]] * static_cast<double>(m) / static_cast<double>(i + 1);
        running_min = std::min(running_min, adjusted);
        q[order[i]] = running_min;
    }
    return q;
}

double two_proportion_test(size_t k1, size_t n1, size_t k2, size_t n2) {
    if (n1 < 1 || n2 < 1) throw InvalidArgument("two_proportion_test: trials must be >= 1");
    if (k1 > n1 || k2 > n2)
        throw InvalidArgument("two_proportion_test: successes exceed trials");

    const double p1 = static_cast<double>(k1) / static_cast<double>(n1);
    const double p2 = static_cast<double>(k2) / static_cast<double>(n2);
    const double pooled =
        static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
    const double se = std::sqrt(pooled * (1.0 - pooled) *
                                (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
    if (se == 0.0) return p1 == p2 ? 1.0 : 0.0;
    const double z = (p1 - p2) / se;
    return std::min(1.0, 2.0 * (1.0 - normal_cdf(std::fabs(z))));
}

} // namespace refertriage
