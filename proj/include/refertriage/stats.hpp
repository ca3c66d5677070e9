#pragma once

#include <cstddef>
#include <vector>

namespace refertriage {

struct PairedSample {
    std::vector<double> a;
    std::vector<double> b;
};

// Two-sided Wilcoxon signed-rank p-value. Zero differences are dropped
// (Wilcoxon's treatment); tied absolute differences get average ranks. The
// null distribution is enumerated exactly over all 2^m sign patterns for
// m <= 25 — which covers the 5-fold case, where the normal approximation is
// invalid — and approximated normally (with tie correction) above that.
double wilcoxon_signed_rank(const PairedSample& sample);
double wilcoxon_signed_rank_serial(const PairedSample& sample);

// Step-up q-values: q_(i) = min_{j >= i} p_(j) * m / j on sorted p-values,
// mapped back to input order and clipped to 1.
std::vector<double> benjamini_hochberg(const std::vector<double>& p_values);

// Pooled two-proportion z-test, two-sided.
double two_proportion_test(size_t k1, size_t n1, size_t k2, size_t n2);

double normal_cdf(double z);

} // namespace refertriage
