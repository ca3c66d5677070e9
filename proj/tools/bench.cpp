// Benchmarks the OpenMP kernels against their serial reference
// implementations and verifies that both produce identical bits.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "refertriage/embed.hpp"
#include "refertriage/eval.hpp"
#include "refertriage/model.hpp"
#include "refertriage/perturb.hpp"
#include "refertriage/project.hpp"
#include "refertriage/resample.hpp"
#include "refertriage/rng.hpp"
#include "refertriage/stats.hpp"

using namespace refertriage;

namespace {

double time_ms(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms, bool equal) {
    std::printf("%-24s serial %8.1f ms   parallel %8.1f ms   speedup %4.2fx   %s\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms,
                equal ? "bit-exact" : "MISMATCH");
}

std::vector<std::string> make_texts(size_t n) {
    Rng rng(1);
    std::vector<std::string> texts(n);
    for (auto& t : texts) {
        const size_t words = 8 + rng.below(9);
        for (size_t w = 0; w < words; ++w) {
            if (w) t += ' ';
            const size_t len = 3 + rng.below(9);
            for (size_t c = 0; c < len; ++c) t += static_cast<char>('a' + rng.below(26));
        }
    }
    return texts;
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; parallel paths run serially\n\n");
#endif

    { // hashing embedder over a full-sized corpus
        const auto texts = make_texts(2086);
        EmbeddingMatrix a, b;
        const double ts = time_ms([&] { a = embed_hashing_serial(texts); });
        const double tp = time_ms([&] { b = embed_hashing(texts); });
        report("embed_hashing", ts, tp, a == b);
    }

    { // dataset perturbation
        const auto texts = make_texts(2086);
        ReferralDataset ds;
        for (size_t i = 0; i < texts.size(); ++i)
            ds.records.push_back({"r" + std::to_string(i), texts[i], {}, static_cast<int>(i % 9 == 0)});
        NoiseSpec spec{NoiseKind::char_sub, 0.5, 7};
        ReferralDataset a, b;
        const double ts = time_ms([&] { a = perturb_dataset_serial(ds, spec); });
        const double tp = time_ms([&] { b = perturb_dataset(ds, spec); });
        report("perturb_dataset", ts, tp, a == b);
    }

    Matrix X(1200, 64);
    std::vector<int> y(1200);
    {
        Rng rng(2);
        for (size_t i = 0; i < X.rows(); ++i) {
            y[i] = i % 8 == 0 ? 1 : 0;
            for (size_t c = 0; c < X.cols(); ++c)
                X.at(i, c) = rng.uniform() + (y[i] && c < 4 ? 0.8 : 0.0);
        }
    }

    { // forest training
        ClassifierSpec spec;
        spec.forest.n_estimators = 60;
        spec.seed = 3;
        TrainedClassifier a, b;
        const double ts = time_ms([&] { a = train_serial(X, y, spec); });
        const double tp = time_ms([&] { b = train(X, y, spec); });
        report("train forest", ts, tp, a.trees == b.trees);
    }

    { // oversampling
        ResampleSpec spec;
        spec.strategy = BalanceStrategy::smote;
        spec.seed = 4;
        Rebalanced a, b;
        const double ts = time_ms([&] { a = rebalance_serial(X, y, spec); });
        const double tp = time_ms([&] { b = rebalance(X, y, spec); });
        report("rebalance smote", ts, tp, a.X == b.X && a.y == b.y);
    }

    { // bootstrap confidence interval
        Rng rng(5);
        std::vector<double> values(500);
        for (double& v : values) v = rng.uniform();
        BootstrapSpec boot;
        boot.n_resamples = 20000;
        boot.seed = 6;
        CiEstimate a, b;
        const double ts = time_ms([&] { a = bootstrap_ci_serial(values, boot); });
        const double tp = time_ms([&] { b = bootstrap_ci(values, boot); });
        report("bootstrap_ci", ts, tp, a.lower == b.lower && a.upper == b.upper);
    }

    { // exact Wilcoxon enumeration (2^22 sign patterns)
        Rng rng(7);
        PairedSample s;
        for (int i = 0; i < 22; ++i) {
            s.a.push_back(rng.uniform());
            s.b.push_back(rng.uniform());
        }
        double a = 0, b = 0;
        const double ts = time_ms([&] { a = wilcoxon_signed_rank_serial(s); });
        const double tp = time_ms([&] { b = wilcoxon_signed_rank(s); });
        report("wilcoxon exact", ts, tp, a == b);
    }

    { // PCA covariance + eigen decomposition
        Rng rng(8);
        Matrix Z(800, 96);
        for (size_t i = 0; i < Z.rows(); ++i)
            for (size_t c = 0; c < Z.cols(); ++c) Z.at(i, c) = rng.uniform() * (c % 7 + 1);
        Projection2D a, b;
        const double ts = time_ms([&] { a = pca_project_serial(Z); });
        const double tp = time_ms([&] { b = pca_project(Z); });
        report("pca_project", ts, tp, a.coordinates == b.coordinates);
    }

    return 0;
}
