#include <algorithm>
#include <cmath>

#include "refertriage/model.hpp"
#include "refertriage/rng.hpp"

namespace refertriage {

// Parameter layout: [W1 (H*D row-major) | b1 (H) | W2 (H) | b2].
// relu hidden layer, logistic output, mean cross-entropy over the given rows.
double mlp_loss_grad(const std::vector<double>& params, const Matrix& X,
                     const std::vector<int>& y, size_t hidden_units,
                     std::vector<double>* grad) {
    const size_t h = hidden_units;
    const size_t d = X.cols();
    const size_t n = X.rows();
    const double* w1 = params.data();
    const double* b1 = w1 + h * d;
    const double* w2 = b1 + h;
    const double b2 = *(w2 + h);

    if (grad) grad->assign(params.size(), 0.0);
    double* g1 = grad ? grad->data() : nullptr;
    double* gb1 = grad ? g1 + h * d : nullptr;
    double* g2 = grad ? gb1 + h : nullptr;
    double* gb2 = grad ? g2 + h : nullptr;

    const double inv_n = 1.0 / static_cast<double>(n);
    double loss = 0.0;
    std::vector<double> act(h);

    for (size_t i = 0; i < n; ++i) {
        const auto x = X.row(i);
        double z = b2;
        for (size_t u = 0; u < h; ++u) {
            double a = b1[u];
            const double* row = w1 + u * d;
            for (size_t j = 0; j < d; ++j) a += row[j] * x[j];
            act[u] = a > 0.0 ? a : 0.0;
            z += w2[u] * act[u];
        }
        const double p = 1.0 / (1.0 + std::exp(-z));
        const double target = static_cast<double>(y[i]);
        const double pc = std::clamp(p, 1e-12, 1.0 - 1e-12);
        loss -= inv_n * (target * std::log(pc) + (1.0 - target) * std::log(1.0 - pc));

        if (!grad) continue;
        const double dz = (p - target) * inv_n; // d(mean CE)/dz for sigmoid output
        *gb2 += dz;
        for (size_t u = 0; u < h; ++u) {
            g2[u] += dz * act[u];
            if (act[u] <= 0.0) continue;
            const double da = dz * w2[u];
            gb1[u] += da;
            double* grow = g1 + u * d;
            for (size_t j = 0; j < d; ++j) grow[j] += da * x[j];
        }
    }
    return loss;
}

TrainedClassifier train_mlp_model(const Matrix& X, const std::vector<int>& y,
                                  const ClassifierSpec& spec) {
    const MlpParams& p = spec.mlp;
    const size_t h = p.hidden_units;
    const size_t d = X.cols();
    const size_t n = X.rows();

    TrainedClassifier model;
    model.kind = ModelKind::mlp;
    model.feature_dim = d;
    model.spec = spec;
    model.net.assign(h * d + h + h + 1, 0.0);

    // Glorot-uniform init for both layers; biases start at zero.
    Rng rng(derive_seed(spec.seed, 13));
    const double a1 = std::sqrt(6.0 / static_cast<double>(d + h));
    for (size_t i = 0; i < h * d; ++i) model.net[i] = (2.0 * rng.uniform() - 1.0) * a1;
    const double a2 = std::sqrt(6.0 / static_cast<double>(h + 1));
    for (size_t i = 0; i < h; ++i) model.net[h * d + h + i] = (2.0 * rng.uniform() - 1.0) * a2;

    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::vector<double> grad;

    for (size_t epoch = 0; epoch < p.epochs; ++epoch) {
        rng.shuffle(order);
        for (size_t start = 0; start < n; start += p.batch_size) {
            const size_t end = std::min(n, start + p.batch_size);
            Matrix batch(end - start, d);
            std::vector<int> batch_y(end - start);
            for (size_t i = start; i < end; ++i) {
                const auto src = X.row(order[i]);
                std::copy(src.begin(), src.end(), batch.row(i - start).begin());
                batch_y[i - start] = y[order[i]];
            }
            mlp_loss_grad(model.net, batch, batch_y, h, &grad);
            for (size_t i = 0; i < model.net.size(); ++i)
                model.net[i] -= p.learning_rate * grad[i];
        }
    }
    return model;
}

} // namespace refertriage
