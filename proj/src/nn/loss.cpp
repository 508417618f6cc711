#include "semtx/nn/loss.hpp"

#include <cmath>
#include <limits>

#include "semtx/errors.hpp"

namespace semtx::nn {

Tensor softmax_rows(const Tensor& logits) {
    Tensor p(logits.shape());
    const std::size_t n = logits.cols();
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const double* x = logits.row(r);
        double* y = p.row(r);
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < n; ++c) mx = std::max(mx, x[c]);
        double z = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            y[c] = std::exp(x[c] - mx);
            z += y[c];
        }
        for (std::size_t c = 0; c < n; ++c) y[c] /= z;
    }
    return p;
}

double ce_loss(const Tensor& logits, std::span<const int> targets, int ignore_id, Tensor* dlogits) {
    if (targets.size() != logits.rows())
        throw ShapeError("ce_loss: " + std::to_string(targets.size()) + " targets for " + std::to_string(logits.rows()) +
                         " logit rows");
    const std::size_t v = logits.cols();
    const Tensor p = softmax_rows(logits);
    std::size_t count = 0;
    for (int t : targets) count += (t != ignore_id) ? 1 : 0;
    if (dlogits != nullptr) *dlogits = Tensor(logits.shape());
    if (count == 0) return 0.0;
    const double inv = 1.0 / static_cast<double>(count);
    double loss = 0.0;
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const int t = targets[r];
        if (t == ignore_id) continue;
        if (t < 0 || static_cast<std::size_t>(t) >= v) throw RangeError("ce_loss target " + std::to_string(t) + " out of range");
        const double* x = logits.row(r);
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < v; ++c) mx = std::max(mx, x[c]);
        double z = 0.0;
        for (std::size_t c = 0; c < v; ++c) z += std::exp(x[c] - mx);
        loss += -(x[t] - mx - std::log(z));
        if (dlogits != nullptr) {
            double* g = dlogits->row(r);
            const double* pr = p.row(r);
            for (std::size_t c = 0; c < v; ++c) g[c] = pr[c] * inv;
            g[t] -= inv;
        }
    }
    return loss * inv;
}

} // namespace semtx::nn
