#include "semtx/nn/attention.hpp"

#include <cmath>
#include <limits>

#include "semtx/errors.hpp"

namespace semtx::nn {

MultiHeadAttention MultiHeadAttention::create(ParamSet& set, const std::string& prefix, std::size_t dim,
                                              std::size_t heads, Rng& rng) {
    if (heads == 0 || dim % heads != 0)
        throw ConfigError("attention dim " + std::to_string(dim) + " is not divisible by " + std::to_string(heads) +
                          " heads");
    MultiHeadAttention a;
    a.wq = Linear::create(set, prefix + ".wq", dim, dim, rng);
    a.wk = Linear::create(set, prefix + ".wk", dim, dim, rng);
    a.wv = Linear::create(set, prefix + ".wv", dim, dim, rng);
    a.wo = Linear::create(set, prefix + ".wo", dim, dim, rng);
    a.heads = heads;
    return a;
}

Tensor MultiHeadAttention::forward(const Tensor& x, std::size_t seq_len, std::span<const std::uint8_t> key_mask,
                                   AttentionCache* cache) const {
    const std::size_t d = dim();
    if (x.cols() != d) throw ShapeError("attention input " + shape_string(x.shape()) + " does not match dim " + std::to_string(d));
    if (seq_len == 0 || x.rows() % seq_len != 0)
        throw ShapeError("attention rows " + std::to_string(x.rows()) + " not a multiple of seq_len " + std::to_string(seq_len));
    if (!key_mask.empty() && key_mask.size() != x.rows()) throw ShapeError("attention mask length does not match rows");

    const std::size_t batch = x.rows() / seq_len;
    const std::size_t dh = d / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    Tensor q = wq.forward(x);
    Tensor k = wk.forward(x);
    Tensor v = wv.forward(x);
    Tensor probs({batch, heads, seq_len, seq_len});
    Tensor ctx = Tensor::matrix(x.rows(), d);

    std::vector<double> logits(seq_len);
    for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t base = b * seq_len;
        for (std::size_t h = 0; h < heads; ++h) {
            const std::size_t off = h * dh;
            double* p_bh = probs.data() + ((b * heads + h) * seq_len) * seq_len;
            for (std::size_t i = 0; i < seq_len; ++i) {
                const double* qi = q.row(base + i) + off;
                double mx = -std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < seq_len; ++j) {
                    if (!key_mask.empty() && key_mask[base + j]) {
                        logits[j] = -std::numeric_limits<double>::infinity();
                        continue;
                    }
                    const double* kj = k.row(base + j) + off;
                    double s = 0.0;
                    for (std::size_t c = 0; c < dh; ++c) s += qi[c] * kj[c];
                    logits[j] = s * scale;
                    mx = std::max(mx, logits[j]);
                }
                double* pi = p_bh + i * seq_len;
                if (mx == -std::numeric_limits<double>::infinity()) {
                    for (std::size_t j = 0; j < seq_len; ++j) pi[j] = 0.0;
                    continue;
                }
                double z = 0.0;
                for (std::size_t j = 0; j < seq_len; ++j) {
                    pi[j] = logits[j] == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(logits[j] - mx);
                    z += pi[j];
                }
                double* ci = ctx.row(base + i) + off;
                for (std::size_t j = 0; j < seq_len; ++j) {
                    pi[j] /= z;
                    if (pi[j] == 0.0) continue;
                    const double* vj = v.row(base + j) + off;
                    for (std::size_t c = 0; c < dh; ++c) ci[c] += pi[j] * vj[c];
                }
            }
        }
    }
    Tensor y = wo.forward(ctx);
    if (cache != nullptr) {
        cache->x = x;
        cache->q = std::move(q);
        cache->k = std::move(k);
        cache->v = std::move(v);
        cache->probs = std::move(probs);
        cache->ctx = std::move(ctx);
        cache->key_mask.assign(key_mask.begin(), key_mask.end());
        cache->seq_len = seq_len;
    }
    return y;
}

Tensor MultiHeadAttention::backward(const AttentionCache& cache, const Tensor& dy) const {
    const std::size_t d = dim();
    const std::size_t seq_len = cache.seq_len;
    const std::size_t rows = cache.x.rows();
    const std::size_t batch = rows / seq_len;
    const std::size_t dh = d / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    const Tensor dctx = wo.backward(cache.ctx, dy);
    Tensor dq = Tensor::matrix(rows, d);
    Tensor dk = Tensor::matrix(rows, d);
    Tensor dv = Tensor::matrix(rows, d);

    std::vector<double> dp(seq_len);
    for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t base = b * seq_len;
        for (std::size_t h = 0; h < heads; ++h) {
            const std::size_t off = h * dh;
            const double* p_bh = cache.probs.data() + ((b * heads + h) * seq_len) * seq_len;
            for (std::size_t i = 0; i < seq_len; ++i) {
                const double* pi = p_bh + i * seq_len;
                const double* gi = dctx.row(base + i) + off;
                double dot = 0.0;
                for (std::size_t j = 0; j < seq_len; ++j) {
                    if (pi[j] == 0.0) {
                        dp[j] = 0.0;
                        continue;
                    }
                    const double* vj = cache.v.row(base + j) + off;
                    double* dvj = dv.row(base + j) + off;
                    double s = 0.0;
                    for (std::size_t c = 0; c < dh; ++c) {
                        s += gi[c] * vj[c];
                        dvj[c] += pi[j] * gi[c];
                    }
                    dp[j] = s;
                    dot += pi[j] * s;
                }
                const double* qi = cache.q.row(base + i) + off;
                double* dqi = dq.row(base + i) + off;
                for (std::size_t j = 0; j < seq_len; ++j) {
                    if (pi[j] == 0.0) continue;
                    const double ds = pi[j] * (dp[j] - dot) * scale;
                    const double* kj = cache.k.row(base + j) + off;
                    double* dkj = dk.row(base + j) + off;
                    for (std::size_t c = 0; c < dh; ++c) {
                        dqi[c] += ds * kj[c];
                        dkj[c] += ds * qi[c];
                    }
                }
            }
        }
    }
    Tensor dx = wq.backward(cache.x, dq);
    dx += wk.backward(cache.x, dk);
    dx += wv.backward(cache.x, dv);
    return dx;
}

} // namespace semtx::nn
