#include "semtx/nn/transformer.hpp"

namespace semtx::nn {

TransformerLayer TransformerLayer::create(ParamSet& set, const std::string& prefix, std::size_t dim,
                                          std::size_t heads, std::size_t ff_dim, Rng& rng) {
    TransformerLayer l;
    l.attn = MultiHeadAttention::create(set, prefix + ".attn", dim, heads, rng);
    l.ln1 = LayerNorm::create(set, prefix + ".ln1", dim);
    l.ff1 = Linear::create(set, prefix + ".ff1", dim, ff_dim, rng);
    l.ff2 = Linear::create(set, prefix + ".ff2", ff_dim, dim, rng);
    l.ln2 = LayerNorm::create(set, prefix + ".ln2", dim);
    return l;
}

Tensor TransformerLayer::forward(const Tensor& x, std::size_t seq_len, std::span<const std::uint8_t> key_mask,
                                 TransformerCache* cache) const {
    Tensor s1 = attn.forward(x, seq_len, key_mask, cache ? &cache->attn : nullptr);
    s1 += x;
    Tensor h1 = ln1.forward(s1, cache ? &cache->ln1 : nullptr);
    Tensor pre = ff1.forward(h1);
    Tensor act = relu(pre);
    Tensor s2 = ff2.forward(act);
    s2 += h1;
    Tensor y = ln2.forward(s2, cache ? &cache->ln2 : nullptr);
    if (cache != nullptr) {
        cache->h1 = std::move(h1);
        cache->ff_pre = std::move(pre);
        cache->ff_act = std::move(act);
    }
    return y;
}

Tensor TransformerLayer::backward(const TransformerCache& cache, const Tensor& dy) const {
    const Tensor ds2 = ln2.backward(cache.ln2, dy);
    const Tensor dact = ff2.backward(cache.ff_act, ds2);
    Tensor dh1 = ff1.backward(cache.h1, relu_backward(cache.ff_pre, dact));
    dh1 += ds2;
    const Tensor ds1 = ln1.backward(cache.ln1, dh1);
    Tensor dx = attn.backward(cache.attn, ds1);
    dx += ds1;
    return dx;
}

} // namespace semtx::nn
