#pragma once

#include "semtx/nn/attention.hpp"

namespace semtx::nn {

struct TransformerCache {
    AttentionCache attn;
    LayerNormCache ln1;
    LayerNormCache ln2;
    Tensor h1;
    Tensor ff_pre;
    Tensor ff_act;
};

/// Post-norm encoder layer:
///   h1 = LN1(x + MHA(x));  y = LN2(h1 + W2 relu(W1 h1 + b1) + b2)
struct TransformerLayer {
    MultiHeadAttention attn;
    LayerNorm ln1;
    Linear ff1;
    Linear ff2;
    LayerNorm ln2;

    static TransformerLayer create(ParamSet& set, const std::string& prefix, std::size_t dim, std::size_t heads,
                                   std::size_t ff_dim, Rng& rng);

    Tensor forward(const Tensor& x, std::size_t seq_len, std::span<const std::uint8_t> key_mask,
                   TransformerCache* cache = nullptr) const;
    Tensor backward(const TransformerCache& cache, const Tensor& dy) const;
};

inline Tensor transformer_layer_forward(const TransformerLayer& layer, const Tensor& x, std::size_t seq_len,
                                        std::span<const std::uint8_t> key_mask, TransformerCache* cache = nullptr) {
    return layer.forward(x, seq_len, key_mask, cache);
}

} // namespace semtx::nn
