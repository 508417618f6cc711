#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "semtx/nn/layers.hpp"

namespace semtx::nn {

struct AttentionCache {
    Tensor x;
    Tensor q;
    Tensor k;
    Tensor v;
    Tensor probs; // [batch, heads, seq, seq]
    Tensor ctx;
    std::vector<std::uint8_t> key_mask;
    std::size_t seq_len = 0;
};

/// Multi-head scaled dot-product self-attention over rows grouped into
/// sentences of `seq_len` consecutive rows. key_mask (one byte per row,
/// nonzero = masked) removes keys from every query's softmax; an empty mask
/// means no masking. A query whose keys are all masked attends to nothing
/// and yields the output bias only.
struct MultiHeadAttention {
    Linear wq;
    Linear wk;
    Linear wv;
    Linear wo;
    std::size_t heads = 1;

    /// Throws ConfigError when dim is not divisible by heads.
    static MultiHeadAttention create(ParamSet& set, const std::string& prefix, std::size_t dim, std::size_t heads,
                                     Rng& rng);
    std::size_t dim() const { return wq.in_dim(); }

    Tensor forward(const Tensor& x, std::size_t seq_len, std::span<const std::uint8_t> key_mask,
                   AttentionCache* cache = nullptr) const;
    Tensor backward(const AttentionCache& cache, const Tensor& dy) const;
};

inline Tensor multihead_attention_forward(const MultiHeadAttention& params, const Tensor& x, std::size_t seq_len,
                                          std::span<const std::uint8_t> key_mask, AttentionCache* cache = nullptr) {
    return params.forward(x, seq_len, key_mask, cache);
}

} // namespace semtx::nn
