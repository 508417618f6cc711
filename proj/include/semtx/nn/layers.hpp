#pragma once

#include <span>
#include <string>
#include <vector>

#include "semtx/nn/param_set.hpp"
#include "semtx/nn/tensor.hpp"
#include "semtx/rng.hpp"

namespace semtx::nn {

// Functional forms. Backward functions accumulate parameter gradients into
// the passed tensors and return the gradient with respect to the input.

/// y = x w + b for x of shape [..., in], w [in, out], b [out].
Tensor dense_forward(const Tensor& w, const Tensor& b, const Tensor& x);
Tensor dense_backward(const Tensor& w, const Tensor& x, const Tensor& dy, Tensor& dw, Tensor& db);

struct LayerNormCache {
    Tensor xhat;
    std::vector<double> inv_std;
};

/// Per-row (last dimension) normalisation with population variance,
/// y = gamma * (x - mean) / sqrt(var + eps) + beta.
Tensor layernorm_forward(const Tensor& gamma, const Tensor& beta, const Tensor& x, double eps,
                         LayerNormCache* cache = nullptr);
Tensor layernorm_backward(const Tensor& gamma, const LayerNormCache& cache, const Tensor& dy, Tensor& dgamma,
                          Tensor& dbeta);

/// Dense layer bound to two parameters of a ParamSet.
struct Linear {
    Param* w = nullptr;
    Param* b = nullptr;

    static Linear create(ParamSet& set, const std::string& prefix, std::size_t in, std::size_t out, Rng& rng);
    std::size_t in_dim() const { return w->value.shape()[0]; }
    std::size_t out_dim() const { return w->value.shape()[1]; }
    Tensor forward(const Tensor& x) const { return dense_forward(w->value, b->value, x); }
    Tensor backward(const Tensor& x, const Tensor& dy) const { return dense_backward(w->value, x, dy, w->grad, b->grad); }
};

struct LayerNorm {
    Param* gamma = nullptr;
    Param* beta = nullptr;
    double eps = 1e-5;

    static LayerNorm create(ParamSet& set, const std::string& prefix, std::size_t dim, double eps = 1e-5);
    Tensor forward(const Tensor& x, LayerNormCache* cache = nullptr) const {
        return layernorm_forward(gamma->value, beta->value, x, eps, cache);
    }
    Tensor backward(const LayerNormCache& cache, const Tensor& dy) const {
        return layernorm_backward(gamma->value, cache, dy, gamma->grad, beta->grad);
    }
};

/// Token embedding table [vocab, dim].
struct Embedding {
    Param* table = nullptr;

    static Embedding create(ParamSet& set, const std::string& path, std::size_t vocab, std::size_t dim, Rng& rng);
    std::size_t vocab_size() const { return table->value.shape()[0]; }
    std::size_t dim() const { return table->value.shape()[1]; }
    /// Throws RangeError on ids outside [0, vocab).
    Tensor forward(std::span<const int> ids) const;
    void backward(std::span<const int> ids, const Tensor& dy) const;
};

/// Sinusoidal position codes [max_len, dim]:
/// pe[p, 2i] = sin(p / 10000^(2i/dim)), pe[p, 2i+1] = cos(same).
Tensor sinusoidal_positions(std::size_t max_len, std::size_t dim);

} // namespace semtx::nn
