#include "semtx/nn/layers.hpp"

#include <cmath>

#include "semtx/errors.hpp"

namespace semtx::nn {

Tensor dense_forward(const Tensor& w, const Tensor& b, const Tensor& x) {
    if (w.shape().size() != 2 || x.cols() != w.shape()[0] || b.size() != w.shape()[1])
        throw ShapeError("dense: input " + shape_string(x.shape()) + " does not match weight " + shape_string(w.shape()) +
                         " / bias " + shape_string(b.shape()));
    Tensor y = matmul(x, w);
    const std::size_t out = w.shape()[1];
    for (std::size_t r = 0; r < y.rows(); ++r) {
        double* yr = y.row(r);
        for (std::size_t c = 0; c < out; ++c) yr[c] += b[c];
    }
    auto shape = x.shape();
    shape.back() = out;
    y.reshape(std::move(shape));
    return y;
}

Tensor dense_backward(const Tensor& w, const Tensor& x, const Tensor& dy, Tensor& dw, Tensor& db) {
    if (dy.rows() != x.rows() || dy.cols() != w.shape()[1])
        throw ShapeError("dense backward: gradient " + shape_string(dy.shape()) + " does not match input " +
                         shape_string(x.shape()) + " and weight " + shape_string(w.shape()));
    matmul_tn_acc(x, dy, dw);
    for (std::size_t r = 0; r < dy.rows(); ++r) {
        const double* g = dy.row(r);
        for (std::size_t c = 0; c < dy.cols(); ++c) db[c] += g[c];
    }
    Tensor dx = matmul_nt(dy, w);
    dx.reshape(x.shape());
    return dx;
}

Tensor layernorm_forward(const Tensor& gamma, const Tensor& beta, const Tensor& x, double eps, LayerNormCache* cache) {
    const std::size_t n = x.cols();
    if (gamma.size() != n || beta.size() != n)
        throw ShapeError("layernorm: input " + shape_string(x.shape()) + " vs gamma " + shape_string(gamma.shape()));
    Tensor y(x.shape());
    Tensor xhat(x.shape());
    std::vector<double> inv_std(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const double* xr = x.row(r);
        double mean = 0.0;
        for (std::size_t c = 0; c < n; ++c) mean += xr[c];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t c = 0; c < n; ++c) var += (xr[c] - mean) * (xr[c] - mean);
        var /= static_cast<double>(n);
        const double is = 1.0 / std::sqrt(var + eps);
        inv_std[r] = is;
        double* hr = xhat.row(r);
        double* yr = y.row(r);
        for (std::size_t c = 0; c < n; ++c) {
            hr[c] = (xr[c] - mean) * is;
            yr[c] = gamma[c] * hr[c] + beta[c];
        }
    }
    if (cache != nullptr) {
        cache->xhat = std::move(xhat);
        cache->inv_std = std::move(inv_std);
    }
    return y;
}

Tensor layernorm_backward(const Tensor& gamma, const LayerNormCache& cache, const Tensor& dy, Tensor& dgamma,
                          Tensor& dbeta) {
    const Tensor& xhat = cache.xhat;
    const std::size_t n = xhat.cols();
    Tensor dx(xhat.shape());
    std::vector<double> g(n);
    for (std::size_t r = 0; r < xhat.rows(); ++r) {
        const double* hr = xhat.row(r);
        const double* dr = dy.row(r);
        double sum_g = 0.0;
        double sum_gh = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            dgamma[c] += dr[c] * hr[c];
            dbeta[c] += dr[c];
            g[c] = dr[c] * gamma[c];
            sum_g += g[c];
            sum_gh += g[c] * hr[c];
        }
        const double is = cache.inv_std[r];
        const double inv_n = 1.0 / static_cast<double>(n);
        double* out = dx.row(r);
        for (std::size_t c = 0; c < n; ++c) out[c] = is * (g[c] - inv_n * sum_g - hr[c] * inv_n * sum_gh);
    }
    return dx;
}

Linear Linear::create(ParamSet& set, const std::string& prefix, std::size_t in, std::size_t out, Rng& rng) {
    Linear l;
    l.w = &set.add(prefix + ".w", glorot_uniform(in, out, rng));
    l.b = &set.add(prefix + ".b", Tensor({out}));
    return l;
}

LayerNorm LayerNorm::create(ParamSet& set, const std::string& prefix, std::size_t dim, double eps) {
    LayerNorm ln;
    ln.gamma = &set.add(prefix + ".gamma", Tensor({dim}, 1.0));
    ln.beta = &set.add(prefix + ".beta", Tensor({dim}));
    ln.eps = eps;
    return ln;
}

Embedding Embedding::create(ParamSet& set, const std::string& path, std::size_t vocab, std::size_t dim, Rng& rng) {
    Embedding e;
    e.table = &set.add(path, glorot_uniform(vocab, dim, rng));
    return e;
}

Tensor Embedding::forward(std::span<const int> ids) const {
    const std::size_t d = dim();
    Tensor out = Tensor::matrix(ids.size(), d);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= vocab_size())
            throw RangeError("token id " + std::to_string(ids[i]) + " outside embedding of size " +
                             std::to_string(vocab_size()));
        const double* src = table->value.row(static_cast<std::size_t>(ids[i]));
        std::copy(src, src + d, out.row(i));
    }
    return out;
}

void Embedding::backward(std::span<const int> ids, const Tensor& dy) const {
    const std::size_t d = dim();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        double* g = table->grad.row(static_cast<std::size_t>(ids[i]));
        const double* src = dy.row(i);
        for (std::size_t c = 0; c < d; ++c) g[c] += src[c];
    }
}

Tensor sinusoidal_positions(std::size_t max_len, std::size_t dim) {
    Tensor pe = Tensor::matrix(max_len, dim);
    for (std::size_t p = 0; p < max_len; ++p) {
        for (std::size_t i = 0; i < dim; i += 2) {
            const double angle =
                static_cast<double>(p) / std::pow(10000.0, static_cast<double>(i) / static_cast<double>(dim));
            pe.at(p, i) = std::sin(angle);
            if (i + 1 < dim) pe.at(p, i + 1) = std::cos(angle);
        }
    }
    return pe;
}

} // namespace semtx::nn
