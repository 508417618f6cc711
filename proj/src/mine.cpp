#include "semtx/mine.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "semtx/errors.hpp"

namespace semtx::mine {

using nn::Tensor;

MineEstimator::MineEstimator(const MineConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    Rng rng(seed);
    l1_ = nn::Linear::create(params, "fc1", 2 * cfg.sample_dim, cfg.hidden, rng);
    l2_ = nn::Linear::create(params, "fc2", cfg.hidden, cfg.hidden, rng);
    l3_ = nn::Linear::create(params, "fc3", cfg.hidden, 1, rng);
}

Tensor MineEstimator::critic(const Tensor& pairs, Cache* cache) const {
    if (pairs.cols() != input_dim())
        throw ShapeError("critic input has " + std::to_string(pairs.cols()) + " columns, expected " +
                         std::to_string(input_dim()));
    Tensor pre1 = l1_.forward(pairs);
    Tensor act1 = nn::relu(pre1);
    Tensor pre2 = l2_.forward(act1);
    Tensor act2 = nn::relu(pre2);
    Tensor out = l3_.forward(act2);
    if (cache != nullptr) {
        cache->input = pairs;
        cache->pre1 = std::move(pre1);
        cache->act1 = std::move(act1);
        cache->pre2 = std::move(pre2);
        cache->act2 = std::move(act2);
    }
    return out;
}

Tensor MineEstimator::critic_backward(const Cache& cache, const Tensor& dout) const {
    Tensor g = l3_.backward(cache.act2, dout);
    g = l2_.backward(cache.act1, nn::relu_backward(cache.pre2, g));
    return l1_.backward(cache.input, nn::relu_backward(cache.pre1, g));
}

Tensor joint_pairs(const Tensor& x, const Tensor& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw ShapeError("joint pairs need aligned x " + nn::shape_string(x.shape()) + " and y " + nn::shape_string(y.shape()));
    const std::size_t d = x.cols();
    Tensor out = Tensor::matrix(x.rows(), 2 * d);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        std::copy(x.row(r), x.row(r) + d, out.row(r));
        std::copy(y.row(r), y.row(r) + d, out.row(r) + d);
    }
    return out;
}

Tensor marginal_pairs(const Tensor& x, const Tensor& y, std::span<const std::size_t> perm) {
    if (perm.size() != y.rows()) throw ShapeError("permutation length does not match batch");
    const std::size_t d = x.cols();
    Tensor out = Tensor::matrix(x.rows(), 2 * d);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        std::copy(x.row(r), x.row(r) + d, out.row(r));
        std::copy(y.row(perm[r]), y.row(perm[r]) + d, out.row(r) + d);
    }
    return out;
}

namespace {

double log_mean_exp(const Tensor& t, double* max_out) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : t.storage()) mx = std::max(mx, v);
    double s = 0.0;
    for (double v : t.storage()) s += std::exp(v - mx);
    if (max_out != nullptr) *max_out = mx;
    return mx + std::log(s / static_cast<double>(t.size()));
}

double mean(const Tensor& t) {
    double s = 0.0;
    for (double v : t.storage()) s += v;
    return s / static_cast<double>(t.size());
}

} // namespace

double mine_lower_bound(const MineEstimator& est, const Tensor& joint, const Tensor& marginal) {
    if (joint.rows() < 2 || marginal.rows() < 2) throw DegenerateInputError("MINE bound needs at least two samples");
    return mean(est.critic(joint)) - log_mean_exp(est.critic(marginal), nullptr);
}

MineEvaluation mine_evaluate(MineEstimator& est, const Tensor& x, const Tensor& y, std::span<const std::size_t> perm,
                             double scale, bool use_moving_average) {
    const std::size_t n = x.rows();
    if (n < 2) throw DegenerateInputError("MINE bound needs at least two samples");
    const std::size_t d = x.cols();
    MineEstimator::Cache cj;
    MineEstimator::Cache cm;
    const Tensor tj = est.critic(joint_pairs(x, y), scale != 0.0 ? &cj : nullptr);
    const Tensor tm = est.critic(marginal_pairs(x, y, perm), scale != 0.0 ? &cm : nullptr);
    const double lme = log_mean_exp(tm, nullptr);

    MineEvaluation out;
    out.bound = mean(tj) - lme;
    if (scale == 0.0) return out;

    const double inv_n = 1.0 / static_cast<double>(n);
    Tensor dtj(tj.shape(), scale * inv_n);
    Tensor dtm(tm.shape());
    // d/dT_i of log(mean exp T) = exp(T_i) / sum_j exp(T_j)
    double denom_log = lme + std::log(static_cast<double>(n)); // log sum exp
    if (use_moving_average) {
        const double batch_mean = std::exp(lme);
        const double rate = est.config().ma_rate;
        est.moving_average = est.moving_average_ready ? (1.0 - rate) * est.moving_average + rate * batch_mean : batch_mean;
        est.moving_average_ready = true;
        denom_log = std::log(est.moving_average) + std::log(static_cast<double>(n));
    }
    for (std::size_t i = 0; i < n; ++i) dtm[i] = -scale * std::exp(tm[i] - denom_log);

    const Tensor dj = est.critic_backward(cj, dtj);
    const Tensor dm = est.critic_backward(cm, dtm);
    out.dx = Tensor::matrix(n, d);
    out.dy = Tensor::matrix(n, d);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            out.dx.at(r, c) = dj.at(r, c) + dm.at(r, c);
            out.dy.at(r, c) += dj.at(r, d + c);
            out.dy.at(perm[r], c) += dm.at(r, d + c);
        }
    }
    return out;
}

double mine_train_step(MineEstimator& est, const Tensor& x, const Tensor& y, Rng& rng) {
    const auto perm = rng.cyclic_permutation(x.rows());
    est.params.zero_grad();
    const auto eval = mine_evaluate(est, x, y, perm, -1.0, est.config().ma_rate > 0.0);
    if (!std::isfinite(eval.bound))
        throw NonFiniteError("MINE bound is not finite at optimizer step " + std::to_string(est.params.step()));
    nn::adam_step(est.params, est.config().adam);
    return eval.bound;
}

double gaussian_mutual_information(double rho) {
    return -0.5 * std::log(1.0 - rho * rho) + 0.0; // + 0.0 turns -0 into 0
}

} // namespace semtx::mine
