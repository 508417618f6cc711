#pragma once

#include <cstdint>
#include <span>

#include "semtx/nn/adam.hpp"
#include "semtx/nn/layers.hpp"
#include "semtx/nn/param_set.hpp"
#include "semtx/rng.hpp"

namespace semtx::mine {

struct MineConfig {
    std::size_t sample_dim = 1; // reals per x sample (and per y sample)
    std::size_t hidden = 64;
    nn::AdamConfig adam{1e-3, 0.9, 0.999, 1e-8};
    /// EMA rate for the bias-corrected denominator of the log term's
    /// gradient; 0 uses the raw Donsker-Varadhan gradient.
    double ma_rate = 0.0;
};

/// Statistics network f_T: [x, y] (2 * sample_dim) -> 64 -> ReLU -> 64 ->
/// ReLU -> scalar, with its own Adam state.
class MineEstimator {
public:
    MineEstimator(const MineConfig& cfg, std::uint64_t seed);
    MineEstimator(const MineEstimator&) = delete;
    MineEstimator& operator=(const MineEstimator&) = delete;
    MineEstimator(MineEstimator&&) noexcept = default;
    MineEstimator& operator=(MineEstimator&&) noexcept = default;

    struct Cache {
        nn::Tensor input;
        nn::Tensor pre1;
        nn::Tensor act1;
        nn::Tensor pre2;
        nn::Tensor act2;
    };

    const MineConfig& config() const { return cfg_; }
    std::size_t sample_dim() const { return cfg_.sample_dim; }
    std::size_t input_dim() const { return 2 * cfg_.sample_dim; }

    /// f_T over rows of `pairs` [N, 2*sample_dim]; returns [N, 1].
    nn::Tensor critic(const nn::Tensor& pairs, Cache* cache = nullptr) const;
    /// Accumulates critic parameter gradients and returns d/d(pairs).
    nn::Tensor critic_backward(const Cache& cache, const nn::Tensor& dout) const;

    /// Final scalar layer; exposed so tests can shift the critic output.
    nn::Linear& output_layer() { return l3_; }

    nn::ParamSet params{"mine"};
    double moving_average = 0.0; // EMA of mean(exp(f_T)) on marginal samples
    bool moving_average_ready = false;

private:
    MineConfig cfg_;
    nn::Linear l1_;
    nn::Linear l2_;
    nn::Linear l3_;
};

/// Joint rows [x_i, y_i] and marginal rows [x_i, y_perm(i)].
nn::Tensor joint_pairs(const nn::Tensor& x, const nn::Tensor& y);
nn::Tensor marginal_pairs(const nn::Tensor& x, const nn::Tensor& y, std::span<const std::size_t> perm);

/// mean(f_T(joint)) - log(mean(exp(f_T(marginal)))), exp taken with a max
/// shift. Throws DegenerateInputError when fewer than two pairs are given.
double mine_lower_bound(const MineEstimator& est, const nn::Tensor& joint, const nn::Tensor& marginal);

struct MineEvaluation {
    double bound = 0.0;
    nn::Tensor dx; // scale * d(bound)/dx
    nn::Tensor dy; // scale * d(bound)/dy
};

/// Bound on aligned x, y [N, sample_dim] with the marginal built from `perm`.
/// With `scale` != 0 the critic gradients receive scale * d(bound)/d(theta)
/// and the input gradients are returned; with scale == 0 nothing is
/// accumulated. `use_moving_average` swaps the log-term gradient
/// denominator for the estimator's EMA (bound value unchanged).
MineEvaluation mine_evaluate(MineEstimator& est, const nn::Tensor& x, const nn::Tensor& y,
                             std::span<const std::size_t> perm, double scale, bool use_moving_average = false);

/// One Adam ascent step on the bound (critic parameters only); the marginal
/// shuffle is drawn from `rng`. Returns the bound before the step. Throws
/// NonFiniteError when the bound is not finite.
double mine_train_step(MineEstimator& est, const nn::Tensor& x, const nn::Tensor& y, Rng& rng);

/// Closed-form I(X;Y) of a bivariate Gaussian with correlation rho, in nats.
double gaussian_mutual_information(double rho);

} // namespace semtx::mine
