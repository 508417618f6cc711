#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "semtx/channel.hpp"
#include "semtx/corpus.hpp"
#include "semtx/mine.hpp"
#include "semtx/nn/param_set.hpp"
#include "semtx/nn/transformer.hpp"
#include "semtx/rng.hpp"

namespace semtx::jscc {

struct JsccConfig {
    std::size_t vocab_size = 0;
    std::size_t max_len = 32;
    std::size_t model_dim = 128;
    std::size_t heads = 8;
    std::size_t ff_dim = 512;
    std::size_t layers = 3;
    std::size_t channel_dim_per_token = 16; // reals; pairs form complex symbols
    std::size_t channel_hidden = 256;
    double lambda_mi = 0.05;
    std::array<double, 2> train_snr_range_db{5.0, 10.0};
    double fading_h = 0.9;

    /// Throws ConfigError on an odd channel dim, negative lambda, bad head split
    /// or empty vocabulary.
    void validate() const;
    std::size_t symbols_per_sentence() const { return max_len * channel_dim_per_token / 2; }
};

/// Fixed-length token ids for a batch, row-major [batch, max_len].
struct TokenBatch {
    std::vector<int> ids;
    std::size_t batch = 0;
    std::size_t max_len = 0;

    static TokenBatch from(std::span<const corpus::TokenSequence> seqs);
    std::vector<std::uint8_t> pad_mask() const;
};

enum class Partition { beta, alpha, delta, chi };
const char* to_string(Partition p);

/// The four disjoint parameter partitions:
///   beta  - semantic encoder: embedding + transformer layers
///   alpha - channel encoder: dense -> ReLU -> dense
///   delta - channel decoder: dense -> ReLU -> dense -> layer norm
///   chi   - semantic decoder: transformer layers + vocabulary projection
class JsccModel {
public:
    JsccModel(const JsccConfig& cfg, std::uint64_t seed);
    JsccModel(const JsccModel&) = delete;
    JsccModel& operator=(const JsccModel&) = delete;
    JsccModel(JsccModel&&) noexcept = default;
    JsccModel& operator=(JsccModel&&) noexcept = default;

    struct EncodeCache {
        std::vector<int> ids;
        std::vector<std::uint8_t> mask;
        std::vector<nn::TransformerCache> layers;
        nn::Tensor features;
        nn::Tensor pre;
        nn::Tensor act;
        nn::Tensor raw;               // channel encoder output before normalisation
        std::vector<double> scales;   // per sentence
        std::vector<double> energies; // per sentence sum of squares
    };

    struct DecodeCache {
        nn::Tensor y;
        nn::Tensor pre;
        nn::Tensor act;
        nn::LayerNormCache ln;
        std::vector<nn::TransformerCache> layers;
        nn::Tensor features;
    };

    const JsccConfig& config() const { return cfg_; }

    /// Symbols x as [batch * max_len, channel_dim], each sentence scaled to
    /// unit average complex power. Throws RangeError on ids >= vocab_size.
    nn::Tensor encode(const TokenBatch& batch, EncodeCache* cache = nullptr) const;
    /// Accumulates beta (when `into_semantic`) and alpha gradients.
    void encode_backward(const EncodeCache& cache, const nn::Tensor& dx, bool into_semantic = true);

    /// Logits [batch * max_len, vocab] from received symbols [batch * max_len, channel_dim].
    nn::Tensor decode(const nn::Tensor& y, DecodeCache* cache = nullptr) const;
    /// Accumulates delta and chi gradients and returns d/dy.
    nn::Tensor decode_backward(const DecodeCache& cache, const nn::Tensor& dlogits);

    nn::ParamSet& partition(Partition p);
    const nn::ParamSet& partition(Partition p) const;
    std::vector<nn::ParamSet*> partitions() { return {&beta_, &alpha_, &delta_, &chi_}; }
    void zero_grad();

    void save(const std::filesystem::path& file) const;
    /// Reads dimensions from the checkpoint and rebuilds the model.
    static JsccModel load(const std::filesystem::path& file);

private:
    JsccConfig cfg_;
    nn::ParamSet beta_{"beta"};
    nn::ParamSet alpha_{"alpha"};
    nn::ParamSet delta_{"delta"};
    nn::ParamSet chi_{"chi"};

    nn::Embedding embed_;
    nn::Tensor positions_;
    std::vector<nn::TransformerLayer> enc_layers_;
    nn::Linear ch_enc1_;
    nn::Linear ch_enc2_;
    nn::Linear ch_dec1_;
    nn::Linear ch_dec2_;
    nn::LayerNorm ch_dec_ln_;
    std::vector<nn::TransformerLayer> dec_layers_;
    nn::Linear out_;
};

/// Encoder output per sentence as [batch, max_len * channel_dim].
nn::Tensor jscc_encode(const JsccModel& model, std::span<const corpus::TokenSequence> batch);
/// Logits [batch, max_len, vocab] for y of shape [batch, max_len * channel_dim].
nn::Tensor jscc_decode(const JsccModel& model, const nn::Tensor& y);

/// Per-position argmax (ties to the lower id); everything after the first
/// end marker becomes padding.
std::vector<corpus::TokenSequence> greedy_decode(const JsccModel& model, const nn::Tensor& y);
std::vector<corpus::TokenSequence> greedy_from_logits(const nn::Tensor& logits, std::size_t max_len);

struct LossBreakdown {
    double ce = 0.0;
    double mi_bound = 0.0;
    double total = 0.0;
};

struct LossOptions {
    bool with_grad = false;
    bool semantic_encoder_grad = true; // skip beta backward when false
    bool mine_moving_average = false;
};

/// ce_loss - lambda * MINE bound for one batch. Noise and the marginal
/// shuffle come from `rng` (noise first, then the permutation). `inputs` may
/// differ from `targets` (token corruption); padding follows the targets.
/// With grad, every partition accumulates gradients; the critic's own
/// gradients are discarded.
LossBreakdown total_loss(JsccModel& model, const TokenBatch& inputs, const TokenBatch& targets,
                         const channel::ChannelConfig& ch, mine::MineEstimator* mine, Rng& rng,
                         const LossOptions& options = {});

/// Transmits sentences over `ch` and greedy-decodes them. Sentence i uses
/// noise seeded with ch.seed ^ i, so the result does not depend on batching.
/// `complex_symbols`, when given, receives the number of complex symbols sent.
std::vector<std::string> transmit_sentences(const JsccModel& model, const corpus::Vocabulary& vocab,
                                            std::span<const std::string> sentences, const channel::ChannelConfig& ch,
                                            std::size_t batch_size = 32, std::size_t* complex_symbols = nullptr);

} // namespace semtx::jscc
