#include "semtx/jscc/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "semtx/errors.hpp"
#include "semtx/nn/checkpoint.hpp"
#include "semtx/nn/loss.hpp"

namespace semtx::jscc {

using nn::Tensor;

void JsccConfig::validate() const {
    if (vocab_size <= corpus::kFirstWordId - 1) throw ConfigError("vocab_size must exceed the reserved ids");
    if (max_len < 3) throw ConfigError("max_len must be at least 3");
    if (channel_dim_per_token == 0 || channel_dim_per_token % 2 != 0)
        throw ConfigError("channel_dim_per_token must be a positive even number, got " +
                          std::to_string(channel_dim_per_token));
    if (!(lambda_mi >= 0.0)) throw ConfigError("lambda_mi must be non-negative");
    if (heads == 0 || model_dim % heads != 0)
        throw ConfigError("model_dim " + std::to_string(model_dim) + " not divisible by " + std::to_string(heads) + " heads");
    if (layers == 0) throw ConfigError("at least one transformer layer is required");
    if (!(fading_h > 0.0)) throw ConfigError("fading_h must be positive");
    if (train_snr_range_db[0] > train_snr_range_db[1]) throw ConfigError("train SNR range is reversed");
}

TokenBatch TokenBatch::from(std::span<const corpus::TokenSequence> seqs) {
    TokenBatch b;
    b.batch = seqs.size();
    b.max_len = seqs.empty() ? 0 : seqs.front().ids.size();
    b.ids.reserve(b.batch * b.max_len);
    for (const auto& s : seqs) {
        if (s.ids.size() != b.max_len) throw ShapeError("token sequences in a batch must share max_len");
        b.ids.insert(b.ids.end(), s.ids.begin(), s.ids.end());
    }
    return b;
}

std::vector<std::uint8_t> TokenBatch::pad_mask() const {
    std::vector<std::uint8_t> m(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) m[i] = ids[i] == corpus::kPadId ? 1 : 0;
    return m;
}

const char* to_string(Partition p) {
    switch (p) {
    case Partition::beta: return "beta";
    case Partition::alpha: return "alpha";
    case Partition::delta: return "delta";
    case Partition::chi: return "chi";
    }
    return "?";
}

JsccModel::JsccModel(const JsccConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    cfg_.validate();
    Rng rng(seed);
    const std::size_t d = cfg_.model_dim;
    const std::size_t c = cfg_.channel_dim_per_token;
    embed_ = nn::Embedding::create(beta_, "embed", cfg_.vocab_size, d, rng);
    positions_ = nn::sinusoidal_positions(cfg_.max_len, d);
    for (std::size_t l = 0; l < cfg_.layers; ++l)
        enc_layers_.push_back(nn::TransformerLayer::create(beta_, "enc.layer" + std::to_string(l), d, cfg_.heads, cfg_.ff_dim, rng));
    ch_enc1_ = nn::Linear::create(alpha_, "fc1", d, cfg_.channel_hidden, rng);
    ch_enc2_ = nn::Linear::create(alpha_, "fc2", cfg_.channel_hidden, c, rng);
    ch_dec1_ = nn::Linear::create(delta_, "fc1", c, cfg_.channel_hidden, rng);
    ch_dec2_ = nn::Linear::create(delta_, "fc2", cfg_.channel_hidden, d, rng);
    ch_dec_ln_ = nn::LayerNorm::create(delta_, "ln", d);
    for (std::size_t l = 0; l < cfg_.layers; ++l)
        dec_layers_.push_back(nn::TransformerLayer::create(chi_, "dec.layer" + std::to_string(l), d, cfg_.heads, cfg_.ff_dim, rng));
    out_ = nn::Linear::create(chi_, "out", d, cfg_.vocab_size, rng);
}

nn::ParamSet& JsccModel::partition(Partition p) {
    switch (p) {
    case Partition::beta: return beta_;
    case Partition::alpha: return alpha_;
    case Partition::delta: return delta_;
    case Partition::chi: return chi_;
    }
    throw RangeError("unknown partition");
}

const nn::ParamSet& JsccModel::partition(Partition p) const { return const_cast<JsccModel*>(this)->partition(p); }

void JsccModel::zero_grad() {
    for (auto* s : partitions()) s->zero_grad();
}

Tensor JsccModel::encode(const TokenBatch& batch, EncodeCache* cache) const {
    const std::size_t len = cfg_.max_len;
    const std::size_t d = cfg_.model_dim;
    const std::size_t c = cfg_.channel_dim_per_token;
    if (batch.max_len != len)
        throw ShapeError("batch max_len " + std::to_string(batch.max_len) + " does not match model max_len " +
                         std::to_string(len));
    for (int id : batch.ids)
        if (id < 0 || static_cast<std::size_t>(id) >= cfg_.vocab_size)
            throw RangeError("token id " + std::to_string(id) + " outside vocabulary of size " + std::to_string(cfg_.vocab_size));

    const auto mask = batch.pad_mask();
    Tensor h = embed_.forward(batch.ids);
    const double emb_scale = std::sqrt(static_cast<double>(d));
    for (std::size_t r = 0; r < h.rows(); ++r) {
        double* hr = h.row(r);
        const double* pe = positions_.row(r % len);
        for (std::size_t k = 0; k < d; ++k) hr[k] = hr[k] * emb_scale + pe[k];
    }
    if (cache != nullptr) cache->layers.resize(enc_layers_.size());
    for (std::size_t l = 0; l < enc_layers_.size(); ++l)
        h = enc_layers_[l].forward(h, len, mask, cache ? &cache->layers[l] : nullptr);

    Tensor pre = ch_enc1_.forward(h);
    Tensor act = nn::relu(pre);
    Tensor raw = ch_enc2_.forward(act);

    Tensor x(raw.shape());
    std::vector<double> scales(batch.batch);
    std::vector<double> energies(batch.batch);
    const std::size_t per = len * c;
    const double symbols = static_cast<double>(per) / 2.0;
    for (std::size_t b = 0; b < batch.batch; ++b) {
        const double* z = raw.data() + b * per;
        double e = 0.0;
        for (std::size_t i = 0; i < per; ++i) e += z[i] * z[i];
        if (!(e > 0.0)) throw DegenerateInputError("channel encoder produced an all-zero block");
        const double s = std::sqrt(symbols / e);
        double* xo = x.data() + b * per;
        for (std::size_t i = 0; i < per; ++i) xo[i] = z[i] * s;
        scales[b] = s;
        energies[b] = e;
    }
    if (cache != nullptr) {
        cache->ids = batch.ids;
        cache->mask = mask;
        cache->features = std::move(h);
        cache->pre = std::move(pre);
        cache->act = std::move(act);
        cache->raw = std::move(raw);
        cache->scales = std::move(scales);
        cache->energies = std::move(energies);
    }
    return x;
}

void JsccModel::encode_backward(const EncodeCache& cache, const Tensor& dx, bool into_semantic) {
    const std::size_t len = cfg_.max_len;
    const std::size_t d = cfg_.model_dim;
    const std::size_t per = len * cfg_.channel_dim_per_token;
    const std::size_t batch = cache.scales.size();

    // x = z * s with s = sqrt(K / sum z^2):  dz = s * (dx - z * <dx, z> / sum z^2)
    Tensor dz(cache.raw.shape());
    for (std::size_t b = 0; b < batch; ++b) {
        const double* z = cache.raw.data() + b * per;
        const double* g = dx.data() + b * per;
        double dot = 0.0;
        for (std::size_t i = 0; i < per; ++i) dot += g[i] * z[i];
        const double s = cache.scales[b];
        const double k = dot / cache.energies[b];
        double* out = dz.data() + b * per;
        for (std::size_t i = 0; i < per; ++i) out[i] = s * (g[i] - z[i] * k);
    }
    const Tensor dact = ch_enc2_.backward(cache.act, dz);
    Tensor dh = ch_enc1_.backward(cache.features, nn::relu_backward(cache.pre, dact));
    if (!into_semantic) return;
    for (std::size_t l = enc_layers_.size(); l-- > 0;) dh = enc_layers_[l].backward(cache.layers[l], dh);
    dh *= std::sqrt(static_cast<double>(d));
    embed_.backward(cache.ids, dh);
}

Tensor JsccModel::decode(const Tensor& y, DecodeCache* cache) const {
    const std::size_t c = cfg_.channel_dim_per_token;
    if (y.cols() != c || y.rows() % cfg_.max_len != 0)
        throw ShapeError("received block " + nn::shape_string(y.shape()) + " does not match [batch*" +
                         std::to_string(cfg_.max_len) + ", " + std::to_string(c) + "]");
    Tensor pre = ch_dec1_.forward(y);
    Tensor act = nn::relu(pre);
    Tensor h = ch_dec_ln_.forward(ch_dec2_.forward(act), cache ? &cache->ln : nullptr);
    if (cache != nullptr) cache->layers.resize(dec_layers_.size());
    for (std::size_t l = 0; l < dec_layers_.size(); ++l)
        h = dec_layers_[l].forward(h, cfg_.max_len, {}, cache ? &cache->layers[l] : nullptr);
    Tensor logits = out_.forward(h);
    if (cache != nullptr) {
        cache->y = y;
        cache->pre = std::move(pre);
        cache->act = std::move(act);
        cache->features = std::move(h);
    }
    return logits;
}

Tensor JsccModel::decode_backward(const DecodeCache& cache, const Tensor& dlogits) {
    Tensor dh = out_.backward(cache.features, dlogits);
    for (std::size_t l = dec_layers_.size(); l-- > 0;) dh = dec_layers_[l].backward(cache.layers[l], dh);
    const Tensor dln = ch_dec_ln_.backward(cache.ln, dh);
    const Tensor dact = ch_dec2_.backward(cache.act, dln);
    return ch_dec1_.backward(cache.y, nn::relu_backward(cache.pre, dact));
}

void JsccModel::save(const std::filesystem::path& file) const {
    std::vector<nn::CheckpointRecord> records;
    Tensor meta({8});
    meta[0] = static_cast<double>(cfg_.vocab_size);
    meta[1] = static_cast<double>(cfg_.max_len);
    meta[2] = static_cast<double>(cfg_.model_dim);
    meta[3] = static_cast<double>(cfg_.heads);
    meta[4] = static_cast<double>(cfg_.ff_dim);
    meta[5] = static_cast<double>(cfg_.layers);
    meta[6] = static_cast<double>(cfg_.channel_dim_per_token);
    meta[7] = static_cast<double>(cfg_.channel_hidden);
    records.push_back({"meta/dims", meta});
    Tensor extra({4});
    extra[0] = cfg_.lambda_mi;
    extra[1] = cfg_.train_snr_range_db[0];
    extra[2] = cfg_.train_snr_range_db[1];
    extra[3] = cfg_.fading_h;
    records.push_back({"meta/training", extra});
    nn::append_params(records, beta_);
    nn::append_params(records, alpha_);
    nn::append_params(records, delta_);
    nn::append_params(records, chi_);
    nn::write_checkpoint(file, records);
}

JsccModel JsccModel::load(const std::filesystem::path& file) {
    const auto records = nn::read_checkpoint(file);
    const Tensor* dims = nullptr;
    const Tensor* training = nullptr;
    for (const auto& r : records) {
        if (r.path == "meta/dims") dims = &r.tensor;
        if (r.path == "meta/training") training = &r.tensor;
    }
    if (dims == nullptr || dims->size() != 8) throw CompatibilityError(file.string() + " has no JSCC dimension record");
    JsccConfig cfg;
    auto at = [&](std::size_t i) { return static_cast<std::size_t>(std::llround((*dims)[i])); };
    cfg.vocab_size = at(0);
    cfg.max_len = at(1);
    cfg.model_dim = at(2);
    cfg.heads = at(3);
    cfg.ff_dim = at(4);
    cfg.layers = at(5);
    cfg.channel_dim_per_token = at(6);
    cfg.channel_hidden = at(7);
    if (training != nullptr && training->size() == 4) {
        // stored as f32; round-trip through float keeps the configured values readable
        cfg.lambda_mi = static_cast<float>((*training)[0]);
        cfg.train_snr_range_db = {(*training)[1], (*training)[2]};
        cfg.fading_h = static_cast<float>((*training)[3]);
    }
    JsccModel model(cfg, 0);
    for (auto* s : model.partitions()) nn::load_params(records, *s);
    return model;
}

Tensor jscc_encode(const JsccModel& model, std::span<const corpus::TokenSequence> batch) {
    const TokenBatch tb = TokenBatch::from(batch);
    Tensor x = model.encode(tb);
    x.reshape({tb.batch, model.config().max_len * model.config().channel_dim_per_token});
    return x;
}

Tensor jscc_decode(const JsccModel& model, const Tensor& y) {
    const auto& cfg = model.config();
    const std::size_t per = cfg.max_len * cfg.channel_dim_per_token;
    if (y.size() % per != 0)
        throw ShapeError("received block of " + std::to_string(y.size()) + " reals is not a multiple of " +
                         std::to_string(per));
    const std::size_t batch = y.size() / per;
    const Tensor rows = y.reshaped({batch * cfg.max_len, cfg.channel_dim_per_token});
    Tensor logits = model.decode(rows);
    logits.reshape({batch, cfg.max_len, cfg.vocab_size});
    return logits;
}

std::vector<corpus::TokenSequence> greedy_from_logits(const Tensor& logits, std::size_t max_len) {
    const std::size_t v = logits.cols();
    const std::size_t batch = logits.rows() / max_len;
    std::vector<corpus::TokenSequence> out(batch);
    for (std::size_t b = 0; b < batch; ++b) {
        auto& seq = out[b];
        seq.ids.assign(max_len, corpus::kPadId);
        seq.true_len = max_len;
        bool ended = false;
        for (std::size_t p = 0; p < max_len; ++p) {
            if (ended) continue;
            const double* row = logits.row(b * max_len + p);
            std::size_t best = 0;
            for (std::size_t k = 1; k < v; ++k)
                if (row[k] > row[best]) best = k;
            seq.ids[p] = static_cast<int>(best);
            if (static_cast<int>(best) == corpus::kEndId) {
                ended = true;
                seq.true_len = p + 1;
            }
        }
    }
    return out;
}

std::vector<corpus::TokenSequence> greedy_decode(const JsccModel& model, const Tensor& y) {
    const Tensor logits = jscc_decode(model, y);
    return greedy_from_logits(logits.reshaped({logits.rows(), logits.cols()}), model.config().max_len);
}

LossBreakdown total_loss(JsccModel& model, const TokenBatch& inputs, const TokenBatch& targets,
                         const channel::ChannelConfig& ch, mine::MineEstimator* mine, Rng& rng,
                         const LossOptions& options) {
    const auto& cfg = model.config();
    const std::size_t c = cfg.channel_dim_per_token;
    JsccModel::EncodeCache ec;
    JsccModel::DecodeCache dc;
    const Tensor x = model.encode(inputs, options.with_grad ? &ec : nullptr);
    const auto noisy = channel::apply_channel(x.storage(), ch, rng);
    const Tensor y(x.shape(), noisy);

    Tensor dlogits;
    const Tensor logits = model.decode(y, options.with_grad ? &dc : nullptr);
    LossBreakdown out;
    out.ce = nn::ce_loss(logits, targets.ids, corpus::kPadId, options.with_grad ? &dlogits : nullptr);

    const bool use_mi = mine != nullptr && cfg.lambda_mi > 0.0;
    mine::MineEvaluation mi;
    if (use_mi) {
        if (mine->sample_dim() != c)
            throw ShapeError("MINE sample dim " + std::to_string(mine->sample_dim()) + " does not match channel dim " +
                             std::to_string(c));
        const auto perm = rng.cyclic_permutation(x.rows());
        mi = mine::mine_evaluate(*mine, x, y, perm, options.with_grad ? -cfg.lambda_mi : 0.0,
                                 options.mine_moving_average);
        if (options.with_grad) mine->params.zero_grad();
        out.mi_bound = mi.bound;
    }
    out.total = out.ce - cfg.lambda_mi * (use_mi ? out.mi_bound : 0.0);
    if (!options.with_grad) return out;

    Tensor dy = model.decode_backward(dc, dlogits);
    if (use_mi) dy += mi.dy;
    Tensor dx = dy;
    dx *= ch.h;
    if (use_mi) dx += mi.dx;
    model.encode_backward(ec, dx, options.semantic_encoder_grad);
    return out;
}

std::vector<std::string> transmit_sentences(const JsccModel& model, const corpus::Vocabulary& vocab,
                                            std::span<const std::string> sentences, const channel::ChannelConfig& ch,
                                            std::size_t batch_size, std::size_t* complex_symbols) {
    const auto& cfg = model.config();
    const std::size_t per = cfg.max_len * cfg.channel_dim_per_token;
    std::vector<std::string> decoded;
    decoded.reserve(sentences.size());
    batch_size = std::max<std::size_t>(batch_size, 1);
    if (complex_symbols != nullptr) *complex_symbols = 0;
    for (std::size_t start = 0; start < sentences.size(); start += batch_size) {
        const std::size_t end = std::min(sentences.size(), start + batch_size);
        std::vector<corpus::TokenSequence> seqs;
        for (std::size_t i = start; i < end; ++i) seqs.push_back(corpus::encode_sentence(vocab, sentences[i], cfg.max_len));
        const TokenBatch tb = TokenBatch::from(seqs);
        Tensor x = model.encode(tb);
        Tensor y(x.shape());
        for (std::size_t i = start; i < end; ++i) {
            Rng rng(ch.seed ^ static_cast<std::uint64_t>(i));
            const std::size_t off = (i - start) * per;
            channel::SymbolBlock block(x.data() + off, x.data() + off + per);
            const auto rx = channel::apply_channel(block, ch, rng);
            std::copy(rx.begin(), rx.end(), y.data() + off);
            if (complex_symbols != nullptr) *complex_symbols += block.size() / 2;
        }
        const auto tokens = greedy_from_logits(model.decode(y), cfg.max_len);
        for (const auto& t : tokens) decoded.push_back(corpus::decode_tokens(vocab, t.ids));
    }
    return decoded;
}

} // namespace semtx::jscc
