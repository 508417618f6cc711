#include <doctest.h>

#include <cmath>
#include <set>
#include <filesystem>

#include "semtx/errors.hpp"
#include "semtx/jscc/model.hpp"
#include "semtx/jscc/trainer.hpp"
#include "semtx/nn/grad_check.hpp"
#include "semtx/nn/loss.hpp"

using namespace semtx;
using namespace semtx::jscc;

namespace {

JsccConfig tiny_config() {
    JsccConfig c;
    c.vocab_size = 12;
    c.max_len = 5;
    c.model_dim = 8;
    c.heads = 2;
    c.ff_dim = 12;
    c.layers = 2;
    c.channel_dim_per_token = 4;
    c.channel_hidden = 6;
    return c;
}

corpus::TokenSequence seq(std::vector<int> ids) {
    corpus::TokenSequence s;
    s.true_len = 0;
    for (int id : ids)
        if (id != corpus::kPadId) ++s.true_len;
    s.ids = std::move(ids);
    return s;
}

std::vector<corpus::TokenSequence> sample_batch() {
    return {seq({1, 4, 5, 2, 0}), seq({1, 6, 7, 8, 2}), seq({1, 4, 5, 2, 0})};
}

} // namespace

TEST_CASE("config validation") {
    auto c = tiny_config();
    CHECK_NOTHROW(c.validate());
    c.channel_dim_per_token = 5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = tiny_config();
    c.lambda_mi = -0.1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = tiny_config();
    c.heads = 3;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("partitions are disjoint and cover the model") {
    JsccModel m(tiny_config(), 1);
    std::set<const nn::Param*> seen;
    std::size_t count = 0;
    for (auto* set : m.partitions())
        for (auto& [path, p] : *set) {
            seen.insert(&p);
            ++count;
        }
    CHECK(seen.size() == count);
    CHECK(m.partition(Partition::beta).contains("embed"));
    CHECK(m.partition(Partition::chi).contains("out.w"));
    CHECK(m.partition(Partition::delta).contains("ln.gamma"));
    CHECK(m.partition(Partition::alpha).contains("fc2.w"));
}

TEST_CASE("encoder output contract") {
    JsccModel m(tiny_config(), 2);
    const auto batch = sample_batch();
    const nn::Tensor x = jscc_encode(m, batch);
    CHECK(x.shape() == std::vector<std::size_t>{3, 20});
    CHECK(m.config().symbols_per_sentence() == 10);
    for (std::size_t b = 0; b < 3; ++b) {
        double e = 0;
        for (std::size_t i = 0; i < 20; ++i) e += x.at(b, i) * x.at(b, i);
        CHECK(std::abs(e / 10.0 - 1.0) < 1e-9);
    }
    for (std::size_t i = 0; i < 20; ++i) CHECK(x.at(0, i) == x.at(2, i));
    CHECK_THROWS_AS(jscc_encode(m, std::vector<corpus::TokenSequence>{seq({1, 12, 2, 0, 0})}), RangeError);
}

TEST_CASE("decoder output contract") {
    JsccModel m(tiny_config(), 3);
    const nn::Tensor x = jscc_encode(m, sample_batch());
    const nn::Tensor logits = jscc_decode(m, x);
    CHECK(logits.shape() == std::vector<std::size_t>{3, 5, 12});
    const nn::Tensor p = nn::softmax_rows(logits.reshaped({15, 12}));
    for (std::size_t r = 0; r < 15; ++r) {
        double s = 0;
        for (std::size_t k = 0; k < 12; ++k) s += p.at(r, k);
        CHECK(std::abs(s - 1.0) < 1e-6);
    }
    CHECK_THROWS_AS(jscc_decode(m, nn::Tensor({1, 7})), ShapeError);
    // untrained decode is total: every id is in range
    for (const auto& s : greedy_decode(m, x))
        for (int id : s.ids) CHECK((id >= 0 && id < 12));
}

TEST_CASE("greedy decoding pads after the first end marker") {
    nn::Tensor logits({4, 5});
    logits.at(0, 1) = 1;
    logits.at(1, 2) = 1; // end
    logits.at(2, 4) = 1;
    logits.at(3, 4) = 1;
    const auto out = greedy_from_logits(logits, 4);
    CHECK(out[0].ids == std::vector<int>{1, 2, 0, 0});
    CHECK(out[0].true_len == 2);
}

TEST_CASE("total loss combination") {
    auto cfg = tiny_config();
    const auto batch = TokenBatch::from(sample_batch());
    const auto ch = channel::ChannelConfig::fading(0.9, 8.0);
    {
        cfg.lambda_mi = 0.0;
        JsccModel m(cfg, 4);
        mine::MineEstimator est({4, 16}, 5);
        Rng rng(6);
        const auto l = total_loss(m, batch, batch, ch, &est, rng);
        CHECK(l.total == l.ce);
    }
    {
        cfg.lambda_mi = 0.5;
        JsccModel m(cfg, 4);
        mine::MineEstimator est({4, 16}, 5);
        // shift the critic so the bound is positive: train it briefly
        Rng train_rng(7);
        for (int i = 0; i < 200; ++i) {
            const nn::Tensor x = m.encode(batch);
            const nn::Tensor y(x.shape(), channel::apply_channel(x.storage(), ch, train_rng));
            mine::mine_train_step(est, x, y, train_rng);
        }
        Rng rng(8);
        const auto l = total_loss(m, batch, batch, ch, &est, rng);
        REQUIRE(l.mi_bound > 0.0);
        CHECK(l.total < l.ce);
        CHECK(l.total == doctest::Approx(l.ce - 0.5 * l.mi_bound).epsilon(1e-12));
    }
    JsccModel m(cfg, 4);
    mine::MineEstimator wrong({6, 16}, 5);
    Rng rng(9);
    CHECK_THROWS_AS(total_loss(m, batch, batch, ch, &wrong, rng), ShapeError);
}

TEST_CASE("total loss gradient check across all four partitions") {
    auto cfg = tiny_config();
    cfg.lambda_mi = 0.3;
    JsccModel m(cfg, 10);
    mine::MineEstimator est({4, 8}, 11);
    const auto batch = TokenBatch::from(sample_batch());
    const auto ch = channel::ChannelConfig::fading(0.9, 6.0);
    auto loss = [&](bool grad) {
        Rng rng(12); // same noise and shuffle on every evaluation
        LossOptions o;
        o.with_grad = grad;
        return total_loss(m, batch, batch, ch, &est, rng, o).total;
    };
    const auto rep = nn::gradient_check(loss, m.partitions(), {1e-5, 400, 3, 1e-6});
    INFO("worst " << rep.worst_path << " analytic " << rep.worst_analytic << " numeric " << rep.worst_numeric);
    CHECK(rep.max_rel_error < 1e-4);
}

TEST_CASE("frozen partitions stay bit-identical during training") {
    auto cfg = tiny_config();
    JsccModel m(cfg, 13);
    const auto data = sample_batch();
    const auto beta0 = m.partition(Partition::beta).flatten();
    const auto chi0 = m.partition(Partition::chi).flatten();
    const auto alpha0 = m.partition(Partition::alpha).flatten();
    TrainSchedule s;
    s.round.push_back({"A", {Partition::alpha, Partition::delta}, 2, 0.0});
    s.max_rounds = 1;
    TrainOptions o;
    o.batch_size = 2;
    const auto res = train(m, data, s, o);
    CHECK(res.frozen_unchanged);
    CHECK(m.partition(Partition::beta).flatten() == beta0);
    CHECK(m.partition(Partition::chi).flatten() == chi0);
    CHECK(m.partition(Partition::alpha).flatten() != alpha0);
    CHECK(res.history.size() == 2);
}

TEST_CASE("training is deterministic and reduces the loss on a toy set") {
    auto cfg = tiny_config();
    const auto data = sample_batch();
    auto run = [&] {
        JsccModel m(cfg, 14);
        TrainOptions o;
        o.batch_size = 3;
        o.adam.lr = 3e-3;
        o.seed = 15;
        return std::make_pair(train(m, data, TrainSchedule::cross_training(15, 2, 0.0), o),
                              m.partition(Partition::chi).flatten());
    };
    const auto [a, pa] = run();
    const auto [b, pb] = run();
    CHECK(pa == pb);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) CHECK(a.history[i].total == b.history[i].total);
    CHECK(a.history.back().total < a.history.front().total);
}

TEST_CASE("unk corruption touches word tokens only") {
    Rng rng(16);
    const auto s = seq({1, 4, 5, 6, 2});
    const auto all = corrupt_with_unk(s, 0.999999, rng);
    CHECK(all.ids == std::vector<int>{1, 3, 3, 3, 2});
    CHECK(corrupt_with_unk(s, 0.0, rng).ids == s.ids);
}

TEST_CASE("checkpoint roundtrip restores dims and single-precision weights") {
    JsccModel m(tiny_config(), 17);
    const auto path = std::filesystem::temp_directory_path() / "semtx_jscc.ckpt";
    m.save(path);
    JsccModel back = JsccModel::load(path);
    CHECK(back.config().channel_dim_per_token == 4);
    CHECK(back.config().vocab_size == 12);
    const auto a = m.partition(Partition::delta).flatten();
    const auto b = back.partition(Partition::delta).flatten();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == static_cast<double>(static_cast<float>(a[i])));
}

TEST_CASE("non-finite losses abort with diagnostics") {
    auto cfg = tiny_config();
    JsccModel m(cfg, 18);
    m.partition(Partition::chi).at("out.b").value[0] = std::numeric_limits<double>::quiet_NaN();
    TrainOptions o;
    o.batch_size = 3;
    try {
        train(m, sample_batch(), TrainSchedule::joint(1), o);
        FAIL("expected NonFiniteError");
    } catch (const NonFiniteError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("epoch 1") != std::string::npos);
        CHECK(msg.find("batch 1") != std::string::npos);
        CHECK(msg.find("ce=") != std::string::npos);
    }
}

TEST_CASE("transmission is independent of batch size") {
    auto cfg = tiny_config();
    JsccModel m(cfg, 19);
    const auto vocab = corpus::build_vocabulary({"a b c", "d e f", "g h"}, 1);
    const std::vector<std::string> sent{"a b c", "d e f", "g h", "a d"};
    const auto ch = channel::ChannelConfig::fading(0.9, 3.0, 77);
    std::size_t sym = 0;
    const auto a = transmit_sentences(m, vocab, sent, ch, 1, &sym);
    const auto b = transmit_sentences(m, vocab, sent, ch, 3);
    CHECK(a == b);
    CHECK(sym == 4 * 10);
}
