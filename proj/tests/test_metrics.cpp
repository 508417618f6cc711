#include <doctest.h>

#include <cmath>
#include <random>

#include "semtx/corpus.hpp"
#include "semtx/errors.hpp"
#include "semtx/metrics.hpp"
#include "support/oracles.hpp"

using namespace semtx;
using namespace semtx::metrics;

TEST_CASE("n-gram counts") {
    const Words w{"a", "a", "b"};
    CHECK(ngram_counts(w, 1) == std::map<Ngram, std::size_t>{{{"a"}, 2}, {{"b"}, 1}});
    CHECK(ngram_counts(w, 2) == std::map<Ngram, std::size_t>{{{"a", "a"}, 1}, {{"a", "b"}, 1}});
    CHECK(ngram_counts({"a"}, 2).empty());
}

TEST_CASE("modified precision") {
    const auto p = modified_precision({"a", "a", "b"}, {"a", "b", "c"}, 1);
    CHECK(p.matched == 2);
    CHECK(p.total == 3);
    CHECK(modified_precision({"x", "y"}, {"a", "b"}, 1).value() == 0.0);
    CHECK(modified_precision({"a", "b", "c"}, {"a", "b", "c"}, 3).value() == 1.0);
    CHECK_FALSE(modified_precision({"a"}, {"a", "b"}, 2).defined);
}

TEST_CASE("worked BLEU examples") {
    const BleuWeights uni = BleuWeights::uniform(1);
    CHECK(std::abs(bleu({"a", "a", "b"}, {"a", "b", "c"}, uni) - 2.0 / 3.0) < 1e-9);
    CHECK(std::abs(bleu({"a", "b", "c"}, {"a", "b", "c", "d"}, uni) - std::exp(-1.0 / 3.0)) < 1e-9);
    CHECK(bleu({}, {"a"}) == 0.0);
    CHECK(bleu({"a", "b", "c", "d"}, {"a", "b", "c", "d"}) == 1.0);
}

TEST_CASE("literal brevity flag penalises long candidates instead") {
    const BleuWeights uni = BleuWeights::uniform(1);
    BleuOptions lit;
    lit.literal_brevity = true;
    CHECK(bleu({"a", "b", "c"}, {"a", "b", "c", "d"}, uni, lit) == doctest::Approx(1.0));
    CHECK(std::abs(bleu({"a", "b", "c", "d"}, {"a", "b", "c"}, uni, lit) - 0.75 * std::exp(-1.0 / 3.0)) < 1e-9);
}

TEST_CASE("weights validation") {
    BleuWeights w;
    w.u = {0.5, 0.6};
    CHECK_THROWS_AS(w.validate(), RangeError);
    w.u = {1.5, -0.5};
    CHECK_THROWS_AS(w.validate(), RangeError);
    CHECK_NOTHROW(BleuWeights::uniform(3).validate());
}

TEST_CASE("BLEU agrees with the brute-force oracle on random pairs") {
    std::mt19937_64 gen(99);
    std::uniform_int_distribution<int> len(3, 12), word(0, 9);
    auto draw = [&] {
        Words w(static_cast<std::size_t>(len(gen)));
        for (auto& s : w) s = "w" + std::to_string(word(gen));
        return w;
    };
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Words c = draw(), r = draw();
        worst = std::max(worst, std::abs(bleu(c, r) - oracle::bleu(c, r, {0.25, 0.25, 0.25, 0.25})));
        worst = std::max(worst, std::abs(bleu(c, r, BleuWeights::uniform(2)) - oracle::bleu(c, r, {0.5, 0.5})));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("self BLEU is one on every corpus sentence and scores stay in range") {
    const auto sentences = corpus::load_corpus(SEMTX_DATA_DIR "/captions_200.txt");
    std::mt19937_64 gen(3);
    for (const auto& s : sentences) {
        const Words w = corpus::tokenize(s);
        CHECK(bleu(w, w) == doctest::Approx(1.0).epsilon(1e-12));
        Words shuffled = w;
        std::shuffle(shuffled.begin(), shuffled.end(), gen);
        const double b = bleu(shuffled, w);
        CHECK(b >= 0.0);
        CHECK(b <= 1.0);
    }
}

TEST_CASE("corrupting a matching word never raises unigram BLEU") {
    std::mt19937_64 gen(5);
    std::uniform_int_distribution<int> word(0, 5);
    const BleuWeights uni = BleuWeights::uniform(1);
    for (int t = 0; t < 300; ++t) {
        Words r(8), c(8);
        for (auto& s : r) s = "w" + std::to_string(word(gen));
        for (auto& s : c) s = "w" + std::to_string(word(gen));
        const double before = bleu(c, r, uni);
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (std::find(r.begin(), r.end(), c[i]) == r.end()) continue;
            Words d = c;
            d[i] = "zz";
            CHECK(bleu(d, r, uni) <= before + 1e-15);
        }
    }
}

TEST_CASE("word accuracy") {
    CHECK(word_accuracy({"a", "b"}, {"a", "b"}) == 1.0);
    CHECK(word_accuracy({"x", "y"}, {"a", "b"}) == 0.0);
    CHECK(word_accuracy({"a", "b", "c"}, {"a", "x", "c"}) == doctest::Approx(2.0 / 3.0));
    CHECK(word_accuracy({"a"}, {"a", "b"}) == 0.5);
    CHECK(word_accuracy({}, {}) == 1.0);
}
