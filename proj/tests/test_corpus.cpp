#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "semtx/corpus.hpp"
#include "semtx/errors.hpp"

using namespace semtx;
using namespace semtx::corpus;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / ("semtx_corpus_" + name);
    std::ofstream(path, std::ios::binary) << content;
    return path;
}

} // namespace

TEST_CASE("load_corpus keeps non-empty trimmed lines in order") {
    const auto p = write_temp("basic.txt", "a man smiling\n\n  a woman with glasses \n");
    const auto s = load_corpus(p);
    REQUIRE(s.size() == 2);
    CHECK(s[0] == "a man smiling");
    CHECK(s[1] == "a woman with glasses");
    CHECK(load_corpus(write_temp("empty.txt", "")).empty());
}

TEST_CASE("load_corpus errors") {
    CHECK_THROWS_AS(load_corpus("/nonexistent/semtx/corpus.txt"), IoError);
    const auto p = write_temp("bad.txt", "fine line\nbad \xff byte\n");
    try {
        load_corpus(p);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
}

TEST_CASE("the caption corpus loads 200 sentences") {
    const auto s = load_corpus(std::filesystem::path(SEMTX_DATA_DIR) / "captions_200.txt");
    CHECK(s.size() == 200);
}

TEST_CASE("tokenize lowercases and strips edge punctuation") {
    const auto t = tokenize("  A Man, smiling!  (at) the-camera ");
    const std::vector<std::string> expect{"a", "man", "smiling", "at", "the-camera"};
    CHECK(t == expect);
    CHECK(tokenize("").empty());
    CHECK(tokenize("... ,").empty());
}

TEST_CASE("build_vocabulary id assignment") {
    const std::vector<std::string> s{"a b", "a c"};
    const auto v = build_vocabulary(s, 1);
    CHECK(v.size() == 7);
    CHECK(v.id_of("a") == 4);
    CHECK(v.id_of("b") == 5);
    CHECK(v.id_of("c") == 6);
    const auto v2 = build_vocabulary(s, 2);
    CHECK(v2.size() == 5);
    CHECK(v2.id_of("b") == kUnkId);
    CHECK(build_vocabulary(s, 1).words() == v.words());
}

TEST_CASE("vocabulary order matches an independent frequency count") {
    const auto sentences = load_corpus(std::filesystem::path(SEMTX_DATA_DIR) / "captions_200.txt");
    const auto vocab = build_vocabulary(sentences, 1);
    const auto counts = oracle::word_counts(sentences);
    std::vector<std::pair<std::string, std::size_t>> sorted(counts.begin(), counts.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    REQUIRE(vocab.size() == sorted.size() + 4);
    for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(vocab.id_of(sorted[i].first) == static_cast<int>(i + 4));
    for (std::size_t id = 0; id < vocab.size(); ++id)
        CHECK(vocab.id_of(vocab.token_of(static_cast<int>(id))) == static_cast<int>(id));
}

TEST_CASE("encode_sentence construction rules") {
    const auto v = build_vocabulary({"a b", "a c"}, 1);
    const int a = v.id_of("a"), b = v.id_of("b");
    auto t = encode_sentence(v, "a b", 6);
    CHECK(t.ids == std::vector<int>{kStartId, a, b, kEndId, kPadId, kPadId});
    CHECK(t.true_len == 4);
    t = encode_sentence(v, "a zzz", 6);
    CHECK(t.ids == std::vector<int>{kStartId, a, kUnkId, kEndId, kPadId, kPadId});
    t = encode_sentence(v, "a b c a b c a b c a", 6);
    CHECK(t.ids.size() == 6);
    CHECK(t.true_len == 6);
    CHECK(t.ids[5] == kEndId);
    CHECK(t.ids[4] == a);
    CHECK_THROWS_AS(encode_sentence(v, "a", 2), RangeError);
}

TEST_CASE("decode_tokens") {
    const auto v = build_vocabulary({"a b", "a c"}, 1);
    const int a = v.id_of("a"), b = v.id_of("b");
    CHECK(decode_tokens(v, {kStartId, a, b, kEndId, kPadId}) == "a b");
    CHECK(decode_tokens(v, {kStartId, kEndId}).empty());
    CHECK(decode_tokens(v, {kStartId, a, kUnkId, kEndId, b}) == "a <unk>");
    CHECK_THROWS_AS(decode_tokens(v, {kStartId, 99}), RangeError);
    CHECK_THROWS_AS(decode_tokens(v, {-1}), RangeError);
}

TEST_CASE("roundtrip over the caption corpus") {
    const auto sentences = load_corpus(std::filesystem::path(SEMTX_DATA_DIR) / "captions_200.txt");
    const auto vocab = build_vocabulary(sentences, 1);
    for (const auto& s : sentences) {
        const auto t = encode_sentence(vocab, s, 32);
        CHECK(t.ids[0] == kStartId);
        CHECK(t.ids[t.true_len - 1] == kEndId);
        for (std::size_t i = t.true_len; i < t.ids.size(); ++i) CHECK(t.ids[i] == kPadId);
        CHECK(decode_tokens(vocab, t.ids) == normalize(s));
    }
}

TEST_CASE("vocabulary save and load") {
    const auto v = build_vocabulary({"the cat sat", "the dog"}, 1);
    const auto path = std::filesystem::temp_directory_path() / "semtx_vocab.txt";
    v.save(path);
    const auto w = Vocabulary::load(path);
    CHECK(w.size() == v.size());
    CHECK(w.words() == v.words());
}

TEST_CASE("utf8 validation") {
    CHECK(is_valid_utf8("plain"));
    CHECK(is_valid_utf8("caf\xc3\xa9"));
    CHECK_FALSE(is_valid_utf8("\xc3"));
    CHECK_FALSE(is_valid_utf8("\xe2\x82"));
    CHECK_FALSE(is_valid_utf8("\x80"));
}
