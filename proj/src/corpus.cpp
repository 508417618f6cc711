#include "semtx/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "semtx/errors.hpp"

namespace semtx::corpus {

namespace {

const char* const kReserved[] = {"<pad>", "<s>", "</s>", "<unk>"};

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

std::string_view trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

Vocabulary::Vocabulary() {
    for (const char* r : kReserved) add(r);
}

void Vocabulary::add(const std::string& token) {
    const int id = static_cast<int>(id_to_token_.size());
    token_to_id_.emplace(token, id);
    id_to_token_.push_back(token);
}

Vocabulary Vocabulary::from_words(const std::vector<std::string>& words) {
    Vocabulary v;
    for (const auto& w : words) {
        if (w.empty() || v.contains(w)) throw FormatError("duplicate or empty vocabulary word '" + w + "'");
        v.add(w);
    }
    return v;
}

int Vocabulary::id_of(std::string_view token) const {
    auto it = token_to_id_.find(token);
    return it == token_to_id_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::token_of(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size())
        throw RangeError("token id " + std::to_string(id) + " outside vocabulary of size " +
                         std::to_string(id_to_token_.size()));
    return id_to_token_[static_cast<std::size_t>(id)];
}

bool Vocabulary::contains(std::string_view token) const { return token_to_id_.find(token) != token_to_id_.end(); }

std::vector<std::string> Vocabulary::words() const {
    return {id_to_token_.begin() + kFirstWordId, id_to_token_.end()};
}

void Vocabulary::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write vocabulary to " + path.string());
    for (const auto& w : words()) out << w << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read vocabulary " + path.string());
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) words.push_back(line);
    }
    return from_words(words);
}

bool is_valid_utf8(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        std::size_t extra = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            extra = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= text.size()) return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            const auto cc = static_cast<unsigned char>(text[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // overlong forms, surrogates, out of range
        if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000) ||
            (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF)
            return false;
        i += extra + 1;
    }
    return true;
}

std::vector<std::string> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus " + path.string());
    std::vector<std::string> sentences;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!is_valid_utf8(line))
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": invalid UTF-8");
        auto t = trim(line);
        if (!t.empty()) sentences.emplace_back(t);
    }
    if (in.bad()) throw IoError("read failed for " + path.string());
    return sentences;
}

std::vector<std::string> tokenize(std::string_view sentence) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < sentence.size()) {
        while (i < sentence.size() && is_space(static_cast<unsigned char>(sentence[i]))) ++i;
        std::size_t j = i;
        while (j < sentence.size() && !is_space(static_cast<unsigned char>(sentence[j]))) ++j;
        std::string_view word = sentence.substr(i, j - i);
        std::size_t b = 0;
        std::size_t e = word.size();
        while (b < e && std::ispunct(static_cast<unsigned char>(word[b]))) ++b;
        while (e > b && std::ispunct(static_cast<unsigned char>(word[e - 1]))) --e;
        if (e > b) {
            std::string w(word.substr(b, e - b));
            for (auto& ch : w) {
                const auto u = static_cast<unsigned char>(ch);
                if (u < 0x80) ch = static_cast<char>(std::tolower(u));
            }
            out.push_back(std::move(w));
        }
        i = j;
    }
    return out;
}

std::string normalize(std::string_view sentence) {
    std::string out;
    for (const auto& w : tokenize(sentence)) {
        if (!out.empty()) out += ' ';
        out += w;
    }
    return out;
}

Vocabulary build_vocabulary(const std::vector<std::string>& sentences, std::size_t min_freq) {
    std::unordered_map<std::string, std::size_t> freq;
    for (const auto& s : sentences)
        for (auto& w : tokenize(s)) ++freq[std::move(w)];

    std::vector<std::pair<std::string, std::size_t>> ranked;
    for (auto& [w, n] : freq) {
        if (n >= std::max<std::size_t>(min_freq, 1) && w != kReserved[0] && w != kReserved[1] &&
            w != kReserved[2] && w != kReserved[3])
            ranked.emplace_back(w, n);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::vector<std::string> words;
    words.reserve(ranked.size());
    for (auto& [w, n] : ranked) words.push_back(std::move(w));
    return Vocabulary::from_words(words);
}

TokenSequence encode_sentence(const Vocabulary& vocab, std::string_view sentence, std::size_t max_len) {
    if (max_len < 3) throw RangeError("max_len must be at least 3");
    TokenSequence seq;
    seq.ids.assign(max_len, kPadId);
    seq.ids[0] = kStartId;
    const auto words = tokenize(sentence);
    const std::size_t kept = std::min(words.size(), max_len - 2);
    for (std::size_t i = 0; i < kept; ++i) seq.ids[i + 1] = vocab.id_of(words[i]);
    seq.ids[kept + 1] = kEndId;
    seq.true_len = kept + 2;
    return seq;
}

std::string decode_tokens(const Vocabulary& vocab, const std::vector<int>& ids) {
    std::string out;
    for (int id : ids) {
        const std::string& tok = vocab.token_of(id);
        if (id == kEndId) break;
        if (id == kStartId || id == kPadId) continue;
        if (!out.empty()) out += ' ';
        out += tok;
    }
    return out;
}

} // namespace semtx::corpus
