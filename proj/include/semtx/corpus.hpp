#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace semtx::corpus {

inline constexpr int kPadId = 0;
inline constexpr int kStartId = 1;
inline constexpr int kEndId = 2;
inline constexpr int kUnkId = 3;
inline constexpr int kFirstWordId = 4;

/// Word-level vocabulary. Ids 0-3 are reserved for pad/start/end/unk; words
/// follow in descending corpus frequency, ties broken lexicographically.
class Vocabulary {
public:
    Vocabulary();

    /// Rebuild from an id-ordered word list (ids 4..). Used when loading a
    /// vocabulary saved next to a checkpoint.
    static Vocabulary from_words(const std::vector<std::string>& words);

    int id_of(std::string_view token) const;
    const std::string& token_of(int id) const;
    std::size_t size() const { return id_to_token_.size(); }
    bool contains(std::string_view token) const;

    int pad_id() const { return kPadId; }
    int start_id() const { return kStartId; }
    int end_id() const { return kEndId; }
    int unk_id() const { return kUnkId; }

    /// Word tokens in id order, reserved markers excluded.
    std::vector<std::string> words() const;

    void save(const std::filesystem::path& path) const;
    static Vocabulary load(const std::filesystem::path& path);

private:
    void add(const std::string& token);

    std::map<std::string, int, std::less<>> token_to_id_;
    std::vector<std::string> id_to_token_;
};

struct TokenSequence {
    std::vector<int> ids;
    std::size_t true_len = 0;
};

/// Lowercase, whitespace-split words with punctuation stripped from both
/// edges of each word. Empty words are dropped.
std::vector<std::string> tokenize(std::string_view sentence);

/// One trimmed string per non-empty line. Throws IoError when the file cannot
/// be read and FormatError (naming the line) on invalid UTF-8.
std::vector<std::string> load_corpus(const std::filesystem::path& path);

Vocabulary build_vocabulary(const std::vector<std::string>& sentences, std::size_t min_freq = 1);

TokenSequence encode_sentence(const Vocabulary& vocab, std::string_view sentence,
                              std::size_t max_len = 32);

std::string decode_tokens(const Vocabulary& vocab, const std::vector<int>& ids);

/// Lowercased, punctuation-stripped, single-space-joined form of a sentence.
std::string normalize(std::string_view sentence);

bool is_valid_utf8(std::string_view text);

} // namespace semtx::corpus
