#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace semtx::classic {

using Bits = std::vector<std::uint8_t>; // one bit per element, values 0/1
using Bytes = std::vector<std::uint8_t>;

/// Canonical Huffman code over byte symbols.
///
/// Lengths come from the classic two-queue merge with ties broken by the
/// smallest symbol contained in each subtree, so the book is a pure function
/// of the frequency table. Codes are then reassigned canonically: sorted by
/// (length, symbol), consecutive integers, left-shifted on length increase.
class HuffmanCodebook {
public:
    struct Code {
        std::uint64_t bits = 0; // MSB-first, right-aligned
        unsigned length = 0;    // 0 means the symbol is not in the book
    };

    static HuffmanCodebook from_lengths(const std::array<unsigned, 256>& lengths);

    const Code& code(std::uint8_t symbol) const { return codes_[symbol]; }
    bool contains(std::uint8_t symbol) const { return codes_[symbol].length != 0; }
    std::size_t symbol_count() const;
    bool canonical() const { return true; }
    unsigned max_length() const;

    /// Sum of 2^-len over present symbols.
    double kraft_sum() const;

    Bits encode(std::span<const std::uint8_t> data) const;
    /// Throws TruncationError (carrying the decoded prefix) when the stream
    /// ends inside a code word or hits a prefix no code starts with.
    Bytes decode(std::span<const std::uint8_t> bits) const;

private:
    std::array<Code, 256> codes_{};
    // decode table: (length, code) -> symbol
    std::map<std::pair<unsigned, std::uint64_t>, std::uint8_t> lookup_;
};

/// Builds an optimal prefix code. `freqs` maps byte -> positive count;
/// throws DegenerateInputError with fewer than two symbols.
HuffmanCodebook huffman_build(const std::map<std::uint8_t, std::uint64_t>& freqs);

inline Bits huffman_encode(const HuffmanCodebook& book, std::span<const std::uint8_t> data) { return book.encode(data); }
inline Bytes huffman_decode(const HuffmanCodebook& book, std::span<const std::uint8_t> bits) { return book.decode(bits); }

/// Byte frequencies of a text corpus, optionally add-one smoothed over all 256 values.
std::map<std::uint8_t, std::uint64_t> byte_frequencies(const std::vector<std::string>& sentences, bool smooth_all_bytes);

} // namespace semtx::classic
