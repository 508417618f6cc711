#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "semtx/channel.hpp"
#include "semtx/classic/huffman.hpp"
#include "semtx/classic/qam.hpp"
#include "semtx/classic/reed_solomon.hpp"
#include "semtx/rng.hpp"

namespace semtx::classic {

struct LinkStats {
    std::size_t complex_symbols = 0;
    std::size_t rs_blocks = 0;
    std::size_t rs_blocks_failed = 0;
    std::size_t rs_symbols_corrected = 0;
    std::size_t bit_errors_pre_rs = 0;  // over all codeword bits
    std::size_t bit_errors_post_rs = 0; // over all payload bits
    std::size_t payload_bits = 0;
    bool corrupted = false; // header or Huffman stream unusable after decoding
};

struct LinkResult {
    std::string decoded;
    LinkStats stats;
};

/// Big-endian bit <-> byte packing; the last byte is zero-padded.
Bytes pack_bits(std::span<const std::uint8_t> bits);
Bits unpack_bytes(std::span<const std::uint8_t> bytes);

/// Builds the RS payload: 16-bit big-endian pad count (in bits) followed by
/// the Huffman stream, zero-padded to a whole number of k-byte blocks.
Bytes frame_payload(std::span<const std::uint8_t> huffman_bits, int k);

/// Complex symbols the link spends on a sentence, independent of noise.
std::size_t classic_symbol_count(const std::string& sentence, const HuffmanCodebook& huff, const RsParams& rs);

/// Huffman -> RS -> 64-QAM -> channel -> back. Residual errors after RS are
/// passed through; an unusable header or Huffman tail sets stats.corrupted
/// and the best-effort prefix is returned. When `debug` is set each stage's
/// bit stream is written as one hex line.
LinkResult classic_transmit_sentence(const std::string& sentence, const HuffmanCodebook& huff, const RsParams& rs,
                                     const channel::ChannelConfig& ch, Rng& rng, std::ostream* debug = nullptr);

} // namespace semtx::classic
