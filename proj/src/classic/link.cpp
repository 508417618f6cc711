#include "semtx/classic/link.hpp"

#include <iomanip>
#include <sstream>

#include "semtx/errors.hpp"

namespace semtx::classic {

namespace {

constexpr std::size_t kHeaderBits = 16;

void dump(std::ostream* out, const char* stage, std::span<const std::uint8_t> bits) {
    if (out == nullptr) return;
    *out << stage << ' ' << bits.size() << ' ';
    const auto bytes = pack_bits(bits);
    std::ostringstream hex;
    hex << std::hex << std::setfill('0');
    for (auto b : bytes) hex << std::setw(2) << static_cast<unsigned>(b);
    *out << hex.str() << '\n';
}

std::size_t count_bit_errors(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) n += (a[i] != b[i]) ? 1 : 0;
    return n;
}

} // namespace

Bytes pack_bits(std::span<const std::uint8_t> bits) {
    Bytes out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] & 1U) out[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
    return out;
}

Bits unpack_bytes(std::span<const std::uint8_t> bytes) {
    Bits out;
    out.reserve(bytes.size() * 8);
    for (auto b : bytes)
        for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((b >> i) & 1U));
    return out;
}

Bytes frame_payload(std::span<const std::uint8_t> huffman_bits, int k) {
    const std::size_t used = kHeaderBits + huffman_bits.size();
    const std::size_t block_bits = static_cast<std::size_t>(k) * 8;
    const std::size_t blocks = std::max<std::size_t>(1, (used + block_bits - 1) / block_bits);
    const std::size_t pad = blocks * block_bits - used;
    if (pad > 0xFFFF) throw CodingError("RS pad count does not fit the 16-bit header");
    Bits bits;
    bits.reserve(blocks * block_bits);
    for (int i = 15; i >= 0; --i) bits.push_back(static_cast<std::uint8_t>((pad >> i) & 1U));
    bits.insert(bits.end(), huffman_bits.begin(), huffman_bits.end());
    bits.resize(blocks * block_bits, 0);
    return pack_bits(bits);
}

std::size_t classic_symbol_count(const std::string& sentence, const HuffmanCodebook& huff, const RsParams& rs) {
    rs.validate();
    const auto hbits = huff.encode({reinterpret_cast<const std::uint8_t*>(sentence.data()), sentence.size()});
    const std::size_t blocks = frame_payload(hbits, rs.k).size() / static_cast<std::size_t>(rs.k);
    const std::size_t coded_bits = blocks * static_cast<std::size_t>(rs.n) * 8;
    return (coded_bits + 5) / 6;
}

LinkResult classic_transmit_sentence(const std::string& sentence, const HuffmanCodebook& huff, const RsParams& rs,
                                     const channel::ChannelConfig& ch, Rng& rng, std::ostream* debug) {
    rs.validate();
    LinkResult result;
    LinkStats& st = result.stats;
    const auto k = static_cast<std::size_t>(rs.k);
    const auto n = static_cast<std::size_t>(rs.n);

    const std::span<const std::uint8_t> source{reinterpret_cast<const std::uint8_t*>(sentence.data()), sentence.size()};
    dump(debug, "source", unpack_bytes(source));
    const Bits hbits = huff.encode(source);
    dump(debug, "huffman", hbits);

    const Bytes payload = frame_payload(hbits, rs.k);
    dump(debug, "payload", unpack_bytes(payload));
    st.rs_blocks = payload.size() / k;
    st.payload_bits = payload.size() * 8;

    Bytes coded;
    coded.reserve(st.rs_blocks * n);
    for (std::size_t b = 0; b < st.rs_blocks; ++b) {
        const auto cw = rs_encode(rs, std::span<const std::uint8_t>(payload).subspan(b * k, k));
        coded.insert(coded.end(), cw.begin(), cw.end());
    }
    const Bits coded_bits = unpack_bytes(coded);
    dump(debug, "codewords", coded_bits);

    const Modulated mod = qam64_modulate(coded_bits);
    st.complex_symbols = mod.block.size() / 2;
    const auto rx = channel::apply_channel(mod.block, ch, rng);
    Bits rx_bits = qam64_demodulate(rx, ch.h);
    rx_bits.resize(coded_bits.size());
    dump(debug, "received", rx_bits);
    st.bit_errors_pre_rs = count_bit_errors(coded_bits, rx_bits);

    const Bytes rx_coded = pack_bits(rx_bits);
    Bytes rx_payload;
    rx_payload.reserve(payload.size());
    for (std::size_t b = 0; b < st.rs_blocks; ++b) {
        const auto dec = rs_decode(rs, std::span<const std::uint8_t>(rx_coded).subspan(b * n, n));
        if (dec.failed) ++st.rs_blocks_failed;
        st.rs_symbols_corrected += static_cast<std::size_t>(dec.corrected);
        rx_payload.insert(rx_payload.end(), dec.data.begin(), dec.data.end());
    }
    const Bits rx_payload_bits = unpack_bytes(rx_payload);
    dump(debug, "decoded_payload", rx_payload_bits);
    st.bit_errors_post_rs = count_bit_errors(unpack_bytes(payload), rx_payload_bits);

    std::size_t pad = 0;
    for (std::size_t i = 0; i < kHeaderBits; ++i) pad = (pad << 1) | rx_payload_bits[i];
    std::size_t stream_bits = rx_payload_bits.size() - kHeaderBits;
    if (pad <= stream_bits) {
        stream_bits -= pad;
    } else {
        st.corrupted = true;
    }
    const std::span<const std::uint8_t> stream(rx_payload_bits.data() + kHeaderBits, stream_bits);

    Bytes out;
    try {
        out = huff.decode(stream);
    } catch (const TruncationError& e) {
        out = e.decoded();
        st.corrupted = true;
    }
    dump(debug, "decoded", unpack_bytes(out));
    result.decoded.assign(out.begin(), out.end());
    return result;
}

} // namespace semtx::classic
