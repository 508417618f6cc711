#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace semtx::classic {

/// Arithmetic in GF(2^8) with primitive polynomial x^8+x^4+x^3+x^2+1 (0x11D),
/// generator alpha = 2. Log/antilog tables are built once on first use.
namespace gf256 {
inline constexpr unsigned kPrimitive = 0x11D;
std::uint8_t mul(std::uint8_t a, std::uint8_t b);
std::uint8_t div(std::uint8_t a, std::uint8_t b);
std::uint8_t inv(std::uint8_t a);
std::uint8_t pow_alpha(int e);
} // namespace gf256

/// RS(n, k) over GF(256), shortened from (255, 255-(n-k)). Codewords are
/// systematic: data first, n-k parity symbols last. Array index 0 is the
/// coefficient of x^(n-1). Generator roots are alpha^0 .. alpha^(n-k-1).
struct RsParams {
    int n = 42;
    int k = 30;

    int parity() const { return n - k; }
    int t() const { return (n - k) / 2; }
    /// Throws RangeError unless 0 < k < n <= 255 and t >= 1.
    void validate() const;
};

struct RsDecodeResult {
    std::vector<std::uint8_t> data; // first k symbols, corrected when possible
    int corrected = 0;
    bool failed = false;
};

/// Generator polynomial, highest-degree coefficient first (monic).
std::vector<std::uint8_t> rs_generator(int parity_symbols);

std::vector<std::uint8_t> rs_encode(const RsParams& params, std::span<const std::uint8_t> data);

/// Berlekamp-Massey + Chien search + Forney. On failure the received
/// systematic symbols are returned unchanged with failed = true. A
/// successful decode is always re-checked for a zero syndrome.
RsDecodeResult rs_decode(const RsParams& params, std::span<const std::uint8_t> received);

} // namespace semtx::classic
