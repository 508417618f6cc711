#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "semtx/channel.hpp"
#include "semtx/classic/huffman.hpp"

namespace semtx::classic {

/// Gray-coded 64-QAM. Each 6-bit group maps its first three bits to the
/// in-phase level and its last three to the quadrature level through
///   000:-7 001:-5 011:-3 010:-1 110:+1 111:+3 101:+5 100:+7
/// and both axes are scaled by 1/sqrt(42) for unit average energy.
namespace qam64 {
inline constexpr int kBitsPerSymbol = 6;
extern const double kScale; // 1/sqrt(42)

/// Level in {-7,...,7} for a 3-bit Gray label (0..7, MSB first).
int level_of(unsigned label);
/// Inverse of level_of for odd levels in [-7, 7].
unsigned label_of(int level);
} // namespace qam64

struct QamSymbol {
    double i = 0.0;
    double q = 0.0;
};

struct Modulated {
    channel::SymbolBlock block;
    std::size_t pad_bits = 0;
};

/// Zero-pads to a multiple of six bits and records the pad count.
Modulated qam64_modulate(std::span<const std::uint8_t> bits);

/// Divides by h, slices each axis to the nearest level, inverts the Gray
/// table. Returns 6 bits per complex symbol (pad bits included).
Bits qam64_demodulate(std::span<const double> block, double h = 1.0);

/// Nearest-neighbour BER approximation (4/6)(1 - 1/8) Q(sqrt(3 snr / 63))
/// for Gray 64-QAM at Es/N0 `snr_db`.
double qam64_ber_approx(double snr_db);

double q_function(double x);

} // namespace semtx::classic
