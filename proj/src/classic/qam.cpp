#include "semtx/classic/qam.hpp"

#include <algorithm>
#include <cmath>

#include "semtx/errors.hpp"

namespace semtx::classic {

namespace qam64 {

const double kScale = 1.0 / std::sqrt(42.0);

namespace {
constexpr std::array<int, 8> kLevelOfLabel = {-7, -5, -1, -3, +7, +5, +1, +3};
}

int level_of(unsigned label) { return kLevelOfLabel.at(label & 7U); }

unsigned label_of(int level) {
    for (unsigned l = 0; l < 8; ++l)
        if (kLevelOfLabel[l] == level) return l;
    throw RangeError("no 64-QAM label for level " + std::to_string(level));
}

} // namespace qam64

Modulated qam64_modulate(std::span<const std::uint8_t> bits) {
    Modulated out;
    const std::size_t groups = (bits.size() + 5) / 6;
    out.pad_bits = groups * 6 - bits.size();
    out.block.reserve(groups * 2);
    auto bit = [&](std::size_t i) -> unsigned { return i < bits.size() ? (bits[i] & 1U) : 0U; };
    for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t o = g * 6;
        const unsigned li = (bit(o) << 2) | (bit(o + 1) << 1) | bit(o + 2);
        const unsigned lq = (bit(o + 3) << 2) | (bit(o + 4) << 1) | bit(o + 5);
        out.block.push_back(qam64::level_of(li) * qam64::kScale);
        out.block.push_back(qam64::level_of(lq) * qam64::kScale);
    }
    return out;
}

namespace {

int slice(double v) {
    // nearest odd integer in [-7, 7]
    const double r = std::floor(v / 2.0) * 2.0 + 1.0;
    return static_cast<int>(std::clamp(r, -7.0, 7.0));
}

} // namespace

Bits qam64_demodulate(std::span<const double> block, double h) {
    if (block.size() % 2 != 0) throw ShapeError("64-QAM demodulation needs an even number of reals");
    if (!(h > 0.0)) throw RangeError("channel gain must be positive");
    Bits out;
    out.reserve(block.size() * 3);
    for (double v : block) {
        const unsigned label = qam64::label_of(slice(v / h / qam64::kScale));
        out.push_back(static_cast<std::uint8_t>((label >> 2) & 1U));
        out.push_back(static_cast<std::uint8_t>((label >> 1) & 1U));
        out.push_back(static_cast<std::uint8_t>(label & 1U));
    }
    return out;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double qam64_ber_approx(double snr_db) {
    const double snr = std::pow(10.0, snr_db / 10.0);
    return (4.0 / 6.0) * (1.0 - 1.0 / 8.0) * q_function(std::sqrt(3.0 * snr / 63.0));
}

} // namespace semtx::classic
