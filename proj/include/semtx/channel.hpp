#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semtx/rng.hpp"

namespace semtx::channel {

/// Interleaved (re, im) pairs; length is always even.
using SymbolBlock = std::vector<double>;

enum class Kind { awgn, fixed_fading };

/// Channel y = h*x + n with n ~ N(0, sigma^2) per real dimension.
///
/// SNR is Es/N0 in dB: average complex-symbol energy (1 after
/// normalize_power) over total complex noise variance, so each real
/// dimension carries half the noise power. `noiseless` forces sigma to 0;
/// snr_db = +inf has the same effect.
struct ChannelConfig {
    Kind kind = Kind::awgn;
    double h = 1.0;
    double snr_db = 10.0;
    std::uint64_t seed = 0;
    bool noiseless = false;

    static ChannelConfig awgn(double snr_db, std::uint64_t seed = 0);
    static ChannelConfig fading(double h, double snr_db, std::uint64_t seed = 0);

    /// Throws RangeError when h <= 0 or an AWGN config carries h != 1.
    void validate() const;
    double sigma() const;
};

/// Scales the block to unit average complex-symbol power.
/// Throws DegenerateInputError for empty or all-zero blocks.
SymbolBlock normalize_power(const SymbolBlock& block);

/// Average complex-symbol power, sum(v^2) / (len/2).
double average_power(const SymbolBlock& block);

/// Noise standard deviation per real dimension for unit symbol power:
/// sqrt(10^(-snr_db/10) / 2).
double noise_sigma(double snr_db);

/// Draws noise from `rng`; the draw sequence does not depend on the block
/// contents, only on its length.
SymbolBlock apply_channel(const SymbolBlock& block, const ChannelConfig& cfg, Rng& rng);

/// Convenience overload seeding a fresh Rng from cfg.seed.
SymbolBlock apply_channel(const SymbolBlock& block, const ChannelConfig& cfg);

const char* to_string(Kind kind);
Kind kind_from_string(const std::string& name);

} // namespace semtx::channel
