#include "semtx/channel.hpp"

#include <cmath>
#include <string>

#include "semtx/errors.hpp"

namespace semtx::channel {

ChannelConfig ChannelConfig::awgn(double snr_db, std::uint64_t seed) {
    ChannelConfig c;
    c.kind = Kind::awgn;
    c.h = 1.0;
    c.snr_db = snr_db;
    c.seed = seed;
    return c;
}

ChannelConfig ChannelConfig::fading(double h, double snr_db, std::uint64_t seed) {
    ChannelConfig c;
    c.kind = Kind::fixed_fading;
    c.h = h;
    c.snr_db = snr_db;
    c.seed = seed;
    return c;
}

void ChannelConfig::validate() const {
    if (!(h > 0.0)) throw RangeError("channel gain h must be positive, got " + std::to_string(h));
    if (kind == Kind::awgn && h != 1.0) throw RangeError("awgn channel requires h = 1");
}

double ChannelConfig::sigma() const { return noiseless ? 0.0 : noise_sigma(snr_db); }

double average_power(const SymbolBlock& block) {
    if (block.empty()) return 0.0;
    double sum = 0.0;
    for (double v : block) sum += v * v;
    return sum / (static_cast<double>(block.size()) / 2.0);
}

SymbolBlock normalize_power(const SymbolBlock& block) {
    if (block.empty()) throw DegenerateInputError("cannot normalize an empty symbol block");
    if (block.size() % 2 != 0) throw ShapeError("symbol block length must be even");
    const double p = average_power(block);
    if (!(p > 0.0)) throw DegenerateInputError("cannot normalize an all-zero symbol block");
    const double scale = 1.0 / std::sqrt(p);
    SymbolBlock out(block.size());
    for (std::size_t i = 0; i < block.size(); ++i) out[i] = block[i] * scale;
    return out;
}

double noise_sigma(double snr_db) { return std::sqrt(std::pow(10.0, -snr_db / 10.0) / 2.0); }

SymbolBlock apply_channel(const SymbolBlock& block, const ChannelConfig& cfg, Rng& rng) {
    cfg.validate();
    const double sigma = cfg.sigma();
    SymbolBlock out(block.size());
    for (std::size_t i = 0; i < block.size(); ++i) {
        const double n = rng.normal();
        out[i] = cfg.h * block[i] + sigma * n;
    }
    return out;
}

SymbolBlock apply_channel(const SymbolBlock& block, const ChannelConfig& cfg) {
    Rng rng(cfg.seed);
    return apply_channel(block, cfg, rng);
}

const char* to_string(Kind kind) { return kind == Kind::awgn ? "awgn" : "fixed_fading"; }

Kind kind_from_string(const std::string& name) {
    if (name == "awgn") return Kind::awgn;
    if (name == "fixed_fading" || name == "fading") return Kind::fixed_fading;
    throw ConfigError("unknown channel kind '" + name + "'");
}

} // namespace semtx::channel
