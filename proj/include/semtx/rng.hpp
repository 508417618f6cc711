#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace semtx {

/// Seedable random source with bit-exact output on every platform.
///
/// Bits come from std::mt19937_64, whose algorithm and output sequence are
/// fixed by the C++ standard. The distributions are implemented here rather
/// than taken from <random> because the standard leaves those unspecified:
///  - uniform(): top 53 bits of one draw, scaled by 2^-53, in [0, 1).
///  - normal(): Box-Muller on two uniforms, both outputs used in order.
///  - below(n): rejection sampling on the 64-bit draw, no modulo bias.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    std::uint64_t below(std::uint64_t n);

    /// Uniform random permutation of 0..n-1 (Fisher-Yates).
    std::vector<std::size_t> permutation(std::size_t n);
    /// Uniform random single-cycle permutation (Sattolo); no fixed points for n >= 2.
    std::vector<std::size_t> cyclic_permutation(std::size_t n);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer, used to derive independent seeds from tuples.
std::uint64_t mix64(std::uint64_t x);

/// Hash of a seed tuple: folds each value through mix64.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

} // namespace semtx
