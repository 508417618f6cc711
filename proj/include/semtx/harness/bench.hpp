#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semtx/mine.hpp"

namespace semtx::harness {

struct BerPoint {
    double snr_db = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t bit_errors = 0;
    double ber_approx = 0.0;
    double ber() const { return bits == 0 ? 0.0 : static_cast<double>(bit_errors) / static_cast<double>(bits); }
};

/// Uncoded Gray 64-QAM over AWGN. Bits are drawn and sent in chunks so
/// memory stays flat; each SNR point has its own seed derived from `seed`.
std::vector<BerPoint> qam_ber_sweep(const std::vector<double>& snr_points_db, std::uint64_t bits, std::uint64_t seed,
                                    double h = 1.0);
/// Columns: snr_db,bits,bit_errors,ber,ber_approx.
std::string format_ber_csv(const std::vector<BerPoint>& points);

struct MineBenchConfig {
    double rho = 0.9;
    std::size_t batch = 256;
    std::size_t steps = 3000;
    std::size_t eval_samples = 20000;
    double lr = 1e-3;
    std::uint64_t seed = 7;
};

struct MineBenchResult {
    double rho = 0.0;
    double closed_form = 0.0;
    double bound = 0.0;             // on fresh evaluation samples
    std::vector<double> trace;      // training-batch bound every 100 steps
};

/// Trains a MINE critic on scalar pairs (x, rho x + sqrt(1 - rho^2) z) and
/// evaluates the bound on an independent sample.
MineBenchResult mine_benchmark(const MineBenchConfig& cfg);
/// Columns: rho,closed_form,bound,steps,batch.
std::string format_mine_csv(const std::vector<MineBenchResult>& results, const MineBenchConfig& cfg);

} // namespace semtx::harness
