#include "semtx/harness/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "semtx/channel.hpp"
#include "semtx/classic/qam.hpp"
#include "semtx/errors.hpp"

namespace semtx::harness {

std::vector<BerPoint> qam_ber_sweep(const std::vector<double>& snr_points_db, std::uint64_t bits, std::uint64_t seed,
                                    double h) {
    constexpr std::uint64_t kChunk = 6 * 65536;
    std::vector<BerPoint> out;
    for (std::size_t i = 0; i < snr_points_db.size(); ++i) {
        BerPoint p;
        p.snr_db = snr_points_db[i];
        p.ber_approx = classic::qam64_ber_approx(p.snr_db);
        Rng rng(derive_seed(seed, i));
        const auto ch = h == 1.0 ? channel::ChannelConfig::awgn(p.snr_db) : channel::ChannelConfig::fading(h, p.snr_db);
        classic::Bits chunk;
        for (std::uint64_t sent = 0; sent < bits; sent += chunk.size()) {
            const std::uint64_t n = std::min<std::uint64_t>(kChunk, bits - sent);
            chunk.resize(n);
            for (auto& b : chunk) b = static_cast<std::uint8_t>(rng.next_u64() >> 63);
            const auto mod = classic::qam64_modulate(chunk);
            const auto rx = channel::apply_channel(mod.block, ch, rng);
            const auto demod = classic::qam64_demodulate(rx, h);
            for (std::size_t k = 0; k < n; ++k) p.bit_errors += demod[k] != chunk[k];
        }
        p.bits = bits;
        out.push_back(p);
    }
    return out;
}

std::string format_ber_csv(const std::vector<BerPoint>& points) {
    std::string out = "snr_db,bits,bit_errors,ber,ber_approx\n";
    char buf[200];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%.6f,%llu,%llu,%.9f,%.9f\n", p.snr_db, static_cast<unsigned long long>(p.bits),
                      static_cast<unsigned long long>(p.bit_errors), p.ber(), p.ber_approx);
        out += buf;
    }
    return out;
}

namespace {

void gaussian_pairs(double rho, std::size_t n, Rng& rng, nn::Tensor& x, nn::Tensor& y) {
    x = nn::Tensor({n, 1});
    y = nn::Tensor({n, 1});
    const double c = std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.normal();
        const double z = rng.normal();
        x[i] = a;
        y[i] = rho * a + c * z;
    }
}

} // namespace

MineBenchResult mine_benchmark(const MineBenchConfig& cfg) {
    if (!(std::abs(cfg.rho) < 1.0)) throw RangeError("rho must lie in (-1, 1)");
    if (cfg.batch < 2 || cfg.eval_samples < 2) throw RangeError("MINE benchmark needs at least two samples");
    mine::MineConfig mc;
    mc.sample_dim = 1;
    mc.adam.lr = cfg.lr;
    mine::MineEstimator est(mc, derive_seed(cfg.seed, 1));
    Rng rng(derive_seed(cfg.seed, 2));
    MineBenchResult res;
    res.rho = cfg.rho;
    res.closed_form = mine::gaussian_mutual_information(cfg.rho);
    nn::Tensor x, y;
    for (std::size_t step = 0; step < cfg.steps; ++step) {
        gaussian_pairs(cfg.rho, cfg.batch, rng, x, y);
        const double b = mine::mine_train_step(est, x, y, rng);
        if (step % 100 == 0) res.trace.push_back(b);
    }
    Rng eval_rng(derive_seed(cfg.seed, 3));
    gaussian_pairs(cfg.rho, cfg.eval_samples, eval_rng, x, y);
    const auto perm = eval_rng.cyclic_permutation(cfg.eval_samples);
    res.bound = mine::mine_lower_bound(est, mine::joint_pairs(x, y), mine::marginal_pairs(x, y, perm));
    return res;
}

std::string format_mine_csv(const std::vector<MineBenchResult>& results, const MineBenchConfig& cfg) {
    std::string out = "rho,closed_form,bound,steps,batch\n";
    char buf[200];
    for (const auto& r : results) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%zu,%zu\n", r.rho, r.closed_form, r.bound, cfg.steps, cfg.batch);
        out += buf;
    }
    return out;
}

} // namespace semtx::harness
