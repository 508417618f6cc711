// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "semtx/channel.hpp"
#include "semtx/classic/huffman.hpp"
#include "semtx/classic/qam.hpp"
#include "semtx/classic/reed_solomon.hpp"
#include "semtx/corpus.hpp"
#include "semtx/harness/bench.hpp"
#include "semtx/harness/config.hpp"
#include "semtx/harness/sweep.hpp"
#include "semtx/jscc/model.hpp"
#include "semtx/metrics.hpp"
#include "semtx/mine.hpp"
#include "semtx/nn/attention.hpp"
#include "semtx/nn/grad_check.hpp"
#include "semtx/nn/layers.hpp"
#include "semtx/nn/transformer.hpp"
#include "semtx/rng.hpp"

namespace fs = std::filesystem;
using namespace semtx;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const fs::path kWork = SEMTX_WORK_DIR;

std::vector<std::string> captions() { return corpus::load_corpus(SEMTX_DATA_DIR "/captions_200.txt"); }

// ---------------------------------------------------------------- 1
Outcome codec() {
    const auto sentences = captions();
    const auto book = harness::build_codebook(sentences);
    std::size_t huff_bad = 0;
    for (const auto& s : sentences) {
        const std::string n = corpus::normalize(s);
        const std::vector<std::uint8_t> bytes(n.begin(), n.end());
        if (book.decode(book.encode(bytes)) != bytes) ++huff_bad;
    }

    const classic::RsParams small{7, 5};
    const std::vector<std::uint8_t> data{17, 0, 255, 3, 128};
    const auto cw = classic::rs_encode(small, data);
    std::size_t small_bad = 0;
    for (int pos = 0; pos < 7; ++pos)
        for (int v = 1; v < 256; ++v) {
            auto r = cw;
            r[pos] ^= static_cast<std::uint8_t>(v);
            const auto d = classic::rs_decode(small, r);
            if (d.failed || d.data != data) ++small_bad;
        }

    const classic::RsParams big{42, 30};
    std::mt19937_64 gen(20240601);
    std::uniform_int_distribution<int> byte(0, 255), nerr(0, 6), nz(1, 255);
    std::size_t big_bad = 0;
    for (int t = 0; t < 10000; ++t) {
        std::vector<std::uint8_t> msg(30);
        for (auto& b : msg) b = static_cast<std::uint8_t>(byte(gen));
        auto r = classic::rs_encode(big, msg);
        std::vector<int> pos(42);
        for (int i = 0; i < 42; ++i) pos[i] = i;
        std::shuffle(pos.begin(), pos.end(), gen);
        const int e = nerr(gen);
        for (int i = 0; i < e; ++i) r[pos[i]] ^= static_cast<std::uint8_t>(nz(gen));
        const auto d = classic::rs_decode(big, r);
        if (d.failed || d.data != msg) ++big_bad;
    }
    return {huff_bad == 0 && small_bad == 0 && big_bad == 0,
            "huffman failures " + std::to_string(huff_bad) + "/" + std::to_string(sentences.size()) +
                ", RS(7,5) single-error failures " + std::to_string(small_bad) + "/1785, RS(42,30) failures " +
                std::to_string(big_bad) + "/10000"};
}

// ---------------------------------------------------------------- 2
Outcome modulation() {
    std::size_t roundtrip_bad = 0;
    for (unsigned s = 0; s < 64; ++s) {
        std::vector<std::uint8_t> bits(6);
        for (int b = 0; b < 6; ++b) bits[b] = (s >> (5 - b)) & 1u;
        const auto m = classic::qam64_modulate(bits);
        if (classic::qam64_demodulate(m.block) != bits) ++roundtrip_bad;
    }
    std::size_t gray_bad = 0;
    for (int level = -7; level < 7; level += 2) {
        const unsigned a = classic::qam64::label_of(level), b = classic::qam64::label_of(level + 2);
        if (std::popcount(a ^ b) != 1) ++gray_bad;
    }
    const auto pts = harness::qam_ber_sweep({18.0}, 12'000'000, 18);
    const double rel = std::abs(pts[0].ber() - pts[0].ber_approx) / pts[0].ber_approx;
    return {roundtrip_bad == 0 && gray_bad == 0 && pts[0].bits >= 10'000'000 && rel <= 0.10,
            "roundtrip failures " + std::to_string(roundtrip_bad) + "/64, gray violations " + std::to_string(gray_bad) +
                ", BER@18dB " + fmt("%.6g", pts[0].ber()) + " vs approx " + fmt("%.6g", pts[0].ber_approx) + " over " +
                std::to_string(pts[0].bits) + " bits (rel " + fmt("%.4f", rel) + ")"};
}

// ---------------------------------------------------------------- 3
Outcome calibration() {
    bool ok = true;
    std::string detail;
    for (double snr : {0.0, 10.0, 20.0}) {
        const auto cfg = channel::ChannelConfig::awgn(snr, derive_seed(1234, static_cast<std::uint64_t>(snr)));
        const channel::SymbolBlock zeros(1'000'000, 0.0);
        const auto y = channel::apply_channel(zeros, cfg);
        double mean = 0, sq = 0;
        for (double v : y) mean += v;
        mean /= static_cast<double>(y.size());
        for (double v : y) sq += (v - mean) * (v - mean);
        const double var = sq / static_cast<double>(y.size() - 1);
        const double s2 = cfg.sigma() * cfg.sigma();
        const double rel = std::abs(var / s2 - 1.0);
        ok = ok && rel < 0.02;
        detail += fmt("var/sigma^2-1 @%gdB ", snr) + fmt("%+.4f", var / s2 - 1.0) + ", ";
    }
    const auto cfg = channel::ChannelConfig::fading(0.9, 7.0, 99);
    channel::SymbolBlock x(2000);
    Rng r(5);
    for (auto& v : x) v = r.normal();
    const bool replay = channel::apply_channel(x, cfg) == channel::apply_channel(x, cfg);
    ok = ok && replay;
    return {ok, detail + "replay " + (replay ? "bit-exact" : "differs")};
}

// ---------------------------------------------------------------- 4
nn::Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double scale = 1.0) {
    nn::Tensor t(std::move(shape));
    for (auto& v : t.values()) v = scale * rng.normal();
    return t;
}

double project(const nn::Tensor& y, const nn::Tensor& r) {
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * r[i];
    return s;
}

Outcome differentiation() {
    const nn::GradCheckOptions opt{1e-5, 400, 1, 1e-6};
    std::map<std::string, double> err;
    std::string worst_attention;
    Rng rng(404);
    {
        nn::ParamSet set("dense");
        auto lin = nn::Linear::create(set, "fc", 6, 5, rng);
        nn::Param& x = set.add("input", random_tensor({4, 6}, rng));
        const auto r = random_tensor({4, 5}, rng);
        err["dense"] = nn::gradient_check(
                           [&](bool g) {
                               if (g) x.grad += lin.backward(x.value, r);
                               return project(lin.forward(x.value), r);
                           },
                           set, opt)
                           .max_rel_error;
    }
    {
        nn::ParamSet set("ln");
        auto ln = nn::LayerNorm::create(set, "ln", 6);
        for (auto& [p, v] : set)
            for (auto& e : v.value.values()) e += 0.3 * rng.normal();
        nn::Param& x = set.add("input", random_tensor({4, 6}, rng, 2.0));
        const auto r = random_tensor({4, 6}, rng);
        err["layernorm"] = nn::gradient_check(
                               [&](bool g) {
                                   nn::LayerNormCache c;
                                   const auto y = ln.forward(x.value, &c);
                                   if (g) x.grad += ln.backward(c, r);
                                   return project(y, r);
                               },
                               set, opt)
                               .max_rel_error;
    }
    {
        nn::ParamSet set("attn");
        auto mha = nn::MultiHeadAttention::create(set, "mha", 8, 2, rng);
        nn::Param& x = set.add("input", random_tensor({8, 8}, rng));
        const auto r = random_tensor({8, 8}, rng);
        const std::vector<std::uint8_t> mask{0, 0, 0, 1, 0, 0, 1, 1};
        const auto rep = nn::gradient_check(
            [&](bool g) {
                nn::AttentionCache c;
                const auto y = mha.forward(x.value, 4, mask, &c);
                if (g) x.grad += mha.backward(c, r);
                return project(y, r);
            },
            set, opt);
        err["attention"] = rep.max_rel_error;
        worst_attention = rep.worst_path + " analytic " + fmt("%.1e", rep.worst_analytic) + " numeric " +
                          fmt("%.1e", rep.worst_numeric);
    }
    {
        nn::ParamSet set("tf");
        auto layer = nn::TransformerLayer::create(set, "layer", 8, 2, 16, rng);
        nn::Param& x = set.add("input", random_tensor({8, 8}, rng));
        const auto r = random_tensor({8, 8}, rng);
        const std::vector<std::uint8_t> mask{0, 0, 0, 1, 0, 0, 1, 1};
        err["transformer"] = nn::gradient_check(
                                 [&](bool g) {
                                     nn::TransformerCache c;
                                     const auto y = layer.forward(x.value, 4, mask, &c);
                                     if (g) x.grad += layer.backward(c, r);
                                     return project(y, r);
                                 },
                                 set, opt)
                                 .max_rel_error;
    }
    {
        jscc::JsccConfig cfg;
        cfg.vocab_size = 12;
        cfg.max_len = 5;
        cfg.model_dim = 8;
        cfg.heads = 2;
        cfg.ff_dim = 12;
        cfg.layers = 2;
        cfg.channel_dim_per_token = 4;
        cfg.channel_hidden = 6;
        cfg.lambda_mi = 0.3;
        jscc::JsccModel m(cfg, 21);
        mine::MineEstimator est({4, 8}, 22);
        auto seq = [](std::vector<int> ids, std::size_t len) {
            corpus::TokenSequence s;
            s.ids = std::move(ids);
            s.true_len = len;
            return s;
        };
        const std::vector<corpus::TokenSequence> seqs{seq({1, 4, 5, 2, 0}, 4), seq({1, 6, 7, 8, 2}, 5)};
        const auto batch = jscc::TokenBatch::from(seqs);
        const auto ch = channel::ChannelConfig::fading(0.9, 6.0);
        auto sets = m.partitions();
        err["jscc total loss"] = nn::gradient_check(
                                     [&](bool g) {
                                         Rng noise(23);
                                         jscc::LossOptions o;
                                         o.with_grad = g;
                                         return jscc::total_loss(m, batch, batch, ch, &est, noise, o).total;
                                     },
                                     sets, {1e-5, 600, 2, 1e-6})
                                     .max_rel_error;
    }
    {
        mine::MineEstimator est({2, 16}, 31);
        nn::ParamSet inputs("inputs");
        nn::Param& x = inputs.add("x", random_tensor({12, 2}, rng));
        nn::Param& y = inputs.add("y", random_tensor({12, 2}, rng));
        const auto perm = rng.cyclic_permutation(12);
        err["mine loss"] = nn::gradient_check(
                               [&](bool g) {
                                   const auto ev = mine::mine_evaluate(est, x.value, y.value, perm, g ? 1.0 : 0.0);
                                   if (g) {
                                       x.grad += ev.dx;
                                       y.grad += ev.dy;
                                   }
                                   return ev.bound;
                               },
                               {&est.params, &inputs}, {1e-5, 1000, 3, 1e-6})
                               .max_rel_error;
    }
    bool ok = true;
    std::string detail = "max rel error:";
    for (const auto& [name, e] : err) {
        ok = ok && e < 1e-4;
        detail += " " + name + " " + fmt("%.2e", e) + ";";
    }
    detail.pop_back();
    return {ok, detail + " (attention worst at " + worst_attention + ")"};
}

// ---------------------------------------------------------------- 5
Outcome mine_bench() {
    harness::MineBenchConfig cfg;
    const auto corr = harness::mine_benchmark(cfg);
    cfg.rho = 0.0;
    const auto indep = harness::mine_benchmark(cfg);
    const double target = -0.5 * std::log(1 - 0.81);
    const bool ok = std::abs(corr.bound - 0.8304) <= 0.1 && std::abs(indep.bound) < 0.1;
    return {ok, "rho=0.9 bound " + fmt("%.4f", corr.bound) + " nats (closed form " + fmt("%.4f", target) +
                    "), independent bound " + fmt("%+.4f", indep.bound) + " nats"};
}

// ---------------------------------------------------------------- 6
double oracle_bleu(const metrics::Words& c, const metrics::Words& r) {
    // brute-force enumeration with linear scans; effective order, 1/(2 count)
    // smoothing, brevity min(1 - |r|/|c|, 0)
    if (c.empty()) return 0.0;
    double logp = 0.0, wsum = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        if (c.size() < n) continue;
        std::size_t total = c.size() - n + 1, matched = 0;
        std::vector<bool> used(r.size() >= n ? r.size() - n + 1 : 0, false);
        for (std::size_t i = 0; i + n <= c.size(); ++i)
            for (std::size_t j = 0; j < used.size(); ++j) {
                if (used[j]) continue;
                if (std::equal(c.begin() + i, c.begin() + i + n, r.begin() + j)) {
                    used[j] = true;
                    ++matched;
                    break;
                }
            }
        const double p = matched == 0 ? 1.0 / (2.0 * total) : double(matched) / double(total);
        logp += 0.25 * std::log(p);
        wsum += 0.25;
    }
    const double bp = std::min(1.0 - double(r.size()) / double(c.size()), 0.0);
    return std::exp(bp + logp / wsum);
}

Outcome bleu() {
    std::size_t self_bad = 0;
    for (const auto& s : captions()) {
        const auto w = corpus::tokenize(s);
        if (std::abs(metrics::bleu(w, w) - 1.0) > 1e-12) ++self_bad;
    }
    std::mt19937_64 gen(66);
    std::uniform_int_distribution<int> len(3, 12), word(0, 9);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        metrics::Words c(len(gen)), r(len(gen));
        for (auto& s : c) s = std::to_string(word(gen));
        for (auto& s : r) s = std::to_string(word(gen));
        worst = std::max(worst, std::abs(metrics::bleu(c, r) - oracle_bleu(c, r)));
    }
    const auto uni = metrics::BleuWeights::uniform(1);
    const double e1 = std::abs(metrics::bleu({"a", "a", "b"}, {"a", "b", "c"}, uni) - 2.0 / 3.0);
    const double e2 = std::abs(metrics::bleu({"a", "b", "c"}, {"a", "b", "c", "d"}, uni) - std::exp(-1.0 / 3.0));
    return {self_bad == 0 && worst <= 1e-9 && e1 <= 1e-9 && e2 <= 1e-9,
            "self-BLEU failures " + std::to_string(self_bad) + ", oracle max diff " + fmt("%.2e", worst) +
                ", 2/3 example err " + fmt("%.1e", e1) + ", brevity example err " + fmt("%.1e", e2)};
}

// ---------------------------------------------------------------- 7-10
struct DeskRun {
    harness::ExperimentConfig cfg;
    harness::SweepResult result;
    std::string csv;
};

harness::ExperimentConfig desk_config() {
    auto cfg = harness::parse_config(SEMTX_DATA_DIR "/../configs/desk.cfg");
    cfg.output = kWork / "desk.csv";
    cfg.checkpoint = (kWork / "desk_seed{seed}.ckpt").string();
    cfg.write_decoded = false;
    return cfg;
}

DeskRun& desk() {
    static DeskRun run = [] {
        DeskRun r;
        r.cfg = desk_config();
        for (auto seed : r.cfg.seeds) fs::remove(r.cfg.checkpoint_for(seed));
        harness::SweepOptions o;
        o.log = &std::cerr;
        r.result = harness::run_sweep(r.cfg, o);
        r.csv = slurp(r.cfg.output);
        return r;
    }();
    return run;
}

double neural_median(const harness::SweepResult& res, const std::string& method, double snr) {
    std::vector<double> v;
    for (const auto& row : res.rows)
        if (row.method == method && row.snr_db == snr) v.push_back(row.bleu1);
    return v.empty() ? std::nan("") : median(v);
}

Outcome training() {
    auto& d = desk();
    std::vector<double> deltas;
    bool frozen = true;
    std::size_t max_epochs = 0;
    std::string detail;
    for (const auto& [seed, tr] : d.result.training) {
        const double first = tr.history.front().total, last = tr.history.back().total;
        deltas.push_back(last - first);
        frozen = frozen && tr.frozen_unchanged;
        for (const auto& e : tr.history) frozen = frozen && e.frozen_unchanged;
        detail += "seed " + std::to_string(seed) + " " + fmt("%.4f", first) + "->" + fmt("%.4f", last) + "; ";
    }
    max_epochs = d.cfg.epochs_per_phase;
    const auto vocab = corpus::build_vocabulary(corpus::load_corpus(d.cfg.train_corpus), d.cfg.min_freq);
    const bool ok = d.result.training.size() == 3 && median(deltas) < 0 && frozen && vocab.size() <= 1000 &&
                    d.cfg.layers == 3 && max_epochs <= 20;
    return {ok, detail + "median delta " + fmt("%.4f", median(deltas)) + ", frozen partitions " +
                    (frozen ? "bit-unchanged" : "CHANGED") + ", vocab " + std::to_string(vocab.size()) +
                    ", epochs/phase " + std::to_string(max_epochs)};
}

Outcome robustness() {
    auto& d = desk();
    const std::vector<double> snrs{0, 3, 6, 9, 12};
    std::vector<double> med;
    std::string detail = "median neural BLEU-1:";
    for (double s : snrs) {
        med.push_back(neural_median(d.result, "neural", s));
        detail += fmt(" %gdB=", s) + fmt("%.4f", med.back());
    }
    bool mono = true;
    for (std::size_t i = 0; i < med.size(); ++i)
        for (std::size_t j = i + 1; j < med.size(); ++j) mono = mono && med[i] <= med[j] + 0.02;
    return {mono && med.back() >= 0.9, detail};
}

Outcome comparison() {
    auto& d = desk();
    bool low = true, high = true;
    std::string detail = "budget classic " + fmt("%.2f", d.result.budget.classic_symbols_mean) + " vs neural " +
                         std::to_string(d.result.budget.neural_symbols_per_sentence) + " symbols/sentence;";
    bool any_low = false, any_high = false;
    for (double s : d.cfg.snr_points_db) {
        const double n = neural_median(d.result, "neural", s), c = neural_median(d.result, "classic", s);
        if (s <= 4) {
            any_low = true;
            low = low && n > c;
            detail += fmt(" %gdB neural ", s) + fmt("%.4f", n) + " classic " + fmt("%.4f", c) + ";";
        }
        if (s >= 16) {
            any_high = true;
            high = high && c >= 0.99;
            detail += fmt(" %gdB classic ", s) + fmt("%.4f", c) + ";";
        }
    }
    detail.pop_back();
    detail += std::string(" | low-SNR ordering ") + (low && any_low ? "holds" : "fails") + ", classic >= 0.99 at >= 16 dB " +
              (high && any_high ? "holds" : "fails");
    return {low && high && any_low && any_high, detail};
}

Outcome reproducibility() {
    auto& d = desk();
    // rerun from the saved checkpoints on more workers
    auto cfg = d.cfg;
    cfg.threads = 4;
    cfg.output = kWork / "desk_rerun.csv";
    harness::run_sweep(cfg);
    const bool csv_same = slurp(cfg.output) == d.csv;

    // retrain one seed from scratch
    auto re = d.cfg;
    re.seeds = {re.seeds.front()};
    re.link = harness::LinkSelection::neural;
    re.output = kWork / "desk_retrain.csv";
    re.checkpoint = (kWork / "retrain_seed{seed}.ckpt").string();
    fs::remove(re.checkpoint_for(re.seeds.front()));
    harness::run_sweep(re);
    const auto seed = re.seeds.front();
    const bool ckpt_same = slurp(re.checkpoint_for(seed)) == slurp(d.cfg.checkpoint_for(seed));
    const bool hist_same = slurp(re.checkpoint_for(seed) + ".history.csv") ==
                           slurp(d.cfg.checkpoint_for(seed) + ".history.csv");
    std::string neural_rows;
    for (const auto& line : [&] {
             std::vector<std::string> v;
             std::istringstream in(d.csv);
             for (std::string l; std::getline(in, l);)
                 if (l.rfind("neural,", 0) == 0 && l.find("," + std::to_string(seed) + ",") != std::string::npos)
                     v.push_back(l);
             return v;
         }())
        neural_rows += line + "\n";
    std::string retrained_rows;
    {
        std::istringstream in(slurp(re.output));
        for (std::string l; std::getline(in, l);)
            if (l.rfind("neural,", 0) == 0) retrained_rows += l + "\n";
    }
    const bool rows_same = neural_rows == retrained_rows && !neural_rows.empty();
    return {csv_same && ckpt_same && hist_same && rows_same,
            std::string("sweep CSV rerun on 4 threads ") + (csv_same ? "byte-identical" : "DIFFERS") +
                ", retrained checkpoint " + (ckpt_same ? "byte-identical" : "DIFFERS") + ", training history " +
                (hist_same ? "byte-identical" : "DIFFERS") + ", retrained sweep rows " +
                (rows_same ? "byte-identical" : "DIFFER")};
}

} // namespace

int main() {
    fs::create_directories(kWork);
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"codec correctness", codec},
        {"modulation", modulation},
        {"channel calibration", calibration},
        {"differentiation", differentiation},
        {"MINE benchmark", mine_bench},
        {"BLEU", bleu},
        {"desk-scale training", training},
        {"noise-robustness trend", robustness},
        {"comparison trend", comparison},
        {"reproducibility", reproducibility},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failed;
        std::cout << "criterion " << (i + 1) << " [" << criteria[i].first << "]: " << (o.pass ? "PASS" : "FAIL")
                  << " (" << fmt("%.1f", secs) << " s) " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed;
}
