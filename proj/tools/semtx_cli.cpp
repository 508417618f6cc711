// Command-line front end: train, sweep, bleu, channel-bench, mine-bench.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "semtx/corpus.hpp"
#include "semtx/errors.hpp"
#include "semtx/harness/bench.hpp"
#include "semtx/harness/config.hpp"
#include "semtx/harness/sweep.hpp"
#include "semtx/metrics.hpp"

using namespace semtx;

namespace {

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string checkpoint;
    std::size_t threads = 0;
};

harness::ExperimentConfig load(const Common& c) {
    auto cfg = harness::parse_config(c.config);
    if (!c.out.empty()) cfg.output = c.out;
    if (!c.checkpoint.empty()) cfg.checkpoint = c.checkpoint;
    if (c.threads > 0) cfg.threads = c.threads;
    return cfg;
}

int run_train(const Common& c) {
    auto cfg = load(c);
    if (c.seed) cfg.seeds = {*c.seed};
    if (cfg.checkpoint.empty()) throw ConfigError("train needs a checkpoint path (--checkpoint or checkpoint key)");
    const auto train = corpus::load_corpus(cfg.train_corpus);
    const auto eval = corpus::load_corpus(cfg.eval_corpus);
    const auto budget = harness::plan_budget(cfg, train, eval);
    const std::size_t channel_dim = budget.neural_channel_dim;
    std::cerr << "budget: classic " << budget.classic_symbols_mean << " symbols/sentence, neural channel dim "
              << channel_dim << " (" << budget.neural_symbols_per_sentence << " symbols)\n";
    for (auto seed : cfg.seeds) {
        const std::string path = cfg.checkpoint_for(seed);
        if (std::filesystem::exists(path)) std::filesystem::remove(path);
        harness::prepare_neural(cfg, seed, train, channel_dim, &std::cerr);
    }
    return 0;
}

int run_sweep(const Common& c) {
    auto cfg = load(c);
    if (c.seed) cfg.master_seed = *c.seed;
    harness::SweepOptions opts;
    opts.log = &std::cerr;
    const auto res = harness::run_sweep(cfg, opts);
    std::cerr << "budget: classic " << res.budget.classic_symbols_mean << " symbols/sentence, neural "
              << res.budget.neural_symbols_per_sentence << " (channel dim " << res.budget.neural_channel_dim << ")\n";
    std::cerr << "wrote " << cfg.output.string() << "\n";
    return 0;
}

int run_bleu(const std::string& cand_path, const std::string& ref_path, bool literal, const std::string& out) {
    const auto cand = read_lines(cand_path);
    const auto ref = read_lines(ref_path);
    if (cand.size() != ref.size())
        throw FormatError(cand_path + " has " + std::to_string(cand.size()) + " lines but " + ref_path + " has " +
                          std::to_string(ref.size()));
    metrics::BleuOptions opt;
    opt.literal_brevity = literal;
    std::string csv = "line,bleu1,bleu2,bleu3,bleu4,word_accuracy\n";
    double sum[5] = {0, 0, 0, 0, 0};
    char buf[200];
    for (std::size_t i = 0; i < cand.size(); ++i) {
        const auto cw = corpus::tokenize(cand[i]);
        const auto rw = corpus::tokenize(ref[i]);
        double v[5];
        for (std::size_t n = 0; n < 4; ++n)
            v[n] = rw.empty() ? (cw.empty() ? 1.0 : 0.0) : metrics::bleu(cw, rw, metrics::BleuWeights::uniform(n + 1), opt);
        v[4] = metrics::word_accuracy(cw, rw);
        for (int k = 0; k < 5; ++k) sum[k] += v[k];
        std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,%.6f,%.6f\n", i + 1, v[0], v[1], v[2], v[3], v[4]);
        csv += buf;
    }
    const double n = cand.empty() ? 1.0 : static_cast<double>(cand.size());
    std::snprintf(buf, sizeof buf, "mean,%.6f,%.6f,%.6f,%.6f,%.6f\n", sum[0] / n, sum[1] / n, sum[2] / n, sum[3] / n,
                  sum[4] / n);
    csv += buf;
    write_text(out, csv);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semantic and classical text transmission over noisy channels"};
    app.require_subcommand(1);

    Common train_opts;
    auto* train = app.add_subcommand("train", "train JSCC models for the configured seeds");
    train->add_option("--config", train_opts.config, "experiment config")->required()->check(CLI::ExistingFile);
    train->add_option("--seed", train_opts.seed, "train only this seed");
    train->add_option("--checkpoint", train_opts.checkpoint, "checkpoint path ({seed} is substituted)");
    train->add_option("--threads", train_opts.threads, "unused by training; accepted for symmetry");

    Common sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "BLEU vs SNR for the configured links");
    sweep->add_option("--config", sweep_opts.config, "experiment config")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", sweep_opts.out, "output CSV (overrides the config)");
    sweep->add_option("--seed", sweep_opts.seed, "master seed (overrides the config)");
    sweep->add_option("--checkpoint", sweep_opts.checkpoint, "checkpoint path ({seed} is substituted)");
    sweep->add_option("--threads", sweep_opts.threads, "worker threads");

    std::string cand, ref, bleu_out;
    bool literal = false;
    auto* bleu = app.add_subcommand("bleu", "score candidate lines against reference lines");
    bleu->add_option("candidate", cand, "decoded sentences, one per line")->required()->check(CLI::ExistingFile);
    bleu->add_option("reference", ref, "reference sentences, one per line")->required()->check(CLI::ExistingFile);
    bleu->add_option("--out", bleu_out, "per-line CSV (default stdout)");
    bleu->add_flag("--literal-brevity", literal, "use min(1 - l_cand/l_ref, 0) as the brevity term");

    std::vector<double> ber_snrs{0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    std::uint64_t ber_bits = 6000000, ber_seed = 1;
    double ber_h = 1.0;
    std::string ber_out;
    auto* cbench = app.add_subcommand("channel-bench", "uncoded 64-QAM BER against the analytic approximation");
    cbench->add_option("--snr", ber_snrs, "SNR points in dB")->delimiter(',');
    cbench->add_option("--bits", ber_bits, "bits per SNR point");
    cbench->add_option("--seed", ber_seed, "random seed");
    cbench->add_option("--gain", ber_h, "fixed channel gain");
    cbench->add_option("--out", ber_out, "CSV path (default stdout)");

    harness::MineBenchConfig mcfg;
    std::vector<double> rhos{0.0, 0.5, 0.9};
    std::string mine_out;
    auto* mbench = app.add_subcommand("mine-bench", "MINE bound on correlated Gaussians");
    mbench->add_option("--rho", rhos, "correlations")->delimiter(',');
    mbench->add_option("--steps", mcfg.steps, "training steps");
    mbench->add_option("--batch", mcfg.batch, "batch size");
    mbench->add_option("--seed", mcfg.seed, "random seed");
    mbench->add_option("--out", mine_out, "CSV path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return run_train(train_opts);
        if (sweep->parsed()) return run_sweep(sweep_opts);
        if (bleu->parsed()) return run_bleu(cand, ref, literal, bleu_out);
        if (cbench->parsed()) {
            write_text(ber_out, harness::format_ber_csv(harness::qam_ber_sweep(ber_snrs, ber_bits, ber_seed, ber_h)));
            return 0;
        }
        if (mbench->parsed()) {
            std::vector<harness::MineBenchResult> results;
            for (double rho : rhos) {
                auto c = mcfg;
                c.rho = rho;
                results.push_back(harness::mine_benchmark(c));
            }
            write_text(mine_out, harness::format_mine_csv(results, mcfg));
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
