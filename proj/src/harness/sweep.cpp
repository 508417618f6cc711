#include "semtx/harness/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "semtx/classic/link.hpp"
#include "semtx/errors.hpp"
#include "semtx/metrics.hpp"

namespace semtx::harness {

Scores score_sentences(const std::vector<std::string>& decoded, const std::vector<std::string>& references) {
    if (decoded.size() != references.size())
        throw ShapeError("scoring " + std::to_string(decoded.size()) + " decoded against " +
                         std::to_string(references.size()) + " references");
    Scores s;
    if (decoded.empty()) return s;
    metrics::BleuWeights weights[4];
    for (std::size_t n = 0; n < 4; ++n) weights[n] = metrics::BleuWeights::uniform(n + 1);
    for (std::size_t i = 0; i < decoded.size(); ++i) {
        const auto ref = corpus::tokenize(references[i]);
        const auto cand = corpus::tokenize(decoded[i]);
        for (std::size_t n = 0; n < 4; ++n) s.bleu[n] += metrics::bleu(cand, ref, weights[n]);
        s.word_accuracy += metrics::word_accuracy(cand, ref);
        if (corpus::normalize(decoded[i]) != corpus::normalize(references[i])) ++s.failed;
    }
    const double count = static_cast<double>(decoded.size());
    for (double& b : s.bleu) b /= count;
    s.word_accuracy /= count;
    return s;
}

classic::HuffmanCodebook build_codebook(const std::vector<std::string>& train_sentences) {
    std::vector<std::string> norm;
    norm.reserve(train_sentences.size());
    for (const auto& s : train_sentences) norm.push_back(corpus::normalize(s));
    return classic::huffman_build(classic::byte_frequencies(norm, true));
}

std::size_t matched_channel_dim(double classic_mean, std::size_t max_len) {
    const double per_dim = static_cast<double>(max_len) / 2.0; // complex symbols per unit of c
    std::size_t best = 2;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t c = 2; c <= 4096; c += 2) {
        const double err = std::abs(per_dim * static_cast<double>(c) - classic_mean);
        if (err < best_err) {
            best_err = err;
            best = c;
        }
    }
    if (best_err > 0.1 * classic_mean) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "no even channel_dim_per_token puts %zu-token sentences within 10%% of %.2f classic symbols",
                      max_len, classic_mean);
        throw ConfigError(buf);
    }
    return best;
}

BudgetReport plan_budget(const ExperimentConfig& cfg, const std::vector<std::string>& train,
                         const std::vector<std::string>& eval) {
    if (eval.empty()) throw DegenerateInputError("evaluation corpus is empty");
    const auto book = build_codebook(train);
    BudgetReport b;
    double total = 0.0;
    for (const auto& s : eval)
        total += static_cast<double>(classic::classic_symbol_count(corpus::normalize(s), book, cfg.rs));
    b.classic_symbols_mean = total / static_cast<double>(eval.size());
    b.neural_channel_dim = cfg.budget == BudgetMode::matched ? matched_channel_dim(b.classic_symbols_mean, cfg.max_len)
                                                             : cfg.channel_dim_per_token;
    b.neural_symbols_per_sentence = cfg.max_len * b.neural_channel_dim / 2;
    return b;
}

namespace {

void say(std::ostream* log, const std::string& msg) {
    static std::mutex mu;
    if (log == nullptr) return;
    std::lock_guard<std::mutex> lock(mu);
    *log << msg << '\n' << std::flush;
}

std::string dims_of(const jscc::JsccConfig& c) {
    return "vocab=" + std::to_string(c.vocab_size) + " max_len=" + std::to_string(c.max_len) +
           " model_dim=" + std::to_string(c.model_dim) + " heads=" + std::to_string(c.heads) +
           " ff_dim=" + std::to_string(c.ff_dim) + " layers=" + std::to_string(c.layers) +
           " channel_dim=" + std::to_string(c.channel_dim_per_token) + " channel_hidden=" +
           std::to_string(c.channel_hidden);
}

bool same_dims(const jscc::JsccConfig& a, const jscc::JsccConfig& b) {
    return a.vocab_size == b.vocab_size && a.max_len == b.max_len && a.model_dim == b.model_dim &&
           a.heads == b.heads && a.ff_dim == b.ff_dim && a.layers == b.layers &&
           a.channel_dim_per_token == b.channel_dim_per_token && a.channel_hidden == b.channel_hidden;
}

std::string snr_label(double snr) {
    if (std::isinf(snr)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", snr);
    return buf;
}

} // namespace

std::filesystem::path decoded_path(const std::filesystem::path& out, const std::string& method, double snr_db,
                                   std::uint64_t seed, bool single_point) {
    if (single_point) return std::filesystem::path(out.string() + ".decoded.txt");
    return std::filesystem::path(out.string() + "." + method + ".snr" + snr_label(snr_db) + ".seed" +
                                 std::to_string(seed) + ".decoded.txt");
}

NeuralSystem prepare_neural(const ExperimentConfig& cfg, std::uint64_t seed, const std::vector<std::string>& train,
                            std::size_t channel_dim, std::ostream* log) {
    const std::string ckpt = cfg.checkpoint_for(seed);
    const std::filesystem::path vocab_file = ckpt + ".vocab";
    if (!ckpt.empty() && std::filesystem::exists(ckpt)) {
        if (!std::filesystem::exists(vocab_file))
            throw CompatibilityError("checkpoint " + ckpt + " has no vocabulary file " + vocab_file.string());
        corpus::Vocabulary vocab = corpus::Vocabulary::load(vocab_file);
        jscc::JsccModel model = jscc::JsccModel::load(ckpt);
        const auto expected = cfg.model_config(vocab.size(), channel_dim);
        if (!same_dims(model.config(), expected)) {
            std::string msg = "checkpoint " + ckpt + " does not match the experiment: expected " + dims_of(expected) +
                              ", found " + dims_of(model.config());
            if (cfg.budget == BudgetMode::matched && model.config().channel_dim_per_token != channel_dim)
                msg += " (matched budget needs " + std::to_string(expected.symbols_per_sentence()) +
                       " symbols/sentence, checkpoint sends " + std::to_string(model.config().symbols_per_sentence()) +
                       ")";
            throw CompatibilityError(msg);
        }
        say(log, "loaded " + ckpt);
        return NeuralSystem{std::move(model), std::move(vocab), std::nullopt};
    }

    corpus::Vocabulary vocab = corpus::build_vocabulary(train, cfg.min_freq);
    std::vector<corpus::TokenSequence> data;
    data.reserve(train.size());
    for (const auto& s : train) data.push_back(corpus::encode_sentence(vocab, s, cfg.max_len));

    jscc::JsccModel model(cfg.model_config(vocab.size(), channel_dim), derive_seed(cfg.master_seed, seed, 1));
    jscc::TrainOptions opts;
    opts.batch_size = cfg.batch_size;
    opts.adam.lr = cfg.learning_rate;
    opts.seed = derive_seed(cfg.master_seed, seed, 2);
    opts.mine_step_before_model = cfg.mine_step_before_model;
    opts.on_epoch = [&](const jscc::EpochRecord& r) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "seed %llu epoch %zu round %zu phase %s ce %.4f mi %.4f total %.4f",
                      static_cast<unsigned long long>(seed), r.epoch, r.round, r.phase.c_str(), r.ce, r.mi_bound,
                      r.total);
        say(log, buf);
    };
    jscc::TrainResult tr = jscc::train(model, data, cfg.schedule(), opts);
    if (!ckpt.empty()) {
        const auto parent = std::filesystem::path(ckpt).parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);
        model.save(ckpt);
        vocab.save(vocab_file);
        jscc::write_history_csv(ckpt + ".history.csv", tr.history);
        say(log, "saved " + ckpt);
        // evaluate the stored (single precision) weights so later runs that load
        // the checkpoint reproduce this one exactly
        model = jscc::JsccModel::load(ckpt);
    }
    return NeuralSystem{std::move(model), std::move(vocab), std::move(tr)};
}

SweepResult run_sweep(const ExperimentConfig& cfg, const SweepOptions& options) {
    cfg.validate();
    const auto train = corpus::load_corpus(cfg.train_corpus);
    const auto eval = corpus::load_corpus(cfg.eval_corpus);
    if (eval.empty()) throw DegenerateInputError("evaluation corpus " + cfg.eval_corpus.string() + " is empty");
    std::vector<std::string> eval_norm;
    for (const auto& s : eval) eval_norm.push_back(corpus::normalize(s));

    const bool want_neural = cfg.link != LinkSelection::classic;
    const bool want_classic = cfg.link != LinkSelection::neural;
    const classic::HuffmanCodebook book = build_codebook(train);

    SweepResult result;
    result.budget = plan_budget(cfg, train, eval);
    const std::size_t channel_dim = result.budget.neural_channel_dim;

    std::vector<NeuralSystem> systems;
    if (want_neural)
        for (auto seed : cfg.seeds) {
            systems.push_back(prepare_neural(cfg, seed, train, channel_dim, options.log));
            if (systems.back().training) result.training.emplace_back(seed, *systems.back().training);
        }

    struct Task {
        std::string method;
        std::size_t snr_index;
        std::size_t seed_index;
    };
    std::vector<Task> tasks;
    for (const char* method : {"classic", "neural"}) {
        const bool on = std::string(method) == "neural" ? want_neural : want_classic;
        if (!on) continue;
        for (std::size_t si = 0; si < cfg.snr_points_db.size(); ++si)
            for (std::size_t ki = 0; ki < cfg.seeds.size(); ++ki) tasks.push_back({method, si, ki});
    }
    const bool single_point = tasks.size() == 1;

    std::vector<SweepRow> rows(tasks.size());
    std::vector<std::vector<std::string>> decoded(tasks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;

    auto worker = [&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) {
            try {
                const Task& task = tasks[t];
                const double snr = cfg.snr_points_db[task.snr_index];
                const std::uint64_t seed = cfg.seeds[task.seed_index];
                const std::uint64_t method_id = task.method == "neural" ? 1 : 2;
                const auto ch = cfg.channel_at(snr, derive_seed(cfg.master_seed, method_id, task.snr_index, task.seed_index));
                std::size_t symbols = 0;
                std::vector<std::string> out;
                if (task.method == "neural") {
                    const auto& sys = systems[task.seed_index];
                    out = jscc::transmit_sentences(sys.model, sys.vocab, eval_norm, ch, 32, &symbols);
                } else {
                    out.reserve(eval_norm.size());
                    for (std::size_t i = 0; i < eval_norm.size(); ++i) {
                        Rng rng(ch.seed ^ static_cast<std::uint64_t>(i));
                        auto r = classic::classic_transmit_sentence(eval_norm[i], book, cfg.rs, ch, rng);
                        symbols += r.stats.complex_symbols;
                        out.push_back(std::move(r.decoded));
                    }
                }
                const Scores sc = score_sentences(out, eval_norm);
                SweepRow& row = rows[t];
                row.method = task.method;
                row.snr_db = snr;
                row.seed = seed;
                row.bleu1 = sc.bleu[0];
                row.bleu2 = sc.bleu[1];
                row.bleu3 = sc.bleu[2];
                row.bleu4 = sc.bleu[3];
                row.word_accuracy = sc.word_accuracy;
                row.complex_symbols_per_sentence_mean = static_cast<double>(symbols) / static_cast<double>(out.size());
                row.sentences_failed = sc.failed;
                decoded[t] = std::move(out);
                char buf[160];
                std::snprintf(buf, sizeof buf, "%s snr %s seed %llu bleu1 %.4f", task.method.c_str(),
                              snr_label(snr).c_str(), static_cast<unsigned long long>(seed), sc.bleu[0]);
                say(options.log, buf);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next = tasks.size();
            }
        }
    };
    const std::size_t n_threads = std::min(cfg.threads, std::max<std::size_t>(tasks.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    result.rows = rows;
    if (options.write_files) {
        if (cfg.output.has_parent_path()) std::filesystem::create_directories(cfg.output.parent_path());
        emit_csv(result.rows, cfg.output);
        if (cfg.write_decoded)
            for (std::size_t t = 0; t < tasks.size(); ++t) {
                const auto path = decoded_path(cfg.output, rows[t].method, rows[t].snr_db, rows[t].seed, single_point);
                std::ofstream out(path, std::ios::binary);
                if (!out) throw IoError("cannot write " + path.string());
                for (std::string line : decoded[t]) {
                    for (char& ch : line)
                        if (ch == '\n' || ch == '\r') ch = ' ';
                    out << line << '\n';
                }
            }
    }
    return result;
}

} // namespace semtx::harness
