#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "semtx/classic/huffman.hpp"
#include "semtx/corpus.hpp"
#include "semtx/harness/config.hpp"
#include "semtx/harness/csv.hpp"
#include "semtx/jscc/model.hpp"
#include "semtx/jscc/trainer.hpp"

namespace semtx::harness {

struct BudgetReport {
    double classic_symbols_mean = 0.0; // over eval sentences, from transmitted block lengths
    std::size_t neural_channel_dim = 0;
    std::size_t neural_symbols_per_sentence = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    BudgetReport budget;
    /// Training histories of models trained during this sweep, by seed.
    std::vector<std::pair<std::uint64_t, jscc::TrainResult>> training;
};

struct SweepOptions {
    std::ostream* log = nullptr;
    bool write_files = true; // CSV and decoded text next to cfg.output
};

struct Scores {
    double bleu[4] = {0, 0, 0, 0};
    double word_accuracy = 0.0;
    std::size_t failed = 0; // decoded text differs from the normalised reference
};

/// Mean sentence BLEU-1..4 and word accuracy of `decoded` against the
/// normalised `references`.
Scores score_sentences(const std::vector<std::string>& decoded, const std::vector<std::string>& references);

/// Codebook over the normalised training corpus, smoothed so that every byte
/// value is encodable.
classic::HuffmanCodebook build_codebook(const std::vector<std::string>& train_sentences);

/// Even channel dim putting max_len * c / 2 complex symbols within 10% of
/// `classic_mean`; throws ConfigError when no such value exists.
std::size_t matched_channel_dim(double classic_mean, std::size_t max_len);

/// Classic mean symbols over the normalised eval sentences and the neural
/// channel dim the budget mode implies.
BudgetReport plan_budget(const ExperimentConfig& cfg, const std::vector<std::string>& train,
                         const std::vector<std::string>& eval);

/// Loads the checkpoint for `seed` (refusing a mismatched vocabulary or
/// budget with CompatibilityError) or trains and optionally saves one.
struct NeuralSystem {
    jscc::JsccModel model;
    corpus::Vocabulary vocab;
    std::optional<jscc::TrainResult> training;
};
NeuralSystem prepare_neural(const ExperimentConfig& cfg, std::uint64_t seed, const std::vector<std::string>& train,
                            std::size_t channel_dim, std::ostream* log = nullptr);

/// Every (method, snr, seed) point, run on cfg.threads workers. Point noise
/// is seeded by derive_seed(master_seed, method, snr index, seed index).
SweepResult run_sweep(const ExperimentConfig& cfg, const SweepOptions& options = {});

/// "<out>.decoded.txt" for a single-point sweep, otherwise
/// "<out>.<method>.snr<snr>.seed<seed>.decoded.txt".
std::filesystem::path decoded_path(const std::filesystem::path& out, const std::string& method, double snr_db,
                                   std::uint64_t seed, bool single_point);

} // namespace semtx::harness
