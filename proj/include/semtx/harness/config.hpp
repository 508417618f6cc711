#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "semtx/channel.hpp"
#include "semtx/classic/reed_solomon.hpp"
#include "semtx/jscc/model.hpp"
#include "semtx/jscc/trainer.hpp"

namespace semtx::harness {

enum class LinkSelection { neural, classic, both };
enum class BudgetMode { matched, free };

const char* to_string(LinkSelection l);
const char* to_string(BudgetMode b);

/// Everything one sweep needs. Keys in the file match the field names.
struct ExperimentConfig {
    std::filesystem::path train_corpus;
    std::filesystem::path eval_corpus; // defaults to train_corpus
    LinkSelection link = LinkSelection::both;
    channel::Kind channel = channel::Kind::fixed_fading;
    double fading_h = 0.9;
    std::vector<double> snr_points_db{0, 3, 6, 9, 12};
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::uint64_t master_seed = 2024;
    classic::RsParams rs{42, 30};
    BudgetMode budget = BudgetMode::matched;
    std::filesystem::path output = "sweep.csv";
    /// "{seed}" is replaced by the seed; an existing file is loaded, a missing
    /// one is trained and written. Empty: always train, never save.
    std::string checkpoint;
    std::size_t threads = 1;
    std::size_t min_freq = 1;
    bool write_decoded = true;

    // model; channel_dim_per_token is only used in free budget mode
    std::size_t max_len = 32;
    std::size_t model_dim = 128;
    std::size_t heads = 8;
    std::size_t ff_dim = 512;
    std::size_t layers = 3;
    std::size_t channel_dim_per_token = 16;
    std::size_t channel_hidden = 256;
    double lambda_mi = 0.05;
    double train_snr_low_db = 5.0;
    double train_snr_high_db = 10.0;

    // training
    std::size_t epochs_per_phase = 10;
    std::size_t max_rounds = 4;
    std::size_t warmup_epochs = 0; // joint epochs before cross-training
    std::size_t batch_size = 16;
    double learning_rate = 1e-3;
    double unk_prob = 0.1;
    bool mine_step_before_model = true;

    /// Throws ConfigError naming the offending field.
    void validate() const;
    channel::ChannelConfig channel_at(double snr_db, std::uint64_t seed) const;
    jscc::JsccConfig model_config(std::size_t vocab_size, std::size_t channel_dim) const;
    jscc::TrainSchedule schedule() const;
    std::string checkpoint_for(std::uint64_t seed) const;
};

/// Flat key = value lines; '#' starts a comment; lists are comma-separated;
/// "inf" is accepted as an SNR. Relative corpus, output and checkpoint paths
/// resolve against the config file's directory. Unknown keys, malformed values and a missing
/// train_corpus raise ConfigError with "path:line" context.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<config>",
                                   const std::filesystem::path& base_dir = {});

} // namespace semtx::harness
