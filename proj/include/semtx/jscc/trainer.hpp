#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "semtx/corpus.hpp"
#include "semtx/jscc/model.hpp"
#include "semtx/mine.hpp"
#include "semtx/nn/adam.hpp"

namespace semtx::jscc {

struct Phase {
    std::string name;
    std::vector<Partition> trainable; // everything else is frozen
    std::size_t epochs = 1;
    double unk_prob = 0.0; // input word tokens replaced by unk with this probability
};

struct TrainSchedule {
    std::vector<Phase> warmup; // run once, before the first round
    std::vector<Phase> round;  // phases run in order, once per round
    std::size_t max_rounds = 4;
    /// Stop once every phase's final-epoch loss improves by less than this
    /// between consecutive rounds.
    double tolerance = 1e-3;

    /// Phase A trains {alpha, delta}; phase B trains {beta, chi} with unk noise.
    static TrainSchedule cross_training(std::size_t epochs_per_phase, std::size_t max_rounds, double unk_prob = 0.1);
    /// One phase training all four partitions.
    static TrainSchedule joint(std::size_t epochs);
};

struct TrainOptions {
    std::size_t batch_size = 16;
    nn::AdamConfig adam{1e-3, 0.9, 0.999, 1e-8};
    std::uint64_t seed = 1;
    mine::MineConfig mine{};
    /// MINE takes one ascent step per batch, before the codec step (true) or
    /// after it on freshly encoded symbols (false).
    bool mine_step_before_model = true;
    bool mine_moving_average = false;
    /// Called after every epoch; may be empty.
    std::function<void(const struct EpochRecord&)> on_epoch;
};

struct EpochRecord {
    std::size_t epoch = 0; // 1-based, global across phases
    std::size_t round = 0; // 1-based
    std::string phase;
    double ce = 0.0;       // batch means
    double mi_bound = 0.0;
    double total = 0.0;
    double snr_db_mean = 0.0;
    bool frozen_unchanged = true;
};

struct TrainResult {
    std::vector<EpochRecord> history;
    std::size_t rounds = 0;
    bool converged = false;
    bool frozen_unchanged = true;
};

/// Cross-trains `model` on the encoded corpus over the fixed-gain fading
/// channel with per-batch SNR drawn uniformly from the configured range.
/// Throws NonFiniteError (epoch, batch and loss parts in the message) when a
/// loss turns non-finite.
TrainResult train(JsccModel& model, const std::vector<corpus::TokenSequence>& data, const TrainSchedule& schedule,
                  const TrainOptions& options = {});

/// Columns: epoch,round,phase,ce,mi_bound,total,snr_db_mean,frozen_unchanged.
void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history);

/// Replaces word tokens (not markers or padding) by unk with probability p.
corpus::TokenSequence corrupt_with_unk(const corpus::TokenSequence& seq, double p, Rng& rng);

} // namespace semtx::jscc
