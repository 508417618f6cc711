#include "semtx/jscc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "semtx/errors.hpp"

namespace semtx::jscc {

TrainSchedule TrainSchedule::cross_training(std::size_t epochs_per_phase, std::size_t max_rounds, double unk_prob) {
    TrainSchedule s;
    s.round.push_back({"A", {Partition::alpha, Partition::delta}, epochs_per_phase, 0.0});
    s.round.push_back({"B", {Partition::beta, Partition::chi}, epochs_per_phase, unk_prob});
    s.max_rounds = max_rounds;
    return s;
}

TrainSchedule TrainSchedule::joint(std::size_t epochs) {
    TrainSchedule s;
    s.round.push_back({"joint", {Partition::beta, Partition::alpha, Partition::delta, Partition::chi}, epochs, 0.0});
    s.max_rounds = 1;
    return s;
}

corpus::TokenSequence corrupt_with_unk(const corpus::TokenSequence& seq, double p, Rng& rng) {
    corpus::TokenSequence out = seq;
    if (p <= 0.0) return out;
    for (int& id : out.ids)
        if (id >= corpus::kFirstWordId && rng.uniform() < p) id = corpus::kUnkId;
    return out;
}

namespace {

bool contains(const std::vector<Partition>& list, Partition p) {
    return std::find(list.begin(), list.end(), p) != list.end();
}

constexpr Partition kAll[] = {Partition::beta, Partition::alpha, Partition::delta, Partition::chi};

channel::ChannelConfig train_channel(const JsccConfig& cfg, Rng& rng) {
    const double lo = cfg.train_snr_range_db[0];
    const double hi = cfg.train_snr_range_db[1];
    return channel::ChannelConfig::fading(cfg.fading_h, lo + (hi - lo) * rng.uniform());
}

void mine_step(JsccModel& model, mine::MineEstimator& est, const TokenBatch& batch, const channel::ChannelConfig& ch,
               Rng& rng) {
    const nn::Tensor x = model.encode(batch);
    const nn::Tensor y(x.shape(), channel::apply_channel(x.storage(), ch, rng));
    mine::mine_train_step(est, x, y, rng);
}

} // namespace

namespace {

struct TrainState {
    JsccModel& model;
    const std::vector<corpus::TokenSequence>& data;
    const TrainOptions& options;
    mine::MineEstimator& est;
    bool use_mine;
    Rng& rng;
    TrainResult& result;
    std::size_t epoch_counter = 0;
};

// Runs every epoch of one phase and returns the final epoch's mean total loss.
double run_phase(TrainState& st, const Phase& phase, std::size_t round) {
    JsccModel& model = st.model;
    const auto& cfg = model.config();
    const auto& options = st.options;
    Rng& rng = st.rng;
    std::vector<std::pair<Partition, std::vector<double>>> frozen;
    for (Partition p : kAll)
        if (!contains(phase.trainable, p)) frozen.emplace_back(p, model.partition(p).flatten());
    const bool beta_trains = contains(phase.trainable, Partition::beta);
    const std::size_t bs = std::max<std::size_t>(1, options.batch_size);
    double phase_loss = 0.0;

    for (std::size_t e = 0; e < phase.epochs; ++e) {
        const std::size_t epoch = ++st.epoch_counter;
        const auto order = rng.permutation(st.data.size());
        double ce_sum = 0.0, mi_sum = 0.0, total_sum = 0.0, snr_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += bs) {
            const std::size_t end = std::min(order.size(), start + bs);
            std::vector<corpus::TokenSequence> targets;
            std::vector<corpus::TokenSequence> inputs;
            for (std::size_t i = start; i < end; ++i) {
                targets.push_back(st.data[order[i]]);
                inputs.push_back(corrupt_with_unk(st.data[order[i]], phase.unk_prob, rng));
            }
            const TokenBatch tgt = TokenBatch::from(targets);
            const TokenBatch in = TokenBatch::from(inputs);
            const auto ch = train_channel(cfg, rng);

            if (st.use_mine && options.mine_step_before_model) mine_step(model, st.est, in, ch, rng);

            model.zero_grad();
            LossOptions lo;
            lo.with_grad = true;
            lo.semantic_encoder_grad = beta_trains;
            lo.mine_moving_average = options.mine_moving_average;
            const LossBreakdown loss = total_loss(model, in, tgt, ch, st.use_mine ? &st.est : nullptr, rng, lo);
            if (!std::isfinite(loss.total) || !std::isfinite(loss.ce) || !std::isfinite(loss.mi_bound)) {
                std::ostringstream msg;
                msg << "non-finite training loss at epoch " << epoch << " (phase " << phase.name << "), batch "
                    << batches + 1 << ": ce=" << loss.ce << " mi_bound=" << loss.mi_bound << " total=" << loss.total
                    << " snr_db=" << ch.snr_db;
                throw NonFiniteError(msg.str());
            }
            for (Partition p : kAll) {
                if (contains(phase.trainable, p))
                    nn::adam_step(model.partition(p), options.adam);
                else
                    model.partition(p).zero_grad();
            }

            if (st.use_mine && !options.mine_step_before_model) mine_step(model, st.est, in, ch, rng);

            ce_sum += loss.ce;
            mi_sum += loss.mi_bound;
            total_sum += loss.total;
            snr_sum += ch.snr_db;
            ++batches;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.round = round;
        rec.phase = phase.name;
        rec.ce = ce_sum / batches;
        rec.mi_bound = mi_sum / batches;
        rec.total = total_sum / batches;
        rec.snr_db_mean = snr_sum / batches;
        for (const auto& [p, snapshot] : frozen)
            if (model.partition(p).flatten() != snapshot) rec.frozen_unchanged = false;
        st.result.frozen_unchanged = st.result.frozen_unchanged && rec.frozen_unchanged;
        phase_loss = rec.total;
        st.result.history.push_back(rec);
        if (options.on_epoch) options.on_epoch(rec);
    }
    return phase_loss;
}

} // namespace

TrainResult train(JsccModel& model, const std::vector<corpus::TokenSequence>& data, const TrainSchedule& schedule,
                  const TrainOptions& options) {
    if (data.empty()) throw DegenerateInputError("training corpus is empty");
    if (schedule.round.empty()) throw ConfigError("training schedule has no phases");
    const auto& cfg = model.config();
    Rng rng(options.seed);

    mine::MineConfig mcfg = options.mine;
    mcfg.sample_dim = cfg.channel_dim_per_token;
    mine::MineEstimator est(mcfg, derive_seed(options.seed, 0x6d696e65));

    TrainResult result;
    TrainState st{model, data, options, est, cfg.lambda_mi > 0.0, rng, result};
    for (const auto& phase : schedule.warmup) run_phase(st, phase, 0);

    std::vector<double> last_loss(schedule.round.size(), std::numeric_limits<double>::infinity());
    for (std::size_t round = 1; round <= schedule.max_rounds; ++round) {
        bool all_settled = true;
        for (std::size_t pi = 0; pi < schedule.round.size(); ++pi) {
            const double loss = run_phase(st, schedule.round[pi], round);
            if (!(last_loss[pi] - loss < schedule.tolerance)) all_settled = false;
            last_loss[pi] = loss;
        }
        result.rounds = round;
        if (all_settled) {
            result.converged = true;
            break;
        }
    }
    return result;
}

void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "epoch,round,phase,ce,mi_bound,total,snr_db_mean,frozen_unchanged\n";
    char buf[256];
    for (const auto& r : history) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%s,%.6f,%.6f,%.6f,%.6f,%d\n", r.epoch, r.round, r.phase.c_str(), r.ce,
                      r.mi_bound, r.total, r.snr_db_mean, r.frozen_unchanged ? 1 : 0);
        out << buf;
    }
    if (!out) throw IoError("failed writing " + path.string());
}

} // namespace semtx::jscc
