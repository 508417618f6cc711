#include "semtx/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "semtx/errors.hpp"

namespace semtx::harness {

const char* to_string(LinkSelection l) {
    switch (l) {
    case LinkSelection::neural: return "neural";
    case LinkSelection::classic: return "classic";
    case LinkSelection::both: return "both";
    }
    return "?";
}

const char* to_string(BudgetMode b) { return b == BudgetMode::matched ? "matched" : "free"; }

void ExperimentConfig::validate() const {
    if (train_corpus.empty()) throw ConfigError("missing required key train_corpus");
    if (snr_points_db.empty()) throw ConfigError("snr_points_db must not be empty");
    if (seeds.empty()) throw ConfigError("seeds must not be empty");
    rs.validate();
    if (!(fading_h > 0.0)) throw ConfigError("fading_h must be positive");
    if (threads == 0) throw ConfigError("threads must be at least 1");
    if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (unk_prob < 0.0 || unk_prob >= 1.0) throw ConfigError("unk_prob must lie in [0, 1)");
    if (train_snr_low_db > train_snr_high_db) throw ConfigError("train_snr_low_db exceeds train_snr_high_db");
    model_config(corpus::kFirstWordId + 1, budget == BudgetMode::free ? channel_dim_per_token : 2).validate();
}

channel::ChannelConfig ExperimentConfig::channel_at(double snr_db, std::uint64_t seed) const {
    channel::ChannelConfig c = channel == channel::Kind::awgn ? channel::ChannelConfig::awgn(snr_db, seed)
                                                               : channel::ChannelConfig::fading(fading_h, snr_db, seed);
    if (std::isinf(snr_db) && snr_db > 0) c.noiseless = true;
    return c;
}

jscc::JsccConfig ExperimentConfig::model_config(std::size_t vocab_size, std::size_t channel_dim) const {
    jscc::JsccConfig m;
    m.vocab_size = vocab_size;
    m.max_len = max_len;
    m.model_dim = model_dim;
    m.heads = heads;
    m.ff_dim = ff_dim;
    m.layers = layers;
    m.channel_dim_per_token = channel_dim;
    m.channel_hidden = channel_hidden;
    m.lambda_mi = lambda_mi;
    m.train_snr_range_db = {train_snr_low_db, train_snr_high_db};
    m.fading_h = channel == channel::Kind::awgn ? 1.0 : fading_h;
    return m;
}

jscc::TrainSchedule ExperimentConfig::schedule() const {
    auto s = jscc::TrainSchedule::cross_training(epochs_per_phase, max_rounds, unk_prob);
    if (warmup_epochs > 0) {
        jscc::Phase warm{"warmup",
                         {jscc::Partition::beta, jscc::Partition::alpha, jscc::Partition::delta, jscc::Partition::chi},
                         warmup_epochs,
                         0.0};
        s.warmup.push_back(warm);
    }
    return s;
}

std::string ExperimentConfig::checkpoint_for(std::uint64_t seed) const {
    std::string out = checkpoint;
    const std::string key = "{seed}";
    for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key))
        out.replace(pos, key.size(), std::to_string(seed));
    return out;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("empty list element");
        out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& v) {
    if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
    double out = 0.0;
    const auto* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || p != end || !std::isfinite(out)) throw ConfigError("expected a number, got '" + v + "'");
    return out;
}

std::uint64_t parse_u64(const std::string& v) {
    std::uint64_t out = 0;
    const auto* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || p != end) throw ConfigError("expected a non-negative integer, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("expected true or false, got '" + v + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::filesystem::path&)>;

std::filesystem::path resolve(const std::string& v, const std::filesystem::path& base) {
    std::filesystem::path p(v);
    return p.is_relative() && !base.empty() ? (base / p).lexically_normal() : p;
}

const std::map<std::string, Setter>& setters() {
    auto size = [](std::size_t ExperimentConfig::*field) -> Setter {
        return [field](ExperimentConfig& c, const std::string& v, const auto&) { c.*field = parse_u64(v); };
    };
    auto real = [](double ExperimentConfig::*field) -> Setter {
        return [field](ExperimentConfig& c, const std::string& v, const auto&) { c.*field = parse_double(v); };
    };
    auto flag = [](bool ExperimentConfig::*field) -> Setter {
        return [field](ExperimentConfig& c, const std::string& v, const auto&) { c.*field = parse_bool(v); };
    };
    static const std::map<std::string, Setter> table = {
        {"train_corpus", [](auto& c, const auto& v, const auto& b) { c.train_corpus = resolve(v, b); }},
        {"eval_corpus", [](auto& c, const auto& v, const auto& b) { c.eval_corpus = resolve(v, b); }},
        {"link",
         [](auto& c, const auto& v, const auto&) {
             if (v == "neural") c.link = LinkSelection::neural;
             else if (v == "classic") c.link = LinkSelection::classic;
             else if (v == "both") c.link = LinkSelection::both;
             else throw ConfigError("link must be neural, classic or both, got '" + v + "'");
         }},
        {"channel", [](auto& c, const auto& v, const auto&) { c.channel = channel::kind_from_string(v); }},
        {"fading_h", real(&ExperimentConfig::fading_h)},
        {"snr_points_db",
         [](auto& c, const auto& v, const auto&) {
             c.snr_points_db.clear();
             for (const auto& item : split_list(v)) c.snr_points_db.push_back(parse_double(item));
         }},
        {"seeds",
         [](auto& c, const auto& v, const auto&) {
             c.seeds.clear();
             for (const auto& item : split_list(v)) c.seeds.push_back(parse_u64(item));
         }},
        {"master_seed", [](auto& c, const auto& v, const auto&) { c.master_seed = parse_u64(v); }},
        {"rs_n", [](auto& c, const auto& v, const auto&) { c.rs.n = static_cast<int>(parse_u64(v)); }},
        {"rs_k", [](auto& c, const auto& v, const auto&) { c.rs.k = static_cast<int>(parse_u64(v)); }},
        {"budget",
         [](auto& c, const auto& v, const auto&) {
             if (v == "matched") c.budget = BudgetMode::matched;
             else if (v == "free") c.budget = BudgetMode::free;
             else throw ConfigError("budget must be matched or free, got '" + v + "'");
         }},
        {"output", [](auto& c, const auto& v, const auto& b) { c.output = resolve(v, b); }},
        {"checkpoint", [](auto& c, const auto& v, const auto& b) { c.checkpoint = v.empty() ? v : resolve(v, b).string(); }},
        {"threads", size(&ExperimentConfig::threads)},
        {"min_freq", size(&ExperimentConfig::min_freq)},
        {"write_decoded", flag(&ExperimentConfig::write_decoded)},
        {"max_len", size(&ExperimentConfig::max_len)},
        {"model_dim", size(&ExperimentConfig::model_dim)},
        {"heads", size(&ExperimentConfig::heads)},
        {"ff_dim", size(&ExperimentConfig::ff_dim)},
        {"layers", size(&ExperimentConfig::layers)},
        {"channel_dim_per_token", size(&ExperimentConfig::channel_dim_per_token)},
        {"channel_hidden", size(&ExperimentConfig::channel_hidden)},
        {"lambda_mi", real(&ExperimentConfig::lambda_mi)},
        {"train_snr_low_db", real(&ExperimentConfig::train_snr_low_db)},
        {"train_snr_high_db", real(&ExperimentConfig::train_snr_high_db)},
        {"epochs_per_phase", size(&ExperimentConfig::epochs_per_phase)},
        {"max_rounds", size(&ExperimentConfig::max_rounds)},
        {"warmup_epochs", size(&ExperimentConfig::warmup_epochs)},
        {"batch_size", size(&ExperimentConfig::batch_size)},
        {"learning_rate", real(&ExperimentConfig::learning_rate)},
        {"unk_prob", real(&ExperimentConfig::unk_prob)},
        {"mine_step_before_model", flag(&ExperimentConfig::mine_step_before_model)},
    };
    return table;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin,
                                   const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(line_no) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError(where + "unknown key '" + key + "'");
        if (value.empty()) throw ConfigError(where + "empty value for '" + key + "'");
        try {
            it->second(cfg, value, base_dir);
        } catch (const Error& e) {
            throw ConfigError(where + key + ": " + e.what());
        }
    }
    if (cfg.eval_corpus.empty()) cfg.eval_corpus = cfg.train_corpus;
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string(), path.parent_path());
}

} // namespace semtx::harness
