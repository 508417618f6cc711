#include "semtx/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "semtx/errors.hpp"

namespace semtx::metrics {

BleuWeights BleuWeights::uniform(std::size_t n) {
    if (n == 0) throw RangeError("BLEU order must be positive");
    BleuWeights w;
    w.u.assign(n, 1.0 / static_cast<double>(n));
    return w;
}

void BleuWeights::validate() const {
    if (u.empty()) throw RangeError("BLEU weights are empty");
    double sum = 0.0;
    for (double v : u) {
        if (!(v >= 0.0)) throw RangeError("BLEU weights must be non-negative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw RangeError("BLEU weights must sum to 1");
}

std::map<Ngram, std::size_t> ngram_counts(const Words& tokens, std::size_t n) {
    std::map<Ngram, std::size_t> counts;
    if (n == 0) throw RangeError("n-gram order must be positive");
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
        ++counts[Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i), tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
    return counts;
}

Precision modified_precision(const Words& candidate, const Words& reference, std::size_t n) {
    Precision p;
    if (candidate.size() < n) {
        p.defined = false;
        return p;
    }
    const auto cand = ngram_counts(candidate, n);
    const auto ref = ngram_counts(reference, n);
    for (const auto& [gram, count] : cand) {
        p.total += count;
        auto it = ref.find(gram);
        if (it != ref.end()) p.matched += std::min(count, it->second);
    }
    return p;
}

double bleu(const Words& candidate, const Words& reference, const BleuWeights& weights, const BleuOptions& options) {
    weights.validate();
    if (reference.empty()) throw RangeError("BLEU needs a non-empty reference");
    if (candidate.empty()) return 0.0;

    double weight_used = 0.0;
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= weights.u.size(); ++n) {
        const double u = weights.u[n - 1];
        if (u == 0.0) continue;
        const Precision p = modified_precision(candidate, reference, n);
        if (!p.defined) continue;
        double value = p.value();
        if (p.matched == 0) value = 1.0 / (2.0 * static_cast<double>(p.total));
        log_sum += u * std::log(value);
        weight_used += u;
    }
    if (weight_used > 0.0) log_sum /= weight_used;

    const double lc = static_cast<double>(candidate.size());
    const double lr = static_cast<double>(reference.size());
    const double brevity = options.literal_brevity ? std::min(1.0 - lc / lr, 0.0) : std::min(1.0 - lr / lc, 0.0);
    return std::clamp(std::exp(brevity + log_sum), 0.0, 1.0);
}

double word_accuracy(const Words& candidate, const Words& reference) {
    const std::size_t longest = std::max(candidate.size(), reference.size());
    if (longest == 0) return 1.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min(candidate.size(), reference.size()); ++i)
        hits += candidate[i] == reference[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(longest);
}

} // namespace semtx::metrics
