#pragma once

#include <map>
#include <string>
#include <vector>

namespace semtx::metrics {

using Words = std::vector<std::string>;
using Ngram = std::vector<std::string>;

struct BleuWeights {
    std::vector<double> u{0.25, 0.25, 0.25, 0.25};

    /// Uniform weights over orders 1..n (cumulative BLEU-n).
    static BleuWeights uniform(std::size_t n);
    /// Throws RangeError unless weights are non-negative and sum to 1.
    void validate() const;
};

struct BleuOptions {
    /// Use min(1 - l_cand/l_ref, 0) as the brevity term instead of the
    /// standard min(1 - l_ref/l_cand, 0).
    bool literal_brevity = false;
};

std::map<Ngram, std::size_t> ngram_counts(const Words& tokens, std::size_t n);

struct Precision {
    std::size_t matched = 0; // clipped matches
    std::size_t total = 0;   // candidate n-grams
    bool defined = true;     // false when the candidate has fewer than n words
    double value() const { return total == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(total); }
};

Precision modified_precision(const Words& candidate, const Words& reference, std::size_t n);

/// Sentence BLEU:
///   exp(min(1 - |ref|/|cand|, 0) + sum_n u_n ln p_n)
/// Orders for which the candidate has no n-grams are skipped and the
/// remaining weights renormalised (effective order). A zero p_n is replaced
/// by 1 / (2 * candidate n-gram count). An empty candidate scores 0.
double bleu(const Words& candidate, const Words& reference, const BleuWeights& weights = {},
            const BleuOptions& options = {});

/// Positional matches over the longer length; two empty sequences score 1.
double word_accuracy(const Words& candidate, const Words& reference);

} // namespace semtx::metrics
