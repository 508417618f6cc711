#pragma once

// Independent reference implementations used only by the tests. None of
// these share code with the library: they favour the most literal textbook
// formulation over speed.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace oracle {

/// GF(256) product by shift-and-add with reduction by 0x11D.
std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b);
std::uint8_t gf_pow(std::uint8_t a, unsigned e);

/// Systematic RS codeword by polynomial long division of data * x^(n-k)
/// by prod (x - alpha^i), i = 0..n-k-1. Highest-degree coefficient first.
std::vector<std::uint8_t> rs_encode(int n, int k, const std::vector<std::uint8_t>& data);
/// r(alpha^i) for i = 0..parity-1 by Horner evaluation.
std::vector<std::uint8_t> rs_syndromes(const std::vector<std::uint8_t>& word, int parity);

/// Total weighted code length of an optimal prefix code (sum of merged
/// weights of a plain min-heap Huffman construction).
std::uint64_t huffman_cost(const std::vector<std::uint64_t>& weights);

/// Sentence BLEU by explicit n-gram enumeration with linear-scan counting:
/// effective order, 1/(2*count) smoothing of zero precisions, brevity term
/// min(1 - |ref|/|cand|, 0).
double bleu(const std::vector<std::string>& cand, const std::vector<std::string>& ref,
            const std::vector<double>& weights);

/// Multi-head self-attention with explicit loops. x is [rows, d] row-major;
/// weights are [d, d] row-major with y = x W + b convention.
std::vector<double> attention(const std::vector<double>& x, std::size_t rows, std::size_t d, std::size_t heads,
                              std::size_t seq_len, const std::vector<std::uint8_t>& key_mask,
                              const std::vector<double>& wq, const std::vector<double>& bq,
                              const std::vector<double>& wk, const std::vector<double>& bk,
                              const std::vector<double>& wv, const std::vector<double>& bv,
                              const std::vector<double>& wo, const std::vector<double>& bo);

/// Word frequencies by std::map, used to check vocabulary ordering.
std::map<std::string, std::size_t> word_counts(const std::vector<std::string>& sentences);

} // namespace oracle
