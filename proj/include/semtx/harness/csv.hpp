#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace semtx::harness {

struct SweepRow {
    std::string method; // "neural" or "classic"
    double snr_db = 0.0;
    std::uint64_t seed = 0;
    double bleu1 = 0.0;
    double bleu2 = 0.0;
    double bleu3 = 0.0;
    double bleu4 = 0.0;
    double word_accuracy = 0.0;
    double complex_symbols_per_sentence_mean = 0.0;
    std::size_t sentences_failed = 0;
};

/// Header plus rows sorted by (method, snr_db, seed); reals printed with
/// six decimals, infinite SNR as "inf".
std::string format_csv(std::vector<SweepRow> rows);
void emit_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);
/// Inverse of format_csv. Throws FormatError on a bad header or row.
std::vector<SweepRow> parse_csv(const std::string& text);
std::vector<SweepRow> read_csv(const std::filesystem::path& path);

} // namespace semtx::harness
