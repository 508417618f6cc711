#include "semtx/harness/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

#include "semtx/errors.hpp"

namespace semtx::harness {

namespace {

constexpr const char* kHeader =
    "method,snr_db,seed,bleu1,bleu2,bleu3,bleu4,word_accuracy,complex_symbols_per_sentence_mean,sentences_failed";

std::string real(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

double parse_real(const std::string& s, std::size_t line) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw FormatError("csv line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& s, std::size_t line) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw FormatError("csv line " + std::to_string(line) + ": bad integer '" + s + "'");
    return v;
}

} // namespace

std::string format_csv(std::vector<SweepRow> rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return std::tie(a.method, a.snr_db, a.seed) < std::tie(b.method, b.snr_db, b.seed);
    });
    std::string out = kHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += r.method + ',' + real(r.snr_db) + ',' + std::to_string(r.seed) + ',' + real(r.bleu1) + ',' +
               real(r.bleu2) + ',' + real(r.bleu3) + ',' + real(r.bleu4) + ',' + real(r.word_accuracy) + ',' +
               real(r.complex_symbols_per_sentence_mean) + ',' + std::to_string(r.sentences_failed) + '\n';
    }
    return out;
}

void emit_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << format_csv(rows);
    if (!out) throw IoError("failed writing " + path.string());
}

std::vector<SweepRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kHeader) throw FormatError("csv header does not match the sweep schema");
    std::vector<SweepRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 10)
            throw FormatError("csv line " + std::to_string(line_no) + ": expected 10 fields, got " +
                              std::to_string(f.size()));
        SweepRow r;
        r.method = f[0];
        r.snr_db = parse_real(f[1], line_no);
        r.seed = parse_uint(f[2], line_no);
        r.bleu1 = parse_real(f[3], line_no);
        r.bleu2 = parse_real(f[4], line_no);
        r.bleu3 = parse_real(f[5], line_no);
        r.bleu4 = parse_real(f[6], line_no);
        r.word_accuracy = parse_real(f[7], line_no);
        r.complex_symbols_per_sentence_mean = parse_real(f[8], line_no);
        r.sentences_failed = parse_uint(f[9], line_no);
        rows.push_back(r);
    }
    return rows;
}

std::vector<SweepRow> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

} // namespace semtx::harness
