#include "semtx/classic/huffman.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "semtx/errors.hpp"

namespace semtx::classic {

namespace {

struct Node {
    std::uint64_t weight;
    unsigned min_symbol;
    int left = -1;
    int right = -1;
};

bool lighter(const Node& a, const Node& b) {
    return a.weight != b.weight ? a.weight < b.weight : a.min_symbol < b.min_symbol;
}

} // namespace

HuffmanCodebook huffman_build(const std::map<std::uint8_t, std::uint64_t>& freqs) {
    std::vector<Node> nodes;
    for (const auto& [sym, count] : freqs) {
        if (count == 0) continue;
        nodes.push_back({count, sym});
    }
    if (nodes.size() < 2)
        throw DegenerateInputError("Huffman code needs at least two symbols with non-zero count");

    // Two-queue merge: leaves sorted once, internal nodes are produced in
    // non-decreasing weight order so the second queue stays sorted.
    std::vector<int> leaves(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) leaves[i] = static_cast<int>(i);
    std::sort(leaves.begin(), leaves.end(), [&](int a, int b) { return lighter(nodes[a], nodes[b]); });
    std::deque<int> q1(leaves.begin(), leaves.end());
    std::deque<int> q2;

    auto pop_min = [&]() {
        int idx;
        if (q2.empty() || (!q1.empty() && !lighter(nodes[q2.front()], nodes[q1.front()]))) {
            idx = q1.front();
            q1.pop_front();
        } else {
            idx = q2.front();
            q2.pop_front();
        }
        return idx;
    };

    while (q1.size() + q2.size() > 1) {
        const int a = pop_min();
        const int b = pop_min();
        Node parent{nodes[a].weight + nodes[b].weight, std::min(nodes[a].min_symbol, nodes[b].min_symbol), a, b};
        nodes.push_back(parent);
        q2.push_back(static_cast<int>(nodes.size() - 1));
    }
    const int root = q2.empty() ? q1.front() : q2.front();

    std::array<unsigned, 256> lengths{};
    std::vector<std::pair<int, unsigned>> stack{{root, 0u}};
    while (!stack.empty()) {
        auto [idx, depth] = stack.back();
        stack.pop_back();
        const Node& n = nodes[idx];
        if (n.left < 0) {
            lengths[n.min_symbol] = depth;
        } else {
            stack.emplace_back(n.left, depth + 1);
            stack.emplace_back(n.right, depth + 1);
        }
    }
    return HuffmanCodebook::from_lengths(lengths);
}

HuffmanCodebook HuffmanCodebook::from_lengths(const std::array<unsigned, 256>& lengths) {
    std::vector<std::pair<unsigned, unsigned>> order; // (length, symbol)
    for (unsigned s = 0; s < 256; ++s)
        if (lengths[s] > 0) order.emplace_back(lengths[s], s);
    std::sort(order.begin(), order.end());
    if (!order.empty() && order.back().first > 64) throw CodingError("Huffman code length exceeds 64 bits");

    HuffmanCodebook book;
    std::uint64_t code = 0;
    unsigned prev_len = order.empty() ? 0 : order.front().first;
    bool first = true;
    for (const auto& [len, sym] : order) {
        if (!first) {
            ++code;
            code <<= (len - prev_len);
        }
        first = false;
        prev_len = len;
        book.codes_[sym] = {code, len};
        book.lookup_.emplace(std::make_pair(len, code), static_cast<std::uint8_t>(sym));
    }
    return book;
}

std::size_t HuffmanCodebook::symbol_count() const {
    return static_cast<std::size_t>(std::count_if(codes_.begin(), codes_.end(), [](const Code& c) { return c.length > 0; }));
}

unsigned HuffmanCodebook::max_length() const {
    unsigned m = 0;
    for (const auto& c : codes_) m = std::max(m, c.length);
    return m;
}

double HuffmanCodebook::kraft_sum() const {
    double sum = 0.0;
    for (const auto& c : codes_)
        if (c.length > 0) sum += std::ldexp(1.0, -static_cast<int>(c.length));
    return sum;
}

Bits HuffmanCodebook::encode(std::span<const std::uint8_t> data) const {
    Bits out;
    for (std::uint8_t byte : data) {
        const Code& c = codes_[byte];
        if (c.length == 0) throw CodingError("byte 0x" + std::to_string(byte) + " has no Huffman code");
        for (unsigned i = c.length; i-- > 0;) out.push_back(static_cast<std::uint8_t>((c.bits >> i) & 1U));
    }
    return out;
}

Bytes HuffmanCodebook::decode(std::span<const std::uint8_t> bits) const {
    Bytes out;
    const unsigned limit = max_length();
    std::uint64_t acc = 0;
    unsigned len = 0;
    for (std::uint8_t b : bits) {
        acc = (acc << 1) | (b & 1U);
        ++len;
        auto it = lookup_.find({len, acc});
        if (it != lookup_.end()) {
            out.push_back(it->second);
            acc = 0;
            len = 0;
        } else if (len >= limit) {
            throw TruncationError("invalid Huffman prefix after " + std::to_string(out.size()) + " bytes", out);
        }
    }
    if (len != 0)
        throw TruncationError("Huffman stream ends inside a code word after " + std::to_string(out.size()) +
                                  " bytes",
                              out);
    return out;
}

std::map<std::uint8_t, std::uint64_t> byte_frequencies(const std::vector<std::string>& sentences,
                                                       bool smooth_all_bytes) {
    std::map<std::uint8_t, std::uint64_t> freqs;
    if (smooth_all_bytes)
        for (unsigned b = 0; b < 256; ++b) freqs[static_cast<std::uint8_t>(b)] = 1;
    for (const auto& s : sentences)
        for (char c : s) ++freqs[static_cast<std::uint8_t>(c)];
    return freqs;
}

} // namespace semtx::classic
