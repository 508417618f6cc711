#include "semtx/classic/reed_solomon.hpp"

#include <array>
#include <string>

#include "semtx/errors.hpp"

namespace semtx::classic {

namespace gf256 {

namespace {

struct Tables {
    std::array<std::uint8_t, 512> exp{};
    std::array<int, 256> log{};
    Tables() {
        unsigned x = 1;
        for (int i = 0; i < 255; ++i) {
            exp[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(x);
            log[x] = i;
            x <<= 1;
            if (x & 0x100) x ^= kPrimitive;
        }
        for (int i = 255; i < 512; ++i) exp[static_cast<std::size_t>(i)] = exp[static_cast<std::size_t>(i - 255)];
        log[0] = -1;
    }
};

const Tables& tables() {
    static const Tables t;
    return t;
}

} // namespace

std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
    if (a == 0 || b == 0) return 0;
    const auto& t = tables();
    return t.exp[static_cast<std::size_t>(t.log[a] + t.log[b])];
}

std::uint8_t div(std::uint8_t a, std::uint8_t b) {
    if (b == 0) throw RangeError("division by zero in GF(256)");
    if (a == 0) return 0;
    const auto& t = tables();
    return t.exp[static_cast<std::size_t>(t.log[a] - t.log[b] + 255)];
}

std::uint8_t inv(std::uint8_t a) { return div(1, a); }

std::uint8_t pow_alpha(int e) {
    e %= 255;
    if (e < 0) e += 255;
    return tables().exp[static_cast<std::size_t>(e)];
}

} // namespace gf256

namespace {

using Poly = std::vector<std::uint8_t>; // lowest degree first

std::uint8_t eval_low_first(const Poly& p, std::uint8_t x) {
    std::uint8_t y = 0;
    for (std::size_t i = p.size(); i-- > 0;) y = static_cast<std::uint8_t>(gf256::mul(y, x) ^ p[i]);
    return y;
}

std::vector<std::uint8_t> syndromes(std::span<const std::uint8_t> r, int nsym) {
    std::vector<std::uint8_t> s(static_cast<std::size_t>(nsym));
    for (int j = 0; j < nsym; ++j) {
        const std::uint8_t x = gf256::pow_alpha(j);
        std::uint8_t y = 0;
        for (std::uint8_t c : r) y = static_cast<std::uint8_t>(gf256::mul(y, x) ^ c);
        s[static_cast<std::size_t>(j)] = y;
    }
    return s;
}

} // namespace

void RsParams::validate() const {
    if (!(0 < k && k < n && n <= 255))
        throw RangeError("RS parameters require 0 < k < n <= 255, got n=" + std::to_string(n) + " k=" + std::to_string(k));
    if (t() < 1) throw RangeError("RS(" + std::to_string(n) + "," + std::to_string(k) + ") corrects no errors");
}

std::vector<std::uint8_t> rs_generator(int parity_symbols) {
    std::vector<std::uint8_t> g{1}; // highest first
    for (int i = 0; i < parity_symbols; ++i) {
        const std::uint8_t root = gf256::pow_alpha(i);
        std::vector<std::uint8_t> next(g.size() + 1, 0);
        for (std::size_t j = 0; j < g.size(); ++j) {
            next[j] ^= g[j];
            next[j + 1] ^= gf256::mul(g[j], root);
        }
        g = std::move(next);
    }
    return g;
}

std::vector<std::uint8_t> rs_encode(const RsParams& params, std::span<const std::uint8_t> data) {
    params.validate();
    if (static_cast<int>(data.size()) != params.k)
        throw ShapeError("rs_encode expects " + std::to_string(params.k) + " data symbols, got " +
                         std::to_string(data.size()));
    const int nsym = params.parity();
    const auto gen = rs_generator(nsym);
    std::vector<std::uint8_t> work(data.begin(), data.end());
    work.resize(static_cast<std::size_t>(params.n), 0);
    for (int i = 0; i < params.k; ++i) {
        const std::uint8_t coef = work[static_cast<std::size_t>(i)];
        if (coef == 0) continue;
        for (std::size_t j = 1; j < gen.size(); ++j)
            work[static_cast<std::size_t>(i) + j] ^= gf256::mul(gen[j], coef);
    }
    std::vector<std::uint8_t> out(data.begin(), data.end());
    out.insert(out.end(), work.begin() + params.k, work.end());
    return out;
}

RsDecodeResult rs_decode(const RsParams& params, std::span<const std::uint8_t> received) {
    params.validate();
    if (static_cast<int>(received.size()) != params.n)
        throw ShapeError("rs_decode expects " + std::to_string(params.n) + " symbols, got " +
                         std::to_string(received.size()));
    const int n = params.n;
    const int nsym = params.parity();
    RsDecodeResult result;
    result.data.assign(received.begin(), received.begin() + params.k);

    const auto s = syndromes(received, nsym);
    bool clean = true;
    for (auto v : s) clean = clean && v == 0;
    if (clean) return result;

    // Berlekamp-Massey, error locator Lambda lowest degree first.
    Poly lambda{1};
    Poly prev{1};
    int l = 0;
    int m = 1;
    std::uint8_t b = 1;
    for (int r = 0; r < nsym; ++r) {
        std::uint8_t d = s[static_cast<std::size_t>(r)];
        for (int i = 1; i <= l && i < static_cast<int>(lambda.size()); ++i)
            d ^= gf256::mul(lambda[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(r - i)]);
        if (d == 0) {
            ++m;
            continue;
        }
        const std::uint8_t coef = gf256::div(d, b);
        Poly updated = lambda;
        if (updated.size() < prev.size() + static_cast<std::size_t>(m)) updated.resize(prev.size() + static_cast<std::size_t>(m), 0);
        for (std::size_t i = 0; i < prev.size(); ++i) updated[i + static_cast<std::size_t>(m)] ^= gf256::mul(coef, prev[i]);
        if (2 * l <= r) {
            prev = lambda;
            l = r + 1 - l;
            b = d;
            m = 1;
        } else {
            ++m;
        }
        lambda = std::move(updated);
    }
    while (lambda.size() > 1 && lambda.back() == 0) lambda.pop_back();
    const int degree = static_cast<int>(lambda.size()) - 1;
    if (l > params.t() || degree != l) {
        result.failed = true;
        return result;
    }

    // Chien search restricted to the n positions of the shortened code.
    std::vector<int> positions;
    for (int i = 0; i < n; ++i) {
        const int power = n - 1 - i;
        if (eval_low_first(lambda, gf256::pow_alpha(-power)) == 0) positions.push_back(i);
    }
    if (static_cast<int>(positions.size()) != l) {
        result.failed = true;
        return result;
    }

    // Forney: Omega = S * Lambda mod x^nsym; e = X * Omega(X^-1) / Lambda'(X^-1).
    Poly omega(static_cast<std::size_t>(nsym), 0);
    for (std::size_t i = 0; i < lambda.size(); ++i)
        for (std::size_t j = 0; j < s.size() && i + j < omega.size(); ++j) omega[i + j] ^= gf256::mul(lambda[i], s[j]);
    Poly dlambda(lambda.size() > 1 ? lambda.size() - 1 : 1, 0);
    for (std::size_t i = 1; i < lambda.size(); i += 2) dlambda[i - 1] = lambda[i];

    std::vector<std::uint8_t> corrected(received.begin(), received.end());
    for (int pos : positions) {
        const int power = n - 1 - pos;
        const std::uint8_t x = gf256::pow_alpha(power);
        const std::uint8_t x_inv = gf256::pow_alpha(-power);
        const std::uint8_t denom = eval_low_first(dlambda, x_inv);
        if (denom == 0) {
            result.failed = true;
            return result;
        }
        const std::uint8_t e = gf256::mul(x, gf256::div(eval_low_first(omega, x_inv), denom));
        corrected[static_cast<std::size_t>(pos)] ^= e;
    }
    for (auto v : syndromes(corrected, nsym)) {
        if (v != 0) {
            result.failed = true;
            return result;
        }
    }
    result.data.assign(corrected.begin(), corrected.begin() + params.k);
    result.corrected = l;
    return result;
}

} // namespace semtx::classic
