#pragma once

// Boolean functions on F_{2^n} as bit-packed truth tables.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlkit/field.hpp"
#include "nlkit/parallel.hpp"

namespace nlkit {

namespace detail {

// Bit masks selecting indices whose bit s is clear, for s < 6.
inline constexpr std::uint64_t kLowMasks[6] = {
    0x5555555555555555ULL, 0x3333333333333333ULL, 0x0f0f0f0f0f0f0f0fULL,
    0x00ff00ff00ff00ffULL, 0x0000ffff0000ffffULL, 0x00000000ffffffffULL,
};

}  // namespace detail

/// f : F_{2^n} -> F_2, entry at index enc(x) = f(x).
class TruthTable {
public:
    explicit TruthTable(ContextPtr ctx)
        : ctx_(std::move(ctx)), words_(word_count(ctx_->degree()), 0) {}

    template <class Fn>
    static TruthTable from_function(ContextPtr ctx, Fn&& fn) {
        TruthTable t(std::move(ctx));
        for (std::uint64_t x = 0; x < t.size(); ++x)
            if (fn(static_cast<Element>(x))) t.set(static_cast<Element>(x), true);
        return t;
    }

    const ContextPtr& context() const { return ctx_; }
    unsigned n() const { return ctx_->degree(); }
    std::uint64_t size() const { return std::uint64_t{1} << n(); }

    bool get(Element x) const { return (words_[x >> 6] >> (x & 63U)) & 1U; }
    bool operator()(Element x) const { return get(x); }
    void set(Element x, bool v) {
        const std::uint64_t bit = std::uint64_t{1} << (x & 63U);
        if (v)
            words_[x >> 6] |= bit;
        else
            words_[x >> 6] &= ~bit;
    }

    std::vector<std::uint64_t>& words() { return words_; }
    const std::vector<std::uint64_t>& words() const { return words_; }

    bool is_zero() const {
        return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
    }

    TruthTable& operator^=(const TruthTable& o) {
        require_same_context(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
        return *this;
    }
    friend TruthTable operator^(TruthTable a, const TruthTable& b) { return a ^= b; }

    bool operator==(const TruthTable& o) const {
        return same_field(o) && words_ == o.words_;
    }

    bool same_field(const TruthTable& o) const {
        return ctx_ == o.ctx_ ||
               (n() == o.n() && ctx_->modulus() == o.ctx_->modulus());
    }

    void require_same_context(const TruthTable& o) const {
        if (!same_field(o)) throw std::invalid_argument("truth tables over different fields");
    }

    static std::size_t word_count(unsigned n) {
        return n >= 6 ? std::size_t{1} << (n - 6) : 1;
    }

private:
    ContextPtr ctx_;
    std::vector<std::uint64_t> words_;
};

/// tr_n(lambda * x^d) for all x, with 0^0 = 1.
inline TruthTable from_trace_monomial(const ContextPtr& ctx, Element lambda, std::uint64_t d) {
    TruthTable t(ctx);
    if (lambda == 0) return t;
    const FieldContext& F = *ctx;
    t.set(0, d == 0 && F.abs_trace(lambda));
    // Walk x = g^i; then lambda * x^d = lambda * (g^d)^i.
    const Element g = F.generator();
    const Element gd = F.pow(g, static_cast<std::int64_t>(d % F.order()));
    Element x = 1;
    Element y = lambda;
    for (std::uint64_t i = 0; i < F.order(); ++i) {
        t.set(x, F.abs_trace(y));
        x = F.mul(x, g);
        y = F.mul(y, gd);
    }
    return t;
}

inline std::uint64_t weight(const TruthTable& t) {
    std::uint64_t w = 0;
    for (auto word : t.words()) w += static_cast<std::uint64_t>(std::popcount(word));
    return w;
}

inline std::uint64_t distance(const TruthTable& a, const TruthTable& b) {
    a.require_same_context(b);
    std::uint64_t w = 0;
    for (std::size_t i = 0; i < a.words().size(); ++i)
        w += static_cast<std::uint64_t>(std::popcount(a.words()[i] ^ b.words()[i]));
    return w;
}

/// Binary Moebius transform in place on a packed 2^n-bit vector.
inline void moebius_inplace(std::vector<std::uint64_t>& w, unsigned n) {
    for (unsigned s = 0; s < std::min(n, 6U); ++s) {
        const unsigned shift = 1U << s;
        for (auto& word : w) word ^= (word & detail::kLowMasks[s]) << shift;
    }
    for (unsigned s = 6; s < n; ++s) {
        const std::size_t stride = std::size_t{1} << (s - 6);
        for (std::size_t i = 0; i < w.size(); ++i)
            if (i & stride) w[i] ^= w[i ^ stride];
    }
}

/// ANF coefficients indexed by monomial support mask over the coordinate
/// bits of the element encoding.
struct AnfTable {
    TruthTable coeffs;

    bool coeff(Element mask) const { return coeffs.get(mask); }

    unsigned degree() const {
        unsigned deg = 0;
        const auto& w = coeffs.words();
        for (std::size_t i = 0; i < w.size(); ++i) {
            std::uint64_t word = w[i];
            while (word) {
                const unsigned b = static_cast<unsigned>(std::countr_zero(word));
                word &= word - 1;
                const std::uint64_t idx = (static_cast<std::uint64_t>(i) << 6) | b;
                deg = std::max(deg, static_cast<unsigned>(std::popcount(idx)));
            }
        }
        return deg;
    }
};

inline AnfTable anf(const TruthTable& t) {
    AnfTable a{t};
    moebius_inplace(a.coeffs.words(), t.n());
    return a;
}

/// Inverse of anf (the transform is an involution).
inline TruthTable from_anf(const AnfTable& a) {
    TruthTable t = a.coeffs;
    moebius_inplace(t.words(), t.n());
    return t;
}

/// Degree of the zero function is 0.
inline unsigned algebraic_degree(const TruthTable& t) { return anf(t).degree(); }

/// In-place unnormalized Walsh-Hadamard butterfly.
inline void wht_inplace(std::int32_t* v, unsigned n) {
    const std::size_t size = std::size_t{1} << n;
    for (std::size_t h = 1; h < size; h <<= 1) {
        for (std::size_t i = 0; i < size; i += 2 * h) {
            for (std::size_t j = i; j < i + h; ++j) {
                const std::int32_t a = v[j], b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
    }
}

/// Fills v with (-1)^{f(x)} and transforms: result[u] = sum (-1)^{f(x) + u.x}
/// with u.x the coordinate dot product.
inline void wht_of(const TruthTable& t, std::vector<std::int32_t>& v) {
    const std::uint64_t size = t.size();
    v.resize(size);
    const auto& w = t.words();
    for (std::uint64_t x = 0; x < size; ++x) v[x] = ((w[x >> 6] >> (x & 63U)) & 1U) ? -1 : 1;
    wht_inplace(v.data(), t.n());
}

inline std::vector<std::int32_t> walsh_raw(const TruthTable& t) {
    std::vector<std::int32_t> v;
    wht_of(t, v);
    return v;
}

/// The linear form x -> tr(alpha x) has coordinate vector M(alpha) with
/// bit i equal to tr(alpha x^i). Returns M as a table over all alpha.
inline std::vector<Element> trace_form_table(const FieldContext& F) {
    const unsigned n = F.degree();
    std::vector<Element> cols(n, 0);
    for (unsigned j = 0; j < n; ++j)
        for (unsigned i = 0; i < n; ++i)
            cols[j] |= static_cast<Element>(F.abs_trace(F.mul(Element{1} << i, Element{1} << j)))
                       << i;
    std::vector<Element> m(F.size(), 0);
    for (std::uint64_t a = 1; a < F.size(); ++a) {
        const unsigned low = static_cast<unsigned>(std::countr_zero(a));
        m[a] = m[a & (a - 1)] ^ cols[low];
    }
    return m;
}

struct WalshSpectrum {
    ContextPtr ctx;
    std::vector<std::int32_t> values;  // index enc(alpha)

    std::int32_t operator[](Element alpha) const { return values[alpha]; }

    std::int32_t max_abs() const {
        std::int32_t m = 0;
        for (auto v : values) m = std::max(m, std::abs(v));
        return m;
    }

    bool parseval_holds() const {
        std::int64_t s = 0;
        for (auto v : values) s += static_cast<std::int64_t>(v) * v;
        const unsigned n = ctx->degree();
        return s == (std::int64_t{1} << (2 * n));
    }

    bool operator==(const WalshSpectrum& o) const { return values == o.values; }
};

/// W_f(alpha) = sum_x (-1)^{f(x) + tr(alpha x)}.
inline WalshSpectrum walsh_transform(const TruthTable& t) {
    const auto raw = walsh_raw(t);
    const auto m = trace_form_table(*t.context());
    WalshSpectrum s{t.context(), std::vector<std::int32_t>(raw.size())};
    for (std::size_t a = 0; a < raw.size(); ++a) s.values[a] = raw[m[a]];
    return s;
}

inline std::int64_t nl_from_max_walsh(unsigned n, std::int64_t max_abs) {
    return (std::int64_t{1} << (n - 1)) - max_abs / 2;
}

/// First-order nonlinearity 2^{n-1} - max|W_f| / 2.
inline std::int64_t nonlinearity(const TruthTable& t) {
    const auto raw = walsh_raw(t);
    std::int32_t m = 0;
    for (auto v : raw) m = std::max(m, std::abs(v));
    return nl_from_max_walsh(t.n(), m);
}

/// x -> f(x + a).
inline TruthTable translate(const TruthTable& t, Element a) {
    TruthTable out = t;
    auto& w = out.words();
    const Element low = a & 63U;
    for (unsigned s = 0; s < 6; ++s) {
        if (!((low >> s) & 1U)) continue;
        const unsigned sh = 1U << s;
        const std::uint64_t m = detail::kLowMasks[s];
        for (auto& word : w) word = ((word & m) << sh) | ((word >> sh) & m);
    }
    const std::size_t high = a >> 6;
    if (high) {
        std::vector<std::uint64_t> moved(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) moved[i] = w[i ^ high];
        w.swap(moved);
    }
    return out;
}

/// D_a f(x) = f(x) + f(x + a).
inline TruthTable derivative(const TruthTable& t, Element a) { return t ^ translate(t, a); }

inline TruthTable derivative_chain(const TruthTable& t, const std::vector<Element>& dirs) {
    TruthTable cur = t;
    for (Element a : dirs) cur = derivative(cur, a);
    return cur;
}

/// x -> f(a x).
inline TruthTable scale_input(const TruthTable& t, Element a) {
    const FieldContext& F = *t.context();
    return TruthTable::from_function(t.context(), [&](Element x) { return t.get(F.mul(a, x)); });
}

class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(std::uint64_t required, std::uint64_t budget)
        : std::runtime_error("exact_nl_r needs " + std::to_string(required) +
                             " Walsh transforms, budget is " + std::to_string(budget)),
          required_(required),
          budget_(budget) {}
    std::uint64_t required() const { return required_; }
    std::uint64_t budget() const { return budget_; }

private:
    std::uint64_t required_;
    std::uint64_t budget_;
};

inline constexpr std::uint64_t kDefaultWhtBudget = std::uint64_t{1} << 28;

/// Number of monomials of degree 2..r in n variables.
inline unsigned homogeneous_monomial_count(unsigned n, unsigned r) {
    unsigned total = 0;
    for (Element m = 0; m < (Element{1} << n); ++m) {
        const auto w = static_cast<unsigned>(std::popcount(m));
        if (w >= 2 && w <= r) ++total;
    }
    return total;
}

/// Exact r-th order nonlinearity: min over all degree-2..r parts q of
/// nl_1(f + q). The affine part is minimized by the Walsh transform.
inline std::int64_t exact_nl_r(const TruthTable& t, unsigned r,
                               std::uint64_t budget = kDefaultWhtBudget, unsigned threads = 1) {
    if (r == 0) throw std::invalid_argument("exact_nl_r: order must be at least 1");
    const unsigned n = t.n();
    if (r == 1) return nonlinearity(t);
    if (r >= n) return 0;  // every function has degree at most n

    std::vector<TruthTable> monomials;
    for (Element m = 0; m < (Element{1} << n); ++m) {
        const auto w = static_cast<unsigned>(std::popcount(m));
        if (w < 2 || w > r) continue;
        monomials.push_back(TruthTable::from_function(
            t.context(), [m](Element x) { return (x & m) == m; }));
    }
    const auto count = monomials.size();
    if (count >= 63 || (std::uint64_t{1} << count) > budget)
        throw BudgetExceeded(count >= 63 ? std::numeric_limits<std::uint64_t>::max()
                                         : std::uint64_t{1} << count,
                             budget);
    const std::uint64_t total = std::uint64_t{1} << count;

    // Gray-code walk split into contiguous ranges; each range starts from
    // the Gray code of its first index.
    const std::uint64_t chunks = std::min<std::uint64_t>(total, 256);
    std::vector<std::int32_t> best(chunks, 0);
    parallel_for(chunks, threads, [&](std::size_t c) {
        const std::uint64_t lo = total * c / chunks;
        const std::uint64_t hi = total * (c + 1) / chunks;
        TruthTable cur = t;
        const std::uint64_t gray = lo ^ (lo >> 1);
        for (std::size_t i = 0; i < count; ++i)
            if ((gray >> i) & 1U) cur ^= monomials[i];
        std::vector<std::int32_t> buf;
        std::int32_t local = 0;
        for (std::uint64_t i = lo; i < hi; ++i) {
            if (i != lo) cur ^= monomials[static_cast<std::size_t>(std::countr_zero(i))];
            wht_of(cur, buf);
            for (auto v : buf) local = std::max(local, std::abs(v));
        }
        best[c] = local;
    });
    const std::int32_t m = *std::max_element(best.begin(), best.end());
    return nl_from_max_walsh(n, m);
}

/// Hex export: digit k holds entries 4k..4k+3, entry 4k in the low bit.
inline std::string to_hex(const TruthTable& t) {
    static constexpr char kDigits[] = "0123456789abcdef";
    const std::uint64_t digits = std::max<std::uint64_t>(1, t.size() / 4);
    std::string out(digits, '0');
    for (std::uint64_t k = 0; k < digits; ++k) {
        const std::uint64_t word = t.words()[(4 * k) >> 6];
        out[k] = kDigits[(word >> ((4 * k) & 63U)) & 0xfU];
    }
    return out;
}

inline TruthTable truth_table_from_hex(const ContextPtr& ctx, const std::string& hex) {
    TruthTable t(ctx);
    const std::uint64_t digits = std::max<std::uint64_t>(1, t.size() / 4);
    if (hex.size() != digits)
        throw std::invalid_argument("truth table hex has " + std::to_string(hex.size()) +
                                    " digits, expected " + std::to_string(digits));
    for (std::uint64_t k = 0; k < digits; ++k) {
        const char c = hex[k];
        unsigned v;
        if (c >= '0' && c <= '9')
            v = static_cast<unsigned>(c - '0');
        else if (c >= 'a' && c <= 'f')
            v = static_cast<unsigned>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F')
            v = static_cast<unsigned>(c - 'A' + 10);
        else
            throw std::invalid_argument("bad hex digit in truth table");
        for (unsigned b = 0; b < 4; ++b) {
            const std::uint64_t x = 4 * k + b;
            if ((v >> b) & 1U) {
                if (x >= t.size()) throw std::invalid_argument("truth table hex sets bits past 2^n");
                t.set(static_cast<Element>(x), true);
            }
        }
    }
    return t;
}

/// Raw binary export: byte k holds entries 8k..8k+7, low bit first.
inline std::string to_bytes(const TruthTable& t) {
    const std::uint64_t bytes = std::max<std::uint64_t>(1, t.size() / 8);
    std::string out(bytes, '\0');
    for (std::uint64_t k = 0; k < bytes; ++k)
        out[k] = static_cast<char>((t.words()[(8 * k) >> 6] >> ((8 * k) & 63U)) & 0xffU);
    return out;
}

inline TruthTable truth_table_from_bytes(const ContextPtr& ctx, const std::string& raw) {
    TruthTable t(ctx);
    const std::uint64_t bytes = std::max<std::uint64_t>(1, t.size() / 8);
    if (raw.size() != bytes) throw std::invalid_argument("truth table byte length mismatch");
    for (std::uint64_t k = 0; k < bytes; ++k) {
        const auto v = static_cast<unsigned char>(raw[k]);
        for (unsigned b = 0; b < 8; ++b) {
            const std::uint64_t x = 8 * k + b;
            if ((v >> b) & 1U) {
                if (x >= t.size()) throw std::invalid_argument("truth table bytes set bits past 2^n");
                t.set(static_cast<Element>(x), true);
            }
        }
    }
    return t;
}

}  // namespace nlkit
