#pragma once

// Arithmetic in F_{2^n}, 1 <= n <= 24, in a polynomial basis.
//
// An element is an n-bit integer whose bit i is the coefficient of x^i in
// its representative modulo the field polynomial. This encoding is shared by
// every module: truth tables are indexed by it.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "nlkit/gf2.hpp"
#include "nlkit/moduli.hpp"

namespace nlkit {

using Element = std::uint32_t;

namespace poly2 {

inline int degree(std::uint64_t p) { return p == 0 ? -1 : 63 - std::countl_zero(p); }

inline std::uint64_t clmul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r = 0;
    while (b) {
        if (b & 1U) r ^= a;
        a <<= 1;
        b >>= 1;
    }
    return r;
}

inline std::uint64_t mod(std::uint64_t a, std::uint64_t m) {
    const int dm = degree(m);
    for (int d = degree(a); d >= dm; d = degree(a)) a ^= m << (d - dm);
    return a;
}

inline std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
    while (b) {
        a = mod(a, b);
        std::swap(a, b);
    }
    return a;
}

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return mod(clmul(a, b), m);
}

/// Irreducibility of a degree-n polynomial: gcd(x^{2^i} + x, m) = 1 for
/// 1 <= i < n and m | x^{2^n} + x.
inline bool is_irreducible(std::uint64_t m) {
    const int n = degree(m);
    if (n < 1) return false;
    std::uint64_t xp = mod(0b10, m);  // x^{2^i} mod m
    for (int i = 1; i < n; ++i) {
        xp = mulmod(xp, xp, m);
        if (gcd(xp ^ mod(0b10, m), m) != 1) return false;
    }
    xp = mulmod(xp, xp, m);
    return xp == mod(0b10, m);
}

}  // namespace poly2

inline std::vector<std::uint64_t> prime_factors(std::uint64_t v) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 2; p * p <= v; ++p) {
        if (v % p) continue;
        out.push_back(p);
        while (v % p == 0) v /= p;
    }
    if (v > 1) out.push_back(v);
    return out;
}

inline std::string to_hex(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex << v;
    return s.str();
}

inline std::uint64_t parse_hex(const std::string& text) {
    std::string t = text;
    if (t.rfind("0x", 0) == 0 || t.rfind("0X", 0) == 0) t = t.substr(2);
    if (t.empty() || t.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos)
        throw std::invalid_argument("not a hex value: '" + text + "'");
    return std::stoull(t, nullptr, 16);
}

class FieldContext;
using ContextPtr = std::shared_ptr<const FieldContext>;

ContextPtr make_context(unsigned n, std::optional<std::uint64_t> modulus = std::nullopt);

/// F_{2^n} with a pinned modulus and primitive element. Immutable once built;
/// every member function is const and thread-safe.
class FieldContext {
public:
    unsigned degree() const { return n_; }
    std::uint64_t modulus() const { return modulus_; }
    /// Smallest encoding with multiplicative order 2^n - 1.
    Element generator() const { return g_; }
    /// 2^n - 1.
    std::uint64_t order() const { return order_; }
    std::uint64_t size() const { return order_ + 1; }
    Element mask() const { return static_cast<Element>(order_); }
    bool contains(std::uint64_t a) const { return a <= order_; }

    Element add(Element a, Element b) const { return a ^ b; }

    Element mul(Element a, Element b) const {
        if (a == 0 || b == 0) return 0;
        if (!log_.empty()) return exp_[log_[a] + log_[b]];
        return mul_slow(a, b);
    }

    /// Carryless multiply followed by reduction; bypasses the log tables.
    Element mul_slow(Element a, Element b) const {
        std::uint64_t p = poly2::clmul(a, b);
        for (int i = 2 * static_cast<int>(n_) - 2; i >= static_cast<int>(n_); --i)
            if ((p >> i) & 1U) p ^= modulus_ << (i - n_);
        return static_cast<Element>(p);
    }

    Element sqr(Element a) const { return mul(a, a); }

    /// a^{2^k}.
    Element frobenius(Element a, unsigned k) const {
        k %= n_;
        for (unsigned i = 0; i < k; ++i) a = sqr(a);
        return a;
    }

    /// a^e with e reduced mod 2^n - 1; 0^0 = 1, 0^e = 0 for e > 0.
    Element pow(Element a, std::int64_t e) const {
        if (a == 0) {
            if (e == 0) return 1;
            if (e < 0) throw std::domain_error("negative power of zero");
            return 0;
        }
        const auto ord = static_cast<std::int64_t>(order_);
        auto k = static_cast<std::uint64_t>(((e % ord) + ord) % ord);
        if (!log_.empty()) return exp_[(static_cast<std::uint64_t>(log_[a]) * k) % order_];
        Element r = 1;
        Element base = a;
        while (k) {
            if (k & 1U) r = mul(r, base);
            base = mul(base, base);
            k >>= 1;
        }
        return r;
    }

    Element inv(Element a) const {
        if (a == 0) throw std::domain_error("inverse of zero");
        return pow(a, -1);
    }

    /// Absolute trace tr_n(a) in {0, 1}.
    int abs_trace(Element a) const { return std::popcount(a & trace_mask_) & 1; }

    /// Bit i is tr_n(x^i); tr_n(a) = parity(a & trace_mask()).
    Element trace_mask() const { return trace_mask_; }

    /// Trace from F_{2^n} onto the subfield F_{2^r}; requires r | n.
    Element rel_trace(Element a, unsigned r) const {
        if (r == 0 || n_ % r != 0)
            throw std::invalid_argument("rel_trace: subfield degree " + std::to_string(r) +
                                        " does not divide " + std::to_string(n_));
        Element s = 0;
        Element t = a;
        for (unsigned i = 0; i < n_ / r; ++i) {
            s ^= t;
            t = frobenius(t, r);
        }
        return s;
    }

    bool in_subfield(Element a, unsigned r) const {
        if (r == 0 || n_ % r != 0)
            throw std::invalid_argument("in_subfield: " + std::to_string(r) +
                                        " does not divide " + std::to_string(n_));
        return frobenius(a, r) == a;
    }

    /// All x with x^2 + x = c; two roots differing by 1 iff tr(c) = 0.
    std::vector<Element> solve_artin_schreier(Element c) const {
        if (abs_trace(c) != 0) return {};
        const auto x = gf2::solve(artin_schreier_, c);
        if (!x) throw std::logic_error("Artin-Schreier system inconsistent for a trace-0 target");
        auto x0 = static_cast<Element>(*x);
        std::vector<Element> roots{x0, x0 ^ 1U};
        std::sort(roots.begin(), roots.end());
        return roots;
    }

    /// Membership of a != 0 in the subgroup of cubes of F_{2^n}^*.
    bool cube_residue(Element a) const {
        if (a == 0) throw std::invalid_argument("cube_residue: zero is not in F^*");
        if (order_ % 3 != 0) return true;
        return pow(a, static_cast<std::int64_t>(order_ / 3)) == 1;
    }

    /// All y with y^3 = a, sorted. Size gcd(3, 2^n - 1) for residues, else 0.
    std::vector<Element> cube_roots(Element a) const {
        if (!cube_residue(a)) return {};
        std::vector<Element> roots;
        if (order_ % 3 != 0) {
            // 3 is invertible mod 2^n - 1.
            roots.push_back(pow(a, static_cast<std::int64_t>(inverse_mod(3, order_))));
        } else {
            const std::uint64_t l = discrete_log(a);
            for (std::uint64_t k = 0; k < 3; ++k)
                roots.push_back(pow(g_, static_cast<std::int64_t>(l / 3 + k * (order_ / 3))));
        }
        std::sort(roots.begin(), roots.end());
        return roots;
    }

    /// Cube-subgroup membership inside the subfield F_{2^r}^* (r | n).
    bool subfield_cube_residue(Element a, unsigned r) const {
        if (a == 0 || !in_subfield(a, r))
            throw std::invalid_argument("subfield_cube_residue: element not in F_{2^r}^*");
        const std::uint64_t sub_order = (std::uint64_t{1} << r) - 1;
        if (sub_order % 3 != 0) return true;
        return pow(a, static_cast<std::int64_t>(sub_order / 3)) == 1;
    }

    /// log_g(a) for a != 0.
    std::uint64_t discrete_log(Element a) const {
        if (a == 0) throw std::domain_error("discrete_log of zero");
        if (!log_.empty()) return log_[a];
        // Baby-step giant-step.
        const auto m = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(order_))));
        std::unordered_map<Element, std::uint64_t> baby;
        Element cur = 1;
        for (std::uint64_t j = 0; j < m; ++j) {
            baby.emplace(cur, j);
            cur = mul(cur, g_);
        }
        const Element giant = inv(pow(g_, static_cast<std::int64_t>(m)));
        cur = a;
        for (std::uint64_t i = 0; i <= m; ++i) {
            if (auto it = baby.find(cur); it != baby.end()) return (i * m + it->second) % order_;
            cur = mul(cur, giant);
        }
        throw std::logic_error("discrete_log: element outside the multiplicative group");
    }

    static std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m) {
        std::int64_t t = 0, new_t = 1;
        auto r = static_cast<std::int64_t>(m), new_r = static_cast<std::int64_t>(a % m);
        while (new_r != 0) {
            const auto q = r / new_r;
            std::tie(t, new_t) = std::make_pair(new_t, t - q * new_t);
            std::tie(r, new_r) = std::make_pair(new_r, r - q * new_r);
        }
        if (r != 1) throw std::invalid_argument("inverse_mod: not invertible");
        if (t < 0) t += static_cast<std::int64_t>(m);
        return static_cast<std::uint64_t>(t);
    }

    /// Multiplicative order of a != 0.
    std::uint64_t element_order(Element a) const {
        if (a == 0) throw std::domain_error("order of zero");
        std::uint64_t ord = order_;
        for (std::uint64_t p : order_factors_)
            while (ord % p == 0 && pow(a, static_cast<std::int64_t>(ord / p)) == 1) ord /= p;
        return ord;
    }

    std::string to_string(Element a) const { return to_hex(a); }

private:
    friend ContextPtr make_context(unsigned, std::optional<std::uint64_t>);

    // Log tables are built up to this degree; larger fields multiply directly.
    static constexpr unsigned kTableDegree = 20;

    FieldContext(unsigned n, std::uint64_t modulus) : n_(n), modulus_(modulus) {
        order_ = (std::uint64_t{1} << n) - 1;
        order_factors_ = prime_factors(order_);

        g_ = 0;
        for (Element c = 1; c <= order_; ++c) {
            if (is_primitive(c)) {
                g_ = c;
                break;
            }
        }
        if (g_ == 0) throw std::logic_error("no primitive element found");

        if (n <= kTableDegree) {
            exp_.resize(2 * order_ + 1);
            log_.assign(order_ + 1, 0);
            Element cur = 1;
            for (std::uint64_t i = 0; i < order_; ++i) {
                exp_[i] = cur;
                exp_[i + order_] = cur;
                log_[cur] = static_cast<std::uint32_t>(i);
                cur = mul_slow(cur, g_);
            }
            exp_[2 * order_] = 1;
        }

        for (unsigned i = 0; i < n; ++i) {
            Element t = 0;
            Element s = Element{1} << i;
            for (unsigned j = 0; j < n; ++j) {
                t ^= s;
                s = mul(s, s);
            }
            if (t > 1) throw std::logic_error("trace left F_2");
            trace_mask_ |= t << i;
        }

        artin_schreier_ = gf2::BitMatrix(n, n);
        for (unsigned c = 0; c < n; ++c) {
            const Element e = Element{1} << c;
            const Element image = mul(e, e) ^ e;
            for (unsigned r = 0; r < n; ++r) artin_schreier_.set(r, c, (image >> r) & 1U);
        }
    }

    bool is_primitive(Element c) const {
        for (std::uint64_t p : order_factors_) {
            std::uint64_t k = order_ / p;
            Element r = 1, base = c;
            while (k) {
                if (k & 1U) r = mul_slow(r, base);
                base = mul_slow(base, base);
                k >>= 1;
            }
            if (r == 1) return false;
        }
        // order_ == 1 (n = 1): only the element 1 exists.
        return order_ != 1 || c == 1;
    }

    unsigned n_;
    std::uint64_t modulus_;
    std::uint64_t order_ = 0;
    std::vector<std::uint64_t> order_factors_;
    Element g_ = 0;
    Element trace_mask_ = 0;
    std::vector<Element> exp_;
    std::vector<std::uint32_t> log_;
    gf2::BitMatrix artin_schreier_;
};

inline ContextPtr make_context(unsigned n, std::optional<std::uint64_t> modulus) {
    if (n < 1 || n > kMaxDegree)
        throw std::invalid_argument("field degree " + std::to_string(n) + " outside [1, 24]");
    const std::uint64_t m = modulus.value_or(kDefaultModuli[n]);
    if (poly2::degree(m) != static_cast<int>(n))
        throw std::invalid_argument("modulus 0x" + to_hex(m) + " does not have degree " +
                                    std::to_string(n));
    if (!poly2::is_irreducible(m))
        throw std::invalid_argument("modulus 0x" + to_hex(m) + " is reducible");
    return ContextPtr(new FieldContext(n, m));
}

/// Context whose modulus comes from a loaded table, falling back to the
/// pinned defaults when the table has no entry for n.
inline ContextPtr make_context(unsigned n, const ModuliTable& table) {
    if (auto it = table.find(n); it != table.end()) return make_context(n, it->second);
    return make_context(n);
}

}  // namespace nlkit
