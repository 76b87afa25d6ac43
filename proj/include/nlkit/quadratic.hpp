#pragma once

// Linear kernels of quadratic functions and kernel-dimension sweeps over
// derivatives of trace monomials.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlkit/field.hpp"
#include "nlkit/gf2.hpp"
#include "nlkit/parallel.hpp"
#include "nlkit/truth_table.hpp"

namespace nlkit {

/// E_q = E_0 u E_1 for a quadratic q.
struct KernelReport {
    unsigned n = 0;
    unsigned k = 0;
    std::vector<Element> basis;
    std::vector<int> constant_bits;  // D_b q for each basis vector b
    int f0 = 0;                      // q(0)

    std::vector<Element> elements() const {
        std::vector<Element> out;
        const std::vector<gf2::Row> rows(basis.begin(), basis.end());
        for (auto v : gf2::span(rows)) out.push_back(static_cast<Element>(v));
        return out;
    }
};

/// Kernel from point evaluations of a function of degree <= 2. Uses the
/// Gram matrix M[i][j] = q(0) + q(e_i) + q(e_j) + q(e_i + e_j).
template <class Eval>
KernelReport kernel_from_evaluator(unsigned n, Eval&& q) {
    const int q0 = q(Element{0});
    std::vector<int> qi(n);
    for (unsigned i = 0; i < n; ++i) qi[i] = q(Element{1} << i);
    gf2::BitMatrix m(n, n);
    for (unsigned i = 0; i < n; ++i) {
        for (unsigned j = i + 1; j < n; ++j) {
            const int v = q0 ^ qi[i] ^ qi[j] ^ q((Element{1} << i) | (Element{1} << j));
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    KernelReport r;
    r.n = n;
    r.f0 = q0;
    for (auto v : gf2::nullspace(m)) {
        const auto b = static_cast<Element>(v);
        r.basis.push_back(b);
        r.constant_bits.push_back(q0 ^ q(b));
    }
    r.k = static_cast<unsigned>(r.basis.size());
    return r;
}

inline KernelReport linear_kernel(const TruthTable& t) {
    const unsigned deg = algebraic_degree(t);
    if (deg > 2)
        throw std::invalid_argument("linear_kernel: degree " + std::to_string(deg) + " exceeds 2");
    return kernel_from_evaluator(t.n(), [&](Element x) { return static_cast<int>(t.get(x)); });
}

/// True when D_b q is constant, checked word by word with early exit.
inline bool derivative_is_constant(const TruthTable& t, Element b) {
    const auto& w = t.words();
    const unsigned n = t.n();
    const std::uint64_t valid = n >= 6 ? ~std::uint64_t{0} : (std::uint64_t{1} << (1U << n)) - 1;
    const Element low = b & 63U;
    const std::size_t high = b >> 6;
    std::uint64_t expect = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        std::uint64_t shifted = w[i ^ high];
        for (unsigned s = 0; s < 6; ++s) {
            if (!((low >> s) & 1U)) continue;
            const unsigned sh = 1U << s;
            const std::uint64_t m = detail::kLowMasks[s];
            shifted = ((shifted & m) << sh) | ((shifted >> sh) & m);
        }
        const std::uint64_t d = (w[i] ^ shifted) & valid;
        if (i == 0) {
            if (d != 0 && d != valid) return false;
            expect = d;
        } else if (d != expect) {
            return false;
        }
    }
    return true;
}

/// log2 of |{b : D_b q constant}| by direct enumeration.
inline unsigned kernel_dim_brute(const TruthTable& t) {
    std::uint64_t count = 0;
    for (std::uint64_t b = 0; b < t.size(); ++b)
        count += derivative_is_constant(t, static_cast<Element>(b));
    if (count == 0 || (count & (count - 1)) != 0)
        throw std::logic_error("kernel_dim_brute: " + std::to_string(count) +
                               " constant directions is not a power of two");
    return static_cast<unsigned>(std::countr_zero(count));
}

/// Walsh value -> multiplicity.
using SpectrumMultiset = std::map<std::int64_t, std::uint64_t>;

inline void require_kernel_parity(unsigned n, unsigned k) {
    if (k > n || (n - k) % 2 != 0)
        throw std::invalid_argument("kernel dimension " + std::to_string(k) +
                                    " has the wrong parity for n = " + std::to_string(n));
}

/// Walsh spectrum of any quadratic with kernel dimension k and q(0) = f0.
/// Zero-multiplicity entries are omitted.
inline SpectrumMultiset spectrum_from_dim(unsigned n, unsigned k, int f0) {
    require_kernel_parity(n, k);
    const std::uint64_t full = std::uint64_t{1} << n;
    const std::uint64_t support = std::uint64_t{1} << (n - k);
    const std::uint64_t half_gap = std::uint64_t{1} << ((n - k) / 2);
    const auto amp = static_cast<std::int64_t>(std::uint64_t{1} << ((n + k) / 2));
    const std::uint64_t plus = f0 ? (support - half_gap) / 2 : (support + half_gap) / 2;
    SpectrumMultiset s;
    if (full - support) s[0] = full - support;
    if (plus) s[amp] = plus;
    if (support - plus) s[-amp] = support - plus;
    return s;
}

inline SpectrumMultiset spectrum_multiset(const std::vector<std::int32_t>& values) {
    SpectrumMultiset s;
    for (auto v : values) ++s[v];
    return s;
}

/// 2^{n-1} - 2^{(n+k)/2 - 1}.
inline std::int64_t nl_from_dim(unsigned n, unsigned k) {
    require_kernel_parity(n, k);
    return (std::int64_t{1} << (n - 1)) - (std::int64_t{1} << ((n + k) / 2 - 1));
}

struct SweepDescriptor {
    std::string family;     // "first", "second" or "x2r3"
    unsigned n = 0;
    std::uint64_t d = 0;
    Element lambda = 1;
    std::string parameter;  // swept variable
    std::optional<Element> fixed_a;
};

/// Kernel dimension -> number of sweep parameters attaining it.
struct DimHistogram {
    SweepDescriptor sweep;
    std::map<unsigned, std::uint64_t> counts;
    std::uint64_t degenerate = 0;
    /// Per-class histograms; filled only by class-labelled sweeps.
    std::map<std::string, std::map<unsigned, std::uint64_t>> by_class;

    std::uint64_t total() const {
        std::uint64_t s = degenerate;
        for (const auto& [k, c] : counts) s += c;
        return s;
    }
    std::uint64_t count_at_most(unsigned k) const {
        std::uint64_t s = 0;
        for (const auto& [dim, c] : counts)
            if (dim <= k) s += c;
        return s;
    }
    bool operator==(const DimHistogram& o) const {
        return counts == o.counts && degenerate == o.degenerate && by_class == o.by_class;
    }
};

inline void require_degree_at_most(const TruthTable& f, unsigned bound, const char* what) {
    const unsigned deg = algebraic_degree(f);
    if (deg > bound)
        throw std::invalid_argument(std::string(what) + ": base function has degree " +
                                    std::to_string(deg) + ", derivatives may exceed degree 2");
}

/// Kernel dimension of D_a f for every a != 0, indexed by a (entry 0 unused).
inline std::vector<unsigned> first_derivative_dims(const TruthTable& f, unsigned threads = 1) {
    require_degree_at_most(f, 3, "kernel_dim_sweep_first");
    const unsigned n = f.n();
    std::vector<unsigned> dims(f.size(), 0);
    parallel_for(f.size() - 1, threads, [&](std::size_t i) {
        const auto a = static_cast<Element>(i + 1);
        dims[a] = kernel_from_evaluator(n, [&](Element x) {
                      return static_cast<int>(f.get(x) ^ f.get(x ^ a));
                  }).k;
    });
    return dims;
}

/// Histogram of dim E_{D_a f} over a in F*, f = tr(lambda x^d).
inline DimHistogram kernel_dim_sweep_first(const ContextPtr& ctx, std::uint64_t d,
                                           unsigned threads = 1, Element lambda = 1) {
    const auto f = from_trace_monomial(ctx, lambda, d);
    const auto dims = first_derivative_dims(f, threads);
    DimHistogram h;
    h.sweep = {"first", ctx->degree(), d, lambda, "a", std::nullopt};
    for (std::size_t a = 1; a < dims.size(); ++a) ++h.counts[dims[a]];
    return h;
}

/// D_{ab} D_a f as a point evaluator.
inline int second_derivative_at(const TruthTable& f, Element a, Element ab, Element x) {
    return static_cast<int>(f.get(x) ^ f.get(x ^ a) ^ f.get(x ^ ab) ^ f.get(x ^ a ^ ab));
}

/// Kernel dimension of D_{ab} D_a f for every b; -1 marks b in {0, 1}.
inline std::vector<int> second_derivative_dims(const TruthTable& f, Element a,
                                               unsigned threads = 1) {
    require_degree_at_most(f, 4, "kernel_dim_sweep_second");
    if (a == 0) throw std::invalid_argument("kernel_dim_sweep_second: a must be nonzero");
    const FieldContext& F = *f.context();
    const unsigned n = f.n();
    std::vector<int> dims(f.size(), -1);
    parallel_for(f.size(), threads, [&](std::size_t i) {
        const auto b = static_cast<Element>(i);
        if (b <= 1) return;
        const Element ab = F.mul(a, b);
        dims[b] = static_cast<int>(
            kernel_from_evaluator(n, [&](Element x) { return second_derivative_at(f, a, ab, x); }).k);
    });
    return dims;
}

/// Histogram of dim E_{D_{ab} D_a f} over b in F for fixed a; b in {0, 1}
/// gives the zero function and is counted as degenerate.
inline DimHistogram kernel_dim_sweep_second(const ContextPtr& ctx, std::uint64_t d, Element a,
                                            unsigned threads = 1, Element lambda = 1) {
    const auto f = from_trace_monomial(ctx, lambda, d);
    const auto dims = second_derivative_dims(f, a, threads);
    DimHistogram h;
    h.sweep = {"second", ctx->degree(), d, lambda, "b", a};
    for (int k : dims) {
        if (k < 0)
            ++h.degenerate;
        else
            ++h.counts[static_cast<unsigned>(k)];
    }
    return h;
}

/// Class of a in F_{2^n}^*, n = 2r, relative to the subfield F_{2^r} and
/// the cube subgroup G of F_{2^r}^*.
inline std::string x2r3_class(const FieldContext& F, Element a) {
    const unsigned r = F.degree() / 2;
    if (!F.in_subfield(a, r)) return "outside";
    if (r % 2 == 1) return "subfield";
    return F.subfield_cube_residue(a, r) ? "G" : "subfield-not-G";
}

/// Kernel dimension predicted for each class of x2r3_class.
inline unsigned x2r3_expected_dim(unsigned n, const std::string& cls) {
    const unsigned r = n / 2;
    if (cls == "outside") return 2;
    if (cls == "subfield") return r + 1;
    if (cls == "G") return r + 2;
    if (cls == "subfield-not-G") return r;
    throw std::invalid_argument("unknown class " + cls);
}

/// Class-labelled histogram for f = tr(x^{2^r + 3}), n = 2r.
inline DimHistogram dim_sweep_x2r3(const ContextPtr& ctx, unsigned threads = 1) {
    const unsigned n = ctx->degree();
    if (n % 2 != 0 || n < 4)
        throw std::invalid_argument("dim_sweep_x2r3: n must be even and at least 4");
    const std::uint64_t d = (std::uint64_t{1} << (n / 2)) + 3;
    const auto f = from_trace_monomial(ctx, 1, d);
    const auto dims = first_derivative_dims(f, threads);
    DimHistogram h;
    h.sweep = {"x2r3", n, d, 1, "a", std::nullopt};
    for (std::size_t i = 1; i < dims.size(); ++i) {
        const auto a = static_cast<Element>(i);
        ++h.counts[dims[a]];
        ++h.by_class[x2r3_class(*ctx, a)][dims[a]];
    }
    return h;
}

struct PqrCounts {
    std::uint64_t n_p = 0, n_q = 0, n_q1 = 0, n_r = 0, n_r1 = 0;
    bool operator==(const PqrCounts&) const = default;
};

/// Values of R, Q, P at x for the tr(x^15) kernel polynomials.
struct PqrValues {
    Element r, q, p;
};

inline PqrValues pqr_eval(const FieldContext& F, Element a, Element b, Element x) {
    const Element bb = F.sqr(b) ^ b;
    const Element xx = F.sqr(x) ^ x;
    const Element y = F.sqr(xx) ^ F.mul(xx, bb);
    const Element r = F.mul(F.mul(F.pow(a, 30), F.pow(bb, 6)), F.pow(y, 4)) ^
                      F.mul(F.mul(F.pow(a, 15), F.pow(bb, 5)), y);
    const Element q = F.mul(F.pow(bb, -4), F.mul(r, r ^ 1U));
    const Element p = F.mul(q, q ^ 1U);
    return {r, q, p};
}

inline void require_pqr_params(Element a, Element b) {
    if (a == 0) throw std::invalid_argument("pqr: a must be nonzero");
    if (b <= 1) throw std::invalid_argument("pqr: b must not be 0 or 1");
}

/// Roots of P in increasing order.
inline std::vector<Element> pqr_roots_p(const ContextPtr& ctx, Element a, Element b) {
    require_pqr_params(a, b);
    std::vector<Element> out;
    for (std::uint64_t x = 0; x < ctx->size(); ++x)
        if (pqr_eval(*ctx, a, b, static_cast<Element>(x)).p == 0) out.push_back(static_cast<Element>(x));
    return out;
}

/// Root counts of P, Q, Q + 1, R, R + 1 over F_{2^n} by full evaluation.
inline PqrCounts pqr_root_counts(const ContextPtr& ctx, Element a, Element b) {
    require_pqr_params(a, b);
    PqrCounts c;
    for (std::uint64_t x = 0; x < ctx->size(); ++x) {
        const auto v = pqr_eval(*ctx, a, b, static_cast<Element>(x));
        c.n_p += v.p == 0;
        c.n_q += v.q == 0;
        c.n_q1 += v.q == 1;
        c.n_r += v.r == 0;
        c.n_r1 += v.r == 1;
    }
    // P, Q and R are linearized, so their root sets are subspaces.
    for (auto [name, v] : {std::pair{"P", c.n_p}, {"Q", c.n_q}, {"R", c.n_r}})
        if (v == 0 || (v & (v - 1)) != 0)
            throw std::logic_error(std::string("pqr_root_counts: root count of ") + name +
                                   " is not a power of two");
    return c;
}

/// Checks on a single quadratic used by the verification suites.
struct QuadraticCheck {
    unsigned k = 0;
    unsigned k_brute = 0;
    bool parity_ok = false;
    bool spectrum_ok = false;
    bool parseval_ok = false;
    bool ok() const { return k == k_brute && parity_ok && spectrum_ok && parseval_ok; }
};

inline QuadraticCheck check_quadratic(const TruthTable& q) {
    QuadraticCheck c;
    const auto rep = kernel_from_evaluator(q.n(), [&](Element x) { return static_cast<int>(q.get(x)); });
    c.k = rep.k;
    c.k_brute = kernel_dim_brute(q);
    c.parity_ok = (q.n() - c.k) % 2 == 0;
    const auto w = walsh_raw(q);
    std::int64_t s = 0;
    for (auto v : w) s += static_cast<std::int64_t>(v) * v;
    c.parseval_ok = s == (std::int64_t{1} << (2 * q.n()));
    c.spectrum_ok = c.parity_ok && spectrum_multiset(w) == spectrum_from_dim(q.n(), c.k, rep.f0);
    return c;
}

}  // namespace nlkit
