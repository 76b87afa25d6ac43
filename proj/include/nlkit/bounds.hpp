#pragma once

// Lower bounds on r-th order nonlinearity, evaluated exactly.
//
// Every bound has the shape 2^{n-1} - u with u a nested radical. u is built
// as an Expr, its floor is certified by interval evaluation and the reported
// bound is ceil(2^{n-1} - u) = 2^{n-1} - floor(u), clamped at 0.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlkit/interval.hpp"
#include "nlkit/truth_table.hpp"

namespace nlkit {

using exact::cpp_int;
using exact::cpp_rational;
using exact::ExprPtr;

inline constexpr unsigned kMaxBoundDegree = 256;

struct BoundResult {
    std::string family;  // x7, x2r3, x15, kasami_chain, inverse, generic_carlet
    unsigned n = 0;
    unsigned r = 0;
    std::string radical_trace;       // the subtracted term u
    cpp_rational value_lo, value_hi;  // enclosure of 2^{n-1} - u
    bool value_exact = false;
    std::optional<cpp_rational> radicand;  // outermost radicand when rational
    cpp_int certified_floor_of_deficit;    // floor(u)
    cpp_int lower_bound;                   // max(0, 2^{n-1} - floor(u))
    bool clamped = false;
    unsigned precision_bits = 0;  // 0 when u is rational
    std::optional<cpp_int> closed_form;
    std::optional<cpp_int> recursion;
    std::optional<std::uint64_t> exact_weight;
    std::optional<cpp_int> exact_weight_bound;
    std::string asymptotic;
    cpp_rational dominant_exponent;  // coefficient of n in the leading exponent
};

namespace bounds_detail {

using namespace exact;

inline ExprPtr q(long long p, long long d = 1) { return num(p, d); }
inline ExprPtr pw(long long p, long long d = 1) { return p2(cpp_rational(p, d)); }
inline ExprPtr half() { return q(1, 2); }

inline void require_n(unsigned n, unsigned lo, const char* what) {
    if (n < lo || n > kMaxBoundDegree)
        throw std::invalid_argument(std::string(what) + ": n must lie in [" + std::to_string(lo) + ", " +
                                    std::to_string(kMaxBoundDegree) + "]");
}

struct Evaluated {
    cpp_int floor_u;
    cpp_int bound;
    bool clamped;
    Real u;
    unsigned precision;
};

inline Evaluated evaluate(unsigned n, const CertifiedFloor& c) {
    if (c.floor < 0) throw std::logic_error("negative deficit");
    const cpp_int half_space = pow2_int(n - 1);
    cpp_int b = half_space - c.floor;
    const bool clamped = b < 0;
    if (clamped) b = 0;
    return {c.floor, b, clamped, c.enclosure, c.precision};
}

inline BoundResult make_result(std::string family, unsigned n, unsigned r, const ExprPtr& u) {
    const auto c = certify_floor(u);
    const auto e = evaluate(n, c);
    BoundResult res;
    res.family = std::move(family);
    res.n = n;
    res.r = r;
    res.radical_trace = render(u);
    const cpp_rational top(pow2_int(n - 1));
    if (e.u.is_exact()) {
        res.value_exact = true;
        res.value_lo = res.value_hi = top - e.u.value();
    } else {
        const cpp_int one = pow2_int(e.precision);
        res.value_lo = top - cpp_rational(e.u.hi(e.precision), one);
        res.value_hi = top - cpp_rational(e.u.lo(e.precision), one);
    }
    if (u->kind == Expr::Kind::Mul && u->b && u->b->kind == Expr::Kind::Sqrt && u->b->a->folded)
        res.radicand = *u->b->a->folded;
    res.certified_floor_of_deficit = e.floor_u;
    res.lower_bound = e.bound;
    res.clamped = e.clamped;
    res.precision_bits = e.precision;
    return res;
}

inline cpp_int bound_of(unsigned n, const ExprPtr& u) { return evaluate(n, certify_floor(u)).bound; }

inline ExprPtr x7_deficit(unsigned n) {
    const long long N = n;
    if (N % 2 == 0) {
        ExprPtr inner = q(13, 3) * pw(3 * N - 2, 2) + pw(N) - q(1, 3) * pw(N + 6, 2);
        if (N % 3 == 0) inner = q(13, 3) * pw(3 * N - 2, 2) + pw(N + 2) - q(1, 3) * pw(N + 6, 2);
        return half() * sqrt(inner);
    }
    ExprPtr inner = q(3) * pw(3 * N - 1, 2) + pw(N) - pw(N + 3, 2);
    if (N % 3 == 0) inner = q(3) * pw(3 * N - 1, 2) + pw(N) + q(3) * pw(2 * N + 1, 2) - pw(N + 3, 2);
    return half() * sqrt(inner);
}

// Same radicand before the weight estimate is substituted; only for 3 | n.
inline ExprPtr x7_weight_deficit(unsigned n, std::uint64_t w) {
    const long long N = n;
    const ExprPtr W = num(cpp_rational(cpp_int(w)));
    if (N % 2 == 0)
        return half() * sqrt(q(1, 3) * pw(3 * N + 6, 2) + pw(N) - q(1, 3) * pw(N + 6, 2) - W * pw(N, 2));
    return half() * sqrt(pw(3 * N + 3, 2) + pw(N) - pw(N + 3, 2) - W * pw(N + 1, 2));
}

inline ExprPtr x2r3_deficit(unsigned n) {
    const long long N = n;
    const long long r = N / 2;
    if (r % 2 == 1)
        return half() * sqrt(pw(3 * N + 2, 2) + pw(5 * N + 2, 4) - pw(N) - pw(3 * N + 2, 4));
    return half() * sqrt(pw(3 * N + 2, 2) + q(1, 3) * pw(5 * N + 8, 4) - pw(N) - q(1, 3) * pw(3 * N + 8, 4));
}

inline ExprPtr x15_deficit(unsigned n) {
    const long long N = n;
    ExprPtr inner;
    if (N % 2 == 0)
        inner = q(1, 3) * pw(3 * N + 8, 2) + q(7, 3) * pw(N + 1) - q(1, 3) * pw(N + 10, 2);
    else
        inner = q(29, 8) * pw(3 * N + 1, 2) + pw(N + 1) - q(7) * pw(N + 5, 2);
    return half() * sqrt((pw(N) - q(1)) * sqrt(inner) + pw(N));
}

inline ExprPtr kasami_recursion_deficit(unsigned n, unsigned r) {
    const long long N = n;
    ExprPtr u = pw(N + 2 * static_cast<long long>(r) - 2, 2);
    for (int i = static_cast<int>(r) - 2; i >= 0; --i)
        u = half() * sqrt(pw(N) * q(i + 1) + pw(N + 1) * u);
    return u;
}

inline ExprPtr kasami_closed_deficit(unsigned n, unsigned r) {
    const cpp_rational N(n), R(r);
    const cpp_rational two_r(pow2_int(r));
    ExprPtr sum = p2((1 - 1 / two_r) * N + R / (two_r / 2));
    for (unsigned j = 1; j + 1 <= r; ++j) {
        const cpp_rational m(pow2_int(j) - 1);
        sum = sum + q(j) * p2(m / two_r * N - m / (two_r / 2) * R - cpp_rational(j));
    }
    return half() * sum;
}

inline ExprPtr inverse_deficit(unsigned n, unsigned r) {
    const long long N = n;
    if (r == 2) return half() * sqrt((pw(N) - q(1)) * pw(N + 4, 2) + q(3) * pw(N));
    ExprPtr l = half() * sqrt((pw(N) - q(1)) * sqrt(pw(3 * N + 6, 2) + q(3) * pw(N + 1) - pw(N + 6, 2) + q(16)) +
                              pw(N));
    for (unsigned k = 4; k <= r; ++k) l = sqrt((pw(N) - q(1)) * (l + q(1)) + pw(N - 2));
    return l;
}

inline ExprPtr inverse_closed_deficit(unsigned n, unsigned r) {
    const cpp_rational N(n);
    const cpp_rational two_r(pow2_int(r));
    return p2((1 - 1 / two_r) * N - 2 / two_r) + q(3) * p2((cpp_rational(1, 2) - 1 / two_r) * N);
}

}  // namespace bounds_detail

/// floor(sqrt(p/q)) with an enclosure of sqrt(p/q) at the given precision.
struct SqrtFloor {
    cpp_int floor;
    exact::Real enclosure;
};

inline SqrtFloor certified_sqrt_floor(const cpp_int& p, const cpp_int& q, unsigned guard_bits = 64) {
    if (p <= 0 || q <= 0) throw std::invalid_argument("certified_sqrt_floor: p and q must be positive");
    const cpp_int fl = exact::isqrt_floor(p / q);
    const auto enc = exact::sqrt(exact::Real::exact(cpp_rational(p, q)), guard_bits);
    const auto f = enc.certified_floor();
    if (!f) throw std::runtime_error("certified_sqrt_floor: enclosure too wide, retry with more guard bits");
    if (*f != fl) throw std::logic_error("certified_sqrt_floor: enclosure disagrees with integer square root");
    return {fl, enc};
}

/// One step of the derivative recursion: 2^{n-1} - 1/2 sqrt(2^{2n} - 2 sum).
inline BoundResult carlet_step(unsigned n, const cpp_int& sum_nl) {
    using namespace bounds_detail;
    require_n(n, 1, "carlet_step");
    if (sum_nl < 0 || sum_nl > exact::pow2_int(2 * n - 1))
        throw std::invalid_argument("carlet_step: sum must lie in [0, 2^{2n-1}]");
    const ExprPtr u = half() * exact::sqrt(pw(2 * static_cast<long long>(n)) - q(2) * exact::num(cpp_rational(sum_nl)));
    auto res = make_result("generic_carlet", n, 1, u);
    res.asymptotic = "n/a";
    return res;
}

/// The recursion applied t times. `leaf_sums` holds, for each prefix
/// (a_1, ..., a_{t-1}) in lexicographic order with a_{t-1} fastest, the sum
/// over a_t of nl_{r-t}(D_{a_t} ... D_{a_1} f). Size 2^{n(t-1)}.
inline BoundResult carlet_nested(unsigned n, unsigned t, const std::vector<cpp_int>& leaf_sums) {
    using namespace exact;
    bounds_detail::require_n(n, 1, "carlet_nested");
    if (t == 0) throw std::invalid_argument("carlet_nested: depth must be at least 1");
    if (static_cast<unsigned long long>(n) * (t - 1) > 30)
        throw std::invalid_argument("carlet_nested: too many leaves");
    const std::size_t group = std::size_t{1} << n;
    const std::size_t leaves = std::size_t{1} << (n * (t - 1));
    if (leaf_sums.size() != leaves)
        throw std::invalid_argument("carlet_nested: expected " + std::to_string(leaves) + " leaf sums");
    const cpp_int full = pow2_int(2 * n);
    for (const auto& s : leaf_sums)
        if (s < 0 || 2 * s > full) throw std::invalid_argument("carlet_nested: leaf sum out of range");

    auto at = [&](unsigned s) {
        std::vector<Real> level;
        level.reserve(leaves);
        for (const auto& s_leaf : leaf_sums) level.push_back(Real::exact(cpp_rational(full - 2 * s_leaf)));
        for (unsigned d = 1; d < t; ++d) {
            std::vector<Real> up;
            up.reserve(level.size() / group);
            for (std::size_t g = 0; g < level.size(); g += group) {
                Real acc = Real::exact(0);
                for (std::size_t i = 0; i < group; ++i) acc = acc + sqrt(level[g + i], s);
                up.push_back(acc);
            }
            level = std::move(up);
        }
        return Real::exact(cpp_rational(1, 2)) * sqrt(level.front(), s);
    };
    const auto c = certify_floor(at);
    const auto e = bounds_detail::evaluate(n, c);
    BoundResult res;
    res.family = "generic_carlet";
    res.n = n;
    res.r = t;
    res.radical_trace = t == 1 ? "1/2*sqrt(" + to_string(cpp_int(full - 2 * leaf_sums.front())) + ")"
                               : "1/2*sqrt(nested sum of " + std::to_string(leaves) + " radicands, depth " +
                                     std::to_string(t) + ")";
    const cpp_rational top(pow2_int(n - 1));
    if (e.u.is_exact()) {
        res.value_exact = true;
        res.value_lo = res.value_hi = top - e.u.value();
    } else {
        const cpp_int one = pow2_int(e.precision);
        res.value_lo = top - cpp_rational(e.u.hi(e.precision), one);
        res.value_hi = top - cpp_rational(e.u.lo(e.precision), one);
    }
    res.certified_floor_of_deficit = e.floor_u;
    res.lower_bound = e.bound;
    res.clamped = e.clamped;
    res.precision_bits = e.precision;
    res.asymptotic = "n/a";
    return res;
}

/// Second-order bound for tr(x^7). With `exact_weight`, also evaluates the
/// 3 | n radicand with the true weight of tr(x^7) in place of its estimate.
inline BoundResult bound_nl2_x7(unsigned n, bool exact_weight = false) {
    using namespace bounds_detail;
    require_n(n, 4, "bound_nl2_x7");
    auto res = make_result("x7", n, 2, x7_deficit(n));
    res.dominant_exponent = cpp_rational(3, 4);
    res.asymptotic = n % 2 == 0 ? "2^(n-1) - 2^(3n/4 - 3/2 + log2(13)/2 - log2(3)/2) - O(2^(n/4))"
                                : "2^(n-1) - 2^((3n-5)/4 + log2(3)/2) - O(2^(n/4))";
    if (exact_weight && n % 3 == 0) {
        if (n > kMaxDegree) throw std::invalid_argument("bound_nl2_x7: exact weight needs n <= 24");
        const auto w = weight(from_trace_monomial(make_context(n), 1, 7));
        res.exact_weight = w;
        res.exact_weight_bound = bound_of(n, x7_weight_deficit(n, w));
    }
    return res;
}

/// Second-order bound for tr(x^{2^r+3}) with n = 2r.
inline BoundResult bound_nl2_x2r3(unsigned n) {
    using namespace bounds_detail;
    require_n(n, 4, "bound_nl2_x2r3");
    if (n % 2) throw std::invalid_argument("bound_nl2_x2r3: n must be even");
    auto res = make_result("x2r3", n, 2, x2r3_deficit(n));
    res.dominant_exponent = cpp_rational(3, 4);
    res.asymptotic = "2^(n-1) - 2^(3n/4 - 1/2) - O(2^(n/2))";
    return res;
}

/// Third-order bound for tr(x^15).
inline BoundResult bound_nl3_x15(unsigned n) {
    using namespace bounds_detail;
    require_n(n, 6, "bound_nl3_x15");
    auto res = make_result("x15", n, 3, x15_deficit(n));
    res.dominant_exponent = cpp_rational(7, 8);
    res.asymptotic = n % 2 == 0 ? "2^(n-1) - 2^(7n/8 - log2(3)/4) - O(2^(3n/8))"
                                : "2^(n-1) - 2^(7n/8 - 13/8 + log2(29)/4) - O(2^(3n/8))";
    return res;
}

/// r-th order bound for tr(x^{2^{r+1}-1}). lower_bound is the recursion.
inline BoundResult bound_nlr_kasami_chain(unsigned n, unsigned r) {
    using namespace bounds_detail;
    require_n(n, 4, "bound_nlr_kasami_chain");
    if (r < 2 || r + 2 > n) throw std::invalid_argument("bound_nlr_kasami_chain: need 2 <= r <= n-2");
    auto res = make_result("kasami_chain", n, r, kasami_recursion_deficit(n, r));
    res.recursion = res.lower_bound;
    res.closed_form = bound_of(n, kasami_closed_deficit(n, r));
    res.dominant_exponent = 1 - cpp_rational(1, pow2_int(r));
    res.asymptotic = "2^(n-1) - 2^((1-2^-" + std::to_string(r) + ")n + " +
                     exact::to_string(cpp_rational(r, pow2_int(r - 1))) + " - 1) - O(2^(n/2))";
    return res;
}

/// r-th order bound for the inverse function tr(x^{2^n-2}), r >= 2.
inline BoundResult bound_nlr_inverse(unsigned n, unsigned r) {
    using namespace bounds_detail;
    require_n(n, 3, "bound_nlr_inverse");
    if (r < 2 || r >= n) throw std::invalid_argument("bound_nlr_inverse: need 2 <= r <= n-1");
    auto res = make_result("inverse", n, r, inverse_deficit(n, r));
    res.recursion = res.lower_bound;
    if (r >= 3 && r + 3 <= n) res.closed_form = bound_of(n, inverse_closed_deficit(n, r));
    res.dominant_exponent = 1 - cpp_rational(1, pow2_int(r));
    res.asymptotic = "2^(n-1) - 2^((1-2^-" + std::to_string(r) + ")n - " +
                     exact::to_string(cpp_rational(1, pow2_int(r - 1))) + ") - O(2^(n/2))";
    return res;
}

/// ceil(2^{n-1} - (d-1)/2 * 2^{n/2}), clamped at 0.
inline cpp_int weil_weight_bound(unsigned n, std::uint64_t d) {
    using namespace bounds_detail;
    require_n(n, 1, "weil_weight_bound");
    if (d % 2 == 0) throw std::invalid_argument("weil_weight_bound: d must be odd");
    const ExprPtr u = exact::num(cpp_rational(cpp_int(d - 1), 2)) * pw(n, 2);
    return evaluate(n, exact::certify_floor(u)).bound;
}

/// Terms c * 2^{e n} of RHS - LHS after squaring the right side symbolically.
struct PowerTerm {
    cpp_rational coeff;
    cpp_rational exponent;  // multiplies n
};

inline std::vector<PowerTerm> power_sum_gap(const std::vector<cpp_rational>& c, const std::vector<cpp_rational>& alpha) {
    if (c.empty() || c.size() != alpha.size()) throw std::invalid_argument("power sum: size mismatch");
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] <= 0) throw std::invalid_argument("power sum: coefficients must be positive");
        if (alpha[i] <= 0) throw std::invalid_argument("power sum: exponents must be positive");
        if (i > 0 && !(alpha[i] < alpha[i - 1]))
            throw std::invalid_argument("power sum: exponents must be strictly decreasing");
    }
    // (sqrt(c1) X + sum_{i>=2} c_i/(2 sqrt(c1)) Y_i)^2 expands to c1 X^2 +
    // sum_{i>=2} c_i Y_i X + cross terms; the first two match the left side.
    std::map<cpp_rational, cpp_rational> gap;
    for (std::size_t i = 1; i < c.size(); ++i)
        for (std::size_t j = 1; j < c.size(); ++j)
            gap[alpha[i] + alpha[j] - alpha[0]] += c[i] * c[j] / (4 * c[0]);
    std::vector<PowerTerm> out;
    for (auto it = gap.rbegin(); it != gap.rend(); ++it)
        if (it->second != 0) out.push_back({it->second, it->first});
    return out;
}

/// sum c_i 2^{alpha_i n} <= (sqrt(c1) 2^{alpha_1 n/2} + sum_{i>=2} c_i/(2 sqrt(c1)) 2^{(alpha_i - alpha_1/2) n})^2.
inline bool check_power_sum_inequality(const std::vector<cpp_rational>& c, const std::vector<cpp_rational>& alpha,
                                       unsigned n) {
    (void)n;  // every gap term is c * 2^{e n} with c >= 0, so the sign holds for all n
    for (const auto& t : power_sum_gap(c, alpha))
        if (t.coeff < 0) return false;
    return true;
}

}  // namespace nlkit
