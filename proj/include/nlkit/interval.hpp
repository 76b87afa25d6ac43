#pragma once

// Certified real arithmetic for nested radicals.
//
// A Real is either an exact rational or an enclosure [lo, hi] / 2^S with
// integer endpoints. Square roots of rationals that are perfect squares stay
// exact; everything else is enclosed with outward rounding. Expr builds a
// formula once and evaluates it at any precision.

#include <boost/multiprecision/cpp_int.hpp>

#include <concepts>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlkit::exact {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

inline cpp_int floor_div(const cpp_int& a, const cpp_int& b) {
    if (b <= 0) throw std::invalid_argument("floor_div: divisor must be positive");
    cpp_int q = a / b;
    if (a < 0 && q * b != a) --q;
    return q;
}

inline cpp_int ceil_div(const cpp_int& a, const cpp_int& b) { return -floor_div(-a, b); }

inline cpp_int floor_q(const cpp_rational& q) {
    return floor_div(boost::multiprecision::numerator(q), boost::multiprecision::denominator(q));
}

inline cpp_int ceil_q(const cpp_rational& q) { return -floor_q(-q); }

inline cpp_int isqrt_floor(const cpp_int& v) {
    if (v < 0) throw std::domain_error("square root of a negative number");
    return boost::multiprecision::sqrt(v);
}

inline cpp_int isqrt_ceil(const cpp_int& v) {
    cpp_int s = isqrt_floor(v);
    if (s * s != v) ++s;
    return s;
}

inline bool is_square(const cpp_int& v) {
    if (v < 0) return false;
    const cpp_int s = isqrt_floor(v);
    return s * s == v;
}

inline cpp_int pow2_int(unsigned e) { return cpp_int(1) << e; }

/// 2^e for any integer e, as a rational.
inline cpp_rational pow2_q(long long e) {
    if (e >= 0) return cpp_rational(pow2_int(static_cast<unsigned>(e)));
    return cpp_rational(cpp_int(1), pow2_int(static_cast<unsigned>(-e)));
}

inline std::string to_string(const cpp_rational& q) {
    std::ostringstream s;
    s << boost::multiprecision::numerator(q);
    if (boost::multiprecision::denominator(q) != 1) s << '/' << boost::multiprecision::denominator(q);
    return s.str();
}

inline std::string to_string(const cpp_int& v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

class Real {
public:
    static Real exact(cpp_rational q) {
        Real r;
        r.q_ = std::move(q);
        return r;
    }
    static Real enclosure(cpp_int lo, cpp_int hi, unsigned scale) {
        if (lo > hi) throw std::logic_error("enclosure endpoints out of order");
        Real r;
        r.lo_ = std::move(lo);
        r.hi_ = std::move(hi);
        r.scale_ = scale;
        return r;
    }

    bool is_exact() const { return q_.has_value(); }
    const cpp_rational& value() const { return *q_; }
    unsigned scale() const { return scale_; }

    /// Endpoints scaled by 2^s; exact values are rounded outward.
    cpp_int lo(unsigned s) const {
        if (q_) return floor_q(*q_ * cpp_rational(pow2_int(s)));
        return lo_;
    }
    cpp_int hi(unsigned s) const {
        if (q_) return ceil_q(*q_ * cpp_rational(pow2_int(s)));
        return hi_;
    }

    /// floor of the value when the enclosure certifies it.
    std::optional<cpp_int> certified_floor() const {
        if (q_) return floor_q(*q_);
        const cpp_int one = pow2_int(scale_);
        cpp_int a = floor_div(lo_, one), b = floor_div(hi_, one);
        if (a == b) return a;
        return std::nullopt;
    }

    std::optional<cpp_int> certified_ceil() const {
        if (q_) return ceil_q(*q_);
        const cpp_int one = pow2_int(scale_);
        cpp_int a = ceil_div(lo_, one), b = ceil_div(hi_, one);
        if (a == b) return a;
        return std::nullopt;
    }

    /// Decimal rendering of the midpoint, for reports only.
    std::string approx(int digits = 6) const {
        cpp_rational mid = q_ ? *q_ : cpp_rational(lo_ + hi_, pow2_int(scale_ + 1));
        const bool neg = mid < 0;
        if (neg) mid = -mid;
        cpp_int ten = 1;
        for (int i = 0; i < digits; ++i) ten *= 10;
        const cpp_int v = floor_q(mid * cpp_rational(ten) + cpp_rational(1, 2));
        std::string s = to_string(cpp_int(v / ten));
        std::string frac = to_string(cpp_int(v % ten));
        frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
        return (neg ? "-" : "") + s + "." + frac;
    }

private:
    Real() = default;
    std::optional<cpp_rational> q_;
    cpp_int lo_, hi_;
    unsigned scale_ = 0;
};

inline unsigned common_scale(const Real& a, const Real& b) {
    if (!a.is_exact() && !b.is_exact() && a.scale() != b.scale())
        throw std::logic_error("mixing enclosures of different precision");
    return a.is_exact() ? b.scale() : a.scale();
}

inline Real operator+(const Real& a, const Real& b) {
    if (a.is_exact() && b.is_exact()) return Real::exact(a.value() + b.value());
    const unsigned s = common_scale(a, b);
    return Real::enclosure(a.lo(s) + b.lo(s), a.hi(s) + b.hi(s), s);
}

inline Real operator-(const Real& a) {
    if (a.is_exact()) return Real::exact(-a.value());
    return Real::enclosure(-a.hi(a.scale()), -a.lo(a.scale()), a.scale());
}

inline Real operator-(const Real& a, const Real& b) { return a + (-b); }

inline Real operator*(const Real& a, const Real& b) {
    if (a.is_exact() && b.is_exact()) return Real::exact(a.value() * b.value());
    if (a.is_exact() || b.is_exact()) {
        const Real& c = a.is_exact() ? a : b;
        const Real& x = a.is_exact() ? b : a;
        const unsigned s = x.scale();
        const cpp_int p = boost::multiprecision::numerator(c.value());
        const cpp_int q = boost::multiprecision::denominator(c.value());
        cpp_int l = x.lo(s) * p, h = x.hi(s) * p;
        if (p < 0) std::swap(l, h);
        return Real::enclosure(floor_div(l, q), ceil_div(h, q), s);
    }
    const unsigned s = common_scale(a, b);
    const cpp_int c[4] = {a.lo(s) * b.lo(s), a.lo(s) * b.hi(s), a.hi(s) * b.lo(s), a.hi(s) * b.hi(s)};
    cpp_int mn = c[0], mx = c[0];
    for (const auto& v : c) {
        if (v < mn) mn = v;
        if (v > mx) mx = v;
    }
    const cpp_int one = pow2_int(s);
    return Real::enclosure(floor_div(mn, one), ceil_div(mx, one), s);
}

/// sqrt at precision s. Exact when the argument is the square of a rational.
inline Real sqrt(const Real& x, unsigned s) {
    if (x.is_exact()) {
        const cpp_rational& q = x.value();
        if (q < 0) throw std::domain_error("negative radicand " + to_string(q));
        const cpp_int p = boost::multiprecision::numerator(q);
        const cpp_int d = boost::multiprecision::denominator(q);
        if (is_square(p) && is_square(d)) return Real::exact(cpp_rational(isqrt_floor(p), isqrt_floor(d)));
        const cpp_int scaled = pow2_int(2 * s);
        return Real::enclosure(isqrt_floor(floor_div(p * scaled, d)),
                               isqrt_ceil(ceil_div(p * scaled, d)), s);
    }
    if (x.scale() != s) throw std::logic_error("sqrt precision mismatch");
    if (x.hi(s) < 0) throw std::domain_error("negative radicand");
    const cpp_int lo = x.lo(s) < 0 ? cpp_int(0) : x.lo(s);
    const cpp_int one = pow2_int(s);
    return Real::enclosure(isqrt_floor(lo * one), isqrt_ceil(x.hi(s) * one), s);
}

/// 2^e for a rational e whose denominator is a power of two.
inline Real pow2(const cpp_rational& e, unsigned s) {
    const cpp_int num = boost::multiprecision::numerator(e);
    const cpp_int den = boost::multiprecision::denominator(e);
    if ((den & (den - 1)) != 0)
        throw std::invalid_argument("pow2: exponent denominator must be a power of two");
    const cpp_int m = floor_div(num, den);
    const cpp_int f = num - m * den;
    const Real whole = Real::exact(pow2_q(static_cast<long long>(m)));
    if (f == 0) return whole;
    // 2^{f/2^k} is the product of 2^{1/2^j} over the set bits of f.
    const unsigned k = static_cast<unsigned>(boost::multiprecision::msb(den));
    Real v = Real::exact(1);
    Real root = Real::exact(2);
    for (unsigned j = 1; j <= k; ++j) {
        root = sqrt(root, s);
        if (boost::multiprecision::bit_test(f, k - j)) v = v * root;
    }
    return whole * v;
}

// ---------------------------------------------------------------------------
// Expression trees

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Const, Pow2, Add, Sub, Mul, Sqrt };
    Kind kind;
    cpp_rational value;                 // Const value or Pow2 exponent
    ExprPtr a, b;
    std::optional<cpp_rational> folded;  // exact value when rational
};

inline ExprPtr make_expr(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

inline ExprPtr num(const cpp_rational& v) { return make_expr({Expr::Kind::Const, v, nullptr, nullptr, v}); }
inline ExprPtr num(long long v) { return num(cpp_rational(v)); }
inline ExprPtr num(long long p, long long q) { return num(cpp_rational(p, q)); }

inline ExprPtr p2(const cpp_rational& e) {
    std::optional<cpp_rational> f;
    if (boost::multiprecision::denominator(e) == 1)
        f = pow2_q(static_cast<long long>(boost::multiprecision::numerator(e)));
    return make_expr({Expr::Kind::Pow2, e, nullptr, nullptr, f});
}

inline ExprPtr operator+(const ExprPtr& x, const ExprPtr& y) {
    std::optional<cpp_rational> f;
    if (x->folded && y->folded) f = *x->folded + *y->folded;
    return make_expr({Expr::Kind::Add, 0, x, y, f});
}
inline ExprPtr operator-(const ExprPtr& x, const ExprPtr& y) {
    std::optional<cpp_rational> f;
    if (x->folded && y->folded) f = *x->folded - *y->folded;
    return make_expr({Expr::Kind::Sub, 0, x, y, f});
}
inline ExprPtr operator*(const ExprPtr& x, const ExprPtr& y) {
    std::optional<cpp_rational> f;
    if (x->folded && y->folded) f = *x->folded * *y->folded;
    return make_expr({Expr::Kind::Mul, 0, x, y, f});
}
inline ExprPtr sqrt(const ExprPtr& x) {
    std::optional<cpp_rational> f;
    if (x->folded) {
        if (*x->folded < 0) throw std::domain_error("negative radicand " + to_string(*x->folded));
        const cpp_int p = boost::multiprecision::numerator(*x->folded);
        const cpp_int d = boost::multiprecision::denominator(*x->folded);
        if (is_square(p) && is_square(d)) f = cpp_rational(isqrt_floor(p), isqrt_floor(d));
    }
    return make_expr({Expr::Kind::Sqrt, 0, x, nullptr, f});
}

inline Real eval(const ExprPtr& e, unsigned s) {
    if (e->folded) return Real::exact(*e->folded);
    switch (e->kind) {
        case Expr::Kind::Const: return Real::exact(e->value);
        case Expr::Kind::Pow2: return pow2(e->value, s);
        case Expr::Kind::Add: return eval(e->a, s) + eval(e->b, s);
        case Expr::Kind::Sub: return eval(e->a, s) - eval(e->b, s);
        case Expr::Kind::Mul: return eval(e->a, s) * eval(e->b, s);
        case Expr::Kind::Sqrt: return sqrt(eval(e->a, s), s);
    }
    throw std::logic_error("unknown expression kind");
}

/// Formula text with every rational subterm folded to a number.
inline std::string render(const ExprPtr& e) {
    auto wrap = [](const ExprPtr& x) {
        const bool compound = !x->folded && (x->kind == Expr::Kind::Add || x->kind == Expr::Kind::Sub);
        const bool negative = x->folded && *x->folded < 0;
        const std::string s = render(x);
        return compound || negative ? "(" + s + ")" : s;
    };
    if (e->folded) return to_string(*e->folded);
    switch (e->kind) {
        case Expr::Kind::Const: return to_string(e->value);
        case Expr::Kind::Pow2: return "2^(" + to_string(e->value) + ")";
        case Expr::Kind::Add: return render(e->a) + " + " + render(e->b);
        case Expr::Kind::Sub: return render(e->a) + " - " + wrap(e->b);
        case Expr::Kind::Mul: return wrap(e->a) + "*" + wrap(e->b);
        case Expr::Kind::Sqrt: return "sqrt(" + render(e->a) + ")";
    }
    throw std::logic_error("unknown expression kind");
}

inline constexpr unsigned kStartPrecision = 64;
inline constexpr unsigned kMaxPrecision = 1U << 14;

struct CertifiedFloor {
    cpp_int floor;
    Real enclosure;
    unsigned precision;
};

/// floor(value) with precision doubled until the enclosure certifies it.
template <class Eval>
    requires std::invocable<Eval, unsigned>
CertifiedFloor certify_floor(Eval&& eval_at) {
    for (unsigned s = kStartPrecision; s <= kMaxPrecision; s *= 2) {
        Real v = eval_at(s);
        if (auto f = v.certified_floor()) return {*f, v, v.is_exact() ? 0U : s};
    }
    throw std::runtime_error("enclosure too wide to certify the floor at " +
                             std::to_string(kMaxPrecision) + " bits");
}

inline CertifiedFloor certify_floor(const ExprPtr& e) {
    return certify_floor([&](unsigned s) { return eval(e, s); });
}

}  // namespace nlkit::exact
