#pragma once

// Verification suites. Each suite walks a parameter grid, recomputes the
// claimed quantity exhaustively or on seeded samples, and records one case
// per grid point with the expected and observed values.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlkit/bounds.hpp"
#include "nlkit/moduli.hpp"
#include "nlkit/parallel.hpp"
#include "nlkit/quadratic.hpp"
#include "nlkit/truth_table.hpp"

namespace nlkit::verify {

using json = nlohmann::ordered_json;

inline constexpr std::uint64_t kDefaultSeed = 20240611;

enum class Status { Pass, Fail, Skipped };

inline std::string status_name(Status s) {
    switch (s) {
        case Status::Pass: return "pass";
        case Status::Fail: return "fail";
        case Status::Skipped: return "skipped";
    }
    return "fail";
}

inline Status parse_status(const std::string& s) {
    if (s == "pass") return Status::Pass;
    if (s == "fail") return Status::Fail;
    if (s == "skipped") return Status::Skipped;
    throw std::invalid_argument("unknown case status '" + s + "'");
}

struct CaseResult {
    json params = json::object();
    Status status = Status::Pass;
    json expected = json::object();
    json got = json::object();
    std::string reason;  // set for skipped and failed cases

    bool operator==(const CaseResult&) const = default;
};

struct VerificationReport {
    std::string suite;
    json grid = json::object();
    std::uint64_t seed = kDefaultSeed;
    std::vector<CaseResult> cases;
    std::map<std::string, std::uint64_t> counters;

    std::size_t count(Status s) const {
        return static_cast<std::size_t>(
            std::count_if(cases.begin(), cases.end(), [&](const CaseResult& c) { return c.status == s; }));
    }
    std::size_t failures() const { return count(Status::Fail); }
    std::size_t skipped() const { return count(Status::Skipped); }
    bool passed() const { return failures() == 0; }

    bool operator==(const VerificationReport&) const = default;
};

inline json to_json(const CaseResult& c) {
    json j;
    j["params"] = c.params;
    j["status"] = status_name(c.status);
    j["expected"] = c.expected;
    j["got"] = c.got;
    if (!c.reason.empty()) j["reason"] = c.reason;
    return j;
}

inline json to_json(const VerificationReport& r) {
    json j;
    j["suite"] = r.suite;
    j["grid"] = r.grid;
    json cases = json::array();
    for (const auto& c : r.cases) cases.push_back(to_json(c));
    j["cases"] = std::move(cases);
    j["seed"] = r.seed;
    json counters = json::object();
    for (const auto& [k, v] : r.counters) counters[k] = v;
    j["counters"] = std::move(counters);
    j["passed"] = r.passed();
    return j;
}

inline VerificationReport report_from_json(const json& j) {
    VerificationReport r;
    r.suite = j.at("suite").get<std::string>();
    r.grid = j.at("grid");
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& c : j.at("cases")) {
        CaseResult cr;
        cr.params = c.at("params");
        cr.status = parse_status(c.at("status").get<std::string>());
        cr.expected = c.at("expected");
        cr.got = c.at("got");
        if (c.contains("reason")) cr.reason = c.at("reason").get<std::string>();
        r.cases.push_back(std::move(cr));
    }
    if (j.contains("counters"))
        for (const auto& [k, v] : j.at("counters").items()) r.counters[k] = v.get<std::uint64_t>();
    return r;
}

struct Options {
    unsigned threads = 1;
    std::uint64_t seed = kDefaultSeed;
    std::vector<unsigned> ns;  // empty: the suite's default grid
    std::vector<unsigned> rs;  // kasami suite only
    ModuliTable moduli;        // empty: pinned defaults
    std::uint64_t budget = kDefaultWhtBudget;
    unsigned samples = 100;        // sampled directions per grid point
    unsigned chain_samples = 200;  // random derivative chains per grid point
    unsigned formula_samples = 20;
    unsigned h_samples = 20;
    unsigned exhaustive_max_n = 9;  // x15: every a up to this n
    bool audit_quadratics = true;
};

namespace detail {

inline std::vector<unsigned> range(unsigned lo, unsigned hi) {
    std::vector<unsigned> v;
    for (unsigned n = lo; n <= hi; ++n) v.push_back(n);
    return v;
}

inline std::vector<unsigned> grid_or(const std::vector<unsigned>& chosen, std::vector<unsigned> fallback) {
    return chosen.empty() ? fallback : chosen;
}

inline void require_in(const std::vector<unsigned>& ns, unsigned lo, unsigned hi, const char* suite) {
    for (unsigned n : ns)
        if (n < lo || n > hi)
            throw std::invalid_argument(std::string(suite) + ": n = " + std::to_string(n) + " outside [" +
                                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

inline ContextPtr context(unsigned n, const Options& o) { return make_context(n, o.moduli); }

inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Generator for one grid point; independent of which other points run.
inline std::mt19937_64 rng_for(std::uint64_t seed, std::uint64_t tag, unsigned n, unsigned r = 0) {
    return std::mt19937_64(mix(mix(mix(seed ^ tag) + n) + r));
}

inline Element draw(std::mt19937_64& g, std::uint64_t lo, std::uint64_t hi) {
    return static_cast<Element>(lo + g() % (hi - lo + 1));
}

inline json histogram_json(const std::map<unsigned, std::uint64_t>& h) {
    json j = json::object();
    for (const auto& [k, c] : h) j[std::to_string(k)] = c;
    return j;
}

inline json pow2_set(std::initializer_list<unsigned> exps) {
    json j = json::array();
    for (unsigned e : exps) j.push_back(std::uint64_t{1} << e);
    return j;
}

/// Outcome of the quadratic checks on a batch of derivatives.
struct Audit {
    std::uint64_t checked = 0;
    std::uint64_t failed = 0;
    std::string first_failure;

    void add(const TruthTable& q, std::optional<unsigned> expect_k, const std::string& label) {
        const auto c = check_quadratic(q);
        ++checked;
        if (c.ok() && (!expect_k || c.k == *expect_k)) return;
        if (failed++ == 0)
            first_failure = label + ": k=" + std::to_string(c.k) + " brute=" + std::to_string(c.k_brute) +
                            " parity=" + std::to_string(c.parity_ok) + " spectrum=" +
                            std::to_string(c.spectrum_ok) + " parseval=" + std::to_string(c.parseval_ok);
    }
    void merge(const Audit& o) {
        checked += o.checked;
        if (o.failed && !failed) first_failure = o.first_failure;
        failed += o.failed;
    }
    json to_json() const {
        json j;
        j["checked"] = checked;
        j["failed"] = failed;
        if (failed) j["first_failure"] = first_failure;
        return j;
    }
};

inline void record_audit(VerificationReport& rep, CaseResult& c, const Audit& a) {
    rep.counters["quadratics_audited"] += a.checked;
    rep.counters["quadratic_audit_failures"] += a.failed;
    if (a.checked == 0) return;
    c.got["quadratic_audit"] = a.to_json();
    if (a.failed) {
        c.status = Status::Fail;
        if (c.reason.empty()) c.reason = "quadratic audit: " + a.first_failure;
    }
}

/// Audits D_a f for every a in [1, 2^n), in parallel, merged in a order.
inline Audit audit_first_derivatives(const TruthTable& f, const std::vector<unsigned>& dims, unsigned threads) {
    const std::size_t count = f.size() - 1;
    const unsigned workers = std::max(1U, threads);
    std::vector<Audit> parts(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    parallel_for(workers, workers, [&](std::size_t w) {
        for (std::size_t i = w * chunk; i < std::min(count, (w + 1) * chunk); ++i) {
            const auto a = static_cast<Element>(i + 1);
            parts[w].add(derivative(f, a), dims[a], "a=" + to_hex(a));
        }
    });
    Audit total;
    for (const auto& p : parts) total.merge(p);
    return total;
}

}  // namespace detail

/// Kernel-dimension counts over a in F* predicted for D_a tr(x^7); w is
/// the weight of tr(x^7), used only when 3 | n.
inline std::map<unsigned, std::uint64_t> x7_expected_counts(unsigned n, std::uint64_t w) {
    if (n < 4) throw std::invalid_argument("x7_expected_counts: n must be at least 4");
    const std::uint64_t N = std::uint64_t{1} << n;
    std::map<unsigned, std::uint64_t> out;
    if (n % 2 == 0 && n % 3 != 0) {
        out[2] = (11 * (N / 4) - 2) / 3;
        out[4] = (N / 4 - 1) / 3;
    } else if (n % 2 == 0) {
        if (w % 2 != 0 || w / 2 > (N - 1) / 3) throw std::invalid_argument("x7_expected_counts: bad weight");
        out[2] = 2 * (N - 1) / 3 + w / 2;
        out[4] = (N - 1) / 3 - w / 2;
    } else if (n % 3 != 0) {
        out[1] = N / 2;
        out[3] = N / 2 - 1;
    } else {
        out[1] = w;
        out[3] = N - 1 - w;
    }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
    return out;
}

inline VerificationReport verify_x7_distribution(const Options& o = {}) {
    const auto ns = detail::grid_or(o.ns, detail::range(4, 14));
    detail::require_in(ns, 4, 14, "verify_x7_distribution");
    VerificationReport rep;
    rep.suite = "x7_distribution";
    rep.grid["n"] = ns;
    rep.seed = o.seed;
    for (unsigned n : ns) {
        const auto ctx = detail::context(n, o);
        const auto f = from_trace_monomial(ctx, 1, 7);
        const auto dims = first_derivative_dims(f, o.threads);
        std::map<unsigned, std::uint64_t> got;
        for (std::size_t a = 1; a < dims.size(); ++a) ++got[dims[a]];
        const std::uint64_t w = weight(f);
        const auto expected = x7_expected_counts(n, w);

        CaseResult c;
        c.params["n"] = n;
        if (n % 3 == 0) c.params["weight"] = w;
        c.expected["counts"] = detail::histogram_json(expected);
        c.got["counts"] = detail::histogram_json(got);
        if (got != expected) {
            c.status = Status::Fail;
            c.reason = "histogram mismatch";
        }
        rep.counters["kernels_computed"] += dims.size() - 1;
        if (o.audit_quadratics) detail::record_audit(rep, c, detail::audit_first_derivatives(f, dims, o.threads));
        rep.cases.push_back(std::move(c));
    }
    return rep;
}

inline VerificationReport verify_x2r3_distribution(const Options& o = {}) {
    const auto ns = detail::grid_or(o.ns, {6, 8, 10, 12});
    detail::require_in(ns, 4, 24, "verify_x2r3_distribution");
    VerificationReport rep;
    rep.suite = "x2r3_distribution";
    rep.grid["n"] = ns;
    rep.seed = o.seed;
    for (unsigned n : ns) {
        if (n % 2 != 0) throw std::invalid_argument("verify_x2r3_distribution: n must be even");
        const unsigned r = n / 2;
        const std::uint64_t sub = (std::uint64_t{1} << r) - 1;
        const std::uint64_t outside = (std::uint64_t{1} << n) - 1 - sub;
        std::map<std::string, std::map<unsigned, std::uint64_t>> expected;
        if (r % 2 == 1) {
            expected["subfield"][r + 1] = sub;
        } else {
            expected["G"][r + 2] = sub / 3;
            expected["subfield-not-G"][r] = sub - sub / 3;
        }
        expected["outside"][2] = outside;

        const auto ctx = detail::context(n, o);
        const auto h = dim_sweep_x2r3(ctx, o.threads);
        const auto f = from_trace_monomial(ctx, 1, h.sweep.d);

        CaseResult c;
        c.params["n"] = n;
        c.params["d"] = h.sweep.d;
        for (const auto& [cls, hist] : expected) c.expected["classes"][cls] = detail::histogram_json(hist);
        for (const auto& [cls, hist] : h.by_class) c.got["classes"][cls] = detail::histogram_json(hist);
        if (h.by_class != expected) {
            c.status = Status::Fail;
            c.reason = "class histogram mismatch";
        }

        // nl(D_a f) from the Walsh transform against the class prediction.
        std::vector<std::uint8_t> nl_ok(f.size(), 1);
        parallel_for(f.size() - 1, o.threads, [&](std::size_t i) {
            const auto a = static_cast<Element>(i + 1);
            const unsigned k = x2r3_expected_dim(n, x2r3_class(*ctx, a));
            nl_ok[a] = nonlinearity(derivative(f, a)) == nl_from_dim(n, k);
        });
        const auto nl_bad = static_cast<std::uint64_t>(std::count(nl_ok.begin() + 1, nl_ok.end(), 0));
        c.expected["nl_mismatches"] = 0;
        c.got["nl_mismatches"] = nl_bad;
        if (nl_bad && c.status == Status::Pass) {
            c.status = Status::Fail;
            c.reason = "nonlinearity of a derivative differs from its class prediction";
        }
        rep.counters["kernels_computed"] += f.size() - 1;
        if (o.audit_quadratics) {
            std::vector<unsigned> dims(f.size(), 0);
            for (std::size_t a = 1; a < f.size(); ++a)
                dims[a] = x2r3_expected_dim(n, x2r3_class(*ctx, static_cast<Element>(a)));
            detail::record_audit(rep, c, detail::audit_first_derivatives(f, dims, o.threads));
        }
        rep.cases.push_back(std::move(c));
    }
    return rep;
}

/// Count thresholds for the second-derivative spectrum of tr(x^15).
struct X15Thresholds {
    unsigned low_dim;           // #{k <= low_dim} >= low_min
    std::uint64_t low_min;
    unsigned high_dim;          // #{k == high_dim} <= high_max
    std::uint64_t high_max;
};

inline X15Thresholds x15_thresholds(unsigned n) {
    if (n < 6) throw std::invalid_argument("x15_thresholds: n must be at least 6");
    const std::uint64_t N = std::uint64_t{1} << n;
    if (n % 2 == 0) {
        const std::uint64_t h = std::uint64_t{1} << (n / 2 + 1);
        return {4, (2 * N - h - 4 + 2) / 3, 6, (N + h - 2) / 3};
    }
    return {3, 3 * (N >> 4) + 10, 5, 13 * (N >> 4) - 12};
}

inline VerificationReport verify_x15_second_derivatives(const Options& o = {}) {
    const auto ns = detail::grid_or(o.ns, detail::range(6, 12));
    detail::require_in(ns, 6, 12, "verify_x15_second_derivatives");
    VerificationReport rep;
    rep.suite = "x15_second_derivatives";
    rep.grid["n"] = ns;
    rep.grid["exhaustive_max_n"] = o.exhaustive_max_n;
    rep.grid["samples"] = o.samples;
    rep.grid["pqr_pairs"] = 100;
    rep.seed = o.seed;

    for (unsigned n : ns) {
        const auto ctx = detail::context(n, o);
        const FieldContext& F = *ctx;
        const auto f = from_trace_monomial(ctx, 1, 15);
        const auto th = x15_thresholds(n);

        std::vector<Element> as;
        const bool exhaustive = n <= o.exhaustive_max_n;
        if (exhaustive) {
            for (std::uint64_t a = 1; a < F.size(); ++a) as.push_back(static_cast<Element>(a));
        } else {
            auto g = detail::rng_for(o.seed, 15, n);
            std::set<Element> seen;
            while (seen.size() < std::min<std::uint64_t>(o.samples, F.order()))
                seen.insert(detail::draw(g, 1, F.order()));
            as.assign(seen.begin(), seen.end());
        }

        std::vector<CaseResult> cases(as.size());
        std::vector<detail::Audit> audits(as.size());
        parallel_for(as.size(), o.threads, [&](std::size_t i) {
            const Element a = as[i];
            const auto dims = second_derivative_dims(f, a, 1);
            std::map<unsigned, std::uint64_t> hist;
            std::uint64_t degenerate = 0;
            for (int k : dims) {
                if (k < 0)
                    ++degenerate;
                else
                    ++hist[static_cast<unsigned>(k)];
            }
            std::uint64_t low = 0;
            for (const auto& [k, cnt] : hist)
                if (k <= th.low_dim) low += cnt;
            const std::uint64_t high = hist.contains(th.high_dim) ? hist.at(th.high_dim) : 0;

            CaseResult& c = cases[i];
            c.params["n"] = n;
            c.params["a"] = to_hex(a);
            c.params["mode"] = exhaustive ? "exhaustive" : "sampled";
            c.expected["at_most_" + std::to_string(th.low_dim) + "_min"] = th.low_min;
            c.expected["dim_" + std::to_string(th.high_dim) + "_max"] = th.high_max;
            c.expected["degenerate"] = 2;
            c.got["counts"] = detail::histogram_json(hist);
            c.got["at_most_" + std::to_string(th.low_dim)] = low;
            c.got["dim_" + std::to_string(th.high_dim)] = high;
            c.got["degenerate"] = degenerate;
            if (low < th.low_min || high > th.high_max || degenerate != 2) {
                c.status = Status::Fail;
                c.reason = "count inequality violated";
            }
            if (o.audit_quadratics) {
                for (Element b = 2; b < F.size(); ++b)
                    audits[i].add(derivative_chain(f, {a, F.mul(a, b)}), static_cast<unsigned>(dims[b]),
                                  "a=" + to_hex(a) + " b=" + to_hex(b));
            }
        });
        for (std::size_t i = 0; i < cases.size(); ++i) {
            rep.counters["kernels_computed"] += F.size() - 2;
            if (o.audit_quadratics) detail::record_audit(rep, cases[i], audits[i]);
            rep.cases.push_back(std::move(cases[i]));
        }

        // Root counts of P, Q, R on random (a, b) against kernel sizes.
        auto g = detail::rng_for(o.seed, 0x707172, n);
        std::vector<std::pair<Element, Element>> pairs;
        for (int i = 0; i < 100; ++i) {
            const Element a = detail::draw(g, 1, F.order());
            const Element b = detail::draw(g, 2, F.order());
            pairs.emplace_back(a, b);
        }
        std::vector<CaseResult> pc(pairs.size());
        std::vector<detail::Audit> pa(pairs.size());
        parallel_for(pairs.size(), o.threads, [&](std::size_t i) {
            const auto [a, b] = pairs[i];
            CaseResult& c = pc[i];
            c.params["n"] = n;
            c.params["a"] = to_hex(a);
            c.params["b"] = to_hex(b);
            c.params["check"] = "pqr";
            const auto q = derivative_chain(f, {a, F.mul(a, b)});
            const auto rep_q = linear_kernel(q);
            const std::uint64_t kernel_size = std::uint64_t{1} << rep_q.k;
            PqrCounts cnt;
            try {
                cnt = pqr_root_counts(ctx, a, b);
            } catch (const std::logic_error& e) {
                c.status = Status::Fail;
                c.reason = e.what();
                return;
            }
            c.got["N_P"] = cnt.n_p;
            c.got["N_Q"] = cnt.n_q;
            c.got["N_Q+1"] = cnt.n_q1;
            c.got["N_R"] = cnt.n_r;
            c.got["N_R+1"] = cnt.n_r1;
            c.got["kernel_size"] = kernel_size;
            c.expected["N_P"] = "kernel_size";
            c.expected["N_P_in"] = n % 2 == 0 ? detail::pow2_set({2, 4, 6}) : detail::pow2_set({1, 3, 5});
            c.expected["N_Q_in"] = detail::pow2_set({1, 2, 3, 4, 5});
            c.expected["N_R_in"] = detail::pow2_set({2, 3, 4});
            c.expected["N_Q+1_max"] = 32;
            c.expected["N_R+1_max"] = 16;

            auto in = [](std::uint64_t v, std::initializer_list<std::uint64_t> s) {
                return std::find(s.begin(), s.end(), v) != s.end();
            };
            std::vector<std::string> bad;
            if (cnt.n_p != kernel_size) bad.push_back("N_P != kernel size");
            if (cnt.n_p != cnt.n_q + cnt.n_q1) bad.push_back("N_P != N_Q + N_Q+1");
            if (cnt.n_q != cnt.n_r + cnt.n_r1) bad.push_back("N_Q != N_R + N_R+1");
            if (n % 2 == 0 ? !in(cnt.n_p, {4, 16, 64}) : !in(cnt.n_p, {2, 8, 32})) bad.push_back("N_P range");
            if (!in(cnt.n_q, {2, 4, 8, 16, 32})) bad.push_back("N_Q range");
            if (!in(cnt.n_r, {4, 8, 16})) bad.push_back("N_R range");
            if (cnt.n_q1 > 32) bad.push_back("N_Q+1 range");
            if (cnt.n_r1 > 16) bad.push_back("N_R+1 range");
            if (cnt.n_r == 4 && cnt.n_p > (n % 2 == 0 ? 16U : 8U)) bad.push_back("N_R = 4 but N_P too large");

            // The roots of P are the kernel of q(ax).
            const auto roots = pqr_roots_p(ctx, a, b);
            auto scaled = linear_kernel(scale_input(q, a)).elements();
            std::sort(scaled.begin(), scaled.end());
            if (roots != scaled) bad.push_back("roots of P differ from the kernel of q(ax)");
            if (!bad.empty()) {
                c.status = Status::Fail;
                c.reason = bad.front();
            }
            if (o.audit_quadratics && !exhaustive) pa[i].add(q, rep_q.k, "a=" + to_hex(a) + " b=" + to_hex(b));
        });
        for (std::size_t i = 0; i < pc.size(); ++i) {
            if (o.audit_quadratics && !exhaustive) detail::record_audit(rep, pc[i], pa[i]);
            rep.cases.push_back(std::move(pc[i]));
        }
    }
    return rep;
}

/// Truth table of tr(sum over chains d_0 > d_1 > ... > d_t > 0, each step
/// dropping one bit of d_0 = 2^{r+1} - 1, of x^{d_t} prod a_i^{d_{i-1} - d_i}).
inline TruthTable kasami_chain_formula(const ContextPtr& ctx, unsigned r, const std::vector<Element>& dirs) {
    const FieldContext& F = *ctx;
    const unsigned t = static_cast<unsigned>(dirs.size());
    if (r < 1 || t < 1 || t > r) throw std::invalid_argument("kasami_chain_formula: need 1 <= t <= r");
    std::map<std::uint64_t, Element> coeff;  // d_t -> summed coefficient
    std::function<void(std::uint64_t, unsigned, Element)> walk = [&](std::uint64_t d, unsigned i, Element c) {
        if (i == t) {
            coeff[d] ^= c;
            return;
        }
        for (std::uint64_t rest = d; rest; rest &= rest - 1) {
            const std::uint64_t bit = rest & (~rest + 1);
            walk(d ^ bit, i + 1, F.mul(c, F.pow(dirs[i], static_cast<std::int64_t>(bit))));
        }
    };
    walk((std::uint64_t{1} << (r + 1)) - 1, 0, 1);
    return TruthTable::from_function(ctx, [&](Element x) {
        Element s = 0;
        for (const auto& [d, c] : coeff) s ^= F.mul(c, F.pow(x, static_cast<std::int64_t>(d)));
        return F.abs_trace(s) != 0;
    });
}

namespace detail {

/// t distinct nonzero directions.
inline std::vector<Element> distinct_dirs(std::mt19937_64& g, const FieldContext& F, unsigned t) {
    std::vector<Element> v;
    while (v.size() < t) {
        const Element a = draw(g, 1, F.order());
        if (std::find(v.begin(), v.end(), a) == v.end()) v.push_back(a);
    }
    return v;
}

/// t directions linearly independent over F_2.
inline std::vector<Element> independent_dirs(std::mt19937_64& g, const FieldContext& F, unsigned t) {
    std::vector<Element> v, reduced;
    while (v.size() < t) {
        const Element a = draw(g, 1, F.order());
        Element x = a;
        for (Element b : reduced) x = std::min(x, static_cast<Element>(x ^ b));
        if (x == 0) continue;
        v.push_back(a);
        reduced.push_back(x);
        std::sort(reduced.rbegin(), reduced.rend());
    }
    return v;
}

}  // namespace detail

inline VerificationReport verify_kasami_chain_derivatives(const Options& o = {}) {
    const auto rs = detail::grid_or(o.rs, {2, 3, 4});
    for (unsigned r : rs)
        if (r < 2 || r > 4) throw std::invalid_argument("verify_kasami_chain_derivatives: r must lie in [2, 4]");
    VerificationReport rep;
    rep.suite = "kasami_chain_derivatives";
    rep.grid["r"] = rs;
    rep.grid["n_max"] = 12;
    rep.grid["formula_samples"] = o.formula_samples;
    rep.grid["chain_samples"] = o.chain_samples;
    rep.seed = o.seed;

    for (unsigned r : rs) {
        auto ns = detail::grid_or(o.ns, detail::range(2 * r + 2, 12));
        std::erase_if(ns, [&](unsigned n) { return n < 2 * r + 2 || n > 12; });
        for (unsigned n : ns) {
            const auto ctx = detail::context(n, o);
            const FieldContext& F = *ctx;
            const std::uint64_t d0 = (std::uint64_t{1} << (r + 1)) - 1;
            const auto f = from_trace_monomial(ctx, 1, d0);

            // Chain formula up to a function of degree <= r - t.
            for (unsigned t = 1; t <= r; ++t) {
                auto g = detail::rng_for(o.seed, 0x6b61 + t, n, r);
                std::vector<std::vector<Element>> chains;
                for (unsigned s = 0; s < o.formula_samples; ++s) chains.push_back(detail::distinct_dirs(g, F, t));
                std::vector<unsigned> excess(chains.size(), 0);
                parallel_for(chains.size(), o.threads, [&](std::size_t i) {
                    const auto diff = derivative_chain(f, chains[i]) ^ kasami_chain_formula(ctx, r, chains[i]);
                    excess[i] = algebraic_degree(diff);
                });
                CaseResult c;
                c.params["check"] = "chain_formula";
                c.params["r"] = r;
                c.params["n"] = n;
                c.params["t"] = t;
                c.expected["max_residual_degree"] = r - t;
                const unsigned worst = *std::max_element(excess.begin(), excess.end());
                c.got["max_residual_degree"] = worst;
                c.got["chains"] = chains.size();
                if (worst > r - t) {
                    const auto at = std::max_element(excess.begin(), excess.end()) - excess.begin();
                    c.status = Status::Fail;
                    json dirs = json::array();
                    for (Element a : chains[static_cast<std::size_t>(at)]) dirs.push_back(to_hex(a));
                    c.got["witness"] = dirs;
                    c.reason = "residual degree exceeds r - t";
                }
                rep.counters["chains_evaluated"] += chains.size();
                rep.cases.push_back(std::move(c));
            }

            // Kernel dimension of (r-1)-th derivatives.
            std::vector<std::vector<Element>> chains;
            const bool exhaustive = r == 2;
            if (exhaustive) {
                for (std::uint64_t a = 1; a < F.size(); ++a) chains.push_back({static_cast<Element>(a)});
            } else {
                auto g = detail::rng_for(o.seed, 0x6b6b, n, r);
                for (unsigned s = 0; s < o.chain_samples; ++s) chains.push_back(detail::independent_dirs(g, F, r - 1));
            }
            std::vector<int> ks(chains.size(), -1);
            std::vector<detail::Audit> audits(chains.size());
            parallel_for(chains.size(), o.threads, [&](std::size_t i) {
                const auto q = derivative_chain(f, chains[i]);
                if (algebraic_degree(q) > 2) return;
                const auto k = linear_kernel(q).k;
                ks[i] = static_cast<int>(k);
                if (o.audit_quadratics) audits[i].add(q, k, "chain " + std::to_string(i));
            });
            CaseResult c;
            c.params["check"] = "kernel_dim";
            c.params["r"] = r;
            c.params["n"] = n;
            c.params["mode"] = exhaustive ? "exhaustive" : "sampled";
            c.expected["max_kernel_dim"] = 2 * r;
            std::map<unsigned, std::uint64_t> hist;
            int worst = -1;
            std::optional<std::size_t> witness;
            for (std::size_t i = 0; i < ks.size(); ++i) {
                if (ks[i] >= 0) ++hist[static_cast<unsigned>(ks[i])];
                worst = std::max(worst, ks[i]);
                if (!witness && (ks[i] < 0 || ks[i] > static_cast<int>(2 * r))) witness = i;
            }
            c.got["counts"] = detail::histogram_json(hist);
            c.got["max_kernel_dim"] = worst;
            c.got["chains"] = chains.size();
            if (witness) {
                c.status = Status::Fail;
                c.reason = ks[*witness] < 0 ? "derivative is not quadratic" : "kernel dimension exceeds 2r";
                json dirs = json::array();
                for (Element a : chains[*witness]) dirs.push_back(to_hex(a));
                c.got["witness"] = dirs;
            }
            detail::Audit total;
            for (const auto& a : audits) total.merge(a);
            rep.counters["chains_evaluated"] += chains.size();
            if (o.audit_quadratics) detail::record_audit(rep, c, total);
            rep.cases.push_back(std::move(c));
        }
    }
    return rep;
}

/// h(b) for n = 2r + 1 odd and c = a^{-5}, as reduced exponent -> coefficient,
/// plus the number of raw terms landing on each reduced exponent.
struct HPolynomial {
    std::map<std::uint64_t, Element> coeff;
    std::map<std::uint64_t, unsigned> raw_terms;

    std::optional<std::uint64_t> max_degree() const {
        for (auto it = coeff.rbegin(); it != coeff.rend(); ++it)
            if (it->second) return it->first;
        return std::nullopt;
    }
    std::optional<std::uint64_t> min_degree() const {
        for (const auto& [e, c] : coeff)
            if (c) return e;
        return std::nullopt;
    }
};

inline HPolynomial h_polynomial(const FieldContext& F, Element a) {
    const unsigned n = F.degree();
    if (n < 7 || n % 2 == 0) throw std::invalid_argument("h_polynomial: n must be odd and at least 7");
    if (a == 0) throw std::invalid_argument("h_polynomial: a must be nonzero");
    const unsigned r = (n - 1) / 2;
    const Element c = F.inv(F.pow(a, 5));
    const std::uint64_t order = F.order();
    HPolynomial h;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (r - 1)); ++mask) {
        for (unsigned j = 0; j < n; ++j) {
            std::uint64_t e = 0;
            for (unsigned i = 1; i <= r - 1; ++i) {
                const unsigned di = (mask >> (i - 1)) & 1U;
                e += std::uint64_t{1} << (n - 2 * i + di + j);
            }
            e = (e - 1) % order + 1;
            h.coeff[e] ^= F.frobenius(c, j);
            ++h.raw_terms[e];
        }
    }
    return h;
}

inline std::uint64_t h_expected_max_degree(unsigned n) { return (5 * (std::uint64_t{1} << (n - 1)) - 32) / 3; }
inline std::uint64_t h_expected_min_degree(unsigned n) { return ((std::uint64_t{1} << (n - 4)) + 1) / 3; }

inline VerificationReport verify_h_degree_lemmas(const Options& o = {}) {
    const auto ns = detail::grid_or(o.ns, {7, 9, 11});
    detail::require_in(ns, 7, 23, "verify_h_degree_lemmas");
    VerificationReport rep;
    rep.suite = "h_degree_lemmas";
    rep.grid["n"] = ns;
    rep.grid["samples"] = o.h_samples;
    rep.seed = o.seed;
    for (unsigned n : ns) {
        if (n % 2 == 0) throw std::invalid_argument("verify_h_degree_lemmas: n must be odd");
        const auto ctx = detail::context(n, o);
        auto g = detail::rng_for(o.seed, 0x68, n);
        for (unsigned s = 0; s < o.h_samples; ++s) {
            const Element a = detail::draw(g, 1, ctx->order());
            const auto h = h_polynomial(*ctx, a);
            const auto hi = h.max_degree();
            const auto lo = h.min_degree();
            CaseResult c;
            c.params["n"] = n;
            c.params["a"] = to_hex(a);
            c.expected["max_degree"] = h_expected_max_degree(n);
            c.expected["min_degree"] = h_expected_min_degree(n);
            c.expected["extreme_terms"] = 1;
            c.got["max_degree"] = hi ? json(*hi) : json(nullptr);
            c.got["min_degree"] = lo ? json(*lo) : json(nullptr);
            c.got["monomials"] = std::count_if(h.coeff.begin(), h.coeff.end(), [](const auto& kv) { return kv.second != 0; });
            const unsigned hi_terms = hi ? h.raw_terms.at(*hi) : 0;
            const unsigned lo_terms = lo ? h.raw_terms.at(*lo) : 0;
            c.got["max_degree_terms"] = hi_terms;
            c.got["min_degree_terms"] = lo_terms;
            if (!hi || *hi != h_expected_max_degree(n) || !lo || *lo != h_expected_min_degree(n)) {
                c.status = Status::Fail;
                c.reason = "degree mismatch";
            } else if (hi_terms != 1 || lo_terms != 1) {
                c.status = Status::Fail;
                c.reason = "extreme monomial is not unique";
            }
            rep.counters["monomials_built"] += (std::uint64_t{1} << ((n - 1) / 2 - 1)) * n;
            rep.cases.push_back(std::move(c));
        }
    }
    return rep;
}

inline VerificationReport verify_weil(const Options& o = {}) {
    const auto ns = detail::grid_or(o.ns, detail::range(1, 12));
    detail::require_in(ns, 1, 24, "verify_weil");
    VerificationReport rep;
    rep.suite = "weil";
    rep.grid["n"] = ns;
    rep.grid["d"] = "odd 1..31";
    rep.seed = o.seed;
    for (unsigned n : ns) {
        const auto ctx = detail::context(n, o);
        for (std::uint64_t d = 1; d <= 31; d += 2) {
            const auto w = weight(from_trace_monomial(ctx, 1, d));
            const auto bound = weil_weight_bound(n, d);
            CaseResult c;
            c.params["n"] = n;
            c.params["d"] = d;
            c.expected["weight_min"] = exact::to_string(bound);
            c.got["weight"] = w;
            if (cpp_int(w) < bound) {
                c.status = Status::Fail;
                c.reason = "weight below the bound";
            }
            rep.counters["weights_computed"] += 1;
            rep.cases.push_back(std::move(c));
        }
    }
    return rep;
}

namespace detail {

inline CaseResult dominance_case(const std::string& check, unsigned n, const cpp_int& value,
                                 const cpp_int& bound, const std::string& value_key) {
    CaseResult c;
    c.params["check"] = check;
    c.params["n"] = n;
    c.expected["at_least"] = exact::to_string(bound);
    c.got[value_key] = exact::to_string(value);
    if (value < bound) {
        c.status = Status::Fail;
        c.reason = "bound exceeds " + value_key;
    }
    return c;
}

inline void exact_case(VerificationReport& rep, const Options& o, const std::string& check, const TruthTable& f,
                       unsigned order, const BoundResult& b) {
    try {
        const auto nl = exact_nl_r(f, order, o.budget, o.threads);
        rep.counters["exact_sweeps"] += 1;
        rep.cases.push_back(dominance_case(check, f.n(), cpp_int(nl), b.lower_bound, "exact_nl"));
    } catch (const BudgetExceeded& e) {
        CaseResult c;
        c.params["check"] = check;
        c.params["n"] = f.n();
        c.status = Status::Skipped;
        c.reason = std::string("budget: ") + e.what();
        c.expected["at_least"] = exact::to_string(b.lower_bound);
        rep.cases.push_back(std::move(c));
    }
}

}  // namespace detail

inline VerificationReport verify_bounds_vs_exact(const Options& o = {}) {
    VerificationReport rep;
    rep.suite = "bounds_vs_exact";
    rep.grid["exact_nl2_x7"] = {5, 6, 7};
    rep.grid["exact_nl2_x2r3"] = {6};
    rep.grid["exact_nl2_inverse"] = {5, 6, 7};
    rep.grid["exact_nl3_x15"] = {4, 5, 6};
    rep.grid["carlet_step_x7"] = detail::range(4, 14);
    rep.grid["carlet_step_x2r3"] = {4, 6, 8, 10, 12};
    rep.grid["carlet_step_inverse"] = detail::range(4, 12);
    rep.grid["carlet_nested_x15"] = detail::range(6, 9);
    rep.grid["budget"] = o.budget;
    rep.seed = o.seed;

    for (unsigned n : {5U, 6U, 7U})
        detail::exact_case(rep, o, "exact_nl2_x7", from_trace_monomial(detail::context(n, o), 1, 7), 2,
                           bound_nl2_x7(n));
    detail::exact_case(rep, o, "exact_nl2_x2r3", from_trace_monomial(detail::context(6, o), 1, 11), 2,
                       bound_nl2_x2r3(6));
    for (unsigned n : {5U, 6U, 7U})
        detail::exact_case(rep, o, "exact_nl2_inverse",
                           from_trace_monomial(detail::context(n, o), 1, (std::uint64_t{1} << n) - 2), 2,
                           bound_nlr_inverse(n, 2));
    for (unsigned n : {4U, 5U}) {
        CaseResult c;
        c.params["check"] = "exact_nl3_x15";
        c.params["n"] = n;
        c.status = Status::Skipped;
        c.reason = "vacuous: the third-order bound for tr(x^15) starts at n = 6";
        rep.cases.push_back(std::move(c));
    }
    {
        const auto b = bound_nl3_x15(6);
        if (b.lower_bound <= 0) {
            CaseResult c;
            c.params["check"] = "exact_nl3_x15";
            c.params["n"] = 6;
            c.status = Status::Skipped;
            c.reason = "vacuous: bound is 0";
            rep.cases.push_back(std::move(c));
        } else {
            detail::exact_case(rep, o, "exact_nl3_x15", from_trace_monomial(detail::context(6, o), 1, 15), 3, b);
        }
    }

    auto step_from_dims = [&](unsigned n, const std::vector<unsigned>& dims) {
        cpp_int sum = 0;
        for (std::size_t a = 1; a < dims.size(); ++a) sum += nl_from_dim(n, dims[a]);
        return carlet_step(n, sum).lower_bound;
    };
    for (unsigned n = 4; n <= 14; ++n) {
        const auto f = from_trace_monomial(detail::context(n, o), 1, 7);
        rep.cases.push_back(detail::dominance_case("carlet_step_x7", n, step_from_dims(n, first_derivative_dims(f, o.threads)),
                                                   bound_nl2_x7(n).lower_bound, "carlet_step"));
    }
    for (unsigned n = 4; n <= 12; n += 2) {
        const auto f = from_trace_monomial(detail::context(n, o), 1, (std::uint64_t{1} << (n / 2)) + 3);
        rep.cases.push_back(detail::dominance_case("carlet_step_x2r3", n,
                                                   step_from_dims(n, first_derivative_dims(f, o.threads)),
                                                   bound_nl2_x2r3(n).lower_bound, "carlet_step"));
    }
    for (unsigned n = 4; n <= 12; ++n) {
        const auto f = from_trace_monomial(detail::context(n, o), 1, (std::uint64_t{1} << n) - 2);
        std::vector<std::int64_t> nl(f.size(), 0);
        parallel_for(f.size() - 1, o.threads, [&](std::size_t i) {
            nl[i + 1] = nonlinearity(derivative(f, static_cast<Element>(i + 1)));
        });
        cpp_int sum = 0;
        for (auto v : nl) sum += v;
        rep.cases.push_back(detail::dominance_case("carlet_step_inverse", n, carlet_step(n, sum).lower_bound,
                                                   bound_nlr_inverse(n, 2).lower_bound, "carlet_step"));
    }
    for (unsigned n = 6; n <= 9; ++n) {
        const auto ctx = detail::context(n, o);
        const auto f = from_trace_monomial(ctx, 1, 15);
        std::vector<cpp_int> leaves(f.size(), 0);
        std::vector<std::int64_t> sums(f.size(), 0);
        parallel_for(f.size() - 1, o.threads, [&](std::size_t i) {
            const auto a = static_cast<Element>(i + 1);
            std::int64_t s = 0;
            for (int k : second_derivative_dims(f, a, 1))
                if (k >= 0) s += nl_from_dim(n, static_cast<unsigned>(k));
            sums[a] = s;
        });
        for (std::size_t a = 0; a < sums.size(); ++a) leaves[a] = sums[a];
        const auto nested = carlet_nested(n, 2, leaves).lower_bound;
        rep.cases.push_back(detail::dominance_case("carlet_nested_x15", n, nested, bound_nl3_x15(n).lower_bound,
                                                   "carlet_nested"));
        rep.cases.push_back(detail::dominance_case("carlet_nested_kasami_r3", n, nested,
                                                   bound_nlr_kasami_chain(n, 3).lower_bound, "carlet_nested"));
    }
    return rep;
}

using SuiteFn = VerificationReport (*)(const Options&);

/// Suite name -> runner, in the order `verify --suite all` runs them.
inline const std::vector<std::pair<std::string, SuiteFn>>& suites() {
    static const std::vector<std::pair<std::string, SuiteFn>> table = {
        {"x7_distribution", &verify_x7_distribution},
        {"x2r3_distribution", &verify_x2r3_distribution},
        {"x15_second_derivatives", &verify_x15_second_derivatives},
        {"kasami_chain_derivatives", &verify_kasami_chain_derivatives},
        {"h_degree_lemmas", &verify_h_degree_lemmas},
        {"weil", &verify_weil},
        {"bounds_vs_exact", &verify_bounds_vs_exact},
    };
    return table;
}

inline VerificationReport run_suite(const std::string& name, const Options& o = {}) {
    for (const auto& [n, fn] : suites())
        if (n == name) return fn(o);
    throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace nlkit::verify
