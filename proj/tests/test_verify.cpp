#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>

#include "nlkit/verify.hpp"

using namespace nlkit;
using namespace nlkit::verify;

namespace {

// tr(x^7) weight by direct evaluation.
std::uint64_t weight_x7(const FieldContext& F) {
    std::uint64_t w = 0;
    for (std::uint64_t x = 0; x < F.size(); ++x) w += F.abs_trace(F.pow(static_cast<Element>(x), 7));
    return w;
}

Options quick() {
    Options o;
    o.samples = 4;
    o.chain_samples = 20;
    o.formula_samples = 4;
    o.h_samples = 3;
    return o;
}

}  // namespace

TEST(Verify, ExpectedX7Counts) {
    EXPECT_EQ(x7_expected_counts(4, 0), (std::map<unsigned, std::uint64_t>{{2, 14}, {4, 1}}));
    EXPECT_EQ(x7_expected_counts(5, 0), (std::map<unsigned, std::uint64_t>{{1, 16}, {3, 15}}));
    auto F6 = make_context(6);
    const auto w = weight_x7(*F6);
    EXPECT_EQ(x7_expected_counts(6, w), (std::map<unsigned, std::uint64_t>{{2, 42 + w / 2}, {4, 21 - w / 2}}));
    for (unsigned n = 4; n <= 14; ++n) {
        std::uint64_t total = 0;
        for (auto [k, c] : x7_expected_counts(n, weight_x7(*make_context(n)))) total += c;
        EXPECT_EQ(total, (std::uint64_t{1} << n) - 1) << n;
    }
}

TEST(Verify, X7SuiteSmallGrid) {
    Options o = quick();
    o.ns = {4, 5, 6, 7, 8, 9};
    const auto r = verify_x7_distribution(o);
    EXPECT_TRUE(r.passed());
    ASSERT_EQ(r.cases.size(), 6U);
    EXPECT_EQ(r.cases[0].got["counts"], json::parse(R"({"2":14,"4":1})"));
    EXPECT_EQ(r.cases[1].got["counts"], json::parse(R"({"1":16,"3":15})"));
    EXPECT_EQ(r.cases[2].params["weight"].get<std::uint64_t>(), weight_x7(*make_context(6)));
    EXPECT_EQ(r.counters.at("quadratic_audit_failures"), 0U);
    EXPECT_GT(r.counters.at("quadratics_audited"), 0U);
    o.ns = {3};
    EXPECT_THROW(verify_x7_distribution(o), std::invalid_argument);
}

TEST(Verify, X2r3SuiteClassCardinalities) {
    Options o = quick();
    o.ns = {6, 8};
    const auto r = verify_x2r3_distribution(o);
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.cases[0].got["classes"], json::parse(R"({"outside":{"2":56},"subfield":{"4":7}})"));
    // |G| = (2^4 - 1) / 3 at n = 8.
    EXPECT_EQ(r.cases[1].got["classes"]["G"], json::parse(R"({"6":5})"));
    EXPECT_EQ(r.cases[1].got["classes"]["subfield-not-G"], json::parse(R"({"4":10})"));
    EXPECT_EQ(r.cases[1].got["classes"]["outside"], json::parse(R"({"2":240})"));
    EXPECT_EQ(r.cases[1].got["nl_mismatches"], 0);
}

TEST(Verify, X15Thresholds) {
    EXPECT_EQ(x15_thresholds(7).low_min, 34U);
    EXPECT_EQ(x15_thresholds(7).high_max, 92U);
    // (2^9 - 2^5 - 4) / 3 = 158.67, so at least 159 values.
    EXPECT_EQ(x15_thresholds(8).low_min, 159U);
    EXPECT_EQ(x15_thresholds(8).high_max, 95U);
    EXPECT_EQ(x15_thresholds(6).low_min, 36U);
    EXPECT_THROW(x15_thresholds(5), std::invalid_argument);
}

TEST(Verify, X15SuiteExhaustiveAndSampled) {
    Options o = quick();
    o.ns = {6, 7, 10};
    const auto r = verify_x15_second_derivatives(o);
    EXPECT_TRUE(r.passed());
    std::size_t exhaustive = 0, sampled = 0, pqr = 0;
    for (const auto& c : r.cases) {
        if (c.params.contains("check"))
            ++pqr;
        else if (c.params["mode"] == "exhaustive")
            ++exhaustive;
        else
            ++sampled;
    }
    EXPECT_EQ(exhaustive, 63U + 127U);
    EXPECT_EQ(sampled, 4U);
    EXPECT_EQ(pqr, 300U);
    const auto& first7 = r.cases[63 + 100];
    EXPECT_EQ(first7.params["n"], 7);
    EXPECT_EQ(first7.params["a"], "1");
    EXPECT_GE(first7.got["at_most_3"].get<std::uint64_t>(), 34U);
    EXPECT_EQ(first7.got["degenerate"], 2);
}

TEST(Verify, DeterministicGivenSeed) {
    Options o = quick();
    o.ns = {10};
    o.audit_quadratics = false;
    const auto a = to_json(verify_x15_second_derivatives(o)).dump();
    o.threads = 3;
    EXPECT_EQ(to_json(verify_x15_second_derivatives(o)).dump(), a);
    o.seed += 1;
    EXPECT_NE(to_json(verify_x15_second_derivatives(o)).dump(), a);
}

TEST(Verify, ChainFormulaFirstDerivative) {
    // Terms of (x + a)^7 whose x-exponent has weight 2.
    auto F = make_context(8);
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 5; ++rep) {
        const auto a = static_cast<Element>(1 + rng() % F->order());
        const auto expect = TruthTable::from_function(F, [&](Element x) {
            const Element s = F->mul(a, F->pow(x, 6)) ^ F->mul(F->pow(a, 2), F->pow(x, 5)) ^
                              F->mul(F->pow(a, 4), F->pow(x, 3));
            return F->abs_trace(s) != 0;
        });
        EXPECT_EQ(kasami_chain_formula(F, 2, {a}), expect);
        const auto diff = derivative(from_trace_monomial(F, 1, 7), a) ^ expect;
        EXPECT_LE(algebraic_degree(diff), 1U);
    }
    EXPECT_THROW(kasami_chain_formula(F, 2, {1, 2, 3}), std::invalid_argument);
}

TEST(Verify, KasamiSuite) {
    Options o = quick();
    o.rs = {2, 3};
    o.ns = {8, 9};
    const auto r = verify_kasami_chain_derivatives(o);
    EXPECT_TRUE(r.passed());
    // r = 2: t = 1, 2 and one kernel case per n; r = 3: t = 1..3 and one kernel case.
    EXPECT_EQ(r.cases.size(), 2U * 3U + 2U * 4U);
    for (const auto& c : r.cases) {
        if (c.params["check"] != "kernel_dim") continue;
        EXPECT_LE(c.got["max_kernel_dim"].get<int>(), 2 * c.params["r"].get<int>());
    }
}

TEST(Verify, DependentDirectionsGiveZeroDerivative) {
    // Distinct but linearly dependent directions collapse the chain.
    auto F = make_context(10);
    const auto f = from_trace_monomial(F, 1, 31);
    const auto q = derivative_chain(f, {3, 5, 6});
    EXPECT_TRUE(q.is_zero());
    EXPECT_EQ(kernel_dim_brute(q), 10U);
}

TEST(Verify, HPolynomialDegrees) {
    EXPECT_EQ(h_expected_max_degree(7), 96U);
    EXPECT_EQ(h_expected_min_degree(7), 3U);
    EXPECT_EQ(h_expected_max_degree(9), 416U);
    EXPECT_EQ(h_expected_max_degree(11), 1696U);
    EXPECT_EQ(h_expected_min_degree(11), 43U);

    // The reduced polynomial agrees pointwise with the unreduced sum.
    std::mt19937_64 rng(3);
    for (unsigned n : {7U, 9U}) {
        auto F = make_context(n);
        const unsigned r = (n - 1) / 2;
        for (int rep = 0; rep < 3; ++rep) {
            const auto a = static_cast<Element>(1 + rng() % F->order());
            const auto h = h_polynomial(*F, a);
            EXPECT_EQ(h.max_degree(), h_expected_max_degree(n));
            EXPECT_EQ(h.min_degree(), h_expected_min_degree(n));
            const Element c = F->inv(F->pow(a, 5));
            for (Element b = 1; b < F->size(); b += 7) {
                Element direct = 0;
                for (std::uint64_t mask = 0; mask < (1ULL << (r - 1)); ++mask)
                    for (unsigned j = 0; j < n; ++j) {
                        Element term = F->frobenius(c, j);
                        for (unsigned i = 1; i <= r - 1; ++i)
                            term = F->mul(term, F->pow(b, std::int64_t{1} << (n - 2 * i + ((mask >> (i - 1)) & 1U) + j)));
                        direct ^= term;
                    }
                Element reduced = 0;
                for (const auto& [e, co] : h.coeff) reduced ^= F->mul(co, F->pow(b, static_cast<std::int64_t>(e)));
                ASSERT_EQ(direct, reduced) << n << ' ' << b;
            }
        }
    }
    EXPECT_THROW(h_polynomial(*make_context(8), 1), std::invalid_argument);

    Options o = quick();
    const auto rep = verify_h_degree_lemmas(o);
    EXPECT_TRUE(rep.passed());
    EXPECT_EQ(rep.cases.size(), 9U);
    EXPECT_EQ(rep.cases[0].got["max_degree"], 96);
    EXPECT_EQ(rep.cases[0].got["min_degree"], 3);
}

TEST(Verify, WeilSuite) {
    const auto r = verify_weil();
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.cases.size(), 12U * 16U);
    for (const auto& c : r.cases) {
        const auto n = c.params["n"].get<unsigned>();
        const auto d = c.params["d"].get<unsigned>();
        if (d == 1) {
            EXPECT_EQ(c.got["weight"].get<std::uint64_t>(), 1ULL << (n - 1));
        } else if (n == 8 && d == 7) {
            EXPECT_EQ(c.expected["weight_min"], "80");
        } else if (n == 6 && d == 3) {
            EXPECT_EQ(c.expected["weight_min"], "24");
        }
    }
}

TEST(Verify, BoundsVersusExact) {
    const auto r = verify_bounds_vs_exact();
    EXPECT_TRUE(r.passed());
    bool saw_n5 = false;
    std::size_t skipped = 0;
    for (const auto& c : r.cases) {
        if (c.status == Status::Skipped) {
            ++skipped;
            EXPECT_FALSE(c.reason.empty());
            EXPECT_TRUE(c.reason.rfind("vacuous", 0) == 0 || c.reason.rfind("budget", 0) == 0) << c.reason;
        }
        if (c.params["check"] == "exact_nl2_x7" && c.params["n"] == 5) {
            saw_n5 = true;
            EXPECT_EQ(c.got["exact_nl"], "6");
            EXPECT_EQ(c.expected["at_least"], "6");
        }
    }
    EXPECT_TRUE(saw_n5);
    EXPECT_EQ(skipped, 3U);
}

TEST(Verify, ReportJsonRoundTrip) {
    Options o = quick();
    o.ns = {4, 6};
    auto r = verify_x7_distribution(o);
    r.cases.push_back({json{{"n", 99}}, Status::Fail, json{{"x", 1}}, json{{"x", 2}}, "synthetic"});
    EXPECT_FALSE(r.passed());
    EXPECT_EQ(r.failures(), 1U);
    const auto j = to_json(r);
    EXPECT_EQ(j["passed"], false);
    EXPECT_EQ(j["cases"].back()["status"], "fail");
    EXPECT_EQ(report_from_json(json::parse(j.dump())), r);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"suite", "grid", "cases", "seed", "counters", "passed"}));
}

TEST(Verify, SuiteRegistry) {
    std::set<std::string> names;
    for (const auto& [name, fn] : suites()) names.insert(name);
    EXPECT_EQ(names.size(), 7U);
    EXPECT_THROW(run_suite("nope"), std::invalid_argument);
    Options o = quick();
    o.ns = {7};
    EXPECT_EQ(run_suite("h_degree_lemmas", o).suite, "h_degree_lemmas");
}

TEST(Verify, CoverageManifestIsComplete) {
    std::ifstream in(std::string(NLKIT_SOURCE_DIR) + "/data/coverage.json");
    ASSERT_TRUE(in.good());
    const auto manifest = json::parse(in);
    const std::set<std::string> required = {
        "x7-first-derivative-kernel-distribution", "x7-second-order-bound",
        "x2r3-first-derivative-kernel-classes",    "x2r3-derivative-nonlinearity",
        "x2r3-second-order-bound",                 "x15-pqr-root-counts",
        "x15-second-derivative-counts-even",       "x15-second-derivative-counts-odd",
        "x15-third-order-bound",                   "derivative-recursion",
        "kasami-chain-derivative-formula",         "kasami-chain-derivative-kernel",
        "kasami-chain-higher-order-bound",         "inverse-higher-order-bound",
        "h-polynomial-max-degree",                 "h-polynomial-min-degree",
        "weil-weight-bound",                       "quadratic-spectrum-from-kernel"};
    std::set<std::string> known, covered, ids;
    for (const auto& [name, fn] : suites()) known.insert(name);
    for (const auto& c : manifest.at("claims")) {
        ids.insert(c.at("id").get<std::string>());
        EXPECT_FALSE(c.at("claim").get<std::string>().empty());
        ASSERT_FALSE(c.at("suites").empty());
        for (const auto& s : c.at("suites")) {
            EXPECT_TRUE(known.contains(s.get<std::string>())) << s;
            covered.insert(s.get<std::string>());
        }
    }
    EXPECT_EQ(ids, required);
    EXPECT_EQ(covered, known);
}
