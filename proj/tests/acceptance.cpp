// Acceptance checks. Prints one PASS/FAIL line per criterion.
//
// Exit status is 0 when the set of failing criteria equals the set given
// with --known-unattainable (empty by default), 1 otherwise.

#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlkit/nlkit.hpp"

using namespace nlkit;

namespace {

// Pinned limits.
constexpr double kTablesSeconds = 1.0;
constexpr double kX7Seconds = 300.0;
constexpr double kExactSweepSeconds = 600.0;
constexpr unsigned kAsymptoticN = 256;
constexpr double kExponentSlackBits = 2.0;  // |log2(deficit)/n - e| <= slack / n

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Line {
    int id;
    bool pass;
    std::string text;
};

std::vector<Line> lines;

void report(int id, bool pass, const std::string& text) {
    lines.push_back({id, pass, text});
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << text << std::endl;
}

std::string fmt(double s) {
    std::ostringstream o;
    o.precision(3);
    o << s << " s";
    return o.str();
}

std::string first_failure(const verify::VerificationReport& r) {
    for (const auto& c : r.cases)
        if (c.status == verify::Status::Fail) return c.params.dump() + " " + c.reason;
    return "";
}

void criterion_tables() {
    const std::vector<std::pair<unsigned, long>> odd = {{7, 12},     {9, 80},     {11, 429},   {13, 2096},
                                                        {15, 9660},  {17, 42923}, {19, 186092}};
    const std::vector<std::pair<unsigned, long>> even = {{8, 30},     {10, 183},   {12, 944},  {14, 4484},
                                                         {16, 20308}, {18, 89180}, {20, 383411}};
    const auto t = Clock::now();
    const auto got_odd = cli::detail::x15_table(true);
    const auto got_even = cli::detail::x15_table(false);
    const double secs = seconds_since(t);
    std::string diff;
    auto compare = [&](const std::vector<std::pair<unsigned, long>>& want, const io::TableRows& got) {
        if (got.size() != want.size()) {
            diff += " row count differs;";
            return;
        }
        for (std::size_t i = 0; i < want.size(); ++i)
            if (got[i].first != want[i].first || got[i].second != want[i].second)
                diff += " n=" + std::to_string(want[i].first) + " reference " + std::to_string(want[i].second) +
                        " certified " + exact::to_string(got[i].second) + ";";
    };
    compare(odd, got_odd);
    compare(even, got_even);
    const bool ok = diff.empty() && secs < kTablesSeconds;
    report(1, ok,
           "third-order tr(x^15) tables, 14 entries, ceiling rule, " + fmt(secs) + " (limit " + fmt(kTablesSeconds) +
               ")" + (diff.empty() ? "" : "; mismatches:" + diff));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    unsigned threads = default_threads();
    std::vector<int> known;
    app.add_option("--threads", threads)->check(CLI::PositiveNumber);
    app.add_option("--known-unattainable", known, "criteria expected to fail");
    CLI11_PARSE(app, argc, argv);

    verify::Options o;
    o.threads = threads;

    criterion_tables();

    // 2: x7 distributions.
    verify::VerificationReport x7, x2r3, x15, kasami;
    {
        const auto t = Clock::now();
        x7 = verify::verify_x7_distribution(o);
        const double secs = seconds_since(t);
        bool spots = x7.cases.size() == 11 && x7.cases[0].got["counts"] == verify::json::parse(R"({"2":14,"4":1})") &&
                     x7.cases[1].got["counts"] == verify::json::parse(R"({"1":16,"3":15})");
        for (const auto& c : x7.cases)
            if (c.params["n"].get<unsigned>() % 3 == 0) spots = spots && c.params.contains("weight");
        report(2, x7.passed() && spots && secs <= kX7Seconds,
               "tr(x^7) first-derivative kernel distributions n=4..14, " + std::to_string(x7.cases.size()) +
                   " cases, spot values n=4,5, exact weights for 3|n, " + fmt(secs) + first_failure(x7));
    }

    // 3: x2r3 classes.
    {
        x2r3 = verify::verify_x2r3_distribution(o);
        bool cards = true;
        for (const auto& c : x2r3.cases) {
            const unsigned n = c.params["n"].get<unsigned>(), r = n / 2;
            const std::uint64_t sub = (1ULL << r) - 1;
            std::uint64_t in_sub = 0;
            for (const auto& [cls, h] : c.got["classes"].items())
                for (const auto& [k, v] : h.items())
                    if (cls != "outside") in_sub += v.get<std::uint64_t>();
            cards = cards && in_sub == sub;
            if (r % 2 == 0) cards = cards && c.got["classes"]["G"][std::to_string(r + 2)] == sub / 3;
        }
        report(3, x2r3.passed() && cards && x2r3.cases.size() == 4,
               "tr(x^{2^r+3}) kernel classes n=6,8,10,12 with |F_{2^r}*| and |G|=(2^r-1)/3" + first_failure(x2r3));
    }

    // 4: x15 second derivatives.
    {
        const auto t = Clock::now();
        x15 = verify::verify_x15_second_derivatives(o);
        std::map<unsigned, unsigned> pqr, exhaustive, sampled;
        for (const auto& c : x15.cases) {
            const unsigned n = c.params["n"].get<unsigned>();
            if (c.params.contains("check"))
                ++pqr[n];
            else if (c.params["mode"] == "exhaustive")
                ++exhaustive[n];
            else
                ++sampled[n];
        }
        bool shape = true;
        for (unsigned n = 6; n <= 12; ++n) {
            shape = shape && pqr[n] == 100;
            if (n <= 9) shape = shape && exhaustive[n] == (1U << n) - 1;
            else shape = shape && sampled[n] == o.samples;
        }
        report(4, x15.passed() && shape,
               "tr(x^15) second-derivative inequalities, exhaustive a for n=6..9, " + std::to_string(o.samples) +
                   " seeded a for n=10..12, 100 PQR pairs per n, " + fmt(seconds_since(t)) + first_failure(x15));
    }

    // Kasami runs before criterion 5 so its audit counters can be listed there.
    Line kasami_line;
    {
        kasami = verify::verify_kasami_chain_derivatives(o);
        std::set<std::pair<unsigned, unsigned>> grid;
        for (const auto& c : kasami.cases) grid.insert({c.params["r"].get<unsigned>(), c.params["n"].get<unsigned>()});
        std::size_t expect = 0;
        for (unsigned r = 2; r <= 4; ++r) expect += 12 - (2 * r + 2) + 1;
        kasami_line = {6, kasami.passed() && grid.size() == expect,
                         "Kasami-chain derivative formula (residual degree <= r-t) and kernel dim <= 2r, r=2..4, "
                         "2r+2 <= n <= 12, " +
                             std::to_string(kasami.counters["chains_evaluated"]) + " chains" + first_failure(kasami)};
    }

    // 5: quadratic invariants over suites 2-4.
    {
        std::uint64_t checked = 0, failed = 0;
        for (auto* r : {&x7, &x2r3, &x15}) {
            checked += r->counters["quadratics_audited"];
            failed += r->counters["quadratic_audit_failures"];
        }
        report(5, checked > 0 && failed == 0,
               std::to_string(checked) +
                   " quadratic derivatives from criteria 2-4: Gram kernel = brute kernel, parity, spectrum from "
                   "dimension, Parseval; " +
                   std::to_string(failed) + " failures (plus " +
                   std::to_string(kasami.counters["quadratics_audited"]) + " Kasami-chain derivatives, " +
                   std::to_string(kasami.counters["quadratic_audit_failures"]) + " failures)");
    }
    report(kasami_line.id, kasami_line.pass, kasami_line.text);

    // 7: soundness against exact sweeps.
    {
        struct Sweep {
            std::string name;
            unsigned n;
            std::uint64_t d;
            cpp_int bound;
        };
        const std::vector<Sweep> sweeps = {{"tr5(x^7)", 5, 7, 6},
                                           {"tr7(x^7)", 7, 7, bound_nl2_x7(7).lower_bound},
                                           {"tr6(x^11)", 6, 11, bound_nl2_x2r3(6).lower_bound}};
        bool ok = true;
        std::string text;
        for (const auto& s : sweeps) {
            const auto t = Clock::now();
            const auto nl = exact_nl_r(from_trace_monomial(make_context(s.n), 1, s.d), 2, kDefaultWhtBudget, 1);
            const double secs = seconds_since(t);
            ok = ok && nl >= s.bound && secs < kExactSweepSeconds;
            text += " " + s.name + ": nl2=" + std::to_string(nl) + " >= " + exact::to_string(s.bound) + " (" +
                    fmt(secs) + " single-threaded);";
        }
        const auto rest = verify::verify_bounds_vs_exact(o);
        report(7, ok && rest.passed(),
               "exact second-order nonlinearity dominates the bounds;" + text + " soundness suite " +
                   std::to_string(rest.cases.size() - rest.skipped()) + " checked, " +
                   std::to_string(rest.skipped()) + " skipped with reasons" + first_failure(rest));
    }

    // 8: h(b) degrees.
    {
        const auto h = verify::verify_h_degree_lemmas(o);
        std::string text;
        bool ok = h.passed();
        for (unsigned n : {7U, 9U, 11U}) {
            std::set<std::uint64_t> hi, lo;
            for (const auto& c : h.cases)
                if (c.params["n"] == n) {
                    hi.insert(c.got["max_degree"].get<std::uint64_t>());
                    lo.insert(c.got["min_degree"].get<std::uint64_t>());
                }
            const auto want_hi = (5 * (1ULL << (n - 1)) - 32) / 3, want_lo = ((1ULL << (n - 4)) + 1) / 3;
            ok = ok && hi == std::set<std::uint64_t>{want_hi} && lo == std::set<std::uint64_t>{want_lo};
            text += " n=" + std::to_string(n) + ": max " + std::to_string(*hi.begin()) + ", min " +
                    std::to_string(*lo.begin()) + ";";
        }
        report(8, ok && h.cases.size() == 3 * o.h_samples, "h(b) degree extremes over random a:" + text);
    }

    // 9: Weil.
    {
        const auto w = verify::verify_weil(o);
        report(9, w.passed() && w.cases.size() == 12 * 16,
               "weight of tr(x^d) >= Weil bound for n=1..12, odd d<=31, " + std::to_string(w.cases.size()) +
                   " cases" + first_failure(w));
    }

    // 10: dominant exponents against the certified deficits at large n.
    {
        const unsigned n = kAsymptoticN;
        struct Row {
            std::string name;
            BoundResult b;
            cpp_rational e;
        };
        std::vector<Row> rows = {{"x7", bound_nl2_x7(n), cpp_rational(3, 4)},
                                 {"x2r3", bound_nl2_x2r3(n), cpp_rational(3, 4)},
                                 {"x15", bound_nl3_x15(n), cpp_rational(7, 8)}};
        for (unsigned r = 2; r <= 5; ++r) {
            rows.push_back({"kasami-chain r=" + std::to_string(r), bound_nlr_kasami_chain(n, r),
                            1 - cpp_rational(1, exact::pow2_int(r))});
            rows.push_back({"inverse r=" + std::to_string(r), bound_nlr_inverse(n, r),
                            1 - cpp_rational(1, exact::pow2_int(r))});
        }
        bool ok = true;
        double worst = 0;
        for (const auto& row : rows) {
            const double lg = std::log2(static_cast<double>(row.b.certified_floor_of_deficit));
            const double gap = std::abs(lg / n - static_cast<double>(row.e));
            worst = std::max(worst, gap * n);
            ok = ok && row.b.dominant_exponent == row.e && gap <= kExponentSlackBits / n && !row.b.asymptotic.empty();
        }
        std::ostringstream g;
        g.precision(3);
        g << worst;
        report(10, ok,
               "asymptotic forms are reported, not measured: dominant exponents match log2(deficit)/n at n=" +
                   std::to_string(n) + " for " + std::to_string(rows.size()) + " bounds (worst offset " + g.str() +
                   " bits, limit " + std::to_string(static_cast<int>(kExponentSlackBits)) + ")");
    }

    std::set<int> failing;
    for (const auto& l : lines)
        if (!l.pass) failing.insert(l.id);
    const std::set<int> expected(known.begin(), known.end());
    std::cout << "summary: " << lines.size() - failing.size() << "/" << lines.size() << " criteria pass";
    if (!expected.empty()) {
        std::cout << "; known unattainable:";
        for (int id : expected) std::cout << ' ' << id;
    }
    std::cout << std::endl;
    return failing == expected ? 0 : 1;
}
