#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlkit/cli.hpp"

using namespace nlkit;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "nlkit");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("nlkit_cli_" + std::to_string(::getpid()) + "_" + name);
}

// Nonlinearity by distance to every affine function.
std::int64_t brute_nl(const TruthTable& f) {
    const unsigned n = f.n();
    std::int64_t best = std::int64_t{1} << n;
    for (Element u = 0; u < f.size(); ++u) {
        std::int64_t d = 0;
        for (Element x = 0; x < f.size(); ++x) d += f.get(x) != (std::popcount(u & x) & 1);
        best = std::min({best, d, static_cast<std::int64_t>(f.size()) - d});
    }
    (void)n;
    return best;
}

}  // namespace

TEST(Cli, TablesOdd) {
    const auto r = run({"tables", "--which", "theorem3-odd", "--format", "csv"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "n,bound\n7,12\n9,80\n11,429\n13,2096\n15,9660\n17,42923\n19,186092\n");
}

TEST(Cli, TablesEvenUseCertifiedCeiling) {
    // Published entries at n = 14 and 20 are one lower; see Bounds.ThirdOrderTables.
    const auto r = run({"tables", "--which", "theorem3-even", "--format", "csv"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "n,bound\n8,30\n10,183\n12,944\n14,4485\n16,20308\n18,89180\n20,383412\n");
    const auto j = io::json::parse(run({"tables", "--which", "x15-even"}).out);
    EXPECT_EQ(j.size(), 7U);
    EXPECT_EQ(j[0]["n"], 8);
    EXPECT_EQ(j[0]["bound"], 30);
}

TEST(Cli, NonlinearityMatchesBruteForce) {
    const auto r = run({"nl", "--n", "5", "--d", "7", "--order", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = io::json::parse(r.out);
    EXPECT_EQ(j["nl"].get<std::int64_t>(), brute_nl(from_trace_monomial(make_context(5), 1, 7)));
    const auto r2 = run({"nl", "--n", "5", "--d", "x7", "--order", "2", "--format", "csv"});
    EXPECT_EQ(r2.out, "n,d,lambda,order,nl\n5,7,1,2,6\n");
    EXPECT_EQ(run({"nl", "--n", "6", "--d", "15", "--order", "3", "--budget", "1000"}).code, 2);
}

TEST(Cli, BoundJson) {
    const auto r = run({"bound", "--family", "inverse", "--n", "12", "--r", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = io::json::parse(r.out);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    EXPECT_EQ(std::vector<std::string>(keys.begin(), keys.begin() + 7),
              (std::vector<std::string>{"family", "n", "r", "lower_bound", "closed_form", "recursion", "asymptotic"}));
    EXPECT_TRUE(j["lower_bound"].is_number_integer());
    EXPECT_EQ(j["lower_bound"].get<std::int64_t>(), static_cast<std::int64_t>(bound_nlr_inverse(12, 4).lower_bound));

    const auto k = io::json::parse(run({"bound", "--family", "kasami-chain", "--n", "16", "--r", "3"}).out);
    EXPECT_EQ(k["recursion"], k["lower_bound"]);
    EXPECT_LE(k["closed_form"].get<std::int64_t>(), k["recursion"].get<std::int64_t>());
    const auto x7 = io::json::parse(run({"bound", "--family", "x7", "--n", "9", "--exact-weight"}).out);
    EXPECT_TRUE(x7.contains("exact_weight"));
    EXPECT_EQ(run({"bound", "--family", "x15", "--n", "9", "--r", "2"}).code, 2);
    EXPECT_EQ(run({"bound", "--family", "nope", "--n", "9"}).code, 2);
    EXPECT_EQ(run({"bound", "--family", "inverse", "--n", "9"}).code, 2);
}

TEST(Cli, DistAndSpectrumCsv) {
    EXPECT_EQ(run({"dist", "--n", "4", "--d", "7", "--format", "csv"}).out, "dim,count\n2,14\n4,1\n");
    EXPECT_EQ(run({"spectrum", "--n", "2", "--d", "0", "--format", "csv"}).out,
              "alpha_hex,value\n0,4\n1,0\n2,0\n3,0\n");
    const auto h = io::histogram_from_json(io::json::parse(run({"dist", "--n", "8", "--d", "x2r3"}).out));
    EXPECT_EQ(h.by_class.at("G"), (std::map<unsigned, std::uint64_t>{{6, 5}}));
    const auto s = io::histogram_from_json(io::json::parse(run({"dist", "--n", "7", "--d", "x15", "--a", "1"}).out));
    EXPECT_EQ(s.degenerate, 2U);
    EXPECT_GE(s.count_at_most(3), 34U);
}

TEST(Cli, KernelSubcommand) {
    const auto r = run({"kernel", "--n", "6", "--d", "7", "--a", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto k = io::kernel_from_json(io::json::parse(r.out));
    const auto q = derivative(from_trace_monomial(make_context(6), 1, 7), 5);
    EXPECT_EQ(k.k, kernel_dim_brute(q));
    EXPECT_EQ(k.nl, brute_nl(q));
    const auto r2 = run({"kernel", "--n", "7", "--d", "15", "--a", "1", "--b", "2a", "--format", "csv"});
    ASSERT_EQ(r2.code, 0) << r2.err;
    EXPECT_EQ(io::kernel_from_csv(r2.out).b, Element{0x2a});
    EXPECT_EQ(run({"kernel", "--n", "6", "--d", "15", "--a", "5"}).code, 2);
    EXPECT_EQ(run({"kernel", "--n", "6", "--d", "7", "--a", "zz"}).code, 2);
    EXPECT_EQ(run({"kernel", "--n", "6", "--d", "7", "--a", "40"}).code, 2);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"spectrum", "--d", "7"}).code, 2);
    EXPECT_EQ(run({"spectrum", "--n", "5"}).code, 2);
    EXPECT_EQ(run({"spectrum", "--n", "5", "--d", "7", "--format", "xml"}).code, 2);
    EXPECT_EQ(run({"spectrum", "--n", "5", "--d", "7", "--threads", "0"}).code, 2);
    EXPECT_EQ(run({"spectrum", "--n", "25", "--d", "7"}).code, 2);
    EXPECT_EQ(run({"tables"}).code, 2);
    EXPECT_EQ(run({"tables", "--which", "other"}).code, 2);
    EXPECT_EQ(run({"verify", "--suite", "nope"}).code, 2);
    EXPECT_EQ(run({"verify", "--suite", "x7_distribution", "--n", "3"}).code, 2);
    EXPECT_EQ(run({"dist", "--n", "7", "--d", "x2r3"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, VerifyExitCodes) {
    const auto r = run({"verify", "--suite", "h_degree_lemmas", "--n", "7"});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto j = io::json::parse(r.out);
    EXPECT_EQ(j["suite"], "h_degree_lemmas");
    EXPECT_EQ(j["passed"], true);
    for (const auto& key : {"suite", "grid", "cases", "seed"}) EXPECT_TRUE(j.contains(key)) << key;

    verify::VerificationReport bad;
    bad.suite = "synthetic";
    bad.cases.push_back({io::json{{"n", 1}}, verify::Status::Fail, io::json::object(), io::json::object(), "x"});
    verify::VerificationReport good;
    good.suite = "synthetic";
    good.cases.push_back({io::json{{"n", 1}}, verify::Status::Skipped, io::json::object(), io::json::object(), "budget"});
    EXPECT_EQ(cli::verify_exit_code({good}), 0);
    EXPECT_EQ(cli::verify_exit_code({good, bad}), 1);
    EXPECT_NE(io::reports_json({bad}).dump().find("\"status\":\"fail\""), std::string::npos);
}

TEST(Cli, ThreadCountIndependence) {
    const std::vector<std::vector<std::string>> commands = {
        {"spectrum", "--n", "9", "--d", "13", "--lambda", "3"},
        {"nl", "--n", "6", "--d", "7", "--order", "2"},
        {"kernel", "--n", "9", "--d", "x7", "--a", "1f"},
        {"dist", "--n", "10", "--d", "x7", "--format", "csv"},
        {"dist", "--n", "9", "--d", "x15", "--a", "3"},
        {"dist", "--n", "10", "--d", "x2r3"},
        {"bound", "--family", "kasami-chain", "--n", "20", "--r", "4"},
        {"tables", "--which", "x15-odd"},
        {"verify", "--suite", "x15_second_derivatives", "--n", "10", "--samples", "3"},
        {"verify", "--suite", "kasami_chain_derivatives", "--n", "10", "--r", "3", "--samples", "10"},
    };
    for (auto cmd : commands) {
        auto one = cmd;
        one.insert(one.end(), {"--threads", "1"});
        auto four = cmd;
        four.insert(four.end(), {"--threads", "4"});
        const auto a = run(one), b = run(four);
        EXPECT_EQ(a.code, 0) << cmd[0] << ' ' << a.err;
        EXPECT_EQ(a.out, b.out) << cmd[0];
    }
}

TEST(Cli, SeedChangesSamples) {
    const std::vector<std::string> base = {"verify", "--suite", "h_degree_lemmas", "--n", "9"};
    auto s1 = base, s2 = base;
    s1.insert(s1.end(), {"--seed", "1"});
    s2.insert(s2.end(), {"--seed", "2"});
    EXPECT_EQ(run(s1).out, run(s1).out);
    EXPECT_NE(run(s1).out, run(s2).out);
}

TEST(Cli, OutputFile) {
    const auto path = temp_path("out.csv");
    const auto r = run({"tables", "--which", "x15-odd", "--format", "csv", "--out", path.string()});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    EXPECT_EQ(s.str(), run({"tables", "--which", "x15-odd", "--format", "csv"}).out);
    std::filesystem::remove(path);
    EXPECT_EQ(run({"tables", "--which", "x15-odd", "--out", "/nonexistent-dir/x.json"}).code, 2);
}

TEST(Cli, ModuliOverride) {
    // x^5 + x^4 + x^3 + x^2 + 1 instead of the pinned x^5 + x^2 + 1.
    ASSERT_TRUE(poly2::is_irreducible(0x3d));
    ASSERT_NE(kDefaultModuli[5], 0x3dULL);
    const auto path = temp_path("moduli.txt");
    {
        std::ofstream f(path);
        f << "5\t3d\n";
    }
    const std::vector<std::string> cmd = {"spectrum", "--n", "5", "--d", "7", "--format", "csv"};
    const auto pinned = run(cmd);
    ::setenv("NLKIT_MODULI", path.c_str(), 1);
    const auto custom = run(cmd);
    const auto nl = io::json::parse(run({"nl", "--n", "5", "--d", "7"}).out);
    {
        std::ofstream f(path);
        f << "5\t3c\n";  // reducible
    }
    const auto reducible = run(cmd);
    ::setenv("NLKIT_MODULI", (path.string() + ".missing").c_str(), 1);
    const auto missing = run(cmd);
    ::unsetenv("NLKIT_MODULI");
    std::filesystem::remove(path);

    EXPECT_EQ(custom.code, 0);
    EXPECT_NE(custom.out, pinned.out);
    EXPECT_EQ(nl["nl"], 12);
    EXPECT_EQ(reducible.code, 2);
    EXPECT_EQ(missing.code, 2);
}
