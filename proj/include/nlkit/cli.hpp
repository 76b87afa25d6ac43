#pragma once

// Command-line front end. run() parses arguments, validates the flags each
// subcommand needs, dispatches and writes the payload. Exit codes: 0 on
// success, 1 when a verification suite fails, 2 on usage or input errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlkit/bounds.hpp"
#include "nlkit/io.hpp"
#include "nlkit/moduli.hpp"
#include "nlkit/parallel.hpp"
#include "nlkit/quadratic.hpp"
#include "nlkit/truth_table.hpp"
#include "nlkit/verify.hpp"

namespace nlkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CliConfig {
    std::string command;
    std::optional<unsigned> n;
    std::optional<std::string> d;
    std::optional<unsigned> r;
    std::string lambda_hex = "1";
    std::optional<std::string> a_hex;
    std::optional<std::string> b_hex;
    std::optional<std::string> family;
    std::string format = "json";
    unsigned threads = default_threads();
    std::uint64_t seed = verify::kDefaultSeed;
    std::uint64_t budget = kDefaultWhtBudget;
    std::optional<std::string> out;
    std::optional<std::string> which;
    unsigned order = 1;
    std::string suite = "all";
    std::optional<unsigned> samples;
    bool exact_weight = false;
    bool exhaustive = false;
};

/// 0 when every report passes, 1 otherwise.
inline int verify_exit_code(const std::vector<verify::VerificationReport>& reports) {
    for (const auto& r : reports)
        if (!r.passed()) return kExitVerifyFailed;
    return kExitOk;
}

namespace detail {

inline unsigned need_n(const CliConfig& c) {
    if (!c.n) throw UsageError(c.command + " requires --n");
    if (*c.n < 1 || *c.n > kMaxDegree) throw UsageError("--n must lie in [1, 24] for " + c.command);
    return *c.n;
}

inline Element field_value(const std::string& flag, const std::string& hex, unsigned n) {
    std::uint64_t v = 0;
    try {
        v = parse_hex(hex);
    } catch (const std::invalid_argument&) {
        throw UsageError(flag + " expects a hex field element, got '" + hex + "'");
    }
    if (v >> n) throw UsageError(flag + " = " + hex + " is not an element of F_2^" + std::to_string(n));
    return static_cast<Element>(v);
}

/// Exponent from --d: decimal, or a family name resolved from (n, r).
inline std::uint64_t resolve_d(const CliConfig& c, unsigned n) {
    if (!c.d) throw UsageError(c.command + " requires --d");
    const std::string& d = *c.d;
    if (d == "x7") return 7;
    if (d == "x15") return 15;
    if (d == "x2r3") {
        if (n % 2 != 0) throw UsageError("--d x2r3 needs even n");
        return (std::uint64_t{1} << (n / 2)) + 3;
    }
    if (d == "kasami-chain") {
        if (!c.r) throw UsageError("--d kasami-chain requires --r");
        if (*c.r < 1 || *c.r + 1 > 62) throw UsageError("--r out of range");
        return (std::uint64_t{1} << (*c.r + 1)) - 1;
    }
    if (d == "inverse") return (std::uint64_t{1} << n) - 2;
    try {
        return io::parse_u64(d);
    } catch (const std::exception&) {
        throw UsageError("--d expects a decimal exponent or one of x7|x15|x2r3|kasami-chain|inverse, got '" + d +
                         "'");
    }
}

inline ModuliTable moduli_from_env() {
    const char* path = std::getenv("NLKIT_MODULI");
    if (!path || !*path) return {};
    try {
        return load_moduli(path);
    } catch (const std::exception& e) {
        throw UsageError(std::string("NLKIT_MODULI: ") + e.what());
    }
}

inline std::string dump(const io::json& j) { return j.dump(2) + "\n"; }

inline bool csv(const CliConfig& c) { return c.format == "csv"; }

inline std::string run_spectrum(const CliConfig& c, const ModuliTable& m) {
    const unsigned n = need_n(c);
    const auto f = from_trace_monomial(make_context(n, m), field_value("--lambda", c.lambda_hex, n), resolve_d(c, n));
    const auto s = walsh_transform(f).values;
    return csv(c) ? io::spectrum_csv(s) : dump(io::spectrum_json(s));
}

inline std::string run_nl(const CliConfig& c, const ModuliTable& m) {
    const unsigned n = need_n(c);
    const Element lambda = field_value("--lambda", c.lambda_hex, n);
    const std::uint64_t d = resolve_d(c, n);
    if (c.order < 1 || c.order >= n) throw UsageError("--order must lie in [1, n-1]");
    const auto f = from_trace_monomial(make_context(n, m), lambda, d);
    io::NlSummary s{n, d, lambda, c.order, 0};
    try {
        s.nl = c.order == 1 ? nonlinearity(f) : exact_nl_r(f, c.order, c.budget, c.threads);
    } catch (const BudgetExceeded& e) {
        throw UsageError(std::string(e.what()) + "; raise --budget");
    }
    return csv(c) ? io::nl_csv(s) : dump(io::nl_json(s));
}

inline std::string run_kernel(const CliConfig& c, const ModuliTable& m) {
    const unsigned n = need_n(c);
    if (!c.a_hex) throw UsageError("kernel requires --a");
    const auto ctx = make_context(n, m);
    io::KernelSummary s;
    s.n = n;
    s.d = resolve_d(c, n);
    s.lambda = field_value("--lambda", c.lambda_hex, n);
    s.a = field_value("--a", *c.a_hex, n);
    if (s.a == 0) throw UsageError("--a must be nonzero");
    const auto f = from_trace_monomial(ctx, s.lambda, s.d);
    TruthTable q = derivative(f, s.a);
    if (c.b_hex) {
        s.b = field_value("--b", *c.b_hex, n);
        q = derivative(q, ctx->mul(s.a, *s.b));
    }
    KernelReport rep;
    try {
        rep = linear_kernel(q);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    s.k = rep.k;
    s.f0 = rep.f0;
    s.nl = nonlinearity(q);
    s.basis = rep.basis;
    return csv(c) ? io::kernel_csv(s) : dump(io::kernel_json(s));
}

inline std::string run_dist(const CliConfig& c, const ModuliTable& m) {
    const unsigned n = need_n(c);
    const auto ctx = make_context(n, m);
    const Element lambda = field_value("--lambda", c.lambda_hex, n);
    const std::uint64_t d = resolve_d(c, n);
    DimHistogram h;
    try {
        if (c.a_hex) {
            const Element a = field_value("--a", *c.a_hex, n);
            h = kernel_dim_sweep_second(ctx, d, a, c.threads, lambda);
        } else if (c.d == "x2r3") {
            if (lambda != 1) throw UsageError("--d x2r3 sweeps lambda = 1 only");
            h = dim_sweep_x2r3(ctx, c.threads);
        } else {
            h = kernel_dim_sweep_first(ctx, d, c.threads, lambda);
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return csv(c) ? io::histogram_csv(h) : dump(io::histogram_json(h));
}

inline std::string run_bound(const CliConfig& c) {
    if (!c.family) throw UsageError("bound requires --family");
    const unsigned n = c.n ? *c.n : throw UsageError("bound requires --n");
    if (n > kMaxBoundDegree) throw UsageError("--n must be at most " + std::to_string(kMaxBoundDegree));
    const std::string& fam = *c.family;
    auto fixed_r = [&](unsigned r) {
        if (c.r && *c.r != r) throw UsageError("family " + fam + " has r = " + std::to_string(r));
    };
    BoundResult b;
    try {
        if (fam == "x7") {
            fixed_r(2);
            b = bound_nl2_x7(n, c.exact_weight);
        } else if (fam == "x2r3") {
            fixed_r(2);
            b = bound_nl2_x2r3(n);
        } else if (fam == "x15") {
            fixed_r(3);
            b = bound_nl3_x15(n);
        } else if (fam == "kasami-chain" || fam == "inverse") {
            if (!c.r) throw UsageError("family " + fam + " requires --r");
            b = fam == "inverse" ? bound_nlr_inverse(n, *c.r) : bound_nlr_kasami_chain(n, *c.r);
        } else {
            throw UsageError("--family must be one of x7|x2r3|x15|kasami-chain|inverse");
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto s = io::summarize(b);
    return csv(c) ? io::bound_csv(s) : dump(io::bound_json(s));
}

/// Rows of the third-order tr(x^15) bound for odd n = 7..19 or even n = 8..20.
inline io::TableRows x15_table(bool odd) {
    io::TableRows rows;
    for (unsigned n = odd ? 7 : 8; n <= (odd ? 19U : 20U); n += 2) rows.emplace_back(n, bound_nl3_x15(n).lower_bound);
    return rows;
}

inline std::string run_tables(const CliConfig& c) {
    if (!c.which) throw UsageError("tables requires --which");
    bool odd;
    if (*c.which == "theorem3-odd" || *c.which == "x15-odd")
        odd = true;
    else if (*c.which == "theorem3-even" || *c.which == "x15-even")
        odd = false;
    else
        throw UsageError("--which must be x15-odd or x15-even");
    const auto rows = x15_table(odd);
    return csv(c) ? io::table_csv(rows) : dump(io::table_json(rows));
}

inline std::string run_verify(const CliConfig& c, const ModuliTable& m, int& code) {
    verify::Options o;
    o.threads = c.threads;
    o.seed = c.seed;
    o.moduli = m;
    o.budget = c.budget;
    if (c.n) o.ns = {*c.n};
    if (c.r) o.rs = {*c.r};
    if (c.samples) {
        if (*c.samples == 0) throw UsageError("--samples must be positive");
        o.samples = o.chain_samples = *c.samples;
    }
    if (c.exhaustive) o.exhaustive_max_n = 12;
    std::vector<std::string> names;
    if (c.suite == "all") {
        for (const auto& [name, fn] : verify::suites()) names.push_back(name);
    } else {
        names.push_back(c.suite);
    }
    std::vector<verify::VerificationReport> reports;
    for (const auto& name : names) {
        try {
            reports.push_back(verify::run_suite(name, o));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    code = verify_exit_code(reports);
    return csv(c) ? io::reports_csv(reports) : dump(io::reports_json(reports));
}

}  // namespace detail

/// Runs the CLI on argv-style arguments (args[0] is the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Trace-monomial Boolean functions: spectra, kernels, nonlinearity bounds and verification suites",
                 "nlkit"};
    app.fallthrough();
    app.require_subcommand(1);
    CliConfig c;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"spectrum", "Walsh spectrum of tr(lambda x^d)"},
        {"nl", "nonlinearity of order --order (exact; order > 1 sweeps cosets)"},
        {"kernel", "linear kernel of D_a f, or of D_{ab} D_a f with --b"},
        {"dist", "kernel-dimension histogram of first derivatives, or of D_{ab} D_a f over b with --a"},
        {"bound", "certified lower bound for a family"},
        {"tables", "third-order bounds for tr(x^15) for odd n = 7..19 or even n = 8..20"},
        {"verify", "run verification suites and print a report"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->callback([&c, name] { c.command = name; });

    app.add_option("--n", c.n, "field degree");
    app.add_option("--d", c.d, "exponent: decimal or x7|x15|x2r3|kasami-chain|inverse");
    app.add_option("--r", c.r, "order parameter r");
    app.add_option("--lambda", c.lambda_hex, "coefficient lambda (hex)");
    app.add_option("--a", c.a_hex, "direction a (hex)");
    app.add_option("--b", c.b_hex, "second direction multiplier b (hex)");
    app.add_option("--family", c.family, "bound family: x7|x2r3|x15|kasami-chain|inverse");
    app.add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", c.seed, "seed for sampled verification");
    app.add_option("--budget", c.budget, "maximum Walsh transforms for exact nl_r")->check(CLI::PositiveNumber);
    app.add_option("--out", c.out, "write output to this path");
    app.add_option("--which", c.which, "x15-odd|x15-even");
    app.add_option("--order", c.order, "nonlinearity order");
    app.add_option("--suite", c.suite, "verification suite name or all");
    app.add_option("--samples", c.samples, "sampled directions or chains per grid point");
    app.add_flag("--exact-weight", c.exact_weight, "x7: also evaluate with the exact weight of tr(x^7)");
    app.add_flag("--exhaustive", c.exhaustive, "verify: sweep every a for tr(x^15) up to n = 12");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        const ModuliTable moduli = detail::moduli_from_env();
        std::string payload;
        int code = kExitOk;
        if (c.command == "spectrum") payload = detail::run_spectrum(c, moduli);
        else if (c.command == "nl") payload = detail::run_nl(c, moduli);
        else if (c.command == "kernel") payload = detail::run_kernel(c, moduli);
        else if (c.command == "dist") payload = detail::run_dist(c, moduli);
        else if (c.command == "bound") payload = detail::run_bound(c);
        else if (c.command == "tables") payload = detail::run_tables(c);
        else if (c.command == "verify") payload = detail::run_verify(c, moduli, code);
        else throw UsageError("unknown subcommand");

        if (c.out) {
            std::ofstream f(*c.out, std::ios::binary);
            f << payload;
            f.close();
            if (!f) {
                err << "nlkit: cannot write " << *c.out << "\n";
                return kExitUsage;
            }
        } else {
            out << payload;
        }
        return code;
    } catch (const UsageError& e) {
        err << "nlkit " << c.command << ": " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "nlkit " << c.command << ": " << e.what() << "\n";
        return kExitUsage;
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace nlkit::cli
