#pragma once

// Serialization of CLI payloads. JSON objects keep insertion order; field
// elements are lowercase hex; every emitter has a parser that inverts it.
//
// CSV layouts:
//   histogram  dim,count             (class,dim,count when class-labelled;
//                                     a final degenerate,<count> row when
//                                     degenerate directions were swept)
//   spectrum   alpha_hex,value
//   table      n,bound
//   bound      family,n,r,lower_bound,closed_form,recursion,asymptotic
//   kernel     n,d,lambda,a,b,k,f0,nl,basis   (basis space-separated hex)
//   nl         n,d,lambda,order,nl
//   report     suite,seed,params,status,expected,got,reason (JSON cells)

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nlkit/bounds.hpp"
#include "nlkit/quadratic.hpp"
#include "nlkit/verify.hpp"

namespace nlkit::io {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------- CSV core

inline std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string csv_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += csv_cell(cells[i]);
    }
    return out + "\n";
}

/// Splits RFC 4180 text into rows of cells.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = any = true;
        } else if (c == ',') {
            row.push_back(std::move(cell));
            cell.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !cell.empty()) {
                row.push_back(std::move(cell));
                rows.push_back(std::move(row));
            }
            row.clear();
            cell.clear();
            any = false;
        } else {
            cell += c;
            any = true;
        }
    }
    if (quoted) throw std::invalid_argument("csv: unterminated quoted cell");
    if (any || !cell.empty()) {
        row.push_back(std::move(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void require_header(const std::vector<std::vector<std::string>>& rows, const std::vector<std::string>& header) {
    if (rows.empty() || rows.front() != header) throw std::invalid_argument("csv: unexpected header");
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].size() != header.size())
            throw std::invalid_argument("csv: row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                                        " cells, expected " + std::to_string(header.size()));
}

inline std::uint64_t parse_u64(const std::string& s) {
    std::size_t pos = 0;
    const auto v = std::stoull(s, &pos);
    if (pos != s.size() || s.empty() || s[0] == '-') throw std::invalid_argument("not an unsigned integer: '" + s + "'");
    return v;
}

inline std::int64_t parse_i64(const std::string& s) {
    std::size_t pos = 0;
    const auto v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
    return v;
}

// ------------------------------------------------------------- big integers

/// A JSON number when the value fits in 64 bits, a decimal string otherwise.
inline json big_json(const cpp_int& v) {
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
        return static_cast<std::int64_t>(v);
    return exact::to_string(v);
}

inline cpp_int big_from_json(const json& j) {
    if (j.is_number_integer()) return cpp_int(j.get<std::int64_t>());
    if (j.is_string()) return cpp_int(j.get<std::string>());
    throw std::invalid_argument("expected an integer");
}

inline json opt_big_json(const std::optional<cpp_int>& v) { return v ? big_json(*v) : json(nullptr); }

inline std::optional<cpp_int> opt_big_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    return big_from_json(j);
}

// ---------------------------------------------------------------- histogram

inline json sweep_json(const SweepDescriptor& s) {
    json j;
    j["family"] = s.family;
    j["n"] = s.n;
    j["d"] = s.d;
    j["lambda"] = to_hex(s.lambda);
    j["parameter"] = s.parameter;
    j["fixed_a"] = s.fixed_a ? json(to_hex(*s.fixed_a)) : json(nullptr);
    return j;
}

inline SweepDescriptor sweep_from_json(const json& j) {
    SweepDescriptor s;
    s.family = j.at("family").get<std::string>();
    s.n = j.at("n").get<unsigned>();
    s.d = j.at("d").get<std::uint64_t>();
    s.lambda = static_cast<Element>(parse_hex(j.at("lambda").get<std::string>()));
    s.parameter = j.at("parameter").get<std::string>();
    if (!j.at("fixed_a").is_null()) s.fixed_a = static_cast<Element>(parse_hex(j.at("fixed_a").get<std::string>()));
    return s;
}

inline json histogram_json(const DimHistogram& h) {
    json j;
    j["sweep"] = sweep_json(h.sweep);
    j["counts"] = verify::detail::histogram_json(h.counts);
    j["degenerate"] = h.degenerate;
    if (!h.by_class.empty()) {
        json c = json::object();
        for (const auto& [cls, hist] : h.by_class) c[cls] = verify::detail::histogram_json(hist);
        j["by_class"] = std::move(c);
    }
    return j;
}

inline std::map<unsigned, std::uint64_t> counts_from_json(const json& j) {
    std::map<unsigned, std::uint64_t> out;
    for (const auto& [k, v] : j.items()) out[static_cast<unsigned>(parse_u64(k))] = v.get<std::uint64_t>();
    return out;
}

inline DimHistogram histogram_from_json(const json& j) {
    DimHistogram h;
    h.sweep = sweep_from_json(j.at("sweep"));
    h.counts = counts_from_json(j.at("counts"));
    h.degenerate = j.at("degenerate").get<std::uint64_t>();
    if (j.contains("by_class"))
        for (const auto& [cls, hist] : j.at("by_class").items()) h.by_class[cls] = counts_from_json(hist);
    return h;
}

inline std::string histogram_csv(const DimHistogram& h) {
    std::string out;
    if (h.by_class.empty()) {
        out += csv_row({"dim", "count"});
        for (const auto& [k, c] : h.counts) out += csv_row({std::to_string(k), std::to_string(c)});
        if (h.sweep.family == "second" || h.degenerate) out += csv_row({"degenerate", std::to_string(h.degenerate)});
    } else {
        out += csv_row({"class", "dim", "count"});
        for (const auto& [cls, hist] : h.by_class)
            for (const auto& [k, c] : hist) out += csv_row({cls, std::to_string(k), std::to_string(c)});
    }
    return out;
}

/// Parses histogram_csv; the sweep descriptor is not part of the CSV.
inline DimHistogram histogram_from_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    DimHistogram h;
    if (!rows.empty() && rows.front().size() == 3) {
        require_header(rows, {"class", "dim", "count"});
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto k = static_cast<unsigned>(parse_u64(rows[i][1]));
            const auto c = parse_u64(rows[i][2]);
            h.by_class[rows[i][0]][k] += c;
            h.counts[k] += c;
        }
        return h;
    }
    require_header(rows, {"dim", "count"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i][0] == "degenerate")
            h.degenerate = parse_u64(rows[i][1]);
        else
            h.counts[static_cast<unsigned>(parse_u64(rows[i][0]))] = parse_u64(rows[i][1]);
    }
    return h;
}

// ----------------------------------------------------------------- spectrum

inline std::string spectrum_csv(const std::vector<std::int32_t>& values) {
    std::string out = csv_row({"alpha_hex", "value"});
    for (std::size_t a = 0; a < values.size(); ++a) out += csv_row({to_hex(a), std::to_string(values[a])});
    return out;
}

inline std::vector<std::int32_t> spectrum_from_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    require_header(rows, {"alpha_hex", "value"});
    std::vector<std::int32_t> v(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (parse_hex(rows[i][0]) != i - 1) throw std::invalid_argument("spectrum csv: rows out of order");
        v[i - 1] = static_cast<std::int32_t>(parse_i64(rows[i][1]));
    }
    return v;
}

inline json spectrum_json(const std::vector<std::int32_t>& values) { return json(values); }

inline std::vector<std::int32_t> spectrum_from_json(const json& j) { return j.get<std::vector<std::int32_t>>(); }

// -------------------------------------------------------------------- table

using TableRows = std::vector<std::pair<unsigned, cpp_int>>;

inline std::string table_csv(const TableRows& rows) {
    std::string out = csv_row({"n", "bound"});
    for (const auto& [n, b] : rows) out += csv_row({std::to_string(n), exact::to_string(b)});
    return out;
}

inline TableRows table_from_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    require_header(rows, {"n", "bound"});
    TableRows out;
    for (std::size_t i = 1; i < rows.size(); ++i)
        out.emplace_back(static_cast<unsigned>(parse_u64(rows[i][0])), cpp_int(rows[i][1]));
    return out;
}

inline json table_json(const TableRows& rows) {
    json j = json::array();
    for (const auto& [n, b] : rows) j.push_back(json{{"n", n}, {"bound", big_json(b)}});
    return j;
}

inline TableRows table_from_json(const json& j) {
    TableRows out;
    for (const auto& r : j) out.emplace_back(r.at("n").get<unsigned>(), big_from_json(r.at("bound")));
    return out;
}

// -------------------------------------------------------------------- bound

/// The serialized view of a BoundResult.
struct BoundSummary {
    std::string family;
    unsigned n = 0;
    unsigned r = 0;
    cpp_int lower_bound;
    std::optional<cpp_int> closed_form;
    std::optional<cpp_int> recursion;
    std::string asymptotic;
    std::string dominant_exponent;
    std::string radical_trace;
    bool clamped = false;
    std::optional<std::uint64_t> exact_weight;
    std::optional<cpp_int> exact_weight_bound;

    bool operator==(const BoundSummary&) const = default;
};

/// Family names as the CLI spells them.
inline std::string cli_family(const std::string& family) {
    return family == "kasami_chain" ? "kasami-chain" : family;
}

inline BoundSummary summarize(const BoundResult& b) {
    BoundSummary s;
    s.family = cli_family(b.family);
    s.n = b.n;
    s.r = b.r;
    s.lower_bound = b.lower_bound;
    s.closed_form = b.closed_form;
    s.recursion = b.recursion;
    s.asymptotic = b.asymptotic;
    s.dominant_exponent = exact::to_string(b.dominant_exponent);
    s.radical_trace = b.radical_trace;
    s.clamped = b.clamped;
    s.exact_weight = b.exact_weight;
    s.exact_weight_bound = b.exact_weight_bound;
    return s;
}

inline json bound_json(const BoundSummary& s) {
    json j;
    j["family"] = s.family;
    j["n"] = s.n;
    j["r"] = s.r;
    j["lower_bound"] = big_json(s.lower_bound);
    j["closed_form"] = opt_big_json(s.closed_form);
    j["recursion"] = opt_big_json(s.recursion);
    j["asymptotic"] = s.asymptotic;
    j["dominant_exponent"] = s.dominant_exponent;
    j["radical_trace"] = s.radical_trace;
    j["clamped"] = s.clamped;
    if (s.exact_weight) {
        j["exact_weight"] = *s.exact_weight;
        j["exact_weight_bound"] = opt_big_json(s.exact_weight_bound);
    }
    return j;
}

inline BoundSummary bound_from_json(const json& j) {
    BoundSummary s;
    s.family = j.at("family").get<std::string>();
    s.n = j.at("n").get<unsigned>();
    s.r = j.at("r").get<unsigned>();
    s.lower_bound = big_from_json(j.at("lower_bound"));
    s.closed_form = opt_big_from_json(j.at("closed_form"));
    s.recursion = opt_big_from_json(j.at("recursion"));
    s.asymptotic = j.at("asymptotic").get<std::string>();
    s.dominant_exponent = j.at("dominant_exponent").get<std::string>();
    s.radical_trace = j.at("radical_trace").get<std::string>();
    s.clamped = j.at("clamped").get<bool>();
    if (j.contains("exact_weight")) {
        s.exact_weight = j.at("exact_weight").get<std::uint64_t>();
        s.exact_weight_bound = opt_big_from_json(j.at("exact_weight_bound"));
    }
    return s;
}

inline const std::vector<std::string>& bound_csv_header() {
    static const std::vector<std::string> h = {"family", "n", "r", "lower_bound", "closed_form", "recursion",
                                               "asymptotic", "dominant_exponent", "radical_trace", "clamped",
                                               "exact_weight", "exact_weight_bound"};
    return h;
}

inline std::string bound_csv(const BoundSummary& s) {
    auto opt = [](const std::optional<cpp_int>& v) { return v ? exact::to_string(*v) : std::string(); };
    return csv_row(bound_csv_header()) +
           csv_row({s.family, std::to_string(s.n), std::to_string(s.r), exact::to_string(s.lower_bound),
                    opt(s.closed_form), opt(s.recursion), s.asymptotic, s.dominant_exponent, s.radical_trace,
                    s.clamped ? "true" : "false", s.exact_weight ? std::to_string(*s.exact_weight) : "",
                    opt(s.exact_weight_bound)});
}

inline BoundSummary bound_from_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    require_header(rows, bound_csv_header());
    if (rows.size() != 2) throw std::invalid_argument("bound csv: expected one data row");
    const auto& c = rows[1];
    auto opt = [](const std::string& v) { return v.empty() ? std::nullopt : std::optional<cpp_int>(cpp_int(v)); };
    BoundSummary s;
    s.family = c[0];
    s.n = static_cast<unsigned>(parse_u64(c[1]));
    s.r = static_cast<unsigned>(parse_u64(c[2]));
    s.lower_bound = cpp_int(c[3]);
    s.closed_form = opt(c[4]);
    s.recursion = opt(c[5]);
    s.asymptotic = c[6];
    s.dominant_exponent = c[7];
    s.radical_trace = c[8];
    s.clamped = c[9] == "true";
    if (!c[10].empty()) s.exact_weight = parse_u64(c[10]);
    s.exact_weight_bound = opt(c[11]);
    return s;
}

// ------------------------------------------------------------------- kernel

struct KernelSummary {
    unsigned n = 0;
    std::uint64_t d = 0;
    Element lambda = 1;
    Element a = 0;
    std::optional<Element> b;  // set for second derivatives D_{ab} D_a
    unsigned k = 0;
    int f0 = 0;
    std::int64_t nl = 0;
    std::vector<Element> basis;

    bool operator==(const KernelSummary&) const = default;
};

inline json kernel_json(const KernelSummary& s) {
    json j;
    j["n"] = s.n;
    j["d"] = s.d;
    j["lambda"] = to_hex(s.lambda);
    j["a"] = to_hex(s.a);
    j["b"] = s.b ? json(to_hex(*s.b)) : json(nullptr);
    j["k"] = s.k;
    j["f0"] = s.f0;
    j["nl"] = s.nl;
    json basis = json::array();
    for (Element e : s.basis) basis.push_back(to_hex(e));
    j["basis"] = std::move(basis);
    return j;
}

inline KernelSummary kernel_from_json(const json& j) {
    KernelSummary s;
    s.n = j.at("n").get<unsigned>();
    s.d = j.at("d").get<std::uint64_t>();
    s.lambda = static_cast<Element>(parse_hex(j.at("lambda").get<std::string>()));
    s.a = static_cast<Element>(parse_hex(j.at("a").get<std::string>()));
    if (!j.at("b").is_null()) s.b = static_cast<Element>(parse_hex(j.at("b").get<std::string>()));
    s.k = j.at("k").get<unsigned>();
    s.f0 = j.at("f0").get<int>();
    s.nl = j.at("nl").get<std::int64_t>();
    for (const auto& e : j.at("basis")) s.basis.push_back(static_cast<Element>(parse_hex(e.get<std::string>())));
    return s;
}

inline std::string kernel_csv(const KernelSummary& s) {
    std::string basis;
    for (Element e : s.basis) basis += (basis.empty() ? "" : " ") + to_hex(e);
    return csv_row({"n", "d", "lambda", "a", "b", "k", "f0", "nl", "basis"}) +
           csv_row({std::to_string(s.n), std::to_string(s.d), to_hex(s.lambda), to_hex(s.a),
                    s.b ? to_hex(*s.b) : "", std::to_string(s.k), std::to_string(s.f0), std::to_string(s.nl), basis});
}

inline KernelSummary kernel_from_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    require_header(rows, {"n", "d", "lambda", "a", "b", "k", "f0", "nl", "basis"});
    if (rows.size() != 2) throw std::invalid_argument("kernel csv: expected one data row");
    const auto& c = rows[1];
    KernelSummary s;
    s.n = static_cast<unsigned>(parse_u64(c[0]));
    s.d = parse_u64(c[1]);
    s.lambda = static_cast<Element>(parse_hex(c[2]));
    s.a = static_cast<Element>(parse_hex(c[3]));
    if (!c[4].empty()) s.b = static_cast<Element>(parse_hex(c[4]));
    s.k = static_cast<unsigned>(parse_u64(c[5]));
    s.f0 = static_cast<int>(parse_i64(c[6]));
    s.nl = parse_i64(c[7]);
    std::istringstream in(c[8]);
    for (std::string tok; in >> tok;) s.basis.push_back(static_cast<Element>(parse_hex(tok)));
    return s;
}

// ----------------------------------------------------------------------- nl

struct NlSummary {
    unsigned n = 0;
    std::uint64_t d = 0;
    Element lambda = 1;
    unsigned order = 1;
    std::int64_t nl = 0;

    bool operator==(const NlSummary&) const = default;
};

inline json nl_json(const NlSummary& s) {
    json j;
    j["n"] = s.n;
    j["d"] = s.d;
    j["lambda"] = to_hex(s.lambda);
    j["order"] = s.order;
    j["nl"] = s.nl;
    return j;
}

inline NlSummary nl_from_json(const json& j) {
    return {j.at("n").get<unsigned>(), j.at("d").get<std::uint64_t>(),
            static_cast<Element>(parse_hex(j.at("lambda").get<std::string>())), j.at("order").get<unsigned>(),
            j.at("nl").get<std::int64_t>()};
}

inline std::string nl_csv(const NlSummary& s) {
    return csv_row({"n", "d", "lambda", "order", "nl"}) +
           csv_row({std::to_string(s.n), std::to_string(s.d), to_hex(s.lambda), std::to_string(s.order),
                    std::to_string(s.nl)});
}

inline NlSummary nl_from_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    require_header(rows, {"n", "d", "lambda", "order", "nl"});
    if (rows.size() != 2) throw std::invalid_argument("nl csv: expected one data row");
    const auto& c = rows[1];
    return {static_cast<unsigned>(parse_u64(c[0])), parse_u64(c[1]), static_cast<Element>(parse_hex(c[2])),
            static_cast<unsigned>(parse_u64(c[3])), parse_i64(c[4])};
}

// ------------------------------------------------------------------- report

inline const std::vector<std::string>& report_csv_header() {
    static const std::vector<std::string> h = {"suite", "seed", "params", "status", "expected", "got", "reason"};
    return h;
}

/// One row per case. Grids and counters are JSON-only.
inline std::string reports_csv(const std::vector<verify::VerificationReport>& reports) {
    std::string out = csv_row(report_csv_header());
    for (const auto& r : reports)
        for (const auto& c : r.cases)
            out += csv_row({r.suite, std::to_string(r.seed), c.params.dump(), verify::status_name(c.status),
                            c.expected.dump(), c.got.dump(), c.reason});
    return out;
}

/// Parses reports_csv back into per-suite reports (without grid or counters).
inline std::vector<verify::VerificationReport> reports_from_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    require_header(rows, report_csv_header());
    std::vector<verify::VerificationReport> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& c = rows[i];
        if (out.empty() || out.back().suite != c[0]) {
            out.emplace_back();
            out.back().suite = c[0];
            out.back().seed = parse_u64(c[1]);
        }
        out.back().cases.push_back(
            {json::parse(c[2]), verify::parse_status(c[3]), json::parse(c[4]), json::parse(c[5]), c[6]});
    }
    return out;
}

inline json reports_json(const std::vector<verify::VerificationReport>& reports) {
    if (reports.size() == 1) return verify::to_json(reports.front());
    json j = json::array();
    for (const auto& r : reports) j.push_back(verify::to_json(r));
    return j;
}

inline std::vector<verify::VerificationReport> reports_from_json(const json& j) {
    std::vector<verify::VerificationReport> out;
    if (j.is_object()) {
        out.push_back(verify::report_from_json(j));
    } else {
        for (const auto& r : j) out.push_back(verify::report_from_json(r));
    }
    return out;
}

}  // namespace nlkit::io
