#pragma once

// Pinned default moduli: for each degree n the lexicographically smallest
// irreducible polynomial over F_2. The same table ships as data/moduli.txt.

#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace nlkit {

inline constexpr unsigned kMaxDegree = 24;

inline constexpr std::array<std::uint64_t, kMaxDegree + 1> kDefaultModuli = {
    0x0,       // unused
    0x2,       0x7,       0xb,       0x13,      0x25,      0x43,
    0x83,      0x11b,     0x203,     0x409,     0x805,     0x1009,
    0x201b,    0x4021,    0x8003,    0x1002b,   0x20009,   0x40009,
    0x80027,   0x100009,  0x200005,  0x400003,  0x800021,  0x100001b,
};

using ModuliTable = std::map<unsigned, std::uint64_t>;

/// Parses `n<TAB>hex` lines. Blank lines and lines starting with '#' are
/// ignored.
inline ModuliTable parse_moduli(std::istream& in) {
    ModuliTable table;
    std::string line;
    unsigned lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("moduli table line " + std::to_string(lineno) +
                                     ": expected n<TAB>hex");
        try {
            const auto n = static_cast<unsigned>(std::stoul(line.substr(0, tab)));
            const auto m = std::stoull(line.substr(tab + 1), nullptr, 16);
            table[n] = m;
        } catch (const std::logic_error&) {
            throw std::runtime_error("moduli table line " + std::to_string(lineno) +
                                     ": malformed entry");
        }
    }
    return table;
}

inline ModuliTable load_moduli(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open moduli table: " + path);
    return parse_moduli(in);
}

inline std::string format_moduli(const ModuliTable& table) {
    std::ostringstream out;
    for (const auto& [n, m] : table) out << n << '\t' << std::hex << m << std::dec << '\n';
    return out.str();
}

}  // namespace nlkit
