#pragma once

// Dense linear algebra over F_2 for small square systems (n <= 64).
// Row i of a BitMatrix is a 64-bit word whose bit j is entry (i, j).

#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

namespace nlkit::gf2 {

using Row = std::uint64_t;

struct BitMatrix {
    unsigned rows = 0;
    unsigned cols = 0;
    std::vector<Row> data;

    BitMatrix() = default;
    BitMatrix(unsigned r, unsigned c) : rows(r), cols(c), data(r, 0) {}

    bool get(unsigned i, unsigned j) const { return (data[i] >> j) & 1U; }
    void set(unsigned i, unsigned j, bool v) {
        if (v)
            data[i] |= Row{1} << j;
        else
            data[i] &= ~(Row{1} << j);
    }
};

/// Reduced row echelon form in place. Returns the pivot column of each
/// nonzero row, in order.
inline std::vector<unsigned> row_reduce(BitMatrix& m) {
    std::vector<unsigned> pivots;
    unsigned r = 0;
    for (unsigned c = 0; c < m.cols && r < m.rows; ++c) {
        unsigned p = r;
        while (p < m.rows && !m.get(p, c)) ++p;
        if (p == m.rows) continue;
        std::swap(m.data[p], m.data[r]);
        for (unsigned i = 0; i < m.rows; ++i)
            if (i != r && m.get(i, c)) m.data[i] ^= m.data[r];
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline unsigned rank(BitMatrix m) { return static_cast<unsigned>(row_reduce(m).size()); }

/// Basis of {v : M v = 0}, each vector packed as a column-index bitmask.
inline std::vector<Row> nullspace(BitMatrix m) {
    const auto pivots = row_reduce(m);
    Row pivot_mask = 0;
    for (unsigned c : pivots) pivot_mask |= Row{1} << c;

    std::vector<Row> basis;
    for (unsigned free = 0; free < m.cols; ++free) {
        if ((pivot_mask >> free) & 1U) continue;
        Row v = Row{1} << free;
        for (unsigned i = 0; i < pivots.size(); ++i)
            if (m.get(i, free)) v |= Row{1} << pivots[i];
        basis.push_back(v);
    }
    return basis;
}

/// One solution of M v = rhs (rhs packed by row index), if any.
inline std::optional<Row> solve(const BitMatrix& m, Row rhs) {
    // Augment with the right-hand side as an extra column.
    BitMatrix aug(m.rows, m.cols + 1);
    for (unsigned i = 0; i < m.rows; ++i)
        aug.data[i] = m.data[i] | (((rhs >> i) & 1U) ? Row{1} << m.cols : 0);
    const auto pivots = row_reduce(aug);
    Row v = 0;
    for (unsigned i = 0; i < pivots.size(); ++i) {
        if (pivots[i] == m.cols) return std::nullopt;
        if (aug.get(i, m.cols)) v |= Row{1} << pivots[i];
    }
    return v;
}

/// Span of a set of vectors as an explicit list (2^k entries).
inline std::vector<Row> span(const std::vector<Row>& basis) {
    std::vector<Row> out{0};
    out.reserve(std::size_t{1} << basis.size());
    for (Row b : basis) {
        const std::size_t sz = out.size();
        for (std::size_t i = 0; i < sz; ++i) out.push_back(out[i] ^ b);
    }
    return out;
}

}  // namespace nlkit::gf2
