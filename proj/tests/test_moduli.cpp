#include <gtest/gtest.h>

#include <sstream>

#include "nlkit/field.hpp"
#include "nlkit/moduli.hpp"

using namespace nlkit;

namespace {

// Irreducible iff no factor of degree 1..n/2 divides it.
bool irreducible_by_trial_division(std::uint64_t m) {
    const int n = poly2::degree(m);
    for (std::uint64_t d = 2; poly2::degree(d) <= n / 2; ++d)
        if (poly2::mod(m, d) == 0) return false;
    return n >= 1;
}

}  // namespace

TEST(Moduli, ShippedFileMatchesEmbeddedTable) {
    const auto table = load_moduli(std::string(NLKIT_SOURCE_DIR) + "/data/moduli.txt");
    ASSERT_EQ(table.size(), kMaxDegree);
    for (unsigned n = 1; n <= kMaxDegree; ++n) EXPECT_EQ(table.at(n), kDefaultModuli[n]) << n;
}

TEST(Moduli, EachEntryIsSmallestIrreducible) {
    for (unsigned n = 1; n <= kMaxDegree; ++n) {
        const std::uint64_t m = kDefaultModuli[n];
        ASSERT_EQ(poly2::degree(m), static_cast<int>(n));
        EXPECT_TRUE(irreducible_by_trial_division(m)) << n;
        EXPECT_TRUE(poly2::is_irreducible(m)) << n;
        for (std::uint64_t c = std::uint64_t{1} << n; c < m; ++c)
            EXPECT_FALSE(irreducible_by_trial_division(c)) << n << ' ' << c;
    }
}

TEST(Moduli, GcdCheckAgreesWithTrialDivision) {
    for (std::uint64_t m = 2; m < (1U << 11); ++m)
        EXPECT_EQ(poly2::is_irreducible(m), irreducible_by_trial_division(m)) << m;
}

TEST(Moduli, ParseAndFormatRoundTrip) {
    std::istringstream in("# comment\n\n3\tb\n8\t11b\n");
    const auto t = parse_moduli(in);
    EXPECT_EQ(t.at(3), 0xbU);
    EXPECT_EQ(t.at(8), 0x11bU);
    std::istringstream again(format_moduli(t));
    EXPECT_EQ(parse_moduli(again), t);

    std::istringstream bad("3 b\n");
    EXPECT_THROW(parse_moduli(bad), std::runtime_error);
}

TEST(Moduli, TableOverrideBuildsContext) {
    ModuliTable t{{8, 0x11d}};
    EXPECT_EQ(make_context(8, t)->modulus(), 0x11dU);
    EXPECT_EQ(make_context(5, t)->modulus(), kDefaultModuli[5]);
}
