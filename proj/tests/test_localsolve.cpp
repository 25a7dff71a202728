#include <gtest/gtest.h>

#include "hasse/localsolve.hpp"

using namespace hasse;

namespace {

// Depth at which the witness oracle is complete for odd p.
int oracle_depth(i64 n, u64 p) {
    const int v = vp(n, p);
    return std::max(v + 2, 2 * v + 1);
}

bool has_box_point(const QuadricSurface& s, int box) {
    for (i64 x = -box; x <= box; ++x)
        for (i64 y = -box; y <= box; ++y)
            for (i64 z = -box; z <= box; ++z)
                if (s.a * x * x + s.b * y * y + s.c * z * z == s.n) return true;
    return false;
}

}  // namespace

TEST(Surface, RejectsZeros) {
    EXPECT_THROW(QuadricSurface(0, 1, 1, 1), DomainError);
    EXPECT_THROW(QuadricSurface(1, 1, 1, 0), DomainError);
    EXPECT_EQ(QuadricSurface(4, -5, 25, 1).height(), 25u);
}

TEST(Real, Examples) {
    EXPECT_TRUE(solvable_real({1, 1, -1, 1}).soluble);
    EXPECT_FALSE(solvable_real({1, 1, 1, -1}).soluble);
    EXPECT_TRUE(solvable_real({-2, -3, -5, -7}).soluble);
    EXPECT_FALSE(solvable_real({-2, -3, -5, 7}).soluble);
}

TEST(OddPrime, Examples) {
    EXPECT_TRUE(solvable_zp_odd({1, 1, -1, 1}, 5).soluble);
    auto v = solvable_zp_odd({2, 3, 3, 1}, 3);
    EXPECT_FALSE(v.soluble);
    const auto& nr = std::get<NonResidueCase>(v.reason);
    EXPECT_EQ(nr.branch, OddBranch::BothHighEven);
    EXPECT_EQ(nr.unit_slot, 0);
    ASSERT_EQ(nr.symbol_count, 1);
    EXPECT_EQ(nr.symbols[0].value, -1);
    EXPECT_TRUE(solvable_zp_odd({1, 3, 3, 1}, 3).soluble);
    EXPECT_THROW(solvable_zp_odd({1, 1, 1, 1}, 2), DomainError);

    auto mv = solvable_zp_odd({9, 9, 27, 3}, 3);
    EXPECT_FALSE(mv.soluble);
    EXPECT_EQ(std::get<MinValuationExceedsN>(mv.reason).min_valuation, 2);
}

TEST(OddPrime, OracleExamples) {
    EXPECT_FALSE(solvable_zp_oracle({2, 3, 3, 1}, 3, 3).soluble);
    auto s = solvable_zp_oracle({1, 3, 3, 1}, 3, 3);
    ASSERT_TRUE(s.soluble);
    EXPECT_EQ(std::get<HenselWitnessReason>(s.reason).witness.residue, (std::array<i64, 3>{1, 0, 0}));
    EXPECT_TRUE(solvable_zp_oracle({5, 7, 11, 13}, 7, 3).soluble);
    EXPECT_THROW(solvable_zp_oracle({1, 1, 1, 9}, 3, 3), DomainError);
}

// At depth val(n) + 2 the oracle misses points whose only liftable residues
// sit at a higher level: 2x^2 + 9y^2 + 27z^2 = 9 has (0, 1, 0), but the
// y-derivative 18 has valuation 2 and needs modulus 3^5.
TEST(OddPrime, ShallowOracleDepthIsIncomplete) {
    const QuadricSurface s{2, 9, 27, 9};
    EXPECT_TRUE(solvable_zp_odd(s, 3).soluble);
    EXPECT_FALSE(solvable_zp_oracle(s, 3, 4).soluble);
    EXPECT_TRUE(solvable_zp_oracle(s, 3, 5).soluble);
}

TEST(OddPrime, AgreesWithOracleOnSmallBox) {
    for (u64 p : {3, 5, 7}) {
        for (i64 a = -12; a <= 12; ++a)
            for (i64 b = a; b <= 12; ++b)
                for (i64 c = b; c <= 12; ++c)
                    for (i64 n : {1, -1, 2, 3, 5, 7, 9, -9, 10}) {
                        if (a == 0 || b == 0 || c == 0) continue;
                        const QuadricSurface s{a, b, c, n};
                        ASSERT_EQ(solvable_zp_odd(s, p).soluble,
                                  solvable_zp_oracle(s, p, oracle_depth(n, p)).soluble)
                            << a << " " << b << " " << c << " " << n << " p=" << p;
                    }
    }
}

TEST(OddPrime, HighValuationTargets) {
    // one case per branch family with deep n
    for (u64 p : {3, 5}) {
        for (i64 a : {1, 2, 3, 6, 9, 18, 27}) {
            for (i64 b : {1, 2, 3, 9, 12, 45, 81}) {
                for (i64 n : {27, 54, 81, 162, 125, 250}) {
                    const QuadricSurface s{a, b, -static_cast<i64>(p) * 7, n};
                    ASSERT_EQ(solvable_zp_odd(s, p).soluble, solvable_zp_oracle(s, p, oracle_depth(n, p)).soluble)
                        << a << " " << b << " " << n << " p=" << p;
                }
            }
        }
    }
}

TEST(OddPrime, UnramifiedPrimesNeverObstruct) {
    for (u64 p : {3, 5, 7, 11, 13}) {
        const i64 q = static_cast<i64>(p);
        for (i64 a = 1; a <= 20; ++a)
            for (i64 b = -20; b <= 20; ++b) {
                if (b == 0) continue;
                // p divides at most one coefficient, p does not divide n
                const QuadricSurface s{a * q, b % q == 0 ? b + 1 : b, 7 * q + 1, 2 * q + 1};
                if (s.b % q == 0 || s.c % q == 0) continue;
                EXPECT_TRUE(solvable_zp_odd(s, p).soluble);
            }
    }
}

TEST(TwoAdic, Examples) {
    EXPECT_TRUE(solvable_z2({1, 1, -1, 1}).soluble);
    auto w = solvable_z2({3, 5, 7, 2});
    ASSERT_TRUE(w.soluble);
    EXPECT_TRUE(std::holds_alternative<HenselWitnessReason>(w.reason));
    auto f = solvable_z2({2, 2, 2, 1});
    EXPECT_FALSE(f.soluble);
    EXPECT_TRUE(std::holds_alternative<MinValuationExceedsN>(f.reason));
    EXPECT_FALSE(solvable_z2({1, 1, 1, 7}).soluble);
    EXPECT_TRUE(solvable_z2({1, 1, 1, 3}).soluble);
    EXPECT_FALSE(solvable_z2({1, 1, 1, 28}).soluble);
}

// Undropped search at a larger depth than the one solvable_z2 uses.
TEST(TwoAdic, AgreesWithDeepUnreducedSearch) {
    for (i64 a = -12; a <= 12; ++a)
        for (i64 b = a; b <= 12; ++b)
            for (i64 c = b; c <= 12; ++c)
                for (i64 n : {1, 2, 3, 4, 7, 8, 12, -5}) {
                    if (a == 0 || b == 0 || c == 0) continue;
                    const int K = vp(n, 2) + vp(4 * a * b * c, 2) + 5;
                    if (K > 23) continue;
                    const bool deep =
                        find_liftable_witness(std::array<i128, 3>{a, b, c}, n, 2, K).has_value();
                    ASSERT_EQ(solvable_z2({a, b, c, n}).soluble, deep) << a << " " << b << " " << c << " " << n;
                }
}

TEST(TwoAdic, TableMatchesDirect) {
    for (i64 n : {1, 2, 4, 12}) {
        TwoAdicTable table(n);
        for (i64 a = 1; a <= 40; ++a)
            for (i64 b = -40; b <= 40; b += 3)
                for (i64 c = -33; c <= 40; c += 7) {
                    if (b == 0 || c == 0) continue;
                    ASSERT_EQ(table.soluble(a, b, c), solvable_z2({a, b, c, n}).soluble)
                        << a << " " << b << " " << c << " " << n;
                }
    }
}

TEST(Adelic, Examples) {
    EXPECT_TRUE(adelic_status({1, 1, -1, 1}).everywhere_soluble);
    auto st = adelic_status({2, 3, 3, 1});
    ASSERT_FALSE(st.everywhere_soluble);
    ASSERT_EQ(st.failing_places.size(), 1u);
    EXPECT_EQ(st.failing_places[0].place, Place::finite(3));
    EXPECT_TRUE(adelic_status({4, -5, 25, 1}).everywhere_soluble);
}

TEST(Adelic, FailingPlacesMatchFullSweep) {
    for (const QuadricSurface s :
         {QuadricSurface{2, 3, 3, 1}, QuadricSurface{4, -5, 25, 1}, QuadricSurface{5, 10, -15, 7},
          QuadricSurface{21, 35, 15, 2}, QuadricSurface{1, 1, 1, 7}, QuadricSurface{-3, 6, 9, 3}}) {
        auto st = adelic_status(s);
        std::vector<Place> swept;
        if (!solvable_real(s).soluble) swept.push_back(Place::infinite());
        for (u64 p = 2; p <= 50; ++p) {
            if (!is_prime(p)) continue;
            const bool ok = p == 2 ? solvable_z2(s).soluble
                                   : solvable_zp_oracle(s, p, oracle_depth(s.n, p)).soluble;
            if (!ok) swept.push_back(Place::finite(p));
        }
        std::sort(swept.begin(), swept.end());
        std::vector<Place> got;
        for (const auto& f : st.failing_places) got.push_back(f.place);
        EXPECT_EQ(got, swept) << s.a << " " << s.b << " " << s.c << " " << s.n;
        for (u64 p : {2ULL}) EXPECT_NE(std::find(st.checked_primes.begin(), st.checked_primes.end(), p),
                                       st.checked_primes.end());
    }
}

TEST(Adelic, VisibleIntegerPointImpliesLocalSolubility) {
    for (i64 a = -6; a <= 6; ++a)
        for (i64 b = -6; b <= 6; ++b)
            for (i64 c = -6; c <= 6; ++c)
                for (i64 n : {1, 2, 5}) {
                    if (a == 0 || b == 0 || c == 0) continue;
                    const QuadricSurface s{a, b, c, n};
                    if (has_box_point(s, 20)) ASSERT_TRUE(adelic_status(s).everywhere_soluble);
                }
}

TEST(Adelic, PermutationAndNegationInvariance) {
    for (i64 a = -9; a <= 9; a += 2)
        for (i64 b = -10; b <= 10; b += 3)
            for (i64 c = -12; c <= 12; c += 4)
                for (i64 n : {1, 3, 6}) {
                    if (a == 0 || b == 0 || c == 0) continue;
                    const bool base = adelic_status({a, b, c, n}).everywhere_soluble;
                    EXPECT_EQ(adelic_status({b, a, c, n}).everywhere_soluble, base);
                    EXPECT_EQ(adelic_status({c, b, a, n}).everywhere_soluble, base);
                    EXPECT_EQ(adelic_status({b, c, a, n}).everywhere_soluble, base);
                    EXPECT_EQ(adelic_status({-a, -b, -c, -n}).everywhere_soluble, base);
                }
}

TEST(Adelic, ScalingBySquarePreservesVerdicts) {
    for (i64 a = -7; a <= 7; ++a)
        for (i64 b = 1; b <= 9; ++b)
            for (i64 n : {1, 2, 3}) {
                if (a == 0) continue;
                const QuadricSurface s{a, b, 6, n};
                for (u64 p : {2, 3, 5}) {
                    const i64 q = static_cast<i64>(p * p);
                    const QuadricSurface t{a * q, b * q, 6 * q, n * q};
                    auto verdict = [&](const QuadricSurface& x) {
                        return p == 2 ? solvable_z2(x).soluble : solvable_zp_odd(x, p).soluble;
                    };
                    EXPECT_EQ(verdict(s), verdict(t));
                }
            }
}

TEST(Trace, DescribeMentionsBranch) {
    auto v = solvable_zp_odd({2, 3, 3, 1}, 3);
    EXPECT_NE(describe(v.reason).find("both-high"), std::string::npos);
}
