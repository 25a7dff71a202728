#include <gtest/gtest.h>

#include "hasse/families.hpp"

using namespace hasse;

namespace {

u64 brute_nloc(i64 B, i64 n) {
    u64 m = 0;
    for (i64 a = -B; a <= B; ++a)
        for (i64 b = -B; b <= B; ++b)
            for (i64 c = -B; c <= B; ++c) {
                if (a == 0 || b == 0 || c == 0) continue;
                if ((a > 0) == (b > 0) && (b > 0) == (c > 0)) continue;
                m += adelic_status({a, b, c, n}).everywhere_soluble;
            }
    return m;
}

u64 brute_sdelta_positive(i64 B, i64 n) {
    u64 m = 0;
    for (i64 a = 1; a <= B; ++a)
        for (i64 b = 1; b <= B; ++b)
            for (i64 c = 1; c <= B; ++c)
                m += delta_indicator(a, b, c, n) * delta_indicator(b, a, c, n) * delta_indicator(c, a, b, n);
    return m;
}

u64 brute_sdelta_signed(i64 B, i64 n) {
    u64 m = 0;
    for (i64 a = -B; a <= B; ++a)
        for (i64 b = -B; b <= B; ++b)
            for (i64 c = -B; c <= B; ++c) {
                if (a == 0 || b == 0 || c == 0) continue;
                if ((a > 0) == (b > 0) && (b > 0) == (c > 0)) continue;
                m += !prop1_no_obstruction({a, b, c, n});
            }
    return m;
}

// every F'_1 member, tested one by one with the decision procedure
u64 brute_nbr(i64 B) {
    u64 m = 0;
    for (i64 a = 1; 9 * a <= B; a += 8) {
        if (a % 3 == 0 || !is_squarefree(a)) continue;
        for (i64 b = 1; 3 * b <= B; b += 2) {
            if (b % 3 == 0 || !is_squarefree(b)) continue;
            for (i64 c = 1; 16 * c * c <= B; ++c) {
                if (c % 3 == 0 || std::gcd(a * b, 2 * c) != 1) continue;
                m += bm_decision({9 * a, -3 * b, 4 * c}).outcome == Outcome::Obstruction;
            }
        }
    }
    return m;
}

u64 brute_members(i64 B) {
    u64 m = 0;
    for (i64 a = 1; 9 * a <= B; a += 8) {
        if (a % 3 == 0 || !is_squarefree(a)) continue;
        for (i64 b = 1; 3 * b <= B; b += 2) {
            if (b % 3 == 0 || !is_squarefree(b)) continue;
            for (i64 c = 1; 16 * c * c <= B; ++c)
                if (c % 3 != 0 && std::gcd(a * b, 2 * c) == 1) ++m;
        }
    }
    return m;
}

}  // namespace

TEST(Nloc, Examples) {
    const auto r1 = count_nloc(1, 1);
    EXPECT_EQ(r1.matched, 6u);
    EXPECT_EQ(r1.eligible, 6u);
    EXPECT_EQ(r1.fraction, Rational(1));
    EXPECT_EQ(count_nloc(10, 1).matched, brute_nloc(10, 1));
}

TEST(Nloc, AgreesWithAdelicStatus) {
    for (i64 n : {2, 3, -5, 12, 45}) EXPECT_EQ(count_nloc(7, n).matched, brute_nloc(7, n)) << n;
}

TEST(Nloc, MonotoneAndBounded) {
    u64 prev = 0;
    for (u64 B = 1; B <= 14; ++B) {
        const auto r = count_nloc(B, 1);
        EXPECT_GE(r.matched, prev);
        EXPECT_LE(r.matched, r.eligible);
        EXPECT_LE(r.eligible, 8 * B * B * B);
        prev = r.matched;
    }
}

TEST(Nloc, PartitionIndependent) {
    const auto a = count_nloc(24, 3, {1, 1});
    for (int parts : {4, 16}) {
        const auto b = count_nloc(24, 3, {parts, 2});
        EXPECT_EQ(a.matched, b.matched);
        EXPECT_EQ(a.fraction, b.fraction);
    }
}

TEST(Sdelta, Examples) {
    EXPECT_EQ(count_sdelta(1, 1).matched, 6u);
    EXPECT_EQ(count_sdelta(10, 1).matched, 6 * brute_sdelta_positive(10, 1));
    EXPECT_EQ(count_sdelta(10, 1).matched, 331u * 6);
    EXPECT_EQ(count_sdelta(20, 1).matched, 1301u * 6);
}

TEST(Sdelta, SignSymmetry) {
    EXPECT_EQ(count_sdelta(8, 1).matched, brute_sdelta_signed(8, 1));
    EXPECT_EQ(count_sdelta(8, 15).matched, brute_sdelta_signed(8, 15));
}

TEST(Sdelta, AgreesWithBruteForce) {
    for (i64 n : {1, 3, 5, 9, 105})
        for (u64 B : {7, 13, 25, 36}) EXPECT_EQ(count_sdelta(B, n).matched, 6 * brute_sdelta_positive(B, n)) << B << " " << n;
}

TEST(Sdelta, PartitionIndependent) {
    const auto a = count_sdelta(5000, 1, {1, 1});
    for (int parts : {4, 16}) EXPECT_EQ(count_sdelta(5000, 1, {parts, 3}).matched, a.matched);
}

TEST(Sdelta, ContainsObstructedSurfaces) {
    // filter soundness: an obstructed star surface passes the triple-delta filter
    for (i64 a = -25; a <= 25; ++a)
        for (i64 b = -25; b <= 25; ++b) {
            if (a == 0 || b == 0 || (a > 0 && b > 0)) continue;
            for (i64 c = 1; c <= 5; ++c) {
                const StarSurface s{a, b, c};
                if (bm_decision(s).outcome != Outcome::Obstruction) continue;
                const auto q = s.quadric();
                EXPECT_EQ(delta_indicator(q.a, q.b, q.c, 1) * delta_indicator(q.b, q.a, q.c, 1) *
                              delta_indicator(q.c, q.a, q.b, 1),
                          1);
            }
        }
}

TEST(Nbr, Examples) {
    EXPECT_EQ(count_nbr_prime_enum(144).matched, 2u);
    EXPECT_EQ(count_nbr_prime_formula(144).matched, 2u);
    EXPECT_EQ(count_nbr_prime_enum(143).matched, 2u);
    EXPECT_EQ(count_nbr_prime_formula(143).matched, 2u);
    EXPECT_EQ(count_nbr_prime_formula(9).matched, 0u);
    EXPECT_EQ(count_nbr_prime_enum(9).matched, 0u);
    EXPECT_EQ(count_nbr_prime_enum(63).matched, 1u);
    EXPECT_EQ(count_nbr_prime_enum(64).matched, 2u);
}

TEST(Nbr, MethodsAgree) {
    for (u64 B : {144, 1000, 10000, 54321, 100000, 1000000})
        EXPECT_EQ(count_nbr_prime_enum(B, {}, false).matched, count_nbr_prime_formula(B, {}, false).matched) << B;
}

TEST(Nbr, AgreesWithDecisionOverWholeFamily) {
    for (i64 B : {144, 500, 2000, 10000}) {
        const auto r = count_nbr_prime_enum(B);
        EXPECT_EQ(r.matched, brute_nbr(B)) << B;
        EXPECT_EQ(r.eligible, brute_members(B)) << B;
    }
}

TEST(Nbr, CountedSurfacesAreObstructedAndAdelic) {
    const u64 B = 10000;
    const auto [U, V] = fprime_bounds(B);
    int seen = 0;
    for (u64 u = 1; u <= U; u += 24) {
        if (!is_squarefree(u) || !xprime_criterion(static_cast<i64>(u), static_cast<i64>(u))) continue;
        for (u64 c = 1; c <= V; ++c) {
            if (c % 3 == 0 || std::gcd(c, u) != 1) continue;
            const StarSurface s{9 * static_cast<i64>(u), -3 * static_cast<i64>(u), 4 * static_cast<i64>(c)};
            EXPECT_TRUE(adelic_status(s.quadric()).everywhere_soluble);
            EXPECT_EQ(bm_decision(s).outcome, Outcome::Obstruction);
            ++seen;
        }
    }
    EXPECT_EQ(static_cast<u64>(seen), count_nbr_prime_formula(B).matched);
}

TEST(Nbr, PartitionIndependent) {
    const u64 B = 2000000;
    const u64 base = count_nbr_prime_formula(B, {1, 1}, false).matched;
    for (int parts : {4, 16}) {
        EXPECT_EQ(count_nbr_prime_formula(B, {parts, 4}, false).matched, base);
        EXPECT_EQ(count_nbr_prime_enum(B, {parts, 4}, false).matched, base);
    }
}

TEST(Nbr, HeightConventionsAgree) {
    // max(9u, 3u, 16c^2) <= B is the same as u <= B/9 and c <= sqrt(B)/4
    for (u64 B = 144; B < 3000; B += 37) {
        const auto [U, V] = fprime_bounds(B);
        for (u64 u = 1; u <= B; ++u) EXPECT_EQ(std::max(9 * u, 3 * u) <= B, u <= U);
        for (u64 c = 1; 16 * c * c <= 4 * B; ++c) EXPECT_EQ(16 * c * c <= B, c <= V);
    }
}

TEST(Constant, Examples) {
    const auto c5 = theorem2_constant(5);
    const long double direct = theorem2_factor(2) * theorem2_factor(3) * theorem2_factor(5);
    EXPECT_NEAR(c5.value, static_cast<double>(direct) / (270 * std::sqrt(std::acos(-1.0))), 1e-15);
    EXPECT_THROW(theorem2_constant(4), DomainError);
    const double a = theorem2_constant(100000).value;
    const double b = theorem2_constant(1000000).value;
    EXPECT_NEAR(a, b, 1e-6);
    EXPECT_GT(b, 0);
    EXPECT_LT(b, theorem2_prefactor());
}

TEST(Constant, FactorsArePositive) {
    double worst = 0;
    for (u64 p = 2; p < 20000; ++p) {
        if (!is_prime(p)) continue;
        const long double f = theorem2_factor(p);
        EXPECT_GT(f, 0);
        worst = std::max(worst, static_cast<double>(f));
    }
    // split primes push single factors above 1; the product stays below 1
    EXPECT_GT(worst, 1.0);
}

TEST(Growth, Rows) {
    const auto rows = growth_report({144, 1000});
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].count, 2u);
    EXPECT_EQ(rows[0].count_4B, count_nbr_prime_enum(576, {}, false).matched);
    EXPECT_THROW(growth_report({100}), DomainError);
    EXPECT_THROW(growth_report({1000, 500}), DomainError);
}
