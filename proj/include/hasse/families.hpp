#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "hasse/arith.hpp"
#include "hasse/brauer.hpp"
#include "hasse/density.hpp"
#include "hasse/detail/parallel.hpp"
#include "hasse/localsolve.hpp"

namespace hasse {

struct CountOptions {
    int partitions = 1;
    int threads = 1;
};

struct CountReport {
    std::string kind;
    u64 B = 0;
    i64 n = 1;
    u64 eligible = 0;
    u64 matched = 0;
    Rational fraction;
    std::optional<double> prediction;
    u64 prediction_cutoff = 0;
    std::string prediction_note;
    double wall_time = 0;
    int partitions = 1;
};

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline void check_options(const CountOptions& o) {
    if (o.partitions < 1) throw DomainError("partitions must be positive");
    if (o.threads < 1) throw DomainError("threads must be positive");
}

inline Rational make_fraction(u64 matched, u64 eligible) {
    if (eligible == 0) return Rational(0);
    return Rational(BigInt(matched), BigInt(eligible));
}

inline u64 sum_u64(const std::vector<u64>& xs) {
    u64 s = 0;
    for (u64 x : xs) s += x;
    return s;
}

// The six sign patterns of (a, b, c) that are not all of one sign.
inline constexpr std::array<std::array<int, 3>, 6> kMixedSigns{{
    {1, 1, -1}, {1, -1, 1}, {-1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}};

}  // namespace detail

// ---------------------------------------------------------------------------
// N_loc(B): sign-mixed triples in [-B, B]^3 with points everywhere locally.
// ---------------------------------------------------------------------------

inline CountReport count_nloc(u64 B, i64 n, const CountOptions& opt = {}, u64 cutoff = 10000) {
    detail::check_options(opt);
    if (B < 1) throw DomainError("count_nloc: B must be positive");
    if (n == 0) throw DomainError("count_nloc: n must be nonzero");
    if (B > 100000) throw DomainError("count_nloc: B too large for exhaustive counting");
    detail::Stopwatch clock;
    const SpfSieve sieve(B);
    const int Bi = static_cast<int>(B);

    // per-k data: 2-adic codes and, for each odd prime of n, the odd datum of +k and -k
    std::array<std::vector<int>, 2> code;
    for (int s = 0; s < 2; ++s) {
        code[s].resize(B + 1);
        for (int k = 1; k <= Bi; ++k) code[s][k] = detail::two_adic_code(s == 0 ? k : -k);
    }
    std::vector<u64> n_primes;
    for (u64 p : prime_divisors(abs_u64(n)))
        if (p != 2) n_primes.push_back(p);
    std::vector<std::array<std::vector<detail::OddDatum>, 2>> n_data(n_primes.size());
    std::vector<detail::OddDatum> n_target;
    for (std::size_t i = 0; i < n_primes.size(); ++i) {
        const u64 p = n_primes[i];
        n_target.push_back(detail::odd_datum(n, p));
        for (int s = 0; s < 2; ++s) {
            n_data[i][s].resize(B + 1);
            for (int k = 1; k <= Bi; ++k) n_data[i][s][k] = detail::odd_datum(s == 0 ? k : -k, p);
        }
    }

    auto work = [&](int chunk) -> u64 {
        const auto [lo, hi] = detail::split_range(1, Bi + 1, opt.partitions, chunk);
        TwoAdicTable table(n, 24);
        u64 matched = 0;
        std::vector<u64> extra;
        std::vector<u64> ab_primes;
        for (long long a = lo; a < hi; ++a) {
            for (int b = 1; b <= Bi; ++b) {
                ab_primes.clear();
                const u64 gab = std::gcd(static_cast<u64>(a), static_cast<u64>(b));
                if (gab > 1)
                    for (u64 p : prime_divisors(gab, &sieve))
                        if (p != 2 && n % static_cast<i64>(p) != 0) ab_primes.push_back(p);
                for (int c = 1; c <= Bi; ++c) {
                    extra = ab_primes;
                    for (u64 g : {std::gcd(static_cast<u64>(a), static_cast<u64>(c)),
                                  std::gcd(static_cast<u64>(b), static_cast<u64>(c))}) {
                        if (g == 1) continue;
                        for (u64 p : prime_divisors(g, &sieve))
                            if (p != 2 && n % static_cast<i64>(p) != 0 &&
                                std::find(extra.begin(), extra.end(), p) == extra.end())
                                extra.push_back(p);
                    }
                    const int k[3] = {static_cast<int>(a), b, c};
                    for (const auto& sg : detail::kMixedSigns) {
                        const int sa = sg[0] < 0, sb = sg[1] < 0, sc = sg[2] < 0;
                        if (!table.soluble_codes(code[sa][k[0]], code[sb][k[1]], code[sc][k[2]])) continue;
                        bool ok = true;
                        for (std::size_t i = 0; ok && i < n_primes.size(); ++i) {
                            const u64 p = n_primes[i];
                            ok = detail::odd_decide({n_data[i][sa][k[0]], n_data[i][sb][k[1]], n_data[i][sc][k[2]]},
                                                    n_target[i], detail::legendre_minus_one(p))
                                     .soluble;
                        }
                        for (std::size_t i = 0; ok && i < extra.size(); ++i) {
                            const u64 p = extra[i];
                            ok = soluble_zp_odd(sg[0] * k[0], sg[1] * k[1], sg[2] * k[2], n, p);
                        }
                        matched += ok;
                    }
                }
            }
        }
        return matched;
    };
    const auto parts = detail::run_chunks<u64>(opt.partitions, opt.threads, work);

    CountReport r;
    r.kind = "nloc";
    r.B = B;
    r.n = n;
    r.eligible = 6 * B * B * B;
    r.matched = detail::sum_u64(parts);
    r.fraction = detail::make_fraction(r.matched, r.eligible);
    r.prediction = euler_product_sigma(n, cutoff).value;
    r.prediction_cutoff = cutoff;
    r.prediction_note = "product of local densities over p <= cutoff, compared with the soluble fraction";
    r.partitions = opt.partitions;
    r.wall_time = clock.seconds();
    return r;
}

// ---------------------------------------------------------------------------
// S(B): sign-mixed triples passing the triple delta filter.
// ---------------------------------------------------------------------------

namespace detail {

// Exponent patterns of one relevant prime in (d1, d2, d3) and their weights in
// the convolution f = g * (square indicator)^3 of the filter.
struct Monomial {
    int e[3];
    int w;
};
inline constexpr std::array<Monomial, 13> kDeltaMonomials{{
    {{1, 1, 0}, 1}, {{1, 0, 1}, 1}, {{0, 1, 1}, 1}, {{1, 1, 1}, 1}, {{1, 2, 0}, 1},
    {{1, 0, 2}, 1}, {{2, 1, 0}, 1}, {{0, 1, 2}, 1}, {{2, 0, 1}, 1}, {{0, 2, 1}, 1},
    {{1, 2, 2}, -1}, {{2, 1, 2}, -1}, {{2, 2, 1}, -1}}};

}  // namespace detail

// Exact S(B) by a triple-delta count over the positive octant, times 6. A
// prime p (odd, p !| n) breaks the filter iff it divides exactly one of a, b, c
// to an odd power; the indicator factors as g * q x q x q where q(k) says the
// relevant part of k is a square, so S_+(B) = sum_d g(d) Q(B/d1) Q(B/d2) Q(B/d3).
inline CountReport count_sdelta(u64 B, i64 n, const CountOptions& opt = {}) {
    detail::check_options(opt);
    if (B < 1) throw DomainError("count_sdelta: B must be positive");
    if (n == 0) throw DomainError("count_sdelta: n must be nonzero");
    // 6 B^3 must fit the u64 eligible count
    if (B > 1000000) throw DomainError("count_sdelta: B too large");
    detail::Stopwatch clock;
    const SpfSieve sieve(B);
    auto relevant = [&](u64 p) { return p != 2 && n % static_cast<i64>(p) != 0; };

    std::vector<u64> Q(B + 1, 0);
    for (u64 k = 1; k <= B; ++k) {
        bool sq = true;
        u64 m = k;
        while (m > 1) {
            const u64 p = sieve.smallest_factor(m);
            int e = 0;
            while (m % p == 0) {
                m /= p;
                ++e;
            }
            if (relevant(p) && (e & 1)) {
                sq = false;
                break;
            }
        }
        Q[k] = Q[k - 1] + sq;
    }
    std::vector<u64> primes;
    for (u64 p : sieve.primes())
        if (relevant(p)) primes.push_back(p);

    // signed accumulation; every partial sum stays within i128
    std::function<i128(std::size_t, u64, u64, u64)> dfs;
    auto branch = [&](std::size_t i, u64 d1, u64 d2, u64 d3) -> i128 {
        const u64 p = primes[i];
        i128 total = 0;
        for (const auto& m : detail::kDeltaMonomials) {
            u64 d[3] = {d1, d2, d3};
            bool ok = true;
            for (int t = 0; t < 3 && ok; ++t)
                for (int e = 0; e < m.e[t] && ok; ++e) {
                    d[t] *= p;
                    ok = d[t] <= B;
                }
            if (!ok) continue;
            const i128 own = static_cast<i128>(Q[B / d[0]]) * Q[B / d[1]] * Q[B / d[2]];
            total += m.w * (own + dfs(i + 1, d[0], d[1], d[2]));
        }
        return total;
    };
    dfs = [&](std::size_t from, u64 d1, u64 d2, u64 d3) -> i128 {
        i128 total = 0;
        for (std::size_t i = from; i < primes.size(); ++i) {
            const u64 p = primes[i];
            // every pattern puts p into at least two coordinates
            if ((d1 * p <= B) + (d2 * p <= B) + (d3 * p <= B) < 2) break;
            total += branch(i, d1, d2, d3);
        }
        return total;
    };
    // the empty product goes to chunk 0, top-level prime i to chunk i mod partitions
    auto work = [&](int chunk) -> i128 {
        i128 total = chunk == 0 ? static_cast<i128>(Q[B]) * Q[B] * Q[B] : 0;
        for (std::size_t i = static_cast<std::size_t>(chunk); i < primes.size(); i += opt.partitions)
            total += branch(i, 1, 1, 1);
        return total;
    };
    const auto parts = detail::run_chunks<i128>(opt.partitions, opt.threads, work);
    i128 positive = 0;
    for (i128 x : parts) positive += x;
    if (positive < 0 || positive > static_cast<i128>(B) * B * B) throw std::logic_error("count_sdelta: inconsistent sum");

    CountReport r;
    r.kind = "sdelta";
    r.B = B;
    r.n = n;
    r.eligible = 6 * B * B * B;
    r.matched = static_cast<u64>(6 * positive);
    r.fraction = detail::make_fraction(r.matched, r.eligible);
    r.partitions = opt.partitions;
    r.wall_time = clock.seconds();
    return r;
}

// ---------------------------------------------------------------------------
// N'_Br(B) on the family 9a x^2 - 3b y^2 + 16c^2 z^2 = 1.
// ---------------------------------------------------------------------------

struct FPrimeBounds {
    u64 U;  // a, b = u <= B/9
    u64 V;  // c <= sqrt(B)/4, i.e. 16 c^2 <= B
};

inline FPrimeBounds fprime_bounds(u64 B) { return {B / 9, isqrt(B / 16)}; }

namespace detail {

// Number of F'_1 members with height max(9a, 3b, 16c^2) <= B.
inline u64 count_fprime_members(u64 B) {
    const u64 Xa = B / 9, Xb = B / 3, V = isqrt(B / 16);
    if (V == 0 || Xa == 0) return 0;
    const SpfSieve sieve(Xb);
    // A[d] = #{a : d | a}, Bc[d] = #{b : d | b} over squarefree d <= V prime to 6
    std::vector<u64> A(V + 1, 0), Bc(V + 1, 0);
    std::vector<u64> ps;
    auto tally = [&](u64 x, std::vector<u64>& into) {
        ps.clear();
        u64 m = x;
        while (m > 1) {
            const u64 p = sieve.smallest_factor(m);
            m /= p;
            if (m % p == 0) return false;
            ps.push_back(p);
        }
        // squarefree divisors <= V
        std::vector<u64> divs{1};
        for (u64 p : ps) {
            const std::size_t sz = divs.size();
            for (std::size_t i = 0; i < sz; ++i)
                if (divs[i] * p <= V) divs.push_back(divs[i] * p);
        }
        for (u64 d : divs) ++into[d];
        return true;
    };
    for (u64 a = 1; a <= Xa; a += 8)
        if (a % 3 != 0) tally(a, A);
    for (u64 b = 1; b <= Xb; b += 2)
        if (b % 3 != 0) tally(b, Bc);
    u64 total = 0;
    for (u64 c = 1; c <= V; ++c) {
        if (c % 3 == 0) continue;
        std::vector<u64> cp;
        for (u64 p : prime_divisors(c, &sieve))
            if (p != 2) cp.push_back(p);
        i64 sa = 0, sb = 0;
        for (u64 mask = 0; mask < (1ULL << cp.size()); ++mask) {
            u64 d = 1;
            for (std::size_t i = 0; i < cp.size(); ++i)
                if (mask >> i & 1) d *= cp[i];
            const int sign = (__builtin_popcountll(mask) & 1) ? -1 : 1;
            sa += sign * static_cast<i64>(A[d]);
            sb += sign * static_cast<i64>(Bc[d]);
        }
        total += static_cast<u64>(sa) * static_cast<u64>(sb);
    }
    return total;
}

inline CountReport nbr_report(const char* kind, u64 B, u64 matched, const CountOptions& opt, double secs,
                              bool with_eligible) {
    CountReport r;
    r.kind = kind;
    r.B = B;
    r.n = 1;
    r.matched = matched;
    r.eligible = with_eligible ? count_fprime_members(B) : 0;
    r.fraction = make_fraction(r.matched, r.eligible);
    r.partitions = opt.partitions;
    r.wall_time = secs;
    return r;
}

}  // namespace detail

// Enumerates u = a = b and c, testing each u with xprime_criterion.
inline CountReport count_nbr_prime_enum(u64 B, const CountOptions& opt = {}, bool with_eligible = true) {
    detail::check_options(opt);
    if (B < 1) throw DomainError("count_nbr: B must be positive");
    detail::Stopwatch clock;
    const auto [U, V] = fprime_bounds(B);
    const SpfSieve sieve(std::max<u64>(U, 1));
    auto work = [&](int chunk) -> u64 {
        const auto [lo, hi] = detail::split_range(1, static_cast<long long>(U) + 1, opt.partitions, chunk);
        u64 total = 0;
        for (long long su = lo; su < hi; ++su) {
            const u64 u = static_cast<u64>(su);
            if (u % 24 != 1 || !is_squarefree(u, &sieve)) continue;
            if (!xprime_criterion(static_cast<i64>(u), static_cast<i64>(u), &sieve)) continue;
            for (u64 c = 1; c <= V; ++c)
                if (c % 3 != 0 && std::gcd(c, u) == 1) ++total;
        }
        return total;
    };
    const u64 matched = detail::sum_u64(detail::run_chunks<u64>(opt.partitions, opt.threads, work));
    return detail::nbr_report("nbr-enum", B, matched, opt, clock.seconds(), with_eligible);
}

// Evaluates sum_{u} mu^2(u) prod_{p|u} (1 + (3/p))/2 #{v <= V : (v, 3u) = 1} over
// u <= B/9, u = 1 mod 24, with a segmented sieve and inclusion-exclusion.
inline CountReport count_nbr_prime_formula(u64 B, const CountOptions& opt = {}, bool with_eligible = true) {
    detail::check_options(opt);
    if (B < 1) throw DomainError("count_nbr: B must be positive");
    detail::Stopwatch clock;
    const auto [U, V] = fprime_bounds(B);
    std::vector<u64> small;
    {
        const u64 r = isqrt(U) + 1;
        std::vector<bool> comp(r + 1, false);
        for (u64 i = 2; i <= r; ++i) {
            if (comp[i]) continue;
            small.push_back(i);
            for (u64 j = i * i; j <= r; j += i) comp[j] = true;
        }
    }
    constexpr u64 kSegment = 1 << 15;
    const u64 segments = U / kSegment + 1;
    auto count_coprime = [&](const u64* ps, int k) {
        // #{v <= V : v prime to 3 and to ps[0..k)}
        i64 s = 0;
        const int terms = k + 1;
        for (u64 mask = 0; mask < (1ULL << terms); ++mask) {
            u64 d = 1;
            for (int i = 0; i < terms; ++i)
                if (mask >> i & 1) d *= (i == k ? 3 : ps[i]);
            s += ((__builtin_popcountll(mask) & 1) ? -1 : 1) * static_cast<i64>(V / d);
        }
        return static_cast<u64>(s);
    };
    auto work = [&](int chunk) -> u64 {
        const auto [s0, s1] = detail::split_range(0, static_cast<long long>(segments), opt.partitions, chunk);
        u64 total = 0;
        std::vector<u64> rem(kSegment);
        std::vector<std::uint8_t> ok(kSegment), np(kSegment);
        std::vector<std::array<u64, 12>> pr(kSegment);
        for (long long seg = s0; seg < s1; ++seg) {
            const u64 lo = static_cast<u64>(seg) * kSegment;
            const u64 hi = std::min(U + 1, lo + kSegment);
            if (lo >= hi) continue;
            for (u64 i = 0; i < hi - lo; ++i) {
                rem[i] = lo + i;
                ok[i] = 1;
                np[i] = 0;
            }
            for (u64 p : small) {
                if (p < 5) continue;
                const bool split = p % 12 == 1 || p % 12 == 11;
                for (u64 m = (lo + p - 1) / p * p; m < hi; m += p) {
                    const u64 i = m - lo;
                    rem[i] /= p;
                    if (rem[i] % p == 0 || !split) ok[i] = 0;
                    if (np[i] < 12) pr[i][np[i]++] = p;
                }
            }
            for (u64 i = 0; i < hi - lo; ++i) {
                const u64 u = lo + i;
                if (u % 24 != 1 || !ok[i]) continue;
                if (rem[i] > 1) {
                    const u64 q = rem[i];
                    if (q % 12 != 1 && q % 12 != 11) continue;
                    pr[i][np[i]++] = q;
                }
                total += count_coprime(pr[i].data(), np[i]);
            }
        }
        return total;
    };
    const u64 matched = detail::sum_u64(detail::run_chunks<u64>(opt.partitions, opt.threads, work));
    return detail::nbr_report("nbr-formula", B, matched, opt, clock.seconds(), with_eligible);
}

// ---------------------------------------------------------------------------
// The constant of the N'_Br asymptotic.
// ---------------------------------------------------------------------------

inline long double theorem2_factor(u64 p) {
    const long double q = static_cast<long double>(p);
    const int chi = chi24(static_cast<i64>(p));
    return (1 + 1 / (2 * q)) * std::sqrt(1 - 1 / q) * (1 + chi / (2 * q + 1)) *
           (1 - (1 + chi) / (q * (2 * q + 1 + chi)));
}

struct ConstantReport {
    double value;
    u64 cutoff;
    double prefactor;
};

inline double theorem2_prefactor() { return 1.0 / (270.0 * std::sqrt(std::acos(-1.0))); }

inline ConstantReport theorem2_constant(u64 cutoff) {
    if (cutoff < 5) throw DomainError("theorem2_constant: cutoff must be at least 5");
    const SpfSieve sieve(cutoff);
    long double log_sum = 0;
    for (u64 p : sieve.primes()) log_sum += std::log(theorem2_factor(p));
    const double pre = theorem2_prefactor();
    return {static_cast<double>(pre * std::exp(log_sum)), cutoff, pre};
}

struct GrowthRow {
    u64 B;
    u64 count;
    double normalized;   // N(B) (log B)^(1/2) / B^(3/2)
    u64 count_4B;
    double quadrupling;  // N(4B) / N(B)
};

inline std::vector<GrowthRow> growth_report(const std::vector<u64>& bounds, const CountOptions& opt = {}) {
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        if (bounds[i] < 144) throw DomainError("growth_report: bounds must be at least 144");
        if (i > 0 && bounds[i] <= bounds[i - 1]) throw DomainError("growth_report: bounds must increase");
    }
    std::vector<GrowthRow> rows;
    for (u64 B : bounds) {
        const u64 n1 = count_nbr_prime_formula(B, opt, false).matched;
        const u64 n4 = count_nbr_prime_formula(4 * B, opt, false).matched;
        const double b = static_cast<double>(B);
        rows.push_back({B, n1, static_cast<double>(n1) * std::sqrt(std::log(b)) / std::pow(b, 1.5), n4,
                        n1 == 0 ? 0.0 : static_cast<double>(n4) / static_cast<double>(n1)});
    }
    return rows;
}

}  // namespace hasse
