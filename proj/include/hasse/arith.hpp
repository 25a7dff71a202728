#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hasse/error.hpp"

namespace hasse {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

// ---------------------------------------------------------------------------
// Checked 128-bit arithmetic. Overflow is always reported, never wrapped.
// ---------------------------------------------------------------------------

inline i128 checked_mul(i128 x, i128 y) {
    i128 r;
    if (__builtin_mul_overflow(x, y, &r)) throw OverflowError("128-bit multiplication overflow");
    return r;
}

inline i128 checked_add(i128 x, i128 y) {
    i128 r;
    if (__builtin_add_overflow(x, y, &r)) throw OverflowError("128-bit addition overflow");
    return r;
}

inline i128 checked_sub(i128 x, i128 y) {
    i128 r;
    if (__builtin_sub_overflow(x, y, &r)) throw OverflowError("128-bit subtraction overflow");
    return r;
}

inline i64 narrow_i64(i128 x) {
    if (x > INT64_MAX || x < INT64_MIN) throw OverflowError("value does not fit in 64 bits");
    return static_cast<i64>(x);
}

inline i128 abs128(i128 x) {
    if (x == std::numeric_limits<i128>::min()) throw OverflowError("abs of minimum 128-bit value");
    return x < 0 ? -x : x;
}

inline i128 ipow(i128 base, int exp) {
    i128 r = 1;
    for (int i = 0; i < exp; ++i) r = checked_mul(r, base);
    return r;
}

// Least non-negative residue.
inline u64 mod_u64(i128 a, u64 m) {
    i128 r = a % static_cast<i128>(m);
    if (r < 0) r += m;
    return static_cast<u64>(r);
}

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

inline u64 powmod(u64 b, u64 e, u64 m) {
    u64 r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

inline u64 isqrt(u64 n) {
    u64 r = static_cast<u64>(__builtin_sqrtl(static_cast<long double>(n)));
    while (r > 0 && static_cast<u128>(r) * r > n) --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

inline bool is_square(i128 n) {
    if (n < 0) return false;
    if (n > static_cast<i128>(UINT64_MAX)) {
        // sqrt of a value above 2^64 still fits in 64 bits
        u128 un = static_cast<u128>(n);
        u64 r = static_cast<u64>(__builtin_sqrtl(static_cast<long double>(un)));
        for (u64 c = (r > 2 ? r - 2 : 0); c <= r + 2; ++c)
            if (static_cast<u128>(c) * c == un) return true;
        return false;
    }
    u64 r = isqrt(static_cast<u64>(n));
    return static_cast<u128>(r) * r == static_cast<u128>(n);
}

inline std::string to_string(i128 x) {
    if (x == 0) return "0";
    bool neg = x < 0;
    u128 u = neg ? static_cast<u128>(-(x + 1)) + 1 : static_cast<u128>(x);
    std::string s;
    while (u) {
        s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

inline i128 parse_i128(const std::string& s) {
    if (s.empty()) throw DomainError("empty integer literal");
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '-' || s[0] == '+') {
        neg = s[0] == '-';
        i = 1;
    }
    if (i == s.size()) throw DomainError("malformed integer literal: " + s);
    i128 v = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw DomainError("malformed integer literal: " + s);
        v = checked_add(checked_mul(v, 10), neg ? -(s[i] - '0') : (s[i] - '0'));
    }
    return v;
}

// Deterministic Miller-Rabin for 64-bit inputs.
inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Places of Q.
// ---------------------------------------------------------------------------

class Place {
public:
    static constexpr Place infinite() { return Place{0}; }

    static Place finite(u64 p) {
        if (!is_prime(p)) throw DomainError("place must be a prime, got " + std::to_string(p));
        return Place{p};
    }

    constexpr bool is_infinite() const { return prime_ == 0; }
    constexpr u64 prime() const { return prime_; }

    std::string to_string() const { return is_infinite() ? "inf" : std::to_string(prime_); }

    friend constexpr bool operator==(Place, Place) = default;
    friend constexpr auto operator<=>(Place x, Place y) {
        // finite primes first, infinity last
        u64 kx = x.is_infinite() ? UINT64_MAX : x.prime_;
        u64 ky = y.is_infinite() ? UINT64_MAX : y.prime_;
        return kx <=> ky;
    }

private:
    constexpr explicit Place(u64 p) : prime_(p) {}
    u64 prime_;
};

// ---------------------------------------------------------------------------
// Valuations.
// ---------------------------------------------------------------------------

struct Valuation {
    int v;
    i128 unit;
    friend bool operator==(const Valuation&, const Valuation&) = default;
};

// m = p^v * unit with p not dividing unit.
inline Valuation padic_valuation(i128 m, u64 p) {
    if (m == 0) throw DomainError("valuation of zero is infinite");
    if (p < 2) throw DomainError("valuation base must be a prime");
    int v = 0;
    if (m >= INT64_MIN / 2 && m <= INT64_MAX / 2 && p <= static_cast<u64>(INT64_MAX)) {
        // hot path: 64-bit division is much cheaper than the 128-bit libcall
        i64 s = static_cast<i64>(m);
        const i64 q = static_cast<i64>(p);
        while (s % q == 0) {
            s /= q;
            ++v;
        }
        return {v, s};
    }
    const i128 pp = static_cast<i128>(p);
    while (m % pp == 0) {
        m /= pp;
        ++v;
    }
    return {v, m};
}

inline int vp(i128 m, u64 p) { return padic_valuation(m, p).v; }

// ---------------------------------------------------------------------------
// Quadratic symbols.
// ---------------------------------------------------------------------------

// Jacobi symbol (a/m) by binary reciprocity; m odd and positive.
inline int jacobi(i128 a, u64 m) {
    if (m == 0 || (m & 1) == 0) throw DomainError("jacobi: modulus must be odd and positive");
    u64 x = mod_u64(a, m);
    u64 n = m;
    int t = 1;
    while (x != 0) {
        int tz = __builtin_ctzll(x);
        x >>= tz;
        if ((tz & 1) && ((n & 7) == 3 || (n & 7) == 5)) t = -t;
        if ((x & 3) == 3 && (n & 3) == 3) t = -t;
        std::swap(x, n);
        x %= n;
    }
    return n == 1 ? t : 0;
}

// Legendre symbol (a/p) for an odd prime p. Primality is the caller's contract.
inline int legendre(i128 a, u64 p) {
    if (p == 2) throw DomainError("legendre: p must be an odd prime");
    if (p < 3) throw DomainError("legendre: p must be an odd prime");
    return jacobi(a, p);
}

struct Fraction {
    i128 num;
    i128 den = 1;
};

namespace detail {

inline int hilbert_two(i128 a, i128 b) {
    auto [alpha, u] = padic_valuation(a, 2);
    auto [beta, v] = padic_valuation(b, 2);
    const int u8 = static_cast<int>(mod_u64(u, 8));
    const int v8 = static_cast<int>(mod_u64(v, 8));
    const int eps_u = (u8 % 4 == 3);
    const int eps_v = (v8 % 4 == 3);
    const int omega_u = (u8 == 3 || u8 == 5);
    const int omega_v = (v8 == 3 || v8 == 5);
    const int e = eps_u * eps_v + (alpha & 1) * omega_v + (beta & 1) * omega_u;
    return (e & 1) ? -1 : 1;
}

inline int hilbert_odd(i128 a, i128 b, u64 p) {
    auto [alpha, u] = padic_valuation(a, p);
    auto [beta, v] = padic_valuation(b, p);
    int r = 1;
    if ((alpha & 1) && (beta & 1) && (p % 4 == 3)) r = -r;
    if (beta & 1) r *= legendre(u, p);
    if (alpha & 1) r *= legendre(v, p);
    return r;
}

}  // namespace detail

// (a, b)_v: 1 iff z^2 = a x^2 + b y^2 has a nontrivial solution over Q_v.
inline int hilbert_symbol(i128 a, i128 b, Place place) {
    if (a == 0 || b == 0) throw DomainError("hilbert_symbol: arguments must be nonzero");
    if (place.is_infinite()) return (a < 0 && b < 0) ? -1 : 1;
    if (place.prime() == 2) return detail::hilbert_two(a, b);
    return detail::hilbert_odd(a, b, place.prime());
}

// Rational arguments: num/den and num*den lie in the same square class.
inline int hilbert_symbol(Fraction a, Fraction b, Place place) {
    if (a.den == 0 || b.den == 0) throw DomainError("hilbert_symbol: zero denominator");
    return hilbert_symbol(checked_mul(a.num, a.den), checked_mul(b.num, b.den), place);
}

// ---------------------------------------------------------------------------
// The character mod 24 extending (3/.).
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr std::array<int, 24> kChi24 = {
    0, 1, 0, 0, 0, -1, 0, -1, 0, 0, 0, 1, 0, 1, 0, 0, 0, -1, 0, -1, 0, 0, 0, 1,
};

constexpr u64 cx_powmod(u64 b, u64 e, u64 m) {
    u64 r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = r * b % m;
        b = b * b % m;
        e >>= 1;
    }
    return r;
}

// Checks the table against Euler's criterion for 3 at the first `count` primes.
constexpr bool chi24_table_matches_first_primes(int count) {
    int seen = 0;
    for (u64 n = 2; seen < count; ++n) {
        bool prime = true;
        for (u64 d = 2; d * d <= n; ++d) {
            if (n % d == 0) {
                prime = false;
                break;
            }
        }
        if (!prime) continue;
        ++seen;
        int expected = 0;
        if (n > 3) expected = cx_powmod(3, (n - 1) / 2, n) == 1 ? 1 : -1;
        if (kChi24[n % 24] != expected) return false;
    }
    return true;
}

static_assert(chi24_table_matches_first_primes(1000), "chi24 table disagrees with (3/p)");

}  // namespace detail

inline int chi24(i128 m) { return detail::kChi24[mod_u64(m, 24)]; }

// ---------------------------------------------------------------------------
// Factorization.
// ---------------------------------------------------------------------------

struct Factorization {
    u64 value = 1;
    std::vector<std::pair<u64, int>> factors;

    friend bool operator==(const Factorization&, const Factorization&) = default;
};

// Smallest-prime-factor table on [0, limit].
class SpfSieve {
public:
    explicit SpfSieve(u64 limit) : spf_(limit + 1, 0) {
        if (limit > (1ULL << 32)) throw DomainError("sieve limit too large");
        for (u64 i = 2; i <= limit; ++i) {
            if (spf_[i] != 0) continue;
            spf_[i] = static_cast<std::uint32_t>(i);
            primes_.push_back(static_cast<std::uint32_t>(i));
            for (u64 j = i * i; j <= limit; j += i)
                if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
        }
    }

    u64 limit() const { return spf_.size() - 1; }
    bool contains(u64 m) const { return m < spf_.size(); }
    u64 smallest_factor(u64 m) const { return spf_[m]; }
    bool is_prime(u64 m) const { return m >= 2 && m < spf_.size() && spf_[m] == m; }
    const std::vector<std::uint32_t>& primes() const { return primes_; }

private:
    std::vector<std::uint32_t> spf_;
    std::vector<std::uint32_t> primes_;
};

inline Factorization factorize(u64 m, const SpfSieve* hint = nullptr) {
    if (m == 0) throw DomainError("factorize: zero has no factorization");
    Factorization f;
    f.value = m;
    auto push = [&](u64 p) {
        if (!f.factors.empty() && f.factors.back().first == p)
            ++f.factors.back().second;
        else
            f.factors.emplace_back(p, 1);
    };
    if (hint && hint->contains(m)) {
        while (m > 1) {
            u64 p = hint->smallest_factor(m);
            push(p);
            m /= p;
        }
        return f;
    }
    for (u64 p : {2ULL, 3ULL}) {
        while (m % p == 0) {
            push(p);
            m /= p;
        }
    }
    for (u64 d = 5; d * d <= m; d += 6) {
        for (u64 p : {d, d + 2}) {
            while (m % p == 0) {
                push(p);
                m /= p;
            }
        }
        if (hint && hint->contains(m)) {
            while (m > 1) {
                u64 p = hint->smallest_factor(m);
                push(p);
                m /= p;
            }
            return f;
        }
    }
    if (m > 1) push(m);
    return f;
}

inline std::vector<u64> prime_divisors(u64 m, const SpfSieve* hint = nullptr) {
    std::vector<u64> ps;
    for (auto [p, e] : factorize(m, hint).factors) ps.push_back(p);
    return ps;
}

inline u64 abs_u64(i128 x) {
    i128 a = abs128(x);
    if (a > static_cast<i128>(UINT64_MAX)) throw OverflowError("magnitude exceeds 64 bits");
    return static_cast<u64>(a);
}

}  // namespace hasse
