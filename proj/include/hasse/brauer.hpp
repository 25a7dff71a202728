#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hasse/arith.hpp"
#include "hasse/localsolve.hpp"

namespace hasse {

// a x^2 + b y^2 + c^2 z^2 = 1 with a, b not both positive.
struct StarSurface {
    i64 a, b, c;

    StarSurface(i64 a_, i64 b_, i64 c_) : a(a_), b(b_), c(c_) {
        if (a == 0 || b == 0 || c == 0) throw DomainError("star surface coefficients must be nonzero");
        if (a > 0 && b > 0) throw DomainError("star surface needs a, b not both positive");
        narrow_i64(checked_mul(c, c));
    }

    QuadricSurface quadric() const { return {a, b, c * c, 1}; }

    friend bool operator==(const StarSurface&, const StarSurface&) = default;
};

// Invariants of an order-2 class live in {0, 1/2}; stored as half-units 0 / 1.
struct InvariantWitness {
    int value;        // 0 or 1 (meaning 1/2)
    i64 z;            // residue of z, or a sample real z at the infinite place
    i64 modulus;      // p^k; 0 at the infinite place
    int sign = 0;     // sign of 1 + cz at the infinite place
    friend bool operator==(const InvariantWitness&, const InvariantWitness&) = default;
};

struct InvariantSet {
    Place place;
    unsigned values = 0;  // bit 0: value 0 attained, bit 1: value 1/2 attained
    std::vector<InvariantWitness> witnesses;
    std::string branch;

    bool has(int v) const { return (values >> v) & 1u; }
    bool singleton() const { return values == 1u || values == 2u; }
    int only() const { return values == 2u ? 1 : 0; }
};

enum class Outcome { EmptyAdeles, TrivialBrauer, Obstruction, NoObstruction };

inline std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::EmptyAdeles: return "EmptyAdeles";
        case Outcome::TrivialBrauer: return "TrivialBrauer";
        case Outcome::Obstruction: return "Obstruction";
        case Outcome::NoObstruction: return "NoObstruction";
    }
    return "?";
}

struct ObstructionVerdict {
    Outcome outcome;
    std::vector<InvariantSet> per_place;
    std::string trace;
};

inline bool brauer_trivial(const StarSurface& s) { return is_square(-static_cast<i128>(s.a) * s.b); }

namespace detail {

inline int inv_half(int hilbert) { return hilbert == 1 ? 0 : 1; }

inline bool star_has_points(const StarSurface& s, Place place) {
    const QuadricSurface q = s.quadric();
    if (place.is_infinite()) return solvable_real(q).soluble;
    if (place.prime() == 2) return solvable_z2(q).soluble;
    return solvable_zp_odd(q, place.prime()).soluble;
}

// Residues z mod p^D with a Z_p-point (x, y, z) on U, i.e. a x^2 + b y^2 = 1 - c^2 z^2 != 0.
inline int star_scan_depth(const StarSurface& s, u64 p) {
    const int base = p == 2 ? vp(4 * static_cast<i128>(s.c), 2) + 4 : vp(2 * static_cast<i128>(s.c), p) + 3;
    return base + vp(s.a, p) + vp(s.b, p);
}

// Calls f(z, modulus, value) for each residue z in [0, p^D) on U with a local
// point, in increasing z, until f returns false. Every reported z is itself a
// p-adic point, so early exits need no size limit.
template <class F>
void scan_star_residues(const StarSurface& s, u64 p, bool full, F&& f) {
    const int D = star_scan_depth(s, p);
    const i128 M = ipow(static_cast<i128>(p), D);
    if (full && M > (i128{1} << 26)) throw DomainError("invariant scan modulus too large");
    if (M > INT64_MAX) throw OverflowError("invariant scan modulus exceeds 64 bits");
    const Place place = Place::finite(p);
    const i128 ab = checked_mul(s.a, s.b);
    for (i128 z = 0; z < M; ++z) {
        const i128 cz = checked_mul(s.c, z);
        const i128 plus = 1 + cz, minus = 1 - cz;
        if (plus == 0 || minus == 0) continue;
        const i128 m = checked_mul(plus, minus);
        const int vm = vp(m, p);
        bool rep;
        if (p == 2) {
            // a third coefficient of valuation val(m) + 3 never matters
            rep = soluble_z2(s.a, s.b, i128{1} << (vm + 3), m);
        } else {
            const i128 third = ipow(static_cast<i128>(p), vm + 1);
            rep = soluble_zp_odd(s.a, s.b, third, m, p);
        }
        if (!rep) continue;
        const int value = inv_half(hilbert_symbol(plus, -ab, place));
        if (!f(static_cast<i64>(z), static_cast<i64>(M), value)) return;
    }
}

struct FastAnswer {
    unsigned values;
    std::string branch;
};

inline std::optional<FastAnswer> fast_invariants(const StarSurface& s, u64 p) {
    if (p == 2) {
        if (s.c % 4 == 0 && (s.a & 1) && (s.b & 1)) return FastAnswer{1u, "p=2, 4|c, ab odd"};
        return std::nullopt;
    }
    const i64 q = static_cast<i64>(p);
    const bool pa = s.a % q == 0, pb = s.b % q == 0;
    if (!pa && !pb) return FastAnswer{1u, "p odd, p!|ab"};
    if (s.c % q == 0) return FastAnswer{1u, "p odd, p|c"};
    const auto [va, ua] = padic_valuation(s.a, p);
    const auto [vb, ub] = padic_valuation(s.b, p);
    if ((va + vb) % 2 == 0) {
        if (legendre(-ua * ub, p) == 1 || va % 2 == 0) return FastAnswer{1u, "p!|c, val(ab) even, trivial"};
        return FastAnswer{3u, "p!|c, val(ab) even, both z = +-1/c classes"};
    }
    if (pa && pb) {
        const i128 w = va % 2 == 0 ? ua : ub;
        if (legendre(w, p) == 1) {
            const int v = inv_half(legendre(2, p));
            return FastAnswer{1u << v, "p!|c, p|(a,b), val(ab) odd, (2/p) forced"};
        }
        return FastAnswer{3u, "p!|c, p|(a,b), val(ab) odd, unit non-residue"};
    }
    return FastAnswer{3u, "p!|c, odd valuation on one coefficient"};
}

}  // namespace detail

// Values of inv_p(1 + cz, -ab) on integral local points of U.
inline InvariantSet invariant_set_slow(const StarSurface& s, Place place) {
    if (!detail::star_has_points(s, place)) throw EmptyLocalPoints("no local points at " + place.to_string());
    InvariantSet out{place, 0, {}, "slow-path scan"};
    if (place.is_infinite()) {
        // real points exist for every z with 1 - c^2 z^2 in the image of a x^2 + b y^2
        for (i64 z : {i64{0}, i64{2}, i64{-2}}) {
            const i128 plus = 1 + static_cast<i128>(s.c) * z;
            const i128 m = plus * (2 - plus);
            const bool rep = m == 0 ? false : (m > 0 ? (s.a > 0 || s.b > 0) : (s.a < 0 || s.b < 0));
            if (!rep) continue;
            const int v = detail::inv_half(hilbert_symbol(plus, -static_cast<i128>(s.a) * s.b, place));
            if (out.has(v)) continue;
            out.values |= 1u << v;
            out.witnesses.push_back({v, z, 0, plus > 0 ? 1 : -1});
        }
        return out;
    }
    detail::scan_star_residues(s, place.prime(), true, [&](i64 z, i64 M, int v) {
        if (!out.has(v)) {
            out.values |= 1u << v;
            out.witnesses.push_back({v, z, M, 0});
        }
        return out.values != 3u;
    });
    if (out.values == 0) throw std::logic_error("invariant scan found no point on U");
    return out;
}

inline InvariantSet invariant_set_at(const StarSurface& s, Place place) {
    if (place.is_infinite()) {
        InvariantSet r = invariant_set_slow(s, place);
        r.branch = (s.a < 0 && s.b < 0) ? "real, a,b < 0: 1+cz takes both signs" : "real, ab < 0: split";
        return r;
    }
    const auto fast = detail::fast_invariants(s, place.prime());
    if (!fast) return invariant_set_slow(s, place);
    if (!detail::star_has_points(s, place)) throw EmptyLocalPoints("no local points at " + place.to_string());
    InvariantSet out{place, fast->values, {}, fast->branch};
    unsigned seen = 0;
    detail::scan_star_residues(s, place.prime(), false, [&](i64 z, i64 M, int v) {
        if (!((fast->values >> v) & 1u)) throw std::logic_error("fast invariant branch contradicted by a local point");
        if (!((seen >> v) & 1u)) {
            seen |= 1u << v;
            out.witnesses.push_back({v, z, M, 0});
        }
        return seen != fast->values;
    });
    if (seen != fast->values) throw std::logic_error("fast invariant branch value without a witness");
    return out;
}

// Places whose invariant can differ from the constant 0: infinity and p | 2abc.
inline std::vector<Place> star_bad_places(const StarSurface& s, const SpfSieve* hint = nullptr) {
    std::vector<u64> ps{2};
    for (i64 x : {s.a, s.b, s.c})
        for (u64 p : prime_divisors(abs_u64(x), hint)) ps.push_back(p);
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    std::vector<Place> out;
    for (u64 p : ps) out.push_back(Place::finite(p));
    out.push_back(Place::infinite());
    return out;
}

inline ObstructionVerdict bm_decision(const StarSurface& s, const SpfSieve* hint = nullptr) {
    const auto adelic = adelic_status(s.quadric(), hint);
    if (!adelic.everywhere_soluble)
        return {Outcome::EmptyAdeles, {}, "no local points at " + adelic.failing_places.front().place.to_string()};
    if (brauer_trivial(s)) return {Outcome::TrivialBrauer, {}, "-ab is a square"};
    ObstructionVerdict v{Outcome::NoObstruction, {}, ""};
    int total = 0;
    bool all_single = true;
    std::string escape;
    for (Place pl : star_bad_places(s, hint)) {
        InvariantSet set = invariant_set_at(s, pl);
        if (set.singleton()) {
            total += set.only();
        } else if (all_single) {
            all_single = false;
            escape = pl.to_string();
        }
        v.per_place.push_back(std::move(set));
    }
    if (!all_single) {
        v.trace = "both invariant values at " + escape;
    } else if (total % 2 == 1) {
        v.outcome = Outcome::Obstruction;
        v.trace = "all places constant, invariants sum to 1/2";
    } else {
        v.trace = "all places constant, invariants sum to 0";
    }
    return v;
}

// 1 iff every odd prime p | k with p !| n has even val_p(k) or divides l m.
inline int delta_indicator(i64 k, i64 l, i64 m, i64 n, const SpfSieve* hint = nullptr) {
    if (k == 0 || l == 0 || m == 0 || n == 0) throw DomainError("delta_indicator: arguments must be nonzero");
    for (auto [p, e] : factorize(abs_u64(k), hint).factors) {
        if (p == 2) continue;
        const i64 q = static_cast<i64>(p);
        if (n % q == 0 || e % 2 == 0) continue;
        if (l % q != 0 && m % q != 0) return 0;
    }
    return 1;
}

inline bool prop1_no_obstruction(const QuadricSurface& s, const SpfSieve* hint = nullptr) {
    return delta_indicator(s.a, s.b, s.c, s.n, hint) * delta_indicator(s.b, s.a, s.c, s.n, hint) *
               delta_indicator(s.c, s.a, s.b, s.n, hint) == 0;
}

inline bool is_squarefree(u64 m, const SpfSieve* hint = nullptr) {
    for (auto [p, e] : factorize(m, hint).factors)
        if (e > 1) return false;
    return true;
}

// Criterion on the family 9a x^2 - 3b y^2 + 16c^2 z^2 = 1.
inline bool xprime_criterion(i64 a, i64 b, const SpfSieve* hint = nullptr) {
    if (a <= 0 || b <= 0) throw FamilyMembershipError("xprime_criterion: a, b must be positive");
    if (a % 8 != 1) throw FamilyMembershipError("xprime_criterion: a must be 1 mod 8");
    if (b % 2 == 0 || a % 3 == 0 || b % 3 == 0) throw FamilyMembershipError("xprime_criterion: a, b must be prime to 6");
    if (!is_squarefree(static_cast<u64>(a), hint) || !is_squarefree(static_cast<u64>(b), hint))
        throw FamilyMembershipError("xprime_criterion: a, b must be squarefree");
    if (a != b || a % 24 != 1) return false;
    for (u64 p : prime_divisors(static_cast<u64>(a), hint))
        if (legendre(3, p) != 1) return false;
    return true;
}

}  // namespace hasse
