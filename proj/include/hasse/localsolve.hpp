#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "hasse/arith.hpp"
#include "hasse/hensel.hpp"

namespace hasse {

// The affine surface a x^2 + b y^2 + c z^2 = n.
struct QuadricSurface {
    i64 a, b, c, n;

    QuadricSurface(i64 a_, i64 b_, i64 c_, i64 n_) : a(a_), b(b_), c(c_), n(n_) {
        if (a == 0 || b == 0 || c == 0 || n == 0)
            throw DomainError("quadric surface coefficients and target must be nonzero");
    }

    std::array<i128, 3> coeffs() const { return {a, b, c}; }
    u64 height() const { return std::max({abs_u64(a), abs_u64(b), abs_u64(c)}); }

    friend bool operator==(const QuadricSurface&, const QuadricSurface&) = default;
};

// Branches of the odd-prime decision. After dividing out p^j (j the minimal
// coefficient valuation) the first coefficient of valuation zero is the unit
// slot A; m is the normalized target with valuation v; the remaining two
// coefficients are "low" when their valuation is at most v.
enum class OddBranch : std::uint8_t {
    BothHighEven,        // soluble iff (A m' / p) = 1
    BothHighOdd,         // never soluble
    OneLowEvenEven,      // always soluble
    OneLowEvenOdd,       // soluble iff (A m' / p) = 1
    OneLowOddEven,       // soluble iff (-A L' / p) = 1
    OneLowOddOdd,        // soluble iff (L' m' / p) = 1
    BothLowEvenHasEven,  // always soluble
    BothLowEvenBothOdd,  // insoluble iff (A m'/p) = (-B'C'/p) = -1
    BothLowOddSameParity,  // always soluble
    BothLowOddMixed,       // insoluble iff (O' m'/p) = (-A E'/p) = -1
};

std::string to_string(OddBranch b);

// Which product a Legendre symbol was evaluated on. Primes denote unit parts.
enum class SymbolRole : std::uint8_t {
    UnitTimesTarget,     // A * m'
    MinusUnitTimesLow,   // -A * L'
    LowTimesTarget,      // L' * m'
    MinusOtherPair,      // -B' * C'
    OddTimesTarget,      // O' * m'
    MinusUnitTimesEven,  // -A * E'
};

std::string to_string(SymbolRole r);

struct SymbolCheck {
    SymbolRole role;
    int value;
    friend bool operator==(const SymbolCheck&, const SymbolCheck&) = default;
};

struct RealSignature {
    bool indefinite;
    friend bool operator==(const RealSignature&, const RealSignature&) = default;
};

struct MinValuationExceedsN {
    int min_valuation;
    int target_valuation;
    friend bool operator==(const MinValuationExceedsN&, const MinValuationExceedsN&) = default;
};

struct NonResidueCase {
    OddBranch branch;
    int unit_slot;  // index into (a, b, c)
    std::array<SymbolCheck, 2> symbols{};
    int symbol_count = 0;
    friend bool operator==(const NonResidueCase&, const NonResidueCase&) = default;
};

struct HenselWitnessReason {
    HenselWitness witness;
    int scale = 0;  // power of p divided out of (a, b, c, n) before searching
    friend bool operator==(const HenselWitnessReason&, const HenselWitnessReason&) = default;
};

struct NoLiftableWitness {
    int depth;
    friend bool operator==(const NoLiftableWitness&, const NoLiftableWitness&) = default;
};

using LocalReason =
    std::variant<RealSignature, MinValuationExceedsN, NonResidueCase, HenselWitnessReason, NoLiftableWitness>;

struct LocalVerdict {
    Place place;
    bool soluble;
    LocalReason reason;
};

struct AdelicStatus {
    QuadricSurface surface;
    bool everywhere_soluble;
    std::vector<LocalVerdict> failing_places;
    std::vector<u64> checked_primes;
};

// ---------------------------------------------------------------------------
// Real place.
// ---------------------------------------------------------------------------

inline LocalVerdict solvable_real(const QuadricSurface& s) {
    const bool pos = s.a > 0 && s.b > 0 && s.c > 0;
    const bool neg = s.a < 0 && s.b < 0 && s.c < 0;
    const bool indefinite = !pos && !neg;
    const bool ok = indefinite || (pos && s.n > 0) || (neg && s.n < 0);
    return {Place::infinite(), ok, RealSignature{indefinite}};
}

// ---------------------------------------------------------------------------
// Odd primes: closed-form branch table.
// ---------------------------------------------------------------------------

namespace detail {

// Per-coefficient data at an odd prime: valuation and Legendre symbol of the
// unit part. A valuation of kInfVal marks a coefficient treated as zero.
struct OddDatum {
    int v;
    int leg;
};

inline constexpr int kInfVal = 1 << 20;

struct OddDecision {
    bool soluble;
    bool min_exceeds;
    int min_valuation;
    NonResidueCase trace;
};

// Decision from valuations and unit Legendre classes. `leg_minus_one` is (-1/p).
inline OddDecision odd_decide(std::array<OddDatum, 3> co, OddDatum target, int leg_minus_one) {
    OddDecision d{};
    const int j = std::min({co[0].v, co[1].v, co[2].v});
    d.min_valuation = j;
    if (j > target.v) {
        d.soluble = false;
        d.min_exceeds = true;
        return d;
    }
    for (auto& c : co)
        if (c.v != kInfVal) c.v -= j;
    const int v = target.v - j;
    const int ia = co[0].v == 0 ? 0 : (co[1].v == 0 ? 1 : 2);
    const int ib = ia == 0 ? 1 : 0;
    const int ic = ia == 2 ? 1 : 2;
    const OddDatum A = co[ia], B = co[ib], C = co[ic];
    const int lm = target.leg;
    NonResidueCase& tr = d.trace;
    tr.unit_slot = ia;
    auto sym = [&](SymbolRole role, int value) {
        tr.symbols[tr.symbol_count++] = SymbolCheck{role, value};
        return value;
    };
    const bool b_low = B.v <= v, c_low = C.v <= v;
    const bool v_even = (v % 2) == 0;
    if (!b_low && !c_low) {
        if (v_even) {
            tr.branch = OddBranch::BothHighEven;
            d.soluble = sym(SymbolRole::UnitTimesTarget, A.leg * lm) == 1;
        } else {
            tr.branch = OddBranch::BothHighOdd;
            d.soluble = false;
        }
        return d;
    }
    if (b_low != c_low) {
        const OddDatum L = b_low ? B : C;
        const bool w_even = (L.v % 2) == 0;
        if (v_even && w_even) {
            tr.branch = OddBranch::OneLowEvenEven;
            d.soluble = true;
        } else if (v_even) {
            tr.branch = OddBranch::OneLowEvenOdd;
            d.soluble = sym(SymbolRole::UnitTimesTarget, A.leg * lm) == 1;
        } else if (w_even) {
            tr.branch = OddBranch::OneLowOddEven;
            d.soluble = sym(SymbolRole::MinusUnitTimesLow, leg_minus_one * A.leg * L.leg) == 1;
        } else {
            tr.branch = OddBranch::OneLowOddOdd;
            d.soluble = sym(SymbolRole::LowTimesTarget, L.leg * lm) == 1;
        }
        return d;
    }
    const bool b_even = (B.v % 2) == 0, c_even = (C.v % 2) == 0;
    if (v_even) {
        if (b_even || c_even) {
            tr.branch = OddBranch::BothLowEvenHasEven;
            d.soluble = true;
        } else {
            tr.branch = OddBranch::BothLowEvenBothOdd;
            const int s1 = sym(SymbolRole::UnitTimesTarget, A.leg * lm);
            const int s2 = sym(SymbolRole::MinusOtherPair, leg_minus_one * B.leg * C.leg);
            d.soluble = !(s1 == -1 && s2 == -1);
        }
        return d;
    }
    if (b_even == c_even) {
        tr.branch = OddBranch::BothLowOddSameParity;
        d.soluble = true;
        return d;
    }
    tr.branch = OddBranch::BothLowOddMixed;
    const OddDatum O = b_even ? C : B;
    const OddDatum E = b_even ? B : C;
    const int s1 = sym(SymbolRole::OddTimesTarget, O.leg * lm);
    const int s2 = sym(SymbolRole::MinusUnitTimesEven, leg_minus_one * A.leg * E.leg);
    d.soluble = !(s1 == -1 && s2 == -1);
    return d;
}

inline OddDatum odd_datum(i128 x, u64 p) {
    auto [v, u] = padic_valuation(x, p);
    return {v, legendre(u, p)};
}

inline int legendre_minus_one(u64 p) { return (p % 4 == 1) ? 1 : -1; }

}  // namespace detail

inline LocalVerdict solvable_zp_odd(const QuadricSurface& s, u64 p) {
    if (p == 2) throw DomainError("solvable_zp_odd: p must be odd");
    const Place place = Place::finite(p);
    const std::array<detail::OddDatum, 3> co{detail::odd_datum(s.a, p), detail::odd_datum(s.b, p),
                                             detail::odd_datum(s.c, p)};
    const auto tgt = detail::odd_datum(s.n, p);
    const auto d = detail::odd_decide(co, tgt, detail::legendre_minus_one(p));
    if (d.min_exceeds) return {place, false, MinValuationExceedsN{d.min_valuation, tgt.v}};
    return {place, d.soluble, d.trace};
}

// Boolean form used by the counting harnesses.
inline bool soluble_zp_odd(i128 a, i128 b, i128 c, i128 n, u64 p) {
    const std::array<detail::OddDatum, 3> co{detail::odd_datum(a, p), detail::odd_datum(b, p),
                                             detail::odd_datum(c, p)};
    return detail::odd_decide(co, detail::odd_datum(n, p), detail::legendre_minus_one(p)).soluble;
}

// ---------------------------------------------------------------------------
// Liftable-witness search (any prime).
// ---------------------------------------------------------------------------

inline LocalVerdict solvable_zp_oracle(const QuadricSurface& s, u64 p, int depth) {
    const Place place = Place::finite(p);
    if (depth < vp(s.n, p) + 2) throw DomainError("solvable_zp_oracle: depth must be at least val_p(n) + 2");
    if (auto w = find_liftable_witness(s.coeffs(), s.n, p, depth))
        return {place, true, HenselWitnessReason{*w, 0}};
    return {place, false, NoLiftableWitness{depth}};
}

// ---------------------------------------------------------------------------
// p = 2.
// ---------------------------------------------------------------------------

namespace detail {

// a x^2 + b y^2 + c z^2 = n reduced at 2: common powers of two divided out
// and coefficients of valuation >= val_2(n) + 3 replaced by zero. A dropped
// term b y^2 changes n - b y^2 by a factor that is 1 mod 8, hence a unit
// square, so solubility is unchanged.
struct TwoAdicReduction {
    bool trivially_insoluble = false;
    int scale = 0;
    std::array<i128, 3> coeffs{};
    i128 n = 0;
    int depth = 0;
};

inline TwoAdicReduction reduce_two_adic(i128 a, i128 b, i128 c, i128 n) {
    TwoAdicReduction r;
    std::array<i128, 3> co{a, b, c};
    const int j = std::min({vp(a, 2), vp(b, 2), vp(c, 2)});
    const int vn = vp(n, 2);
    if (j > vn) {
        r.trivially_insoluble = true;
        r.scale = j;
        return r;
    }
    r.scale = j;
    const i128 pj = i128{1} << j;
    r.n = n / pj;
    const int vn2 = vn - j;
    int vmax = 0;
    for (int i = 0; i < 3; ++i) {
        const i128 ci = co[i] / pj;
        const int vi = vp(ci, 2);
        if (vi >= vn2 + 3) {
            r.coeffs[i] = 0;
        } else {
            r.coeffs[i] = ci;
            vmax = std::max(vmax, vi);
        }
    }
    // A point has some term with val(c_i x_i^2) <= val(n); its derivative
    // 2 c_i x_i then sits at level t with 2t + 1 <= val(n) + val(c_i) + 3.
    r.depth = vn2 + vmax + 3;
    return r;
}

}  // namespace detail

// Z_2 decision by liftable-witness search on the reduced equation. Every
// accepted witness lifts, and the depth reaches the level of some coordinate
// of any genuine point, so rejection is exact. The depth never exceeds
// val(n) + val(4abc) + 3.
inline LocalVerdict solvable_z2(const QuadricSurface& s) {
    const Place place = Place::finite(2);
    const auto r = detail::reduce_two_adic(s.a, s.b, s.c, s.n);
    if (r.trivially_insoluble) return {place, false, MinValuationExceedsN{r.scale, vp(s.n, 2)}};
    if (auto w = find_liftable_witness(r.coeffs, r.n, 2, r.depth))
        return {place, true, HenselWitnessReason{*w, r.scale}};
    return {place, false, NoLiftableWitness{r.depth}};
}

namespace detail {

// Z_2 solubility depends on each coefficient only through its valuation and
// its unit part mod 8. Codes pack (valuation, unit mod 8) as v * 4 + (u % 8) / 2.
inline int two_adic_code(i128 x) {
    auto [v, u] = padic_valuation(x, 2);
    return v * 4 + static_cast<int>(mod_u64(u, 8) / 2);
}

inline i128 two_adic_representative(int code) {
    const int v = code / 4;
    const int u = 2 * (code % 4) + 1;
    return checked_mul(i128{1} << v, u);
}

inline bool two_adic_soluble_codes(int ca, int cb, int cc, int cn) {
    const i128 n = two_adic_representative(cn);
    const auto r = reduce_two_adic(two_adic_representative(ca), two_adic_representative(cb),
                                   two_adic_representative(cc), n);
    if (r.trivially_insoluble) return false;
    return find_liftable_witness(r.coeffs, r.n, 2, r.depth).has_value();
}

}  // namespace detail

// Boolean Z_2 decision memoized per thread on (valuation, unit mod 8) codes
// of all four entries.
inline bool soluble_z2(i128 a, i128 b, i128 c, i128 n) {
    const int ca = detail::two_adic_code(a), cb = detail::two_adic_code(b), cc = detail::two_adic_code(c),
              cn = detail::two_adic_code(n);
    if (std::max({ca, cb, cc, cn}) >= 256) return detail::two_adic_soluble_codes(ca, cb, cc, cn);
    int k[3] = {ca, cb, cc};
    std::sort(k, k + 3);
    const std::uint32_t key = (static_cast<std::uint32_t>(k[0]) << 24) | (static_cast<std::uint32_t>(k[1]) << 16) |
                              (static_cast<std::uint32_t>(k[2]) << 8) | static_cast<std::uint32_t>(cn);
    thread_local std::unordered_map<std::uint32_t, bool> cache;
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const bool r = detail::two_adic_soluble_codes(k[0], k[1], k[2], cn);
    cache.emplace(key, r);
    return r;
}

// Memoized Z_2 decisions for one fixed target n, indexed by coefficient codes.
class TwoAdicTable {
public:
    explicit TwoAdicTable(i128 n, int max_valuation = 40) : n_code_(detail::two_adic_code(n)) {
        if (max_valuation < 0 || max_valuation > 62) throw DomainError("TwoAdicTable: valuation cap out of range");
        width_ = 4 * (max_valuation + 1);
        cache_.assign(static_cast<std::size_t>(width_) * width_ * width_, -1);
    }

    bool soluble_codes(int ca, int cb, int cc) {
        if (ca >= width_ || cb >= width_ || cc >= width_) return detail::two_adic_soluble_codes(ca, cb, cc, n_code_);
        // the decision is symmetric in the coefficients
        int k[3] = {ca, cb, cc};
        std::sort(k, k + 3);
        auto& slot = cache_[(static_cast<std::size_t>(k[0]) * width_ + k[1]) * width_ + k[2]];
        if (slot < 0) slot = detail::two_adic_soluble_codes(k[0], k[1], k[2], n_code_) ? 1 : 0;
        return slot == 1;
    }

    bool soluble(i128 a, i128 b, i128 c) {
        return soluble_codes(detail::two_adic_code(a), detail::two_adic_code(b), detail::two_adic_code(c));
    }

private:
    int n_code_;
    int width_;
    std::vector<std::int8_t> cache_;
};

// ---------------------------------------------------------------------------
// Adelic status.
// ---------------------------------------------------------------------------

// Primes that can obstruct: 2, odd primes of n, and odd primes dividing at
// least two coefficients (found by factoring the pairwise gcds).
inline std::vector<u64> relevant_primes(const QuadricSurface& s, const SpfSieve* hint = nullptr) {
    std::vector<u64> ps{2};
    auto add = [&](u64 m) {
        if (m <= 1) return;
        for (u64 p : prime_divisors(m, hint))
            if (p != 2) ps.push_back(p);
    };
    const u64 a = abs_u64(s.a), b = abs_u64(s.b), c = abs_u64(s.c);
    add(abs_u64(s.n));
    add(std::gcd(a, b));
    add(std::gcd(a, c));
    add(std::gcd(b, c));
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    return ps;
}

inline AdelicStatus adelic_status(const QuadricSurface& s, const SpfSieve* hint = nullptr) {
    AdelicStatus st{s, true, {}, relevant_primes(s, hint)};
    if (auto real = solvable_real(s); !real.soluble) st.failing_places.push_back(real);
    for (u64 p : st.checked_primes) {
        LocalVerdict v = p == 2 ? solvable_z2(s) : solvable_zp_odd(s, p);
        if (!v.soluble) st.failing_places.push_back(std::move(v));
    }
    std::stable_sort(st.failing_places.begin(), st.failing_places.end(),
                     [](const LocalVerdict& x, const LocalVerdict& y) { return x.place < y.place; });
    st.everywhere_soluble = st.failing_places.empty();
    return st;
}

// ---------------------------------------------------------------------------
// Names for traces.
// ---------------------------------------------------------------------------

inline std::string to_string(OddBranch b) {
    switch (b) {
        case OddBranch::BothHighEven: return "both-high/v-even";
        case OddBranch::BothHighOdd: return "both-high/v-odd";
        case OddBranch::OneLowEvenEven: return "one-low/v-even/w-even";
        case OddBranch::OneLowEvenOdd: return "one-low/v-even/w-odd";
        case OddBranch::OneLowOddEven: return "one-low/v-odd/w-even";
        case OddBranch::OneLowOddOdd: return "one-low/v-odd/w-odd";
        case OddBranch::BothLowEvenHasEven: return "both-low/v-even/some-even";
        case OddBranch::BothLowEvenBothOdd: return "both-low/v-even/both-odd";
        case OddBranch::BothLowOddSameParity: return "both-low/v-odd/same-parity";
        case OddBranch::BothLowOddMixed: return "both-low/v-odd/mixed-parity";
    }
    return "?";
}

inline std::string to_string(SymbolRole r) {
    switch (r) {
        case SymbolRole::UnitTimesTarget: return "unit*target";
        case SymbolRole::MinusUnitTimesLow: return "-unit*low";
        case SymbolRole::LowTimesTarget: return "low*target";
        case SymbolRole::MinusOtherPair: return "-other*other";
        case SymbolRole::OddTimesTarget: return "odd*target";
        case SymbolRole::MinusUnitTimesEven: return "-unit*even";
    }
    return "?";
}

inline std::string describe(const LocalReason& r) {
    struct V {
        std::string operator()(const RealSignature& x) const {
            return x.indefinite ? "real: indefinite form" : "real: definite form";
        }
        std::string operator()(const MinValuationExceedsN& x) const {
            return "min coefficient valuation " + std::to_string(x.min_valuation) + " exceeds val(n) " +
                   std::to_string(x.target_valuation);
        }
        std::string operator()(const NonResidueCase& x) const {
            std::string s = "branch " + to_string(x.branch);
            for (int i = 0; i < x.symbol_count; ++i)
                s += "; (" + to_string(x.symbols[i].role) + "/p)=" + std::to_string(x.symbols[i].value);
            return s;
        }
        std::string operator()(const HenselWitnessReason& x) const {
            const auto& w = x.witness;
            return "liftable witness (" + std::to_string(w.residue[0]) + "," + std::to_string(w.residue[1]) + "," +
                   std::to_string(w.residue[2]) + ") mod " + std::to_string(w.modulus);
        }
        std::string operator()(const NoLiftableWitness& x) const {
            return "no liftable witness to depth " + std::to_string(x.depth);
        }
    };
    return std::visit(V{}, r);
}

}  // namespace hasse
