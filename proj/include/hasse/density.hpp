#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "hasse/arith.hpp"
#include "hasse/localsolve.hpp"

namespace hasse {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const Rational& r) {
    return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

inline Rational pow_rational(u64 p, int e) {
    BigInt x = 1;
    for (int i = 0; i < (e < 0 ? -e : e); ++i) x *= p;
    return e < 0 ? Rational(BigInt(1), x) : Rational(x);
}

struct KappaTerm {
    int j;
    int v_j;
    Rational kappa_c;
};

enum class DensityMethod { ClosedForm, Decomposition, Exhaustive };

inline std::string to_string(DensityMethod m) {
    switch (m) {
        case DensityMethod::ClosedForm: return "closed-form";
        case DensityMethod::Decomposition: return "decomposition";
        case DensityMethod::Exhaustive: return "exhaustive";
    }
    return "?";
}

struct DensityBreakdown {
    u64 p;
    i64 n;
    Rational sigma;
    std::vector<KappaTerm> terms;
    DensityMethod method;
};

// Measure of triples in Z_p^3 (all of valuation >= j and min valuation j
// after scaling) whose surface has no point, at level j; p odd.
inline Rational kappa_c(u64 p, i64 n, int j) {
    if (p == 2 || !is_prime(p)) throw DomainError("kappa_c: p must be an odd prime");
    const int vn = vp(n, p);
    if (j < 0 || j > vn) throw DomainError("kappa_c: j must lie in [0, val_p(n)]");
    const BigInt P = p;
    if (j == vn) return Rational(3 * (P - 1), 2 * P * P * P);
    const int v = vn - j;
    auto pw = [&](int e) {
        BigInt x = 1;
        for (int i = 0; i < e; ++i) x *= P;
        return x;
    };
    const BigInt gamma = pw(2 * v + 5) + 2 * pw(2 * v + 4) + pw(2 * v + 3);
    BigInt top;
    if (v % 2 == 0) {
        top = pw(2 * v + 3) - pw(2 * v + 2) + 2 * pw(v + 3) + 2 * pw(v + 2) - 4 * pw(v + 1) - pw(3) + pw(2) +
              2 * P - 2;
    } else {
        top = pw(2 * v + 4) - pw(2 * v + 3) + pw(2 * v + 2) - pw(2 * v + 1) + 2 * pw(v + 4) + pw(v + 3) +
              3 * pw(v + 2) - 5 * pw(v + 1) - pw(v) + 2 * pw(2) - 2 * P;
    }
    return Rational(3 * top, 4 * gamma);
}

namespace detail {

// Residue classes mod p^K grouped by (valuation, Legendre class of the unit
// part); residue 0 becomes valuation K. Weights are class sizes.
struct OddClass {
    OddDatum datum;
    BigInt weight;
};

inline std::vector<OddClass> odd_residue_classes(u64 p, int K) {
    std::vector<OddClass> out;
    BigInt pk = 1;
    for (int i = 0; i < K; ++i) pk *= p;
    BigInt block = pk;  // p^(K-w)
    for (int w = 0; w < K; ++w) {
        const BigInt units = block - block / p;
        out.push_back({{w, 1}, units / 2});
        out.push_back({{w, -1}, units / 2});
        block /= p;
    }
    out.push_back({{K, 1}, 1});
    return out;
}

inline Rational sigma_odd_exhaustive(u64 p, i64 n) {
    const auto tgt = odd_datum(n, p);
    const int K = tgt.v + 2;
    const auto cls = odd_residue_classes(p, K);
    const int lm1 = legendre_minus_one(p);
    BigInt good = 0;
    for (const auto& x : cls)
        for (const auto& y : cls)
            for (const auto& z : cls)
                if (odd_decide({x.datum, y.datum, z.datum}, tgt, lm1).soluble) good += x.weight * y.weight * z.weight;
    BigInt total = 1;
    for (int i = 0; i < 3 * K; ++i) total *= p;
    return Rational(good, total);
}

// Mass of soluble triples mod 2^K, classifying each residue by its own
// valuation and unit mod 8 (residue 0 stands for 2^K). Exact once K >= val(n) + 5:
// coefficients of valuation >= val(n) + 3 never matter and all smaller ones
// have their unit mod 8 determined.
inline Rational sigma_two_at_depth(i64 n, int K) {
    if (K > 40) throw DomainError("2-adic density depth out of range");
    std::map<int, BigInt> weight;
    BigInt total = BigInt(1) << K;
    auto add = [&](int code, const BigInt& w) { weight[code] += w; };
    // residues of valuation w: 2^(K-w-1) units, split evenly over unit classes mod 8 when K-w >= 3
    for (int w = 0; w < K; ++w) {
        const int bits = K - w;
        if (bits >= 3) {
            const BigInt each = BigInt(1) << (bits - 3);
            for (int u = 1; u < 8; u += 2) add(w * 4 + u / 2, each);
        } else {
            const i64 lim = i64{1} << bits;
            for (i64 u = 1; u < lim; u += 2) add(w * 4 + static_cast<int>(u % 8) / 2, 1);
        }
    }
    add(K * 4, 1);
    TwoAdicTable table(n, K + 1);
    BigInt good = 0;
    for (const auto& [ca, wa] : weight)
        for (const auto& [cb, wb] : weight)
            for (const auto& [cc, wc] : weight)
                if (table.soluble_codes(ca, cb, cc)) good += wa * wb * wc;
    return Rational(good, total * total * total);
}

struct TwoAdicExhaustive {
    Rational sigma;
    int depth;
};

inline TwoAdicExhaustive sigma_two_exhaustive(i64 n) {
    const int v = vp(n, 2);
    Rational prev = sigma_two_at_depth(n, v + 4);
    for (int K = v + 5;; ++K) {
        Rational cur = sigma_two_at_depth(n, K);
        if (cur == prev) return {cur, K};
        prev = cur;
    }
}

}  // namespace detail

// Independent measure oracle for Omega_p.
inline Rational sigma_p_exhaustive(u64 p, i64 n) {
    if (!is_prime(p)) throw DomainError("sigma_p_exhaustive: p must be prime");
    if (n == 0) throw DomainError("sigma_p_exhaustive: n must be nonzero");
    if (p == 2) return detail::sigma_two_exhaustive(n).sigma;
    return detail::sigma_odd_exhaustive(p, n);
}

inline DensityBreakdown sigma_p_exact(u64 p, i64 n) {
    if (!is_prime(p)) throw DomainError("sigma_p_exact: p must be prime");
    if (n == 0) throw DomainError("sigma_p_exact: n must be nonzero");
    if (p == 2) {
        if (n % 2 != 0) return {p, n, Rational(357, 512), {}, DensityMethod::ClosedForm};
        return {p, n, detail::sigma_two_exhaustive(n).sigma, {}, DensityMethod::Exhaustive};
    }
    const int v = vp(n, p);
    DensityBreakdown d{p, n, 1 - pow_rational(p, -3 * v - 3), {}, DensityMethod::Decomposition};
    for (int j = 0; j <= v; ++j) {
        Rational k = kappa_c(p, n, j);
        d.sigma -= pow_rational(p, -3 * j) * k;
        d.terms.push_back({j, v - j, std::move(k)});
    }
    return d;
}

struct EulerProduct {
    double value;
    double tail_note;
    u64 cutoff;
};

// prod_{p <= cutoff} sigma_p(n), with sigma_infinity = 1.
inline EulerProduct euler_product_sigma(i64 n, u64 cutoff) {
    if (n == 0) throw DomainError("euler_product_sigma: n must be nonzero");
    if (cutoff < 2) throw DomainError("euler_product_sigma: cutoff must be at least 2");
    SpfSieve sieve(cutoff);
    long double prod = 1;
    for (u64 p : sieve.primes()) {
        if (p != 2 && n % static_cast<i64>(p) != 0) {
            // closed form, identical to the decomposition when p does not divide n
            const long double q = static_cast<long double>(p);
            prod *= 1.0L - 1.5L / (q * q) + 0.5L / (q * q * q);
        } else {
            prod *= static_cast<long double>(sigma_p_exact(p, n).sigma.convert_to<double>());
        }
    }
    const double c = static_cast<double>(cutoff);
    return {static_cast<double>(prod), 1.5 / (c * std::log(c)), cutoff};
}

}  // namespace hasse
