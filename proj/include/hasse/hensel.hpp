#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hasse/arith.hpp"

namespace hasse {

// A residue solution of a x^2 + b y^2 + c z^2 = n modulo p^(2t+1) whose
// partial derivative in `variable` has p-adic valuation at most t. Hensel's
// lemma lifts it to a p-adic integer point that agrees with `residue` in the
// other two coordinates.
struct HenselWitness {
    std::array<i64, 3> residue{};
    i64 modulus = 1;
    int level = 0;     // t
    int variable = 0;  // 0, 1, 2 for x, y, z
    friend bool operator==(const HenselWitness&, const HenselWitness&) = default;
};

namespace detail {

class Bits {
public:
    explicit Bits(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    void set(std::size_t i) { w_[i >> 6] |= 1ULL << (i & 63); }
    bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
    std::size_t size() const { return n_; }

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t k = 0; k < w_.size(); ++k) {
            u64 w = w_[k];
            while (w) {
                f(k * 64 + static_cast<std::size_t>(__builtin_ctzll(w)));
                w &= w - 1;
            }
        }
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (u64 w : w_) c += static_cast<std::size_t>(__builtin_popcountll(w));
        return c;
    }

    // this |= src rotated left by s (indices mod n).
    void or_rotated(const Bits& src, std::size_t s) {
        if (s == 0) {
            or_range(src, 0, 0, n_);
            return;
        }
        or_range(src, 0, s, n_ - s);
        or_range(src, n_ - s, 0, s);
    }

private:
    u64 read64(std::size_t off) const {
        // bits [off, off+64) of the storage, zero beyond the end
        std::size_t k = off >> 6, b = off & 63;
        u64 lo = k < w_.size() ? w_[k] : 0;
        if (b == 0) return lo;
        u64 hi = k + 1 < w_.size() ? w_[k + 1] : 0;
        return (lo >> b) | (hi << (64 - b));
    }

    void or_range(const Bits& src, std::size_t from, std::size_t to, std::size_t len) {
        std::size_t done = 0;
        while (done < len) {
            std::size_t chunk = std::min<std::size_t>(64, len - done);
            u64 bits = src.read64(from + done);
            if (chunk < 64) bits &= (1ULL << chunk) - 1;
            std::size_t dst = to + done;
            std::size_t k = dst >> 6, b = dst & 63;
            w_[k] |= bits << b;
            if (b != 0 && (bits >> (64 - b)) != 0) w_[k + 1] |= bits >> (64 - b);
            done += chunk;
        }
    }

    std::size_t n_;
    std::vector<u64> w_;
};

inline constexpr i64 kMaxSearchModulus = i64{1} << 24;

}  // namespace detail

// Scans residue triples modulo p^depth for a liftable witness. Layers are
// visited by increasing level t (modulus p^(2t+1) <= p^depth); within a layer
// the lexicographically first (x, y, z) in [0, p^(2t+1))^3 is returned.
inline std::optional<HenselWitness> find_liftable_witness(std::span<const i128, 3> coeffs, i128 n,
                                                           u64 p, int depth) {
    if (p < 2) throw DomainError("witness search needs a prime");
    if (depth < 1) throw DomainError("witness search depth must be positive");
    const int two_val = (p == 2) ? 1 : 0;
    std::array<int, 3> cval{};
    for (int i = 0; i < 3; ++i) cval[i] = coeffs[i] == 0 ? -1 : vp(coeffs[i], p);

    for (int t = 0; 2 * t + 1 <= depth; ++t) {
        const i128 mod128 = ipow(static_cast<i128>(p), 2 * t + 1);
        if (mod128 > detail::kMaxSearchModulus)
            throw DomainError("witness search modulus exceeds the supported range");
        const i64 M = static_cast<i64>(mod128);
        const auto uM = static_cast<std::size_t>(M);

        std::array<std::vector<std::uint32_t>, 3> val;
        std::array<std::vector<std::uint8_t>, 3> low;
        std::array<detail::Bits, 3> all{detail::Bits(uM), detail::Bits(uM), detail::Bits(uM)};
        std::array<detail::Bits, 3> lows{detail::Bits(uM), detail::Bits(uM), detail::Bits(uM)};
        for (int i = 0; i < 3; ++i) {
            const u64 c = mod_u64(coeffs[i], static_cast<u64>(M));
            val[i].resize(uM);
            low[i].resize(uM);
            for (i64 x = 0; x < M; ++x) {
                const u64 ux = static_cast<u64>(x);
                const auto v = static_cast<std::uint32_t>(mulmod(c, mulmod(ux, ux, M), M));
                val[i][ux] = v;
                bool is_low = false;
                if (x != 0 && cval[i] >= 0) is_low = two_val + cval[i] + vp(x, p) <= t;
                low[i][ux] = is_low;
                all[i].set(v);
                if (is_low) lows[i].set(v);
            }
        }
        const u64 target = mod_u64(n, static_cast<u64>(M));

        auto sumset = [&](const detail::Bits& s1, const detail::Bits& s2) {
            const detail::Bits& small = s1.count() <= s2.count() ? s1 : s2;
            const detail::Bits& big = &small == &s1 ? s2 : s1;
            detail::Bits out(uM);
            small.for_each([&](std::size_t s) { out.or_rotated(big, s); });
            return out;
        };
        bool found = false;
        for (int r = 0; r < 3 && !found; ++r) {
            if (lows[r].count() == 0) continue;
            const detail::Bits sum = sumset(all[(r + 1) % 3], all[(r + 2) % 3]);
            lows[r].for_each([&](std::size_t v) {
                if (found) return;
                const std::size_t need = (target + uM - v) % uM;
                if (sum.test(need)) found = true;
            });
        }
        if (!found) continue;

        std::vector<std::int32_t> first_any(uM, -1), first_low(uM, -1);
        for (i64 z = M - 1; z >= 0; --z) {
            const auto uz = static_cast<std::size_t>(z);
            first_any[val[2][uz]] = static_cast<std::int32_t>(z);
            if (low[2][uz]) first_low[val[2][uz]] = static_cast<std::int32_t>(z);
        }
        for (i64 x = 0; x < M; ++x) {
            for (i64 y = 0; y < M; ++y) {
                const auto ux = static_cast<std::size_t>(x), uy = static_cast<std::size_t>(y);
                const std::size_t rem = (target + 2 * uM - val[0][ux] - val[1][uy]) % uM;
                std::int32_t z = -1;
                int var = -1;
                if (low[0][ux] || low[1][uy]) {
                    z = first_any[rem];
                    var = low[0][ux] ? 0 : 1;
                }
                if (z < 0) {
                    z = first_low[rem];
                    var = 2;
                }
                if (z < 0) continue;
                return HenselWitness{{x, y, z}, M, t, var};
            }
        }
        throw std::logic_error("witness search: decision and reconstruction disagree");
    }
    return std::nullopt;
}

inline std::optional<HenselWitness> find_liftable_witness(const std::array<i128, 3>& coeffs, i128 n,
                                                           u64 p, int depth) {
    return find_liftable_witness(std::span<const i128, 3>(coeffs), n, p, depth);
}

}  // namespace hasse
