#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hasse/arith.hpp"
#include "hasse/brauer.hpp"
#include "hasse/error.hpp"
#include "hasse/localsolve.hpp"

namespace hasse {

using Point = std::array<i64, 3>;

inline constexpr const char* kCertificateSchema = "hasse-cert/1";

inline constexpr const char* kCertificateProvenance =
    "Absence of integer points follows from the Brauer-Manin obstruction: for surfaces of this shape the "
    "integral Brauer-Manin obstruction is the only obstruction to the integral Hasse principle "
    "(Colliot-Thelene and Xu). The box search is an empirical cross-check and proves nothing by itself.";

// All (x, y, z) in [-box, box]^3 with a x^2 + b y^2 + c z^2 = n, sorted.
// The variable with the smallest |coefficient| is solved for; the other two are looped.
inline std::vector<Point> search_integer_points(const QuadricSurface& s, i64 box) {
    if (box < 1) throw DomainError("search box must be positive");
    if (box > 1000000) throw DomainError("search box too large");
    const auto co = s.coeffs();
    for (i64 x : co)
        if (x == 0) throw DomainError("search_integer_points: zero coefficient");
    int solve = 0;
    for (int i = 1; i < 3; ++i)
        if (abs_u64(co[i]) < abs_u64(co[solve])) solve = i;
    const int i1 = (solve + 1) % 3, i2 = (solve + 2) % 3;
    const i128 lead = co[solve];
    std::vector<Point> out;
    for (i64 u = -box; u <= box; ++u) {
        const i128 nu = static_cast<i128>(s.n) - static_cast<i128>(co[i1]) * u * u;
        for (i64 w = -box; w <= box; ++w) {
            const i128 rest = nu - static_cast<i128>(co[i2]) * w * w;
            if (rest % lead != 0) continue;
            const i128 t2 = rest / lead;
            if (t2 < 0 || t2 > static_cast<i128>(box) * box || !is_square(t2)) continue;
            const i64 t = static_cast<i64>(isqrt(static_cast<u64>(t2)));
            for (i64 sgn : {-1, 1}) {
                if (t == 0 && sgn == 1) break;
                Point p{};
                p[solve] = sgn * t;
                p[i1] = u;
                p[i2] = w;
                out.push_back(p);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline bool on_surface(const QuadricSurface& s, const Point& p) {
    const i128 v = static_cast<i128>(s.a) * p[0] * p[0] + static_cast<i128>(s.b) * p[1] * p[1] +
                   static_cast<i128>(s.c) * p[2] * p[2];
    return v == s.n;
}

struct Certificate {
    StarSurface surface;
    AdelicStatus adelic;
    ObstructionVerdict verdict;
    i64 box_searched;
    std::vector<Point> points_found;
    std::string schema_version = kCertificateSchema;

    bool failing() const {
        return adelic.everywhere_soluble && verdict.outcome == Outcome::Obstruction && points_found.empty();
    }
};

inline Certificate certify_failure(const StarSurface& s, i64 box) {
    const QuadricSurface q = s.quadric();
    Certificate c{s, adelic_status(q), bm_decision(s), box, search_integer_points(q, box)};
    if (c.verdict.outcome == Outcome::Obstruction && !c.points_found.empty())
        throw std::logic_error("obstructed surface has an integer point: " + std::to_string(s.a) + " " +
                               std::to_string(s.b) + " " + std::to_string(s.c));
    return c;
}

// ---------------------------------------------------------------------------
// Canonical JSON. nlohmann::json keeps object keys sorted; integers go out as
// decimal strings.
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json invariant_json(const InvariantSet& s) {
    nlohmann::json values = nlohmann::json::array();
    if (s.has(0)) values.push_back("0");
    if (s.has(1)) values.push_back("1/2");
    nlohmann::json wit = nlohmann::json::array();
    for (const auto& w : s.witnesses)
        wit.push_back({{"value", w.value ? "1/2" : "0"},
                       {"z", std::to_string(w.z)},
                       {"modulus", std::to_string(w.modulus)},
                       {"sign", std::to_string(w.sign)}});
    return {{"place", s.place.to_string()}, {"values", values}, {"branch", s.branch}, {"witnesses", wit}};
}

inline const nlohmann::json& require(const nlohmann::json& j, const char* key, nlohmann::json::value_t type) {
    if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("certificate: missing field ") + key);
    const auto& v = j.at(key);
    if (v.type() != type) throw SchemaError(std::string("certificate: field ") + key + " has the wrong type");
    return v;
}

inline i64 require_int(const nlohmann::json& j, const char* key) {
    const auto& s = require(j, key, nlohmann::json::value_t::string).get_ref<const std::string&>();
    try {
        return narrow_i64(parse_i128(s));
    } catch (const std::exception&) {
        throw SchemaError(std::string("certificate: field ") + key + " is not a decimal integer");
    }
}

}  // namespace detail

inline nlohmann::json to_json(const Certificate& c) {
    nlohmann::json failing = nlohmann::json::array();
    for (const auto& v : c.adelic.failing_places)
        failing.push_back({{"place", v.place.to_string()}, {"reason", describe(v.reason)}});
    nlohmann::json checked = nlohmann::json::array();
    for (u64 p : c.adelic.checked_primes) checked.push_back(std::to_string(p));
    nlohmann::json places = nlohmann::json::array();
    for (const auto& s : c.verdict.per_place) places.push_back(detail::invariant_json(s));
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : c.points_found)
        points.push_back({std::to_string(p[0]), std::to_string(p[1]), std::to_string(p[2])});
    return {
        {"schema_version", c.schema_version},
        {"surface", {{"a", std::to_string(c.surface.a)}, {"b", std::to_string(c.surface.b)}, {"c", std::to_string(c.surface.c)}}},
        {"adelic", {{"everywhere_soluble", c.adelic.everywhere_soluble}, {"failing_places", failing}, {"checked_primes", checked}}},
        {"verdict", {{"outcome", to_string(c.verdict.outcome)}, {"per_place", places}, {"trace", c.verdict.trace}}},
        {"box_searched", std::to_string(c.box_searched)},
        {"points_found", points},
        {"failing", c.failing()},
        {"provenance", kCertificateProvenance},
    };
}

inline std::string serialize(const Certificate& c) { return to_json(c).dump(); }

// Throws SchemaError when the document is not a certificate; false when it is
// one but does not match what the surface itself gives.
inline bool verify_certificate(const nlohmann::json& doc) {
    using vt = nlohmann::json::value_t;
    if (!doc.is_object()) throw SchemaError("certificate: top level must be an object");
    const auto& version = detail::require(doc, "schema_version", vt::string);
    if (version != kCertificateSchema) throw SchemaError("certificate: unknown schema " + version.get<std::string>());
    const auto& surf = detail::require(doc, "surface", vt::object);
    const i64 a = detail::require_int(surf, "a"), b = detail::require_int(surf, "b"), c = detail::require_int(surf, "c");
    const i64 box = detail::require_int(doc, "box_searched");
    const auto& pts = detail::require(doc, "points_found", vt::array);
    detail::require(doc, "adelic", vt::object);
    detail::require(doc, "verdict", vt::object);
    detail::require(doc, "failing", vt::boolean);
    detail::require(doc, "provenance", vt::string);

    std::optional<StarSurface> s;
    try {
        s.emplace(a, b, c);
    } catch (const DomainError& e) {
        throw SchemaError(std::string("certificate: ") + e.what());
    }
    if (box < 1) throw SchemaError("certificate: box_searched must be positive");
    for (const auto& p : pts) {
        if (!p.is_array() || p.size() != 3) throw SchemaError("certificate: points must be integer triples");
        Point q{};
        for (int i = 0; i < 3; ++i) {
            if (!p[i].is_string()) throw SchemaError("certificate: point coordinates must be strings");
            try {
                q[i] = narrow_i64(parse_i128(p[i].get<std::string>()));
            } catch (const std::exception&) {
                throw SchemaError("certificate: point coordinate is not a decimal integer");
            }
        }
        if (!on_surface(s->quadric(), q)) return false;
    }
    return to_json(certify_failure(*s, box)) == doc;
}

inline bool verify_certificate(const Certificate& c) { return verify_certificate(to_json(c)); }

inline bool verify_certificate_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("certificate: not JSON: ") + e.what());
    }
    return verify_certificate(doc);
}

}  // namespace hasse
