#pragma once

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hasse/certify.hpp"
#include "hasse/density.hpp"
#include "hasse/detail/parallel.hpp"
#include "hasse/families.hpp"
#include "hasse/localsolve.hpp"

namespace hasse::cli {

using nlohmann::json;

enum ExitCode { kOk = 0, kUsage = 1, kInternal = 2 };

// Raised for a failed self-check (method disagreement, invalid certificate).
// The document is still written.
struct CheckFailed {
    json doc;
};

struct Settings {
    int threads = 1;
    int partitions = 1;
    u64 seed = 0;
    std::string output;
    std::string format = "json";
    bool no_timing = false;
};

// CSV: one row per entry of doc["rows"] (or doc["places"]) when present, otherwise the document
// itself as one row. Header is the sorted key set of the first row; nested
// values are written as JSON text.
inline std::string to_csv(const json& doc) {
    std::vector<json> rows;
    for (const char* key : {"rows", "places"})
        if (rows.empty() && doc.contains(key) && doc[key].is_array())
            for (const auto& r : doc[key]) rows.push_back(r);
    if (rows.empty()) rows.push_back(doc);
    auto cell = [](const json& v) {
        std::string s = v.is_string() ? v.get<std::string>() : v.dump();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) {
            if (ch == '"') q += '"';
            q += ch;
        }
        return q + "\"";
    };
    std::ostringstream os;
    if (rows.empty()) return "";
    std::vector<std::string> keys;
    for (const auto& [k, v] : rows.front().items()) keys.push_back(k);
    for (std::size_t i = 0; i < keys.size(); ++i) os << (i ? "," : "") << keys[i];
    os << "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < keys.size(); ++i) os << (i ? "," : "") << (r.contains(keys[i]) ? cell(r[keys[i]]) : "");
        os << "\n";
    }
    return os.str();
}

inline json fraction_json(const Rational& r) { return to_string(r); }

inline json report_json(const CountReport& r, const Settings& st) {
    json j{{"kind", r.kind},
           {"B", r.B},
           {"n", r.n},
           {"eligible", r.eligible},
           {"matched", r.matched},
           {"fraction", fraction_json(r.fraction)}};
    if (r.prediction) {
        j["prediction"] = *r.prediction;
        j["prediction_cutoff"] = r.prediction_cutoff;
        j["prediction_note"] = r.prediction_note;
    }
    if (!st.no_timing) {
        j["wall_time"] = r.wall_time;
        j["partitions"] = r.partitions;
    }
    return j;
}

inline json verdict_json(const LocalVerdict& v) {
    return {{"place", v.place.to_string()}, {"soluble", v.soluble}, {"reason", describe(v.reason)}};
}

inline json cmd_local(const QuadricSurface& s) {
    const auto status = adelic_status(s);
    json places = json::array();
    places.push_back(verdict_json(solvable_real(s)));
    for (u64 p : status.checked_primes) places.push_back(verdict_json(p == 2 ? solvable_z2(s) : solvable_zp_odd(s, p)));
    json failing = json::array();
    for (const auto& v : status.failing_places) failing.push_back(v.place.to_string());
    return {{"surface", {{"a", s.a}, {"b", s.b}, {"c", s.c}, {"n", s.n}}},
            {"everywhere_soluble", status.everywhere_soluble},
            {"failing_places", failing},
            {"places", places}};
}

inline json cmd_density(std::optional<u64> p, i64 n, std::optional<u64> cutoff, bool exhaustive) {
    if (cutoff) {
        const auto e = euler_product_sigma(n, *cutoff);
        return {{"n", n}, {"value", e.value}, {"cutoff", e.cutoff}, {"tail_note", e.tail_note}};
    }
    if (!p) throw DomainError("density: give --p, or --cutoff for the Euler product");
    if (exhaustive) return {{"p", *p}, {"n", n}, {"sigma", to_string(sigma_p_exhaustive(*p, n))}, {"method", "exhaustive"}};
    const auto d = sigma_p_exact(*p, n);
    json terms = json::array();
    for (const auto& t : d.terms) terms.push_back({{"j", t.j}, {"v_j", t.v_j}, {"kappa_c", to_string(t.kappa_c)}});
    return {{"p", *p}, {"n", n}, {"sigma", to_string(d.sigma)}, {"method", to_string(d.method)}, {"terms", terms}};
}

inline json cmd_count_nbr(u64 B, const std::string& method, const Settings& st) {
    const CountOptions opt{st.partitions, st.threads};
    if (method == "enum") return report_json(count_nbr_prime_enum(B, opt), st);
    if (method == "formula") return report_json(count_nbr_prime_formula(B, opt), st);
    const auto e = count_nbr_prime_enum(B, opt);
    const auto f = count_nbr_prime_formula(B, opt, false);
    json j{{"B", B}, {"enum", e.matched}, {"formula", f.matched}, {"eligible", e.eligible}, {"agree", e.matched == f.matched}};
    if (!st.no_timing) j["wall_time"] = e.wall_time + f.wall_time;
    if (e.matched != f.matched) throw CheckFailed{j};
    return j;
}

inline json cmd_growth(const std::vector<u64>& bounds, const Settings& st, std::ostream& err) {
    const CountOptions opt{st.partitions, st.threads};
    json rows = json::array();
    double lo = 0, hi = 0;
    for (u64 B : bounds) {
        const auto r = growth_report({B}, opt).front();
        err << "growth: B=" << B << " done\n";
        rows.push_back({{"B", r.B}, {"count", r.count}, {"normalized", r.normalized}, {"count_4B", r.count_4B},
                        {"quadrupling", r.quadrupling}});
        lo = rows.size() == 1 ? r.normalized : std::min(lo, r.normalized);
        hi = rows.size() == 1 ? r.normalized : std::max(hi, r.normalized);
    }
    return {{"rows", rows}, {"normalized_spread", lo > 0 ? hi / lo - 1 : 0.0}};
}

inline json cmd_verify(std::istream& in) {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    const bool ok = verify_certificate_text(text);
    json j{{"valid", ok}};
    if (!ok) {
        j["reason"] = "content mismatch";
        throw CheckFailed{j};
    }
    return j;
}

inline void emit(const json& doc, const Settings& st, std::ostream& out) {
    std::string text = st.format == "csv" ? to_csv(doc) : doc.dump() + "\n";
    if (st.output.empty() || st.output == "-") {
        out << text;
        return;
    }
    std::ofstream f(st.output);
    if (!f) throw std::runtime_error("cannot open output file " + st.output);
    f << text;
}

// Runs one command line (without the program name). Returns the exit code.
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Integral points, local solubility and Brauer-Manin counts for a x^2 + b y^2 + c z^2 = n",
                 "hasse"};
    app.require_subcommand(1);
    app.fallthrough();
    Settings st;
    st.threads = detail::default_threads();
    app.add_option("--threads", st.threads, "worker threads (default: HASSE_THREADS or hardware)")
        ->check(CLI::PositiveNumber);
    app.add_option("--partitions", st.partitions, "work partitions for counting")->check(CLI::PositiveNumber);
    app.add_option("--seed", st.seed, "seed for sampled diagnostics");
    app.add_option("--output", st.output, "output file (default: standard output)");
    app.add_option("--format", st.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_flag("--no-timing", st.no_timing, "omit wall_time and partitions fields");

    i64 a = 0, b = 0, c = 0, n = 1, box = 100;
    u64 B = 0;
    std::optional<u64> p, cutoff;
    bool exhaustive = false;
    std::string method = "both", input = "-";
    std::vector<u64> bounds{100000, 1000000, 10000000};
    u64 nloc_cutoff = 10000, const_cutoff = 1000000;

    auto* local = app.add_subcommand("local", "per-place solubility of a x^2 + b y^2 + c z^2 = n");
    auto* density = app.add_subcommand("density", "exact local density sigma_p, or the Euler product with --cutoff");
    auto* nloc = app.add_subcommand("count-nloc", "count everywhere locally soluble surfaces of height <= B");
    auto* sdelta = app.add_subcommand("count-sdelta", "count triples passing the triple-delta filter");
    auto* nbr = app.add_subcommand("count-nbr", "count obstructed members of the X' family");
    auto* constant = app.add_subcommand("constant", "leading constant of the X' count, truncated at --cutoff");
    auto* certify = app.add_subcommand("certify", "certificate for a x^2 + b y^2 + c^2 z^2 = 1");
    auto* verify = app.add_subcommand("verify", "recompute and check a certificate");
    auto* growth = app.add_subcommand("growth", "quadrupling ratios of the X' count");

    local->add_option("--a", a)->required();
    local->add_option("--b", b)->required();
    local->add_option("--c", c)->required();
    local->add_option("--n", n)->required();
    density->add_option("--p", p);
    density->add_option("--n", n)->required();
    density->add_option("--cutoff", cutoff);
    density->add_flag("--exhaustive", exhaustive, "use the residue-class measure instead of the formula");
    nloc->add_option("--B", B)->required()->check(CLI::PositiveNumber);
    nloc->add_option("--n", n);
    nloc->add_option("--cutoff", nloc_cutoff, "Euler product cutoff for the prediction");
    sdelta->add_option("--B", B)->required()->check(CLI::PositiveNumber);
    sdelta->add_option("--n", n);
    nbr->add_option("--B", B)->required()->check(CLI::PositiveNumber);
    nbr->add_option("--method", method)->check(CLI::IsMember({"enum", "formula", "both"}));
    constant->add_option("--cutoff", const_cutoff);
    certify->add_option("--a", a)->required();
    certify->add_option("--b", b)->required();
    certify->add_option("--c", c)->required();
    certify->add_option("--box", box)->check(CLI::PositiveNumber);
    verify->add_option("--input", input, "certificate file, - for standard input");
    growth->add_option("--B", bounds, "base heights")->delimiter(',');

    std::vector<std::string> argv_store{"hasse"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_store) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kUsage;
    }

    const CountOptions opt{st.partitions, st.threads};
    try {
        json doc;
        if (local->parsed()) {
            doc = cmd_local({a, b, c, n});
        } else if (density->parsed()) {
            doc = cmd_density(p, n, cutoff, exhaustive);
        } else if (nloc->parsed()) {
            doc = report_json(count_nloc(B, n, opt, nloc_cutoff), st);
        } else if (sdelta->parsed()) {
            doc = report_json(count_sdelta(B, n, opt), st);
        } else if (nbr->parsed()) {
            doc = cmd_count_nbr(B, method, st);
        } else if (constant->parsed()) {
            const auto k = theorem2_constant(const_cutoff);
            doc = {{"value", k.value}, {"cutoff", k.cutoff}, {"prefactor", k.prefactor}};
        } else if (certify->parsed()) {
            doc = to_json(certify_failure({a, b, c}, box));
        } else if (verify->parsed()) {
            if (input == "-") {
                doc = cmd_verify(in);
            } else {
                std::ifstream f(input);
                if (!f) throw DomainError("cannot open " + input);
                doc = cmd_verify(f);
            }
        } else if (growth->parsed()) {
            doc = cmd_growth(bounds, st, err);
        }
        emit(doc, st, out);
        return kOk;
    } catch (const CheckFailed& f) {
        emit(f.doc, st, out);
        err << "error: self-check failed\n";
        return kInternal;
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const FamilyMembershipError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}

}  // namespace hasse::cli
