#pragma once

// JSON wire formats: transcript, solver report, instance files, geometry.
// Rationals travel as exact strings ("p/q" or "p").

#include <json.hpp>

#include <string>
#include <vector>

#include "ksum/blocking.hpp"
#include "ksum/geometry.hpp"
#include "ksum/instance.hpp"
#include "ksum/oracle.hpp"
#include "ksum/solver.hpp"

namespace ksum {

using Json = nlohmann::ordered_json;

inline Json transcript_to_json(const QueryTranscript& t) {
    Json hist = Json::object();
    for (const auto& [s, count] : t.terms_histogram) hist[std::to_string(s)] = count;
    Json phases = Json::array();
    for (const auto& p : t.phases) phases.push_back({{"name", p.name}, {"count", p.count}});
    return Json{{"total", t.total},
                {"max_terms", t.max_terms},
                {"histogram", hist},
                {"open_book_reads", t.open_book_reads},
                {"phases", phases}};
}

inline Json witnesses_to_json(const std::vector<std::vector<int>>& ws) {
    Json arr = Json::array();
    for (const auto& w : ws) {
        Json tuple = Json::array();
        for (int i : w) tuple.push_back(i + 1);  // reports are 1-based
        arr.push_back(tuple);
    }
    return arr;
}

inline Json report_to_json(const SolverReport& r) {
    Json rounds = Json::array();
    for (const auto& row : r.per_round)
        rounds.push_back({{"before", to_string(row.before)},
                          {"after", to_string(row.after)},
                          {"net", row.net}});
    Json j{{"ok", r.ok},
           {"answer", r.yes ? "YES" : "NO"},
           {"witnesses", witnesses_to_json(r.witnesses)},
           {"rounds", r.rounds},
           {"retries", r.retries},
           {"per_round", rounds},
           {"seed", r.seed},
           {"objective_retries", r.objective_retries},
           {"transcript", transcript_to_json(r.transcript)}};
    if (!r.ok) j["error"] = r.error;
    if (r.blocked) {
        Json cells = Json::array();
        for (const auto& [cell, wits] : r.blocked->per_cell) {
            Json ct = Json::array();
            for (int b : cell) ct.push_back(b + 1);
            cells.push_back({{"cell", ct}, {"witnesses", wits}});
        }
        j["blocked"] = Json{{"b", r.blocked->b},
                            {"cells_tested", r.blocked->cells_tested},
                            {"cells_hit", r.blocked->cells_hit},
                            {"per_cell", cells}};
    }
    return j;
}

inline Json hyperplane_to_json(const Hyperplane& h) {
    Json terms = Json::object();
    for (const auto& [i, c] : h.normal) terms[std::to_string(i + 1)] = to_string(c);
    Json j{{"terms", terms}, {"constant", to_string(h.offset)}};
    switch (h.kind) {
        case Hyperplane::Kind::KSum: {
            Json tuple = Json::array();
            for (int i : h.tuple) tuple.push_back(i + 1);
            j["tag"] = Json{{"ksum", tuple}};
            break;
        }
        case Hyperplane::Kind::Boundary:
            j["tag"] = Json{{"boundary", Json{{"axis", h.axis + 1}, {"side", h.side}}}};
            break;
        case Hyperplane::Kind::Derived:
            j["tag"] = "derived";
            break;
    }
    return j;
}

inline Json point_to_json(const Point& p) {
    Json arr = Json::array();
    for (const auto& c : p.coords) arr.push_back(to_string(c));
    return arr;
}

inline Json simplex_to_json(const Simplex& s) {
    Json arr = Json::array();
    for (const auto& v : s.vertices) arr.push_back(point_to_json(v));
    return Json{{"vertices", arr}};
}

// --- instance files -------------------------------------------------------

struct InstanceFile {
    KSumInstance inst;
    std::vector<Rational> values;
};

inline Json instance_to_json(const InstanceFile& f) {
    Json vals = Json::array();
    for (const auto& v : f.values) vals.push_back(to_string(v));
    Json j{{"n", f.inst.n}, {"k", f.inst.k}, {"values", vals}};
    bool nontrivial_alpha = false;
    for (const auto& a : f.inst.alpha)
        if (a != 1) nontrivial_alpha = true;
    if (nontrivial_alpha) {
        Json al = Json::array();
        for (const auto& a : f.inst.alpha) al.push_back(to_string(a));
        j["alpha"] = al;
    }
    if (sign_of(f.inst.c) != 0) j["c"] = to_string(f.inst.c);
    if (f.inst.distinct) j["distinct"] = true;
    return j;
}

// Values are parsed exactly; plain decimal literals are rejected unless
// allow_decimal converts them.
inline InstanceFile instance_from_json(const Json& j, bool allow_decimal = false) {
    InstanceFile f;
    f.inst.n = j.at("n").get<int>();
    f.inst.k = j.at("k").get<int>();
    auto parse_value = [&](const Json& v) -> Rational {
        std::string s = v.is_string() ? v.get<std::string>() : v.dump();
        if (looks_like_decimal(s) && !allow_decimal)
            throw ParseError("decimal literal '" + s + "' needs --allow-decimal");
        return parse_rational(s);
    };
    for (const auto& v : j.at("values")) f.values.push_back(parse_value(v));
    if (static_cast<int>(f.values.size()) != f.inst.n)
        throw ParseError("values count does not match n");
    if (j.contains("alpha")) {
        for (const auto& a : j.at("alpha")) f.inst.alpha.push_back(parse_value(a));
    } else {
        f.inst.alpha.assign(f.inst.k, Rational(1));
    }
    f.inst.c = j.contains("c") ? parse_value(j.at("c")) : Rational(0);
    f.inst.distinct = j.value("distinct", false);
    f.inst.validate();
    return f;
}

} // namespace ksum
