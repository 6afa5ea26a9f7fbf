#pragma once

// JSON reports. Field order is fixed (ordered_json) and every number that
// can grow is written as a decimal string, so output is byte-stable and
// lossless. Witness objects are self-contained: they carry the ring and the
// formula text, which is all "verify" needs.

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "collatz.hpp"
#include "dynamics.hpp"
#include "eval.hpp"
#include "formula.hpp"
#include "homomorphism.hpp"
#include "parser.hpp"
#include "ring.hpp"
#include "semantics.hpp"

namespace ghostring {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

inline Json to_json(const Assignment& a) {
    Json j = Json::object();
    for (const auto& [k, v] : a) j[k] = v.to_string();
    return j;
}

inline Json to_json(const SearchBudget& b) {
    return Json{{"integer_box_bound", to_string(b.integer_box_bound)},
                {"local_height_bound", to_string(b.local_height_bound)},
                {"precision_limit", std::to_string(b.precision_limit)}};
}

/// {"kind":"witness"}: ring, formula and a satisfying assignment.
inline Json witness_json(const Ring& r, const Formula& f, const Assignment& w) {
    return Json{{"kind", "witness"}, {"ring", r.to_string()}, {"formula", to_string(f)}, {"assignment", to_json(w)}};
}

inline Json to_json(const EvalResult& r, const Ring& ring, const Formula& f) {
    Json j{{"status", to_string(r.status)}};
    if (r.holds()) {
        j["witness"] = witness_json(ring, f, r.witness);
        j["disjunct"] = std::to_string(r.disjunct);
    }
    if (r.status == EvalResult::Status::RefutedAtPrecision) j["precision"] = std::to_string(r.precision);
    if (!r.modular_witnesses.empty()) {
        Json mods = Json::array();
        for (const auto& [n, w] : r.modular_witnesses)
            mods.push_back(Json{{"precision", std::to_string(n)},
                                {"witness", witness_json(Ring::mod(pow_int(ring.prime(), n)), f, w)}});
        j["modular_witnesses"] = mods;
    }
    return j;
}

inline Json state_json(const State& s) {
    Json j = Json::array();
    for (const auto& e : s) j.push_back(e.to_string());
    return j;
}

/// {"kind":"cycle"}: the system's formulas and the closed walk.
inline Json cycle_json(const System& d, const CycleWitness& c) {
    Json states = Json::array();
    for (const auto& s : c.states) states.push_back(state_json(s));
    return Json{{"kind", "cycle"},
                {"ring", c.ring.to_string()},
                {"sigma", to_string(d.sigma())},
                {"tau", to_string(d.tau())},
                {"state_vars", d.state_vars()},
                {"next_vars", d.next_vars()},
                {"states", states}};
}

inline Json to_json(const GhostReport& g) {
    Json j{{"sentence", to_string(g.sentence)},
           {"simulation", g.simulation.to_string()},
           {"extension_status", to_json(g.extension_status, g.simulation.target(), g.sentence)},
           {"base_status", to_json(g.base_status, Ring::integers(), g.sentence)},
           {"candidate", g.candidate}};
    j["witness_outside_image"] = g.image_decided ? Json(g.witness_outside_image) : Json("undecided");
    j["image_justification"] = g.image_justification;
    j["classification"] = g.classification;
    return j;
}

inline Json to_json(const Countermodel& cm, const Formula& phi, const std::vector<Formula>& axioms) {
    Json ax = Json::array();
    for (std::size_t i = 0; i < axioms.size(); ++i)
        ax.push_back(Json{{"integer_witness", witness_json(Ring::integers(), axioms[i], cm.axiom_integer_witnesses[i])},
                          {"transported_witness", witness_json(cm.ring, axioms[i], cm.axiom_witnesses[i])}});
    return Json{{"ring", cm.ring.to_string()},
                {"map", cm.map.to_string()},
                {"phi_witness", witness_json(cm.ring, phi, cm.phi_witness)},
                {"axioms", ax}};
}

inline Json to_json(const PeriodicPoint& p) {
    Json orbit = Json::array();
    for (const auto& e : p.orbit) orbit.push_back(e.to_string());
    return Json{{"vector", p.vector.to_string()},
                {"variant", to_string(p.vector.variant)},
                {"value", p.value.to_string()},
                {"kind", to_string(p.kind)},
                {"orbit", orbit}};
}

inline Json to_json(const Rejection& r) {
    Json j{{"vector", r.vector.to_string()}, {"rejected", to_string(r.reason)}};
    if (r.reason == Rejection::Reason::ParityInconsistent) j["index"] = std::to_string(r.index);
    j["detail"] = r.detail;
    return j;
}

inline Json to_json(const CycleOutcome& o) {
    return std::visit([](const auto& v) { return to_json(v); }, o);
}

inline Json to_json(const CensusRow& row) {
    Json entries = Json::array();
    for (const auto& e : row.entries) {
        Json j = to_json(e.outcome);
        j["primitive"] = e.primitive;
        entries.push_back(j);
    }
    return Json{{"k", std::to_string(row.k)},
                {"admissible", std::to_string(row.admissible)},
                {"classes", std::to_string(row.classes)},
                {"integer_cycles", std::to_string(row.integer_cycles)},
                {"ghost_cycles", std::to_string(row.ghost_cycles)},
                {"rejections", std::to_string(row.rejections)},
                {"repeats", std::to_string(row.repeats)},
                {"entries", entries}};
}

inline Json make_report(const std::string& command, Json inputs, Json result, const SearchBudget& budget,
                        long timing_ms = 0) {
    return Json{{"schema_version", kSchemaVersion},
                {"command", command},
                {"inputs", std::move(inputs)},
                {"result", std::move(result)},
                {"budget", to_json(budget)},
                {"timing_ms", timing_ms}};
}

/// Outcome of re-checking one embedded witness.
struct WitnessCheck {
    std::string path;
    std::string kind;
    bool ok = false;
    std::string detail;
};

namespace detail {

inline Assignment parse_assignment(const Ring& r, const Json& j) {
    if (!j.is_object()) throw Error("assignment must be an object");
    Assignment a;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_string()) throw Error("assignment value for '" + k + "' must be a string");
        a.set(k, parse_element(r, v.get<std::string>()));
    }
    return a;
}

inline WitnessCheck check_one(const Json& j, const std::string& path) {
    std::string kind = j.at("kind").get<std::string>();
    WitnessCheck c{path, kind, false, {}};
    try {
        Ring r = parse_ring(j.at("ring").get<std::string>());
        if (kind == "witness") {
            Formula f = parse_formula(j.at("formula").get<std::string>());
            c.ok = verify_witness(r, f, parse_assignment(r, j.at("assignment")));
            if (!c.ok) c.detail = "assignment does not satisfy the formula";
        } else {
            System d(r, parse_formula(j.at("sigma").get<std::string>()), parse_formula(j.at("tau").get<std::string>()),
                     j.at("state_vars").get<std::vector<std::string>>(),
                     j.at("next_vars").get<std::vector<std::string>>());
            CycleWitness cyc{r, {}};
            for (const auto& s : j.at("states")) {
                State st;
                for (const auto& e : s) st.push_back(parse_element(r, e.get<std::string>()));
                cyc.states.push_back(std::move(st));
            }
            c.ok = verify_cycle(d, cyc);
            if (!c.ok) c.detail = "some step is not a transition";
        }
    } catch (const std::exception& e) {
        c.ok = false;
        c.detail = e.what();
    }
    return c;
}

inline void collect_checks(const Json& j, const std::string& path, std::vector<WitnessCheck>& out) {
    if (j.is_object()) {
        if (auto it = j.find("kind"); it != j.end() && it->is_string() &&
                                      (*it == "witness" || *it == "cycle") && j.contains("ring")) {
            out.push_back(check_one(j, path));
            return;
        }
        for (const auto& [k, v] : j.items()) collect_checks(v, path + "/" + k, out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) collect_checks(j[i], path + "/" + std::to_string(i), out);
    }
}

} // namespace detail

/// Re-verifies every witness and cycle object anywhere in a report.
inline std::vector<WitnessCheck> verify_report(const Json& report) {
    std::vector<WitnessCheck> out;
    detail::collect_checks(report, "", out);
    return out;
}

} // namespace ghostring
