#pragma once

// JSON forms of certificates, counterexamples, structures and reports.
// Field order is fixed (ordered_json plus deterministic iteration), so equal
// invocations serialize byte-identically.

#include <string>
#include <vector>

#include <json.hpp>

#include "hornap/amalgamation.hpp"
#include "hornap/certificates.hpp"
#include "hornap/logic.hpp"
#include "hornap/reduction.hpp"
#include "hornap/text.hpp"

namespace hornap {

using Json = nlohmann::ordered_json;

inline Json substitution_to_json(const Substitution& s) {
    Json j = Json::object();
    for (const auto& [from, to] : s.mapping()) j[from] = to;
    return j;
}

inline Substitution substitution_from_json(const Json& j) {
    std::map<Var, Var> m;
    for (auto it = j.begin(); it != j.end(); ++it)
        m[it.key()] = it.value().get<std::string>();
    return Substitution(std::move(m));
}

inline Json certificate_to_json(const DeductionCertificate& c,
                                const HornClause& goal, const Signature& sig) {
    Json j;
    j["kind"] = kind_name(c.kind);
    j["goal"] = goal.str(sig);
    if (c.kind == DeductionCertificate::Kind::WeakeningOfDerivation) {
        const SldDerivation& d = *c.derivation;
        j["initialClauseIndex"] = d.initial_clause;
        j["initialSubstitution"] = substitution_to_json(d.initial_substitution);
        Json steps = Json::array();
        for (const SldStep& s : d.steps) {
            Json st;
            st["premisePosition"] = s.premise_position;
            st["sideClauseIndex"] = s.side_clause;
            st["substitution"] = substitution_to_json(s.substitution);
            steps.push_back(std::move(st));
        }
        j["steps"] = std::move(steps);
    }
    return j;
}

struct StoredCertificate {
    DeductionCertificate certificate;
    HornClause goal;
};

inline StoredCertificate certificate_from_json(const Json& j, const Signature& sig) {
    StoredCertificate out;
    out.goal = parse_clause(j.at("goal").get<std::string>(), sig);
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "tautology") {
        out.certificate.kind = DeductionCertificate::Kind::Tautology;
        return out;
    }
    if (kind != "weakening-of-derivation")
        throw Error("unknown certificate kind: " + kind);
    out.certificate.kind = DeductionCertificate::Kind::WeakeningOfDerivation;
    SldDerivation d;
    d.initial_clause = j.at("initialClauseIndex").get<int>();
    d.initial_substitution = substitution_from_json(j.at("initialSubstitution"));
    for (const Json& st : j.at("steps")) {
        SldStep s;
        s.premise_position = st.at("premisePosition").get<int>();
        s.side_clause = st.at("sideClauseIndex").get<int>();
        s.substitution = substitution_from_json(st.at("substitution"));
        d.steps.push_back(std::move(s));
    }
    out.certificate.derivation = std::move(d);
    return out;
}

inline Json structure_to_json(const FiniteStructure& s,
                              const std::vector<Var>& names) {
    Json j;
    Json dom = Json::array();
    for (const Var& v : names) dom.push_back(v);
    j["domain"] = std::move(dom);
    Json rels = Json::object();
    for (int sym = 0; sym < s.sig.size(); ++sym) {
        Json tuples = Json::array();
        for (const auto& t : s.relations[sym]) {
            Json tuple = Json::array();
            for (int e : t) tuple.push_back(names.at(e));
            tuples.push_back(std::move(tuple));
        }
        rels[s.sig.name(sym)] = std::move(tuples);
    }
    j["relations"] = std::move(rels);
    return j;
}

inline FiniteStructure structure_from_json(const Json& j, const Signature& sig,
                                           std::vector<Var>* names_out = nullptr) {
    std::vector<Var> names;
    for (const Json& v : j.at("domain")) names.push_back(v.get<std::string>());
    FiniteStructure s(sig, static_cast<int>(names.size()));
    auto idx = [&](const std::string& n) {
        auto it = std::find(names.begin(), names.end(), n);
        if (it == names.end()) throw Error("unknown element name: " + n);
        return static_cast<int>(it - names.begin());
    };
    const Json& rels = j.at("relations");
    for (auto it = rels.begin(); it != rels.end(); ++it) {
        int sym = sig.require(it.key());
        for (const Json& tuple : it.value()) {
            std::vector<int> t;
            for (const Json& e : tuple) t.push_back(idx(e.get<std::string>()));
            s.add(sym, std::move(t));
        }
    }
    if (names_out) *names_out = names;
    return s;
}

inline Json atoms_to_json(const std::vector<Atom>& atoms, const Signature& sig) {
    Json arr = Json::array();
    std::vector<Atom> sorted = atoms;
    std::sort(sorted.begin(), sorted.end());
    for (const Atom& a : sorted) arr.push_back(a.str(sig));
    return arr;
}

inline std::vector<Atom> atoms_from_json(const Json& arr, const Signature& sig) {
    std::string joined;
    for (const Json& s : arr) {
        if (!joined.empty()) joined += ", ";
        joined += s.get<std::string>();
    }
    return parse_atom_list(joined, sig);
}

inline Json subsumption_report_to_json(const SubsumptionReport& r,
                                       const Signature& sig) {
    Json j;
    j["holds"] = r.holds;
    Json viol = Json::array();
    for (const auto& v : r.violations)
        viol.push_back(v ? v->str(sig) : std::string("bot"));
    j["violations"] = std::move(viol);
    return j;
}

inline Json counterexample_to_json(const ApCounterexample& c, const Signature& sig) {
    Json j;
    Json shared = Json::array();
    for (const Var& v : c.shared) shared.push_back(v);
    j["shared"] = std::move(shared);
    j["phi"] = atoms_to_json(c.phi, sig);
    j["phi1"] = atoms_to_json(c.phi1, sig);
    j["phi2"] = atoms_to_json(c.phi2, sig);
    j["chi"] = c.chi ? c.chi->str(sig) : std::string("bot");
    Json ev;
    ev["entailment"] = certificate_to_json(c.entailment, c.violated_clause(), sig);
    ev["countermodel"] = structure_to_json(c.countermodel, c.countermodel_domain);
    ev["subsumption1"] = subsumption_report_to_json(c.side1, sig);
    ev["subsumption2"] = subsumption_report_to_json(c.side2, sig);
    j["evidence"] = std::move(ev);
    return j;
}

inline ApCounterexample counterexample_from_json(const Json& j, const Signature& sig) {
    ApCounterexample c;
    for (const Json& v : j.at("shared")) c.shared.push_back(v.get<std::string>());
    c.phi = atoms_from_json(j.at("phi"), sig);
    c.phi1 = atoms_from_json(j.at("phi1"), sig);
    c.phi2 = atoms_from_json(j.at("phi2"), sig);
    std::string chi = j.at("chi").get<std::string>();
    if (chi == "bot") {
        c.chi.reset();
    } else {
        std::vector<Atom> one = parse_atom_list(chi, sig);
        if (one.size() != 1) throw Error("chi must be a single atom or bot");
        c.chi = one[0];
    }
    const Json& ev = j.at("evidence");
    StoredCertificate sc = certificate_from_json(ev.at("entailment"), sig);
    c.entailment = sc.certificate;
    c.countermodel =
        structure_from_json(ev.at("countermodel"), sig, &c.countermodel_domain);
    c.side1.holds = ev.at("subsumption1").at("holds").get<bool>();
    c.side2.holds = ev.at("subsumption2").at("holds").get<bool>();
    return c;
}

}  // namespace hornap
