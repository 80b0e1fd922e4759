#pragma once

// SLD-deduction certificates. A certificate is either the observation that
// the goal is a tautology, or a resolution derivation: an initial clause
// instance from the sentence followed by binary resolution steps, each
// resolving one premise atom against an instantiated sentence clause whose
// conclusion equals that atom. The goal must then subsume the final clause:
// final premise contained in the goal premise, and the final conclusion equal
// to the goal conclusion or bottom (a clause concluding bottom weakens, as a
// disjunction, to any conclusion).
//
// Extraction replays the saturation trace backwards; verification is a pure
// step-by-step replay and never searches.

#include <optional>
#include <string>
#include <vector>

#include "hornap/logic.hpp"
#include "hornap/saturation.hpp"

namespace hornap {

struct SldStep {
    int premise_position = -1;
    int side_clause = -1;
    Substitution substitution;
};

struct SldDerivation {
    int initial_clause = -1;
    Substitution initial_substitution;
    std::vector<SldStep> steps;
};

struct DeductionCertificate {
    enum class Kind { Tautology, WeakeningOfDerivation };
    Kind kind = Kind::Tautology;
    std::optional<SldDerivation> derivation;
};

inline const char* kind_name(DeductionCertificate::Kind k) {
    return k == DeductionCertificate::Kind::Tautology ? "tautology"
                                                      : "weakening-of-derivation";
}

namespace detail {

// Replaces premise[pos] by the instantiated side premise; result normalized.
inline HornClause resolve_at(const HornClause& cur, int pos,
                             const HornClause& side_instance) {
    HornClause out;
    out.conclusion = cur.conclusion;
    out.premise.reserve(cur.premise.size() + side_instance.premise.size());
    for (int i = 0; i < static_cast<int>(cur.premise.size()); ++i)
        if (i != pos) out.premise.push_back(cur.premise[i]);
    for (const Atom& a : side_instance.premise) out.premise.push_back(a);
    out.normalize();
    return out;
}

}  // namespace detail

// Builds a certificate for an entailed goal by replaying the saturation trace
// backwards. Throws if the goal is not entailed. `extra_vars` extends the
// saturation domain beyond the goal's own variables.
inline DeductionCertificate extract_sld_certificate(
    const HornSentence& phi, const HornClause& goal,
    const std::vector<Var>& extra_vars = {}) {
    if (is_tautology(goal))
        return {DeductionCertificate::Kind::Tautology, std::nullopt};

    std::vector<Var> domain = goal.variables();
    for (const Var& v : extra_vars)
        if (std::find(domain.begin(), domain.end(), v) == domain.end())
            domain.push_back(v);
    SaturationResult r = saturate_traced(phi, goal.premise, domain);

    const TraceStep* root = nullptr;
    if (!goal.concludes_bottom() && r.closure.contains(*goal.conclusion) &&
        !std::binary_search(r.seeds.begin(), r.seeds.end(), *goal.conclusion)) {
        root = r.producer(*goal.conclusion);
    }
    if (!root && r.closure.inconsistent) root = &*r.bottom;
    if (!root) throw Error("goal is not entailed: " + goal.str(phi.sig));

    SldDerivation d;
    d.initial_clause = root->clause;
    d.initial_substitution = root->assignment;
    HornClause cur = root->assignment.apply(phi.clauses[root->clause]);

    while (true) {
        int pos = -1;
        for (int i = 0; i < static_cast<int>(cur.premise.size()); ++i)
            if (!std::binary_search(r.seeds.begin(), r.seeds.end(),
                                    cur.premise[i])) {
                pos = i;
                break;
            }
        if (pos < 0) break;
        const TraceStep* prod = r.producer(cur.premise[pos]);
        if (!prod)
            throw InternalError("derived atom has no producer in the trace");
        SldStep step{pos, prod->clause, prod->assignment};
        HornClause side = prod->assignment.apply(phi.clauses[prod->clause]);
        if (!side.conclusion || *side.conclusion != cur.premise[pos])
            throw InternalError("trace producer does not conclude the resolved atom");
        cur = detail::resolve_at(cur, pos, side);
        d.steps.push_back(std::move(step));
    }
    return {DeductionCertificate::Kind::WeakeningOfDerivation, std::move(d)};
}

struct VerifyResult {
    bool ok = false;
    std::string reason;
};

// Pure replay of a certificate against a sentence and goal.
inline VerifyResult verify_certificate(const HornSentence& phi,
                                       const HornClause& goal,
                                       const DeductionCertificate& cert) {
    if (cert.kind == DeductionCertificate::Kind::Tautology) {
        if (is_tautology(goal)) return {true, ""};
        return {false, "goal is not a tautology"};
    }
    if (!cert.derivation) return {false, "missing derivation"};
    const SldDerivation& d = *cert.derivation;
    if (d.initial_clause < 0 ||
        d.initial_clause >= static_cast<int>(phi.clauses.size()))
        return {false, "initial clause index out of range"};

    HornClause cur;
    try {
        cur = d.initial_substitution.apply(phi.clauses[d.initial_clause]);
    } catch (const Error& e) {
        return {false, std::string("initial substitution: ") + e.what()};
    }

    for (size_t k = 0; k < d.steps.size(); ++k) {
        const SldStep& st = d.steps[k];
        std::string at = "step " + std::to_string(k) + ": ";
        if (st.premise_position < 0 ||
            st.premise_position >= static_cast<int>(cur.premise.size()))
            return {false, at + "premise position out of range"};
        if (st.side_clause < 0 ||
            st.side_clause >= static_cast<int>(phi.clauses.size()))
            return {false, at + "side clause index out of range"};
        HornClause side;
        try {
            side = st.substitution.apply(phi.clauses[st.side_clause]);
        } catch (const Error& e) {
            return {false, at + e.what()};
        }
        if (!side.conclusion)
            return {false, at + "side clause concludes bottom"};
        if (*side.conclusion != cur.premise[st.premise_position])
            return {false,
                    at + "side-clause conclusion does not match the selected premise atom"};
        cur = detail::resolve_at(cur, st.premise_position, side);
    }

    if (!premise_subset(cur.premise, goal.premise))
        return {false, "final clause premise is not contained in the goal premise"};
    if (cur.conclusion && cur.conclusion != goal.conclusion)
        return {false, "final clause conclusion does not match the goal"};
    return {true, ""};
}

}  // namespace hornap
