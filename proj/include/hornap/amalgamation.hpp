#pragma once

// Amalgamation over classes of finite models of a universal Horn sentence:
// subsumption between conjunctions of atoms, one-point amalgams built by
// saturating the union diagram, free amalgams, and a brute-force amalgamation
// oracle that works purely by direct clause evaluation over enumerated
// structures.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hornap/canonical.hpp"
#include "hornap/certificates.hpp"
#include "hornap/logic.hpp"
#include "hornap/models.hpp"
#include "hornap/saturation.hpp"

namespace hornap {

// ---------------------------------------------------------------------------
// Subsumption

// phi is a conjunction over the shared variables; psi_extra extends it over
// shared + extra. The query asks whether every consequence over the shared
// variables of (phi and psi_extra) is already a consequence of phi.
struct SubsumptionQuery {
    std::vector<Atom> phi;
    std::vector<Atom> psi_extra;
    std::vector<Var> shared;
    std::vector<Var> extra;
};

struct SubsumptionReport {
    bool holds = false;
    // violating consequences; nullopt stands for bottom
    std::vector<std::optional<Atom>> violations;
};

inline void validate_query(const SubsumptionQuery& q) {
    auto in = [](const std::vector<Var>& vs, const Var& v) {
        return std::find(vs.begin(), vs.end(), v) != vs.end();
    };
    for (const Var& v : q.shared)
        if (in(q.extra, v)) throw Error("shared and extra variables overlap: " + v);
    for (const Atom& a : q.phi)
        for (const Var& v : a.args)
            if (!in(q.shared, v))
                throw Error("phi uses a non-shared variable: " + v);
    for (const Atom& a : q.psi_extra)
        for (const Var& v : a.args)
            if (!in(q.shared, v) && !in(q.extra, v))
                throw Error("psi uses an undeclared variable: " + v);
}

inline SubsumptionReport check_subsumption(const HornSentence& phi,
                                           const SubsumptionQuery& q) {
    validate_query(q);
    std::vector<Var> big = q.shared;
    big.insert(big.end(), q.extra.begin(), q.extra.end());
    std::vector<Atom> seed = q.phi;
    seed.insert(seed.end(), q.psi_extra.begin(), q.psi_extra.end());

    CanonicalStructure s_psi = saturate(phi, seed, big);
    CanonicalStructure s_phi = saturate(phi, q.phi, q.shared);

    SubsumptionReport rep;
    if (s_phi.inconsistent) {
        rep.holds = true;  // phi already entails everything
        return rep;
    }
    if (s_psi.inconsistent) {
        rep.violations.push_back(std::nullopt);
        std::vector<Atom> shared_atoms = s_psi.restrict_to(q.shared);
        for (const Atom& a : shared_atoms)
            if (!s_phi.contains(a)) rep.violations.push_back(a);
        rep.holds = false;
        return rep;
    }
    for (const Atom& a : s_psi.restrict_to(q.shared))
        if (!s_phi.contains(a)) rep.violations.push_back(a);
    rep.holds = rep.violations.empty();
    return rep;
}

// ---------------------------------------------------------------------------
// Counterexamples to the one-point characterization

// A triple (phi, phi1, phi2) with phi(x), phi1(x,y1), phi2(x,y2) such that
// phi ∧ phi_i subsumes phi on both sides, yet some chi over x,y1 (or bottom)
// follows from the full conjunction without following from phi ∧ phi1.
struct ApCounterexample {
    std::vector<Var> shared;          // x variables, fixed order
    std::vector<Atom> phi;            // over shared
    std::vector<Atom> phi1;           // over shared + y1, each mentioning y1
    std::vector<Atom> phi2;           // over shared + y2, each mentioning y2
    std::optional<Atom> chi;          // nullopt = bottom; over shared + y1
    Var y1 = "y1", y2 = "y2";

    // evidence
    DeductionCertificate entailment;       // for (phi ∧ phi1 ∧ phi2 -> chi)
    FiniteStructure countermodel;          // closure of phi ∧ phi1
    std::vector<Var> countermodel_domain;  // element index -> variable name
    SubsumptionReport side1, side2;

    HornClause violated_clause() const {
        std::vector<Atom> prem = phi;
        prem.insert(prem.end(), phi1.begin(), phi1.end());
        prem.insert(prem.end(), phi2.begin(), phi2.end());
        return make_clause(std::move(prem), chi);
    }

    HornClause unsupported_clause() const {  // (phi ∧ phi1 -> chi)
        std::vector<Atom> prem = phi;
        prem.insert(prem.end(), phi1.begin(), phi1.end());
        return make_clause(std::move(prem), chi);
    }

    int total_atoms() const {
        return static_cast<int>(phi.size() + phi1.size() + phi2.size());
    }
};

// Re-checks all three evidence components; never searches.
inline VerifyResult verify_counterexample(const HornSentence& phi,
                                          const ApCounterexample& cex) {
    auto mentions = [](const std::vector<Atom>& atoms, const Var& v) {
        for (const Atom& a : atoms)
            for (const Var& u : a.args)
                if (u == v) return true;
        return false;
    };
    if (mentions(cex.phi2, cex.y1) || mentions(cex.phi1, cex.y2) ||
        mentions(cex.phi, cex.y1) || mentions(cex.phi, cex.y2))
        return {false, "side formulas mix the two extension variables"};
    if (cex.chi)
        for (const Var& v : cex.chi->args)
            if (v == cex.y2) return {false, "chi mentions the second extension variable"};

    VerifyResult ent =
        verify_certificate(phi, cex.violated_clause(), cex.entailment);
    if (!ent.ok) return {false, "entailment evidence: " + ent.reason};

    // countermodel: a model of the sentence satisfying phi ∧ phi1 under the
    // identity assignment and not satisfying chi
    if (!satisfies(cex.countermodel, phi))
        return {false, "countermodel does not satisfy the sentence"};
    std::map<Var, int> asg;
    for (size_t i = 0; i < cex.countermodel_domain.size(); ++i)
        asg[cex.countermodel_domain[i]] = static_cast<int>(i);
    std::vector<Atom> prem = cex.phi;
    prem.insert(prem.end(), cex.phi1.begin(), cex.phi1.end());
    for (const Atom& a : prem)
        for (const Var& v : a.args)
            if (!asg.count(v))
                return {false, "countermodel domain misses variable " + v};
    if (!holds_atoms(cex.countermodel, prem, asg))
        return {false, "countermodel does not satisfy phi ∧ phi1"};
    if (cex.chi) {
        bool all_there = true;
        for (const Var& v : cex.chi->args)
            if (!asg.count(v)) all_there = false;
        if (all_there) {
            std::vector<int> t;
            for (const Var& v : cex.chi->args) t.push_back(asg.at(v));
            if (cex.countermodel.has(cex.chi->symbol, t))
                return {false, "countermodel satisfies chi"};
        }
    }

    SubsumptionQuery q1{cex.phi, cex.phi1, cex.shared, {cex.y1}};
    if (!check_subsumption(phi, q1).holds)
        return {false, "phi ∧ phi1 does not subsume phi"};
    SubsumptionQuery q2{cex.phi, cex.phi2, cex.shared, {cex.y2}};
    if (!check_subsumption(phi, q2).holds)
        return {false, "phi ∧ phi2 does not subsume phi"};
    return {true, ""};
}

// ---------------------------------------------------------------------------
// Free amalgam

struct Amalgam {
    FiniteStructure structure;
    StructureMap f1, f2;
};

// Glues B1 and B2 over A along the embeddings and takes the plain union of
// the relation images. Membership in any model class is not checked.
inline Amalgam free_amalgam(const FiniteStructure& A, const FiniteStructure& B1,
                            const FiniteStructure& B2, const StructureMap& e1,
                            const StructureMap& e2) {
    if (!(e1.source == A && e2.source == A && e1.target == B1 && e2.target == B2))
        throw Error("maps do not connect A to B1 and B2");
    if (!is_embedding(e1) || !is_embedding(e2))
        throw Error("the given maps are not embeddings");

    int n = A.size;
    std::vector<int> f1map(B1.size, -1), f2map(B2.size, -1);
    for (int a = 0; a < n; ++a) {
        f1map[e1.map[a]] = a;
        f2map[e2.map[a]] = a;
    }
    int next = n;
    for (int b = 0; b < B1.size; ++b)
        if (f1map[b] < 0) f1map[b] = next++;
    for (int b = 0; b < B2.size; ++b)
        if (f2map[b] < 0) f2map[b] = next++;

    FiniteStructure C(A.sig, next);
    auto push = [&](const FiniteStructure& B, const std::vector<int>& f) {
        for (int sym = 0; sym < B.sig.size(); ++sym)
            for (const auto& t : B.relations[sym]) {
                std::vector<int> img(t.size());
                for (size_t i = 0; i < t.size(); ++i) img[i] = f[t[i]];
                C.relations[sym].insert(std::move(img));
            }
    };
    push(B1, f1map);
    push(B2, f2map);
    return {C, StructureMap{B1, C, f1map}, StructureMap{B2, C, f2map}};
}

// ---------------------------------------------------------------------------
// One-point amalgam via saturation of the union diagram

struct AmalgamResult {
    std::optional<Amalgam> amalgam;
    std::optional<ApCounterexample> refutation;
};

namespace detail {

inline std::vector<Atom> rename_atoms(const std::vector<Atom>& atoms,
                                      const Var& from, const Var& to) {
    std::vector<Atom> out = atoms;
    for (Atom& a : out)
        for (Var& v : a.args)
            if (v == from) v = to;
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<Atom> atoms_with(const std::vector<Atom>& atoms, const Var& v) {
    std::vector<Atom> out;
    for (const Atom& a : atoms)
        if (std::find(a.args.begin(), a.args.end(), v) != a.args.end())
            out.push_back(a);
    return out;
}

inline std::vector<Atom> atoms_without(const std::vector<Atom>& atoms,
                                       const std::vector<Var>& banned) {
    std::vector<Atom> out;
    for (const Atom& a : atoms) {
        bool ok = true;
        for (const Var& v : a.args)
            if (std::find(banned.begin(), banned.end(), v) != banned.end()) {
                ok = false;
                break;
            }
        if (ok) out.push_back(a);
    }
    return out;
}

// Packages a verified counterexample from a violating triple over named
// variables. Preconditions (both subsumptions) must already hold.
inline ApCounterexample package_counterexample(
    const HornSentence& phi, std::vector<Var> shared, std::vector<Atom> phi0,
    std::vector<Atom> phi1, std::vector<Atom> phi2, std::optional<Atom> chi,
    const Var& y1, const Var& y2) {
    ApCounterexample cex;
    cex.shared = std::move(shared);
    cex.phi = std::move(phi0);
    cex.phi1 = std::move(phi1);
    cex.phi2 = std::move(phi2);
    cex.chi = std::move(chi);
    cex.y1 = y1;
    cex.y2 = y2;
    std::sort(cex.phi.begin(), cex.phi.end());
    std::sort(cex.phi1.begin(), cex.phi1.end());
    std::sort(cex.phi2.begin(), cex.phi2.end());

    std::vector<Var> full = cex.shared;
    full.push_back(cex.y1);
    full.push_back(cex.y2);
    cex.entailment = extract_sld_certificate(phi, cex.violated_clause(), full);
    std::vector<Var> side = cex.shared;
    side.push_back(cex.y1);
    cex.countermodel = canonical_countermodel(phi, cex.unsupported_clause(),
                                              &cex.countermodel_domain, side);
    cex.side1 = check_subsumption(
        phi, SubsumptionQuery{cex.phi, cex.phi1, cex.shared, {cex.y1}});
    cex.side2 = check_subsumption(
        phi, SubsumptionQuery{cex.phi, cex.phi2, cex.shared, {cex.y2}});
    if (!cex.side1.holds || !cex.side2.holds)
        throw InternalError("counterexample preconditions failed to verify");
    VerifyResult v = verify_counterexample(phi, cex);
    if (!v.ok) throw InternalError("counterexample evidence rejected: " + v.reason);
    return cex;
}

}  // namespace detail

// Amalgamates B1 and B2 over A (both one-point extensions) by saturating the
// union diagram. Success yields the closure structure with commuting
// embeddings; failure yields a verified counterexample.
inline AmalgamResult one_point_amalgam(const HornSentence& phi,
                                       const FiniteStructure& A,
                                       const FiniteStructure& B1,
                                       const FiniteStructure& B2,
                                       const StructureMap& e1,
                                       const StructureMap& e2) {
    if (B1.size != A.size + 1 || B2.size != A.size + 1)
        throw Error("B1 and B2 must extend A by exactly one element");
    if (!(e1.source == A && e2.source == A && e1.target == B1 && e2.target == B2))
        throw Error("maps do not connect A to B1 and B2");
    if (!is_embedding(e1) || !is_embedding(e2))
        throw Error("the given maps are not embeddings");
    if (!satisfies(A, phi) || !satisfies(B1, phi) || !satisfies(B2, phi))
        throw Error("A, B1, B2 must all be models of the sentence");

    int n = A.size;
    std::vector<Var> shared;
    for (int i = 0; i < n; ++i) shared.push_back("x" + std::to_string(i + 1));
    const Var y1 = "y1", y2 = "y2";

    // variable names for B_i elements, matching A across the embeddings
    auto names_for = [&](const StructureMap& e, const Var& fresh) {
        std::vector<Var> names(e.target.size);
        std::vector<bool> hit(e.target.size, false);
        for (int a = 0; a < n; ++a) {
            names[e.map[a]] = shared[a];
            hit[e.map[a]] = true;
        }
        for (int b = 0; b < e.target.size; ++b)
            if (!hit[b]) names[b] = fresh;
        return names;
    };
    std::vector<Atom> d1 = structure_to_atoms(B1, names_for(e1, y1));
    std::vector<Atom> d2 = structure_to_atoms(B2, names_for(e2, y2));

    std::vector<Var> domain = shared;
    domain.push_back(y1);
    domain.push_back(y2);
    std::vector<Atom> seed = d1;
    seed.insert(seed.end(), d2.begin(), d2.end());
    std::sort(seed.begin(), seed.end());
    seed.erase(std::unique(seed.begin(), seed.end()), seed.end());

    CanonicalStructure closure = saturate(phi, seed, domain);

    std::vector<Atom> phi0 = detail::atoms_without(seed, {y1, y2});
    std::vector<Atom> p1 = detail::atoms_with(seed, y1);
    std::vector<Atom> p2 = detail::atoms_with(seed, y2);

    if (closure.inconsistent) {
        AmalgamResult r;
        r.refutation = detail::package_counterexample(
            phi, shared, phi0, p1, p2, std::nullopt, y1, y2);
        return r;
    }

    // new atoms lying entirely within one of the two extensions refute
    std::vector<Var> b1_vars = shared;
    b1_vars.push_back(y1);
    std::vector<Var> b2_vars = shared;
    b2_vars.push_back(y2);
    std::vector<Atom> in1 = closure.restrict_to(b1_vars);
    std::vector<Atom> in2 = closure.restrict_to(b2_vars);
    std::sort(in1.begin(), in1.end());
    std::sort(in2.begin(), in2.end());
    auto first_new = [&](const std::vector<Atom>& atoms) -> std::optional<Atom> {
        for (const Atom& a : atoms)
            if (!std::binary_search(seed.begin(), seed.end(), a)) return a;
        return std::nullopt;
    };
    if (auto chi = first_new(in1)) {
        AmalgamResult r;
        r.refutation = detail::package_counterexample(phi, shared, phi0, p1, p2,
                                                      chi, y1, y2);
        return r;
    }
    if (auto chi = first_new(in2)) {
        // orient the certificate so chi mentions y1: swap the two sides
        Atom c = *chi;
        for (Var& v : c.args)
            if (v == y2) v = y1;
        AmalgamResult r;
        r.refutation = detail::package_counterexample(
            phi, shared, phi0, detail::rename_atoms(p2, y2, y1),
            detail::rename_atoms(p1, y1, y2), c, y1, y2);
        return r;
    }

    // success: the closure is the amalgam
    FiniteStructure C = atoms_to_structure(phi.sig, closure.atoms, domain);
    std::vector<int> f1(B1.size), f2(B2.size);
    for (int a = 0; a < n; ++a) {
        f1[e1.map[a]] = a;
        f2[e2.map[a]] = a;
    }
    for (int b = 0; b < B1.size; ++b)
        if (std::find(e1.map.begin(), e1.map.end(), b) == e1.map.end()) f1[b] = n;
    for (int b = 0; b < B2.size; ++b)
        if (std::find(e2.map.begin(), e2.map.end(), b) == e2.map.end())
            f2[b] = n + 1;

    Amalgam am{C, StructureMap{B1, C, f1}, StructureMap{B2, C, f2}};
    if (!is_embedding(am.f1) || !is_embedding(am.f2))
        throw InternalError("amalgam maps are not embeddings");
    if (!satisfies(C, phi))
        throw InternalError("amalgam closure is not a model");
    // strong amalgamation: images intersect exactly in the image of A
    for (int b1 = 0; b1 < B1.size; ++b1)
        for (int b2 = 0; b2 < B2.size; ++b2)
            if (f1[b1] == f2[b2] && f1[b1] >= n)
                throw InternalError("amalgam identifies the two new points");
    return {am, std::nullopt};
}

// ---------------------------------------------------------------------------
// Brute-force amalgamation oracle (direct clause evaluation only)

// Decides whether the one-point triple (A, B1, B2) with inclusion embeddings
// admits an amalgam, by trying the identifying candidate and every choice of
// cross tuples on the disjoint union. B1 and B2 share the domain 0..|A| with
// the new element |A|.
inline bool oracle_has_amalgam(const HornSentence& phi, const FiniteStructure& A,
                               const FiniteStructure& B1,
                               const FiniteStructure& B2) {
    int n = A.size;
    if (B1.size != n + 1 || B2.size != n + 1)
        throw Error("extensions must add exactly one element");

    // candidate of size n+1: identify the two new points
    if (B1.relations == B2.relations) return true;

    // candidates of size n+2: forced part plus any set of cross tuples
    FiniteStructure forced(phi.sig, n + 2);
    for (int sym = 0; sym < phi.sig.size(); ++sym) {
        for (const auto& t : B1.relations[sym]) forced.relations[sym].insert(t);
        for (const auto& t : B2.relations[sym]) {
            std::vector<int> u = t;
            for (int& e : u)
                if (e == n) e = n + 1;
            forced.relations[sym].insert(std::move(u));
        }
    }
    std::vector<std::pair<int, std::vector<int>>> cross;
    for (const auto& [sym, t] : tuple_grid(phi.sig, n + 2)) {
        bool has1 = std::find(t.begin(), t.end(), n) != t.end();
        bool has2 = std::find(t.begin(), t.end(), n + 1) != t.end();
        if (has1 && has2) cross.emplace_back(sym, t);
    }
    if (cross.size() > 22)
        throw Error("cross-tuple grid too large for the brute-force oracle");

    // a violated instance in the forced part that no cross tuple can repair
    // rules out every candidate
    std::vector<int> both{n, n + 1};
    for (const HornClause& c : phi.clauses) {
        bool permanent_violation = !detail::eval_clause(
            forced, c, [&](const std::vector<int>& asg) {
                for (int e : both)
                    if (std::find(asg.begin(), asg.end(), e) == asg.end())
                        return false;
                if (!c.conclusion) return true;  // bottom: always permanent
                std::vector<Var> vars = c.variables();
                std::map<Var, int> m;
                for (size_t i = 0; i < vars.size(); ++i) m[vars[i]] = asg[i];
                std::vector<int> t;
                for (const Var& v : c.conclusion->args) t.push_back(m.at(v));
                bool h1 = std::find(t.begin(), t.end(), n) != t.end();
                bool h2 = std::find(t.begin(), t.end(), n + 1) != t.end();
                return !(h1 && h2);  // cross conclusions are repairable
            });
        if (permanent_violation) return false;
    }

    std::uint64_t total = std::uint64_t{1} << cross.size();
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        FiniteStructure cand = forced;
        for (size_t i = 0; i < cross.size(); ++i)
            if (mask >> i & 1)
                cand.relations[cross[i].first].insert(cross[i].second);
        if (satisfies_touching(cand, phi, both)) return true;
    }
    return false;
}

struct OnePointTriple {
    FiniteStructure base, ext1, ext2;  // ext_i on 0..|base| with new element |base|

    StructureMap e1() const {
        std::vector<int> inc(base.size);
        for (int i = 0; i < base.size; ++i) inc[i] = i;
        return {base, ext1, inc};
    }
    StructureMap e2() const {
        std::vector<int> inc(base.size);
        for (int i = 0; i < base.size; ++i) inc[i] = i;
        return {base, ext2, inc};
    }
};

// Visits every one-point triple over models up to the size bound: bases are
// enumerated up to isomorphism, extension pairs up to swapping. Returning
// false stops the walk.
inline void for_each_one_point_triple(
    const HornSentence& phi, int max_size,
    const std::function<bool(const OnePointTriple&)>& fn) {
    if (max_size < 1) throw Error("max_size must be at least 1");
    std::vector<Var> names;
    for (int i = 0; i < max_size + 2; ++i)
        names.push_back("v" + std::to_string(i));

    bool stop = false;
    for (int n = 0; n + 1 <= max_size && !stop; ++n) {
        std::vector<std::string> seen;
        for_each_model(phi, n, [&](const FiniteStructure& A) {
            std::vector<Var> sub(names.begin(), names.begin() + n);
            std::string key = canonical_key(structure_to_atoms(A, sub), phi.sig);
            if (std::find(seen.begin(), seen.end(), key) != seen.end())
                return true;
            seen.push_back(key);

            // extensions: A plus tuples touching the new element n
            std::vector<std::pair<int, std::vector<int>>> fresh;
            for (const auto& [sym, t] : tuple_grid(phi.sig, n + 1))
                if (std::find(t.begin(), t.end(), n) != t.end())
                    fresh.emplace_back(sym, t);
            if (fresh.size() > 22)
                throw Error("extension grid too large for brute force");
            std::vector<FiniteStructure> exts;
            std::uint64_t total = std::uint64_t{1} << fresh.size();
            for (std::uint64_t mask = 0; mask < total; ++mask) {
                FiniteStructure B(phi.sig, n + 1);
                for (int sym = 0; sym < phi.sig.size(); ++sym)
                    B.relations[sym] = A.relations[sym];
                for (size_t i = 0; i < fresh.size(); ++i)
                    if (mask >> i & 1)
                        B.relations[fresh[i].first].insert(fresh[i].second);
                if (satisfies_touching(B, phi, {n})) exts.push_back(std::move(B));
            }
            for (size_t i = 0; i < exts.size(); ++i)
                for (size_t j = i + 1; j < exts.size(); ++j)
                    if (!fn(OnePointTriple{A, exts[i], exts[j]})) {
                        stop = true;
                        return false;
                    }
            return true;
        });
    }
}

// Exhaustive one-point amalgamation check by direct clause evaluation.
// Returns the first triple (in enumeration order) without any amalgam.
inline std::optional<OnePointTriple> brute_force_ap(const HornSentence& phi,
                                                    int max_size) {
    std::optional<OnePointTriple> found;
    for_each_one_point_triple(phi, max_size, [&](const OnePointTriple& t) {
        if (!oracle_has_amalgam(phi, t.base, t.ext1, t.ext2)) {
            found = t;
            return false;
        }
        return true;
    });
    return found;
}

}  // namespace hornap
