#pragma once

// Bounded search for counterexamples to the one-point amalgamation
// characterization: triples (phi, phi1, phi2) with phi over shared variables
// x1..xn and phi_i adding one fresh variable each, such that both one-sided
// subsumptions hold but the joint conjunction entails some chi over the
// shared variables and y1 that phi ∧ phi1 alone does not entail.
//
// Candidate triples are generated by backward chaining: every violation has a
// witness derivation whose leaves split into y1-pure, y2-pure and shared
// atoms, so enumerating derivation supports (up to the atom bound, with
// canonical variable introduction) reaches a violating representative of
// every violating triple within the bounds. Each support is then repaired to
// satisfy the subsumption preconditions (closing the shared part under
// one-sided shared consequences, which changes nothing for supports coming
// from an actual violation) and tested semantically via saturation. The
// reported counterexample is minimal under (shared variable count, total
// atoms, serialized form).

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "hornap/amalgamation.hpp"
#include "hornap/canonical.hpp"
#include "hornap/logic.hpp"
#include "hornap/saturation.hpp"

namespace hornap {

struct ApSearchResult {
    std::optional<ApCounterexample> counterexample;
    // every clause of the sentence is complete, so absence of a
    // counterexample is conclusive at any bound
    bool complete_clauses = false;
    std::uint64_t candidates_tested = 0;
};

namespace apsearch_detail {

constexpr int kY1 = -1;
constexpr int kY2 = -2;
constexpr int kUnused = -9;

// Atom over search variables: x variables are 0,1,2,..., the two extension
// variables are the negative sentinels.
struct PAtom {
    int sym = -1;
    std::array<int, 3> args{kUnused, kUnused, kUnused};
    int ar = 0;

    auto operator<=>(const PAtom&) const = default;

    bool mentions(int v) const {
        for (int i = 0; i < ar; ++i)
            if (args[i] == v) return true;
        return false;
    }
    int max_x() const {
        int m = -1;
        for (int i = 0; i < ar; ++i) m = std::max(m, args[i]);
        return m;
    }
};

inline Var var_name(int id) {
    if (id == kY1) return "y1";
    if (id == kY2) return "y2";
    return "x" + std::to_string(id + 1);
}

inline Atom to_named(const PAtom& a) {
    Atom out{a.sym, {}};
    for (int i = 0; i < a.ar; ++i) out.args.push_back(var_name(a.args[i]));
    return out;
}

struct Candidate {
    std::vector<PAtom> leaves;  // sorted
    int used_x = 0;
};

// Compact byte encoding of a leaf set, normalized under swapping the two
// extension variables. Exact (no hashing), so deduplication never drops a
// genuinely new candidate.
inline std::string candidate_code(const std::vector<PAtom>& leaves, int used_x) {
    auto enc = [&](bool swap_y) {
        std::string s;
        s.reserve(leaves.size() * 4 + 1);
        s.push_back(static_cast<char>(used_x));
        std::vector<PAtom> copy;
        const std::vector<PAtom>* src = &leaves;
        if (swap_y) {
            copy = leaves;
            for (PAtom& a : copy)
                for (int i = 0; i < a.ar; ++i) {
                    if (a.args[i] == kY1) a.args[i] = kY2;
                    else if (a.args[i] == kY2) a.args[i] = kY1;
                }
            std::sort(copy.begin(), copy.end());
            src = &copy;
        }
        for (const PAtom& a : *src) {
            if (a.sym > 0x7ffe)
                throw InternalError("signature too large for candidate encoding");
            s.push_back(static_cast<char>(a.sym & 0x7f));
            s.push_back(static_cast<char>((a.sym >> 7) & 0xff));
            for (int i = 0; i < a.ar; ++i)
                s.push_back(static_cast<char>(a.args[i] + 16));
        }
        return s;
    };
    return std::min(enc(false), enc(true));
}

class Search {
public:
    Search(const HornSentence& phi, int max_vars, int max_atoms)
        : phi_(phi), compiled_(phi), max_vars_(max_vars), max_atoms_(max_atoms) {
        if (max_vars < 1 || max_atoms < 1)
            throw Error("counterexample search bounds must be at least 1");

        conjuring_ = false;
        by_symbol_.assign(phi.sig.size(), {});
        derivable_.assign(phi.sig.size(), false);
        for (size_t ci = 0; ci < phi.clauses.size(); ++ci) {
            const HornClause& c = phi.clauses[ci];
            if (c.concludes_bottom()) {
                bottoms_.push_back(static_cast<int>(ci));
            } else {
                by_symbol_[c.conclusion->symbol].push_back(static_cast<int>(ci));
                derivable_[c.conclusion->symbol] = true;
            }
            if (c.conclusion) {
                std::vector<Var> pv;
                for (const Atom& a : c.premise)
                    for (const Var& v : a.args) pv.push_back(v);
                for (const Var& v : c.conclusion->args)
                    if (std::find(pv.begin(), pv.end(), v) == pv.end())
                        conjuring_ = true;
            }
        }
    }

    ApSearchResult run() {
        ApSearchResult result;
        result.complete_clauses = true;
        for (const HornClause& c : phi_.clauses)
            if (!is_complete_clause(c)) result.complete_clauses = false;

        auto t0 = std::chrono::steady_clock::now();
        collect_candidates();
        result.candidates_tested = raw_hits_;
        if (best_) result.counterexample = package(*best_);
        auto t1 = std::chrono::steady_clock::now();
        if (std::getenv("HORNAP_SEARCH_STATS"))
            std::fprintf(stderr, "[search] nodes=%llu cands=%llu secs=%.1f\n",
                         (unsigned long long)nodes_, (unsigned long long)raw_hits_,
                         std::chrono::duration<double>(t1 - t0).count());
        return result;
    }

private:
    struct Violation {
        std::vector<Var> shared;
        std::vector<Atom> phi0, p1, p2;
        std::optional<Atom> chi;
    };

    struct Subgoal {
        PAtom atom;
        int anc = -1;  // arena chain of expanded ancestors
    };
    struct AncNode {
        PAtom atom;
        int parent = -1;
    };

    // ---- candidate generation -------------------------------------------

    void collect_candidates() {
        // bottom-rooted supports
        for (int ci : bottoms_) {
            std::vector<Subgoal> open;
            std::vector<PAtom> leaves;
            std::vector<int> binding(compiled_.clauses[ci].nvars, kUnused);
            arena_.clear();
            closures_.assign(1, {});
            assign_free(ci, 0, binding, -1, open, leaves, 0);
        }
        // atom-rooted supports, goal over x variables and optionally y1
        for (int sym = 0; sym < phi_.sig.size(); ++sym) {
            PAtom g;
            g.sym = sym;
            g.ar = phi_.sig.arity(sym);
            enumerate_goal_args(g, 0, 0);
        }
    }

    void enumerate_goal_args(PAtom& g, int pos, int used) {
        if (pos == g.ar) {
            std::vector<Subgoal> open{Subgoal{g, -1}};
            std::vector<PAtom> leaves;
            arena_.clear();
            closures_.assign(1, {});
            dfs(open, leaves, used);
            return;
        }
        for (int v = 0; v < used; ++v) {
            g.args[pos] = v;
            enumerate_goal_args(g, pos + 1, used);
        }
        if (used < max_vars_) {
            g.args[pos] = used;
            enumerate_goal_args(g, pos + 1, used + 1);
        }
        g.args[pos] = kY1;
        enumerate_goal_args(g, pos + 1, used);
    }

    void dfs(std::vector<Subgoal>& open, std::vector<PAtom>& leaves, int used_x) {
        if (++nodes_ > kNodeBudget)
            throw Error("counterexample search exceeded its node budget; "
                        "lower --max-vars/--max-atoms");
        if (open.empty()) {
            emit(leaves, used_x);
            return;
        }
        Subgoal g = open.back();
        open.pop_back();

        // a subgoal already derivable from the current leaves resolves for
        // free; minimal supports are unaffected, and committing to the free
        // resolution prunes the non-minimal bulk
        if (already_supported(g.atom)) {
            dfs(open, leaves, used_x);
            open.push_back(std::move(g));
            return;
        }

        bool mixed = g.atom.mentions(kY1) && g.atom.mentions(kY2);

        // choice 1: make the subgoal a leaf of the support
        if (!mixed && static_cast<int>(leaves.size()) < max_atoms_) {
            auto it = std::lower_bound(leaves.begin(), leaves.end(), g.atom);
            size_t at = it - leaves.begin();
            leaves.insert(leaves.begin() + at, g.atom);
            push_closure({g.atom}, used_x);
            dfs(open, leaves, used_x);
            pop_closure();
            leaves.erase(leaves.begin() + at);
        }

        // choice 2: expand via a clause instance concluding the subgoal
        for (int ci : by_symbol_[g.atom.sym]) {
            const auto& cc = compiled_.clauses[ci];
            std::vector<int> binding(cc.nvars, kUnused);
            bool ok = true;
            for (size_t i = 0; i < cc.concl_vars.size(); ++i) {
                int cv = cc.concl_vars[i];
                if (binding[cv] == kUnused) binding[cv] = g.atom.args[i];
                else if (binding[cv] != g.atom.args[i]) { ok = false; break; }
            }
            if (!ok) continue;
            int anc = static_cast<int>(arena_.size());
            arena_.push_back(AncNode{g.atom, g.anc});
            assign_free(ci, 0, binding, anc, open, leaves, used_x);
            arena_.pop_back();
        }

        open.push_back(std::move(g));
    }

    void assign_free(int ci, int from, std::vector<int>& binding, int anc,
                     std::vector<Subgoal>& open, std::vector<PAtom>& leaves,
                     int used_x) {
        const auto& cc = compiled_.clauses[ci];
        int k = from;
        while (k < cc.nvars && binding[k] != kUnused) ++k;
        if (k == cc.nvars) {
            expand_with(ci, binding, anc, open, leaves, used_x);
            return;
        }
        for (int t = 0; t < used_x; ++t) {
            binding[k] = t;
            assign_free(ci, k + 1, binding, anc, open, leaves, used_x);
        }
        binding[k] = kY1;
        assign_free(ci, k + 1, binding, anc, open, leaves, used_x);
        binding[k] = kY2;
        assign_free(ci, k + 1, binding, anc, open, leaves, used_x);
        if (used_x < max_vars_) {
            binding[k] = used_x;
            assign_free(ci, k + 1, binding, anc, open, leaves, used_x + 1);
        }
        binding[k] = kUnused;
    }

    void expand_with(int ci, const std::vector<int>& binding, int anc,
                     std::vector<Subgoal>& open, std::vector<PAtom>& leaves,
                     int used_x) {
        const auto& cc = compiled_.clauses[ci];
        size_t pushed = 0;
        std::vector<size_t> inserted;  // positions of leaves added here
        bool ok = true;

        for (const auto& [sym, ix] : cc.premise) {
            PAtom p;
            p.sym = sym;
            p.ar = static_cast<int>(ix.size());
            for (size_t i = 0; i < ix.size(); ++i) p.args[i] = binding[ix[i]];

            auto it = std::lower_bound(leaves.begin(), leaves.end(), p);
            if (it != leaves.end() && *it == p) continue;  // already supported

            if (!derivable_[sym]) {
                // leaf-only atom: resolve immediately
                if ((p.mentions(kY1) && p.mentions(kY2)) ||
                    static_cast<int>(leaves.size()) >= max_atoms_) {
                    ok = false;
                    break;
                }
                size_t at = it - leaves.begin();
                leaves.insert(leaves.begin() + at, p);
                inserted.push_back(at);
                continue;
            }
            // cycle pruning: supports of well-founded derivations suffice
            bool cyc = false;
            for (int a = anc; a >= 0; a = arena_[a].parent)
                if (arena_[a].atom == p) {
                    cyc = true;
                    break;
                }
            if (cyc) {
                ok = false;
                break;
            }
            open.push_back(Subgoal{p, anc});
            ++pushed;
        }

        if (ok) {
            if (!inserted.empty()) {
                std::vector<PAtom> fresh;
                fresh.reserve(inserted.size());
                for (size_t at : inserted) fresh.push_back(leaves[at]);
                push_closure(fresh, used_x);
            }
            dfs(open, leaves, used_x);
            if (!inserted.empty()) pop_closure();
        }
        open.resize(open.size() - pushed);
        for (auto rit = inserted.rbegin(); rit != inserted.rend(); ++rit)
            leaves.erase(leaves.begin() + *rit);
    }

    void emit(const std::vector<PAtom>& leaves, int used_x) {
        if (!conjuring_) {
            bool any1 = false, any2 = false;
            for (const PAtom& a : leaves) {
                if (a.mentions(kY1)) any1 = true;
                if (a.mentions(kY2)) any2 = true;
            }
            // without conclusion-only variables a one-sided support can never
            // violate: the repaired shared part absorbs everything
            if (!any1 || !any2) return;
        }
        if (!seen_.insert(candidate_code(leaves, used_x)).second) return;
        if (++raw_hits_ > kCandidateBudget)
            throw Error("counterexample search exceeded its candidate "
                        "budget; lower --max-vars/--max-atoms");

        Candidate cand{leaves, used_x};
        auto found = filter(cand);
        if (!found) return;
        std::string key = order_key(*found);
        if (!best_ || key < best_key_) {
            best_ = std::move(found);
            best_key_ = std::move(key);
        }
    }

    // ---- leaf-closure stack ----------------------------------------------
    // One closure of the current leaf set per insertion point, kept as sorted
    // search-space atoms. With conclusion-only variables in the sentence the
    // closure would depend on the variable budget, so the free-resolution
    // shortcut is disabled there.

    struct LeafClosure {
        int u = 0;                  // variable budget the bitset is packed for
        std::vector<bool> present;  // membership over domain u + 2
        std::vector<PAtom> atoms;   // closure contents (unsorted), for repacking
        bool bottom = false;        // everything counts as supported
    };

    detail::DAtom lower_atom(const PAtom& p, int u) const {
        detail::DAtom d{p.sym, {}};
        for (int i = 0; i < p.ar; ++i) {
            int v = p.args[i];
            d.args.push_back(v == kY1 ? u : v == kY2 ? u + 1 : v);
        }
        return d;
    }

    bool already_supported(const PAtom& a) {
        if (conjuring_) return false;
        const LeafClosure& c = closures_.back();
        if (c.bottom) return true;
        if (c.present.empty()) return false;  // root: nothing chosen yet
        detail::IntSaturator probe(compiled_, phi_.sig, c.u + 2);
        // packing only; the probe holds no state of its own
        return c.present[probe.pack(lower_atom(a, c.u))];
    }

    // Extends the top closure by the given new leaves. The base is closed, so
    // only instances involving a new atom can fire; without conclusion-only
    // variables neither closedness nor the closure contents depend on the
    // variable budget, so a budget change just repacks the bitset.
    void push_closure(const std::vector<PAtom>& added, int used_x) {
        if (conjuring_) return;
        const LeafClosure& top = closures_.back();
        if (top.bottom) {
            closures_.push_back(top);
            return;
        }
        const int u = used_x;
        detail::IntSaturator sat(compiled_, phi_.sig, u + 2);
        LeafClosure next;
        next.u = u;
        next.atoms = top.atoms;
        if (top.u == u && !top.present.empty()) {
            sat.adopt(top.present);
        } else {
            for (const PAtom& p : top.atoms)
                sat.adopt_atom(sat.pack(lower_atom(p, u)));
        }
        std::vector<detail::DAtom> fresh;
        fresh.reserve(added.size());
        for (const PAtom& p : added) fresh.push_back(lower_atom(p, u));
        detail::DResult r = sat.run_incremental(fresh);
        next.bottom = r.inconsistent;
        for (const detail::DAtom& d : r.atoms) {
            PAtom p;
            p.sym = d.sym;
            p.ar = static_cast<int>(d.args.size());
            for (size_t i = 0; i < d.args.size(); ++i) {
                int v = d.args[i];
                p.args[i] = v == u ? kY1 : v == u + 1 ? kY2 : v;
            }
            next.atoms.push_back(p);
        }
        next.present = sat.release_present();
        closures_.push_back(std::move(next));
    }

    void pop_closure() {
        if (conjuring_) return;
        closures_.pop_back();
    }

    // ---- candidate filtering --------------------------------------------

    // domain layout: x variables at 0..u-1; the side variable at u; in the
    // joint domain y1 at u and y2 at u+1
    detail::DAtom to_datom(const PAtom& p, int u, int y2_at) const {
        detail::DAtom d{p.sym, {}};
        for (int i = 0; i < p.ar; ++i) {
            int v = p.args[i];
            if (v == kY1) v = u;
            else if (v == kY2) v = y2_at;
            d.args.push_back(v);
        }
        return d;
    }

    std::optional<Violation> filter(const Candidate& cand) {
        const int u = cand.used_x;
        std::vector<PAtom> l0, l1, l2;
        for (const PAtom& a : cand.leaves) {
            if (a.mentions(kY1)) l1.push_back(a);
            else if (a.mentions(kY2)) l2.push_back(a);
            else l0.push_back(a);
        }

        // repair: close the shared part under one-sided shared consequences
        std::vector<detail::DAtom> phi0;  // over 0..u-1
        for (const PAtom& a : l0) phi0.push_back(to_datom(a, u, u));
        std::sort(phi0.begin(), phi0.end());

        auto side_seeds = [&](const std::vector<PAtom>& side, int y_at) {
            std::vector<detail::DAtom> seeds = phi0;
            for (const PAtom& a : side) seeds.push_back(to_datom(a, y_at, y_at));
            return seeds;
        };

        std::optional<detail::IntSaturator> s1, s2;
        while (true) {
            s1.emplace(compiled_, phi_.sig, u + 1);
            detail::DResult r1 = s1->run(side_seeds(l1, u), false);
            if (r1.inconsistent) return std::nullopt;
            s2.emplace(compiled_, phi_.sig, u + 1);
            detail::DResult r2 = s2->run(side_seeds(l2, u), false);
            if (r2.inconsistent) return std::nullopt;

            std::vector<detail::DAtom> grow;
            auto collect = [&](const detail::DResult& r) {
                for (const detail::DAtom& a : r.atoms) {
                    bool shared_only = true;
                    for (int v : a.args)
                        if (v >= u) shared_only = false;
                    if (shared_only &&
                        !std::binary_search(phi0.begin(), phi0.end(), a))
                        grow.push_back(a);
                }
            };
            collect(r1);
            collect(r2);
            if (grow.empty()) break;
            phi0.insert(phi0.end(), grow.begin(), grow.end());
            std::sort(phi0.begin(), phi0.end());
            phi0.erase(std::unique(phi0.begin(), phi0.end()), phi0.end());
        }

        // the joint closure over x1..xu, y1, y2
        std::vector<detail::DAtom> joint = phi0;
        for (const PAtom& a : l1) joint.push_back(to_datom(a, u, u + 1));
        for (const PAtom& a : l2) joint.push_back(to_datom(a, u, u + 1));
        detail::IntSaturator su(compiled_, phi_.sig, u + 2);
        detail::DResult ru = su.run(std::move(joint), false);

        auto to_violation = [&](std::optional<Atom> chi, bool swap) {
            Violation v;
            for (int i = 0; i < u; ++i) v.shared.push_back(var_name(i));
            for (const detail::DAtom& a : phi0) {
                Atom n{a.sym, {}};
                for (int x : a.args) n.args.push_back(var_name(x));
                v.phi0.push_back(std::move(n));
            }
            std::vector<Atom> n1, n2;
            for (const PAtom& a : l1) n1.push_back(to_named(a));
            for (const PAtom& a : l2) n2.push_back(to_named(a));
            if (!swap) {
                v.p1 = std::move(n1);
                v.p2 = std::move(n2);
            } else {
                v.p1 = detail::rename_atoms(n2, "y2", "y1");
                v.p2 = detail::rename_atoms(n1, "y1", "y2");
            }
            v.chi = std::move(chi);
            return v;
        };

        if (ru.inconsistent) {
            // both orientations witness a bottom violation; normalize
            Violation a = to_violation(std::nullopt, false);
            Violation b = to_violation(std::nullopt, true);
            return order_key(a) <= order_key(b) ? a : b;
        }

        for (const detail::DAtom& a : ru.atoms) {
            bool in1 = true, in2 = true;
            for (int v : a.args) {
                if (v == u + 1) in1 = false;  // mentions y2
                if (v == u) in2 = false;      // mentions y1
            }
            if (in1 && !s1->has(a)) {
                Atom chi{a.sym, {}};
                for (int x : a.args) chi.args.push_back(var_name(x == u ? kY1 : x));
                return to_violation(chi, false);
            }
            if (in2) {
                detail::DAtom m = a;  // map y2 down to the side slot
                for (int& v : m.args)
                    if (v == u + 1) v = u;
                if (!s2->has(m)) {
                    Atom chi{m.sym, {}};
                    for (int x : m.args)
                        chi.args.push_back(var_name(x == u ? kY1 : x));
                    return to_violation(chi, true);
                }
            }
        }
        return std::nullopt;
    }

    // (shared variable count, total atoms, fixed serialization); candidates
    // are already deduplicated up to variable bijections, so the serialized
    // tail only breaks ties deterministically
    std::string order_key(const Violation& v) {
        int atoms = static_cast<int>(v.phi0.size() + v.p1.size() + v.p2.size());
        char buf[32];
        std::snprintf(buf, sizeof buf, "%04zu|%04d|", v.shared.size(), atoms);
        std::string key(buf);
        auto add = [&](const std::vector<Atom>& part) {
            std::vector<Atom> sorted = part;
            std::sort(sorted.begin(), sorted.end());
            for (const Atom& a : sorted) key += a.str(phi_.sig) + " ";
            key += "|";
        };
        add(v.phi0);
        add(v.p1);
        add(v.p2);
        return key;
    }

    ApCounterexample package(const Violation& v) {
        return detail::package_counterexample(phi_, v.shared, v.phi0, v.p1,
                                              v.p2, v.chi, "y1", "y2");
    }

    static constexpr std::uint64_t kNodeBudget = 400'000'000;
    static constexpr std::uint64_t kCandidateBudget = 3'000'000;

    const HornSentence& phi_;
    detail::CompiledSentence compiled_;
    int max_vars_, max_atoms_;
    bool conjuring_ = false;
    std::uint64_t nodes_ = 0, raw_hits_ = 0;
    std::vector<std::vector<int>> by_symbol_;
    std::vector<int> bottoms_;
    std::vector<bool> derivable_;
    std::vector<AncNode> arena_;
    std::vector<LeafClosure> closures_{{}};
    std::unordered_set<std::string> seen_;
    std::optional<Violation> best_;
    std::string best_key_;
};

}  // namespace apsearch_detail

// Searches for a counterexample among triples with at most max_shared_vars
// shared variables and max_atoms total atoms. Absence of a result proves the
// amalgamation property only up to the bounds (except for complete-clause
// sentences, where it is conclusive).
//
// The search deepens the variable budget iteratively, with the atom budget
// coupled to the level: a level-v run enumerates every candidate with at most
// v shared variables and at most min(max_atoms, 3v+2) atoms (an extension
// variable contributes at most one incident atom per shared variable on each
// side plus two anchors, which is also the shape of the bound coupling used
// by the word/amalgamation cross-check). The last level covers the full
// rectangle whenever max_atoms <= 3*max_shared_vars + 2; the first level
// containing a violation yields the reported, minimal one.
inline ApSearchResult find_ap_counterexample(const HornSentence& phi,
                                             int max_shared_vars,
                                             int max_atoms) {
    ApSearchResult total;
    for (int v = 1; v <= max_shared_vars; ++v) {
        int atoms = std::min(max_atoms, 3 * v + 2);
        apsearch_detail::Search s(phi, v, atoms);
        ApSearchResult r = s.run();
        total.complete_clauses = r.complete_clauses;
        total.candidates_tested += r.candidates_tested;
        if (r.counterexample) {
            total.counterexample = std::move(r.counterexample);
            return total;
        }
    }
    return total;
}

}  // namespace hornap
