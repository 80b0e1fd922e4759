#pragma once

// Forward-chaining saturation of a Horn sentence over a fixed variable
// domain. The closure is the least atom set over the domain closed under all
// clause instances; a clause whose conclusion variable does not occur in its
// premise is instantiated over every domain element for that variable.
//
// Rule applications are processed in a fixed order (clause index, then
// lexicographic assignment) and every derivation step is recorded on request,
// so traces are reproducible and certificates can be replayed from them.
//
// The core engine works over integer-packed atoms with clauses compiled once
// per sentence; the string-typed wrappers translate at the boundary.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hornap/logic.hpp"

namespace hornap {

namespace detail {

// Atom over domain indices, packed as (symbol, arguments).
struct DAtom {
    int sym = -1;
    std::vector<int> args;
    auto operator<=>(const DAtom&) const = default;
};

struct CompiledSentence {
    struct Clause {
        std::vector<Var> vars;  // first-occurrence order
        int nvars = 0;
        std::vector<std::pair<int, std::vector<int>>> premise;  // sym, var idx
        int concl_sym = -1;  // -1: bottom
        std::vector<int> concl_vars;
        std::vector<std::vector<int>> ready_at;  // level -> premise indices
    };
    // instance enumeration with one premise atom pinned
    struct PinPlan {
        int clause = -1, pos = -1;
        std::vector<int> freev;                // unbound variables, in order
        std::vector<std::vector<int>> ready;   // per level: premise indices
    };
    const HornSentence* source = nullptr;
    std::vector<Clause> clauses;
    std::vector<std::vector<PinPlan>> pin_plans;  // premise symbol -> plans

    explicit CompiledSentence(const HornSentence& phi) : source(&phi) {
        for (const HornClause& c : phi.clauses) {
            Clause cc;
            cc.vars = c.variables();
            cc.nvars = static_cast<int>(cc.vars.size());
            auto vidx = [&](const Var& v) {
                return static_cast<int>(
                    std::find(cc.vars.begin(), cc.vars.end(), v) -
                    cc.vars.begin());
            };
            for (const Atom& a : c.premise) {
                std::vector<int> ix;
                for (const Var& v : a.args) ix.push_back(vidx(v));
                cc.premise.emplace_back(a.symbol, std::move(ix));
            }
            if (c.conclusion) {
                cc.concl_sym = c.conclusion->symbol;
                for (const Var& v : c.conclusion->args)
                    cc.concl_vars.push_back(vidx(v));
            }
            cc.ready_at.assign(std::max(cc.nvars, 1), {});
            for (size_t p = 0; p < cc.premise.size(); ++p) {
                int deepest = 0;
                for (int v : cc.premise[p].second) deepest = std::max(deepest, v);
                if (cc.nvars > 0)
                    cc.ready_at[deepest].push_back(static_cast<int>(p));
            }
            clauses.push_back(std::move(cc));
        }
        int nsym = phi.sig.size();
        pin_plans.assign(nsym, {});
        for (size_t ci = 0; ci < clauses.size(); ++ci) {
            const Clause& cc = clauses[ci];
            for (size_t pi = 0; pi < cc.premise.size(); ++pi) {
                PinPlan plan;
                plan.clause = static_cast<int>(ci);
                plan.pos = static_cast<int>(pi);
                std::vector<bool> bound(cc.nvars, false);
                for (int v : cc.premise[pi].second) bound[v] = true;
                for (int v = 0; v < cc.nvars; ++v)
                    if (!bound[v]) plan.freev.push_back(v);
                plan.ready.assign(plan.freev.size() + 1, {});
                for (size_t qi = 0; qi < cc.premise.size(); ++qi) {
                    if (qi == pi) continue;
                    size_t deepest = 0;
                    for (int v : cc.premise[qi].second)
                        for (size_t k = 0; k < plan.freev.size(); ++k)
                            if (plan.freev[k] == v)
                                deepest = std::max(deepest, k + 1);
                    plan.ready[deepest].push_back(static_cast<int>(qi));
                }
                pin_plans[cc.premise[pi].first].push_back(std::move(plan));
            }
        }
    }
};

// One firing over domain indices.
struct DTrace {
    std::optional<DAtom> atom;  // absent for a bottom firing
    int clause = -1;
    std::vector<int> assignment;  // clause variable index -> domain index
};

struct DResult {
    int domain_size = 0;
    std::vector<DAtom> atoms;   // seeds (sorted) first, then derivation order
    size_t seed_count = 0;
    bool inconsistent = false;
    std::vector<DTrace> steps;             // only when tracing
    std::optional<DTrace> bottom;

    bool contains_id(std::uint64_t id, const std::vector<bool>& present) const {
        return present[id];
    }
};

class IntSaturator {
public:
    IntSaturator(const CompiledSentence& cs, const Signature& sig, int n)
        : cs_(cs), n_(n) {
        base_.resize(sig.size() + 1, 0);
        for (int s = 0; s < sig.size(); ++s) {
            std::uint64_t cnt = 1;
            for (int i = 0; i < sig.arity(s); ++i) cnt *= std::max(n_, 1);
            base_[s + 1] = base_[s] + cnt;
        }
        present_.assign(base_.back(), false);
    }

    std::uint64_t pack(const DAtom& a) const {
        std::uint64_t id = base_[a.sym];
        std::uint64_t mul = 1;
        for (int v : a.args) {
            id += mul * static_cast<std::uint64_t>(v);
            mul *= n_;
        }
        return id;
    }

    bool has(const DAtom& a) const { return n_ > 0 && present_[pack(a)]; }

    // seeds must be over 0..n-1; sorted and deduplicated by the caller or not
    DResult run(std::vector<DAtom> seeds, bool trace) {
        std::sort(seeds.begin(), seeds.end());
        seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
        DResult res;
        res.domain_size = n_;
        for (const DAtom& a : seeds) {
            for (int v : a.args)
                if (v < 0 || v >= n_) throw Error("seed atom outside the domain");
            std::uint64_t id = pack(a);
            if (!present_[id]) {
                present_[id] = true;
                res.atoms.push_back(a);
            }
        }
        res.seed_count = res.atoms.size();

        bool changed = true;
        while (changed && !res.inconsistent) {
            changed = false;
            for (size_t ci = 0; ci < cs_.clauses.size(); ++ci)
                if (fire(ci, res, changed, trace)) break;
        }
        return res;
    }

    const std::vector<bool>& present() const { return present_; }
    std::vector<bool> release_present() { return std::move(present_); }

    // Installs an externally kept membership bitset (as produced by
    // release_present for the same signature and domain size).
    void adopt(const std::vector<bool>& present) {
        if (present.size() != present_.size())
            throw InternalError("adopted closure has the wrong domain");
        present_ = present;
    }

    void adopt_atom(std::uint64_t id) { present_[id] = true; }

    // Extends an already closed membership state by `added`, firing only
    // instances that involve a new atom (the base is closed, so nothing else
    // can fire). Returns the newly derived atoms, or inconsistency.
    DResult run_incremental(const std::vector<DAtom>& added) {
        DResult res;
        res.domain_size = n_;
        std::vector<DAtom> frontier;
        for (const DAtom& a : added) {
            std::uint64_t id = pack(a);
            if (!present_[id]) {
                present_[id] = true;
                res.atoms.push_back(a);
                frontier.push_back(a);
            }
        }
        res.seed_count = res.atoms.size();
        for (size_t fi = 0; fi < frontier.size(); ++fi) {
            DAtom cur = frontier[fi];  // copy: frontier may grow
            for (const auto& plan : cs_.pin_plans[cur.sym])
                if (!fire_pinned(plan, cur, res, frontier)) return res;
        }
        return res;
    }

private:
    bool premise_at(const std::vector<std::pair<int, std::vector<int>>>& prem,
                    size_t qi, const std::vector<int>& asg) const {
        const auto& [sym, ix] = prem[qi];
        std::uint64_t id = base_[sym];
        std::uint64_t mul = 1;
        for (int v : ix) {
            id += mul * static_cast<std::uint64_t>(asg[v]);
            mul *= n_;
        }
        return present_[id];
    }

    // Fires all instances of the plan's clause whose pinned premise atom
    // equals `pin`. Returns false iff bottom was derived.
    bool fire_pinned(const CompiledSentence::PinPlan& plan, const DAtom& pin,
                     DResult& res, std::vector<DAtom>& frontier) {
        const auto& cc = cs_.clauses[plan.clause];
        int asg_buf[16];
        if (cc.nvars > 16) throw InternalError("clause has too many variables");
        std::vector<int> asg(asg_buf, asg_buf + cc.nvars);  // small, reused below
        for (int v = 0; v < cc.nvars; ++v) asg[v] = -1;
        const auto& pix = cc.premise[plan.pos].second;
        for (size_t i = 0; i < pix.size(); ++i) {
            int v = pix[i];
            if (asg[v] < 0) asg[v] = pin.args[i];
            else if (asg[v] != pin.args[i]) return true;
        }
        const std::vector<int>& freev = plan.freev;
        const std::vector<std::vector<int>>& ready = plan.ready;
        auto emit_instance = [&](const std::vector<int>& full) -> bool {
            if (cc.concl_sym < 0) {
                res.inconsistent = true;
                return false;
            }
            DAtom a{cc.concl_sym, {}};
            std::uint64_t id = base_[cc.concl_sym];
            std::uint64_t mul = 1;
            for (int v : cc.concl_vars) {
                id += mul * static_cast<std::uint64_t>(full[v]);
                mul *= n_;
                a.args.push_back(full[v]);
            }
            if (!present_[id]) {
                present_[id] = true;
                res.atoms.push_back(a);
                frontier.push_back(std::move(a));
            }
            return true;
        };
        auto ready_ok = [&](size_t level) {
            for (int qi : ready[level])
                if (!premise_at(cc.premise, qi, asg)) return false;
            return true;
        };
        if (!ready_ok(0)) return true;
        if (freev.empty()) return emit_instance(asg);
        if (n_ == 0) return true;
        size_t level = 0;
        asg[freev[0]] = 0;
        while (true) {
            if (asg[freev[level]] >= n_) {
                asg[freev[level]] = -1;
                if (level == 0) return true;
                --level;
                ++asg[freev[level]];
                continue;
            }
            if (!ready_ok(level + 1)) {
                ++asg[freev[level]];
                continue;
            }
            if (level + 1 < freev.size()) {
                ++level;
                asg[freev[level]] = 0;
                continue;
            }
            if (!emit_instance(asg)) return false;
            ++asg[freev[level]];
        }
    }
    bool fire(size_t ci, DResult& res, bool& changed, bool trace) {
        const auto& cc = cs_.clauses[ci];
        if (cc.nvars == 0) {
            if (!cc.premise.empty() || cc.concl_sym >= 0) return false;
            res.inconsistent = true;
            res.bottom = DTrace{std::nullopt, static_cast<int>(ci), {}};
            return true;
        }
        if (n_ == 0) return false;
        std::vector<int> asg(cc.nvars, 0);
        int level = 0;
        while (level >= 0) {
            if (asg[level] >= n_) {
                asg[level] = 0;
                --level;
                if (level >= 0) ++asg[level];
                continue;
            }
            bool ok = true;
            for (int pi : cc.ready_at[level]) {
                const auto& [sym, ix] = cc.premise[pi];
                std::uint64_t id = base_[sym];
                std::uint64_t mul = 1;
                for (int v : ix) {
                    id += mul * static_cast<std::uint64_t>(asg[v]);
                    mul *= n_;
                }
                if (!present_[id]) {
                    ok = false;
                    break;
                }
            }
            if (!ok) {
                ++asg[level];
                continue;
            }
            if (level + 1 < cc.nvars) {
                ++level;
                asg[level] = 0;
                continue;
            }
            // full assignment with satisfied premise
            if (cc.concl_sym < 0) {
                res.inconsistent = true;
                res.bottom = DTrace{std::nullopt, static_cast<int>(ci), asg};
                return true;
            }
            std::uint64_t id = base_[cc.concl_sym];
            std::uint64_t mul = 1;
            DAtom a{cc.concl_sym, {}};
            for (int v : cc.concl_vars) {
                id += mul * static_cast<std::uint64_t>(asg[v]);
                mul *= n_;
                a.args.push_back(asg[v]);
            }
            if (!present_[id]) {
                present_[id] = true;
                res.atoms.push_back(a);
                if (trace)
                    res.steps.push_back(DTrace{std::move(a), static_cast<int>(ci), asg});
                changed = true;
            }
            ++asg[level];
        }
        return false;
    }

    const CompiledSentence& cs_;
    int n_;
    std::vector<std::uint64_t> base_;
    std::vector<bool> present_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Named interface

struct CanonicalStructure {
    std::vector<Var> domain;   // fixed order
    std::vector<Atom> atoms;   // derivation order: seeds first, then derived
    bool inconsistent = false;

    bool contains(const Atom& a) const {
        return std::find(atoms.begin(), atoms.end(), a) != atoms.end();
    }

    // Atoms whose variables all lie in `vars`.
    std::vector<Atom> restrict_to(const std::vector<Var>& vars) const {
        std::vector<Atom> out;
        for (const Atom& a : atoms) {
            bool ok = true;
            for (const Var& v : a.args)
                if (std::find(vars.begin(), vars.end(), v) == vars.end()) {
                    ok = false;
                    break;
                }
            if (ok) out.push_back(a);
        }
        return out;
    }
};

// One clause firing: `atom` was added by instantiating clause `clause` with
// `assignment` (clause variable -> domain variable). A bottom firing carries
// no atom.
struct TraceStep {
    std::optional<Atom> atom;
    int clause = -1;
    Substitution assignment;
};

struct SaturationResult {
    CanonicalStructure closure;
    std::vector<Atom> seeds;            // normalized start atoms
    std::vector<TraceStep> steps;       // in derivation order
    std::optional<TraceStep> bottom;    // set iff inconsistent

    // Producer step for a derived atom; nullptr for seeds.
    const TraceStep* producer(const Atom& a) const {
        for (const TraceStep& s : steps)
            if (s.atom && *s.atom == a) return &s;
        return nullptr;
    }
};

namespace detail {

inline DAtom to_datom(const Atom& a, const std::vector<Var>& domain) {
    DAtom d{a.symbol, {}};
    for (const Var& v : a.args) {
        auto it = std::find(domain.begin(), domain.end(), v);
        if (it == domain.end())
            throw Error("atom variable '" + v + "' outside domain");
        d.args.push_back(static_cast<int>(it - domain.begin()));
    }
    return d;
}

inline Atom from_datom(const DAtom& d, const std::vector<Var>& domain) {
    Atom a{d.sym, {}};
    for (int v : d.args) a.args.push_back(domain[v]);
    return a;
}

}  // namespace detail

inline SaturationResult saturate_traced(const HornSentence& phi,
                                        const std::vector<Atom>& start,
                                        const std::vector<Var>& domain) {
    detail::CompiledSentence cs(phi);
    detail::IntSaturator sat(cs, phi.sig, static_cast<int>(domain.size()));
    std::vector<detail::DAtom> seeds;
    seeds.reserve(start.size());
    for (const Atom& a : start) seeds.push_back(detail::to_datom(a, domain));
    detail::DResult r = sat.run(std::move(seeds), true);

    SaturationResult out;
    out.closure.domain = domain;
    out.closure.inconsistent = r.inconsistent;
    for (const detail::DAtom& d : r.atoms)
        out.closure.atoms.push_back(detail::from_datom(d, domain));
    out.seeds.assign(out.closure.atoms.begin(),
                     out.closure.atoms.begin() + r.seed_count);

    auto lift = [&](const detail::DTrace& t) {
        TraceStep s;
        if (t.atom) s.atom = detail::from_datom(*t.atom, domain);
        s.clause = t.clause;
        Substitution sub;
        const auto& cc = cs.clauses[t.clause];
        for (int v = 0; v < cc.nvars; ++v)
            sub.bind(cc.vars[v], domain[t.assignment[v]]);
        s.assignment = std::move(sub);
        return s;
    };
    for (const detail::DTrace& t : r.steps) out.steps.push_back(lift(t));
    if (r.bottom) out.bottom = lift(*r.bottom);
    return out;
}

inline CanonicalStructure saturate(const HornSentence& phi,
                                   const std::vector<Atom>& start,
                                   const std::vector<Var>& domain) {
    detail::CompiledSentence cs(phi);
    detail::IntSaturator sat(cs, phi.sig, static_cast<int>(domain.size()));
    std::vector<detail::DAtom> seeds;
    seeds.reserve(start.size());
    for (const Atom& a : start) seeds.push_back(detail::to_datom(a, domain));
    detail::DResult r = sat.run(std::move(seeds), false);

    CanonicalStructure out;
    out.domain = domain;
    out.inconsistent = r.inconsistent;
    for (const detail::DAtom& d : r.atoms)
        out.atoms.push_back(detail::from_datom(d, domain));
    return out;
}

// Decides phi |= goal by saturating the goal's premise over the goal's
// variables: entailed iff the closure is inconsistent or contains the goal
// conclusion.
inline bool entails_clause(const HornSentence& phi, const HornClause& goal) {
    CanonicalStructure c = saturate(phi, goal.premise, goal.variables());
    if (c.inconsistent) return true;
    if (goal.concludes_bottom()) return false;
    return c.contains(*goal.conclusion);
}

// The canonical structure of the goal premise, as a finite structure over the
// goal's variables plus `extra_vars` (elements in domain order). Countermodel
// when consistent and the goal is not entailed.
inline FiniteStructure canonical_countermodel(const HornSentence& phi,
                                              const HornClause& goal,
                                              std::vector<Var>* domain_out = nullptr,
                                              const std::vector<Var>& extra_vars = {}) {
    std::vector<Var> dom = goal.variables();
    for (const Var& v : extra_vars)
        if (std::find(dom.begin(), dom.end(), v) == dom.end())
            dom.push_back(v);
    CanonicalStructure c = saturate(phi, goal.premise, dom);
    FiniteStructure s(phi.sig, static_cast<int>(c.domain.size()));
    auto idx = [&](const Var& v) {
        return static_cast<int>(std::find(c.domain.begin(), c.domain.end(), v) -
                                c.domain.begin());
    };
    for (const Atom& a : c.atoms) {
        std::vector<int> t;
        for (const Var& v : a.args) t.push_back(idx(v));
        s.add(a.symbol, std::move(t));
    }
    if (domain_out) *domain_out = c.domain;
    return s;
}

}  // namespace hornap
