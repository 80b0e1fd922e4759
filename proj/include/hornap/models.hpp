#pragma once

// Direct clause evaluation over finite structures and exhaustive model
// enumeration. Everything here checks clauses by iterating assignments over
// the structure's domain; nothing uses the saturation engine, so these
// functions serve as the semantic oracle for it.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "hornap/logic.hpp"

namespace hornap {

namespace detail {

// DFS over assignments of the clause's variables; premise atoms are checked
// as soon as they are fully bound. `accept` decides whether a full
// premise-satisfying assignment must be examined; returns false iff some
// examined assignment violates the clause.
inline bool eval_clause(const FiniteStructure& s, const HornClause& c,
                        const std::function<bool(const std::vector<int>&)>& accept) {
    std::vector<Var> vars = c.variables();
    int nv = static_cast<int>(vars.size());
    auto vidx = [&](const Var& v) {
        return static_cast<int>(std::find(vars.begin(), vars.end(), v) -
                                vars.begin());
    };
    std::vector<std::pair<int, std::vector<int>>> prem;
    for (const Atom& a : c.premise) {
        std::vector<int> ix;
        for (const Var& v : a.args) ix.push_back(vidx(v));
        prem.emplace_back(a.symbol, std::move(ix));
    }
    std::vector<std::vector<int>> ready(std::max(nv, 1));
    for (size_t p = 0; p < prem.size(); ++p) {
        int deepest = 0;
        for (int v : prem[p].second) deepest = std::max(deepest, v);
        if (nv > 0) ready[deepest].push_back(static_cast<int>(p));
    }

    auto check_full = [&](const std::vector<int>& asg) {
        if (!accept(asg)) return true;
        if (!c.conclusion) return false;  // premise satisfied, bottom clause
        std::vector<int> t;
        t.reserve(c.conclusion->args.size());
        for (const Var& v : c.conclusion->args) t.push_back(asg[vidx(v)]);
        return s.has(c.conclusion->symbol, t);
    };

    if (nv == 0) {
        // only "-> bot" is expressible without variables
        if (!c.conclusion && c.premise.empty()) return false;
        return true;
    }
    if (s.size == 0) return true;

    std::vector<int> asg(nv, 0);
    int level = 0;
    while (level >= 0) {
        if (asg[level] >= s.size) {
            asg[level] = 0;
            --level;
            if (level >= 0) ++asg[level];
            continue;
        }
        bool ok = true;
        for (int pi : ready[level]) {
            const auto& [sym, ix] = prem[pi];
            std::vector<int> t;
            t.reserve(ix.size());
            for (int v : ix) t.push_back(asg[v]);
            if (!s.has(sym, t)) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            ++asg[level];
            continue;
        }
        if (level + 1 < nv) {
            ++level;
            asg[level] = 0;
            continue;
        }
        if (!check_full(asg)) return false;
        ++asg[level];
    }
    return true;
}

}  // namespace detail

inline bool satisfies_clause(const FiniteStructure& s, const HornClause& c) {
    return detail::eval_clause(s, c, [](const std::vector<int>&) { return true; });
}

inline bool satisfies(const FiniteStructure& s, const HornSentence& phi) {
    for (const HornClause& c : phi.clauses)
        if (!satisfies_clause(s, c)) return false;
    return true;
}

// Checks only clause instances whose assignment range contains every element
// of `touch`. Sound shortcut when instances avoiding `touch` are known to be
// satisfied (e.g. the structure restricted away from `touch` is a model).
inline bool satisfies_clause_touching(const FiniteStructure& s,
                                      const HornClause& c,
                                      const std::vector<int>& touch) {
    return detail::eval_clause(s, c, [&](const std::vector<int>& asg) {
        for (int e : touch)
            if (std::find(asg.begin(), asg.end(), e) == asg.end()) return false;
        return true;
    });
}

inline bool satisfies_touching(const FiniteStructure& s, const HornSentence& phi,
                               const std::vector<int>& touch) {
    for (const HornClause& c : phi.clauses)
        if (!satisfies_clause_touching(s, c, touch)) return false;
    return true;
}

// True iff the atoms hold in s under the assignment var -> element.
inline bool holds_atoms(const FiniteStructure& s, const std::vector<Atom>& atoms,
                        const std::map<Var, int>& asg) {
    for (const Atom& a : atoms) {
        std::vector<int> t;
        for (const Var& v : a.args) t.push_back(asg.at(v));
        if (!s.has(a.symbol, t)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Diagram conversions

inline std::vector<Atom> structure_to_atoms(const FiniteStructure& s,
                                            const std::vector<Var>& names) {
    std::vector<Atom> out;
    for (int sym = 0; sym < s.sig.size(); ++sym)
        for (const auto& t : s.relations[sym]) {
            Atom a{sym, {}};
            for (int e : t) a.args.push_back(names.at(e));
            out.push_back(std::move(a));
        }
    std::sort(out.begin(), out.end());
    return out;
}

inline FiniteStructure atoms_to_structure(const Signature& sig,
                                          const std::vector<Atom>& atoms,
                                          const std::vector<Var>& domain) {
    FiniteStructure s(sig, static_cast<int>(domain.size()));
    for (const Atom& a : atoms) {
        std::vector<int> t;
        for (const Var& v : a.args) {
            auto it = std::find(domain.begin(), domain.end(), v);
            if (it == domain.end())
                throw Error("atom variable '" + v + "' outside domain");
            t.push_back(static_cast<int>(it - domain.begin()));
        }
        s.add(a.symbol, std::move(t));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Model enumeration

// All (symbol, tuple) slots of a structure of the given size, in a fixed
// order: symbol index ascending, tuples lexicographically.
inline std::vector<std::pair<int, std::vector<int>>> tuple_grid(
    const Signature& sig, int size) {
    std::vector<std::pair<int, std::vector<int>>> grid;
    for (int sym = 0; sym < sig.size(); ++sym) {
        int ar = sig.arity(sym);
        std::vector<int> t(ar, 0);
        if (size == 0) continue;
        while (true) {
            grid.emplace_back(sym, t);
            int i = ar - 1;
            while (i >= 0 && t[i] == size - 1) t[i--] = 0;
            if (i < 0) break;
            ++t[i];
        }
    }
    return grid;
}

// Streams every labeled model of phi on domain {0..size-1} in a fixed order
// (characteristic vector of the tuple grid, counting up). Returning false
// from fn stops the enumeration.
inline void for_each_model(const HornSentence& phi, int size,
                           const std::function<bool(const FiniteStructure&)>& fn) {
    if (size < 0) throw Error("size must be nonnegative");
    auto grid = tuple_grid(phi.sig, size);
    if (grid.size() > 26)
        throw Error("model enumeration grid too large (" +
                    std::to_string(grid.size()) + " tuple slots)");
    std::uint64_t total = std::uint64_t{1} << grid.size();
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        FiniteStructure s(phi.sig, size);
        for (size_t i = 0; i < grid.size(); ++i)
            if (mask >> i & 1)
                s.relations[grid[i].first].insert(grid[i].second);
        if (satisfies(s, phi))
            if (!fn(s)) return;
    }
}

inline std::vector<FiniteStructure> enumerate_models(const HornSentence& phi,
                                                     int size) {
    std::vector<FiniteStructure> out;
    for_each_model(phi, size, [&](const FiniteStructure& s) {
        out.push_back(s);
        return true;
    });
    return out;
}

}  // namespace hornap
