#pragma once

// Core vocabulary for universal Horn sentences over finite relational
// signatures: signatures, atoms, Horn clauses, sentences, substitutions,
// finite structures and structure maps.
//
// Conventions: equality atoms do not exist (there is no way to declare "=" as
// a relation symbol), premises are duplicate-free and kept sorted, and
// variables are clause-local strings drawn from a totally ordered namespace.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace hornap {

// User-facing failure (bad input, violated precondition).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Internal invariant violation.
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

using Var = std::string;

// ---------------------------------------------------------------------------
// Signature

class Signature {
public:
    struct Symbol {
        std::string name;
        int arity = 0;
        auto operator<=>(const Symbol&) const = default;
    };

    Signature() = default;

    int add(const std::string& name, int arity) {
        if (arity < 1)
            throw Error("relation '" + name + "': arity must be at least 1");
        if (name.empty() || name == "bot" || name == "rel" ||
            name.find('=') != std::string::npos)
            throw Error("invalid relation name '" + name + "'");
        if (std::islower(static_cast<unsigned char>(name[0])))
            throw Error("relation name '" + name +
                        "' must not start with a lowercase letter");
        if (index_.count(name))
            throw Error("duplicate relation name '" + name + "'");
        index_.emplace(name, static_cast<int>(symbols_.size()));
        symbols_.push_back({name, arity});
        return static_cast<int>(symbols_.size()) - 1;
    }

    int size() const { return static_cast<int>(symbols_.size()); }
    const Symbol& symbol(int i) const { return symbols_.at(i); }
    const std::vector<Symbol>& symbols() const { return symbols_; }
    int arity(int i) const { return symbols_.at(i).arity; }
    const std::string& name(int i) const { return symbols_.at(i).name; }

    // -1 if absent.
    int index_of(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? -1 : it->second;
    }

    int require(const std::string& name) const {
        int i = index_of(name);
        if (i < 0) throw Error("unknown relation '" + name + "'");
        return i;
    }

    bool operator==(const Signature& o) const { return symbols_ == o.symbols_; }

private:
    std::vector<Symbol> symbols_;
    std::unordered_map<std::string, int> index_;
};

// ---------------------------------------------------------------------------
// Atoms and clauses

struct Atom {
    int symbol = -1;
    std::vector<Var> args;

    auto operator<=>(const Atom&) const = default;

    std::string str(const Signature& sig) const {
        std::string s = sig.name(symbol) + "(";
        for (size_t i = 0; i < args.size(); ++i) {
            if (i) s += ",";
            s += args[i];
        }
        return s + ")";
    }
};

inline Atom make_atom(const Signature& sig, const std::string& name,
                      std::vector<Var> args) {
    int idx = sig.require(name);
    if (static_cast<int>(args.size()) != sig.arity(idx))
        throw Error("arity mismatch: relation '" + name + "' expects " +
                    std::to_string(sig.arity(idx)) + " argument(s), got " +
                    std::to_string(args.size()));
    return Atom{idx, std::move(args)};
}

// Premise is a set (sorted, duplicate-free); conclusion nullopt means bottom.
struct HornClause {
    std::vector<Atom> premise;
    std::optional<Atom> conclusion;

    auto operator<=>(const HornClause&) const = default;

    void normalize() {
        std::sort(premise.begin(), premise.end());
        premise.erase(std::unique(premise.begin(), premise.end()),
                      premise.end());
    }

    bool concludes_bottom() const { return !conclusion.has_value(); }

    // Variables in first-occurrence order over (premise, conclusion).
    std::vector<Var> variables() const {
        std::vector<Var> out;
        auto scan = [&](const Atom& a) {
            for (const Var& v : a.args)
                if (std::find(out.begin(), out.end(), v) == out.end())
                    out.push_back(v);
        };
        for (const Atom& a : premise) scan(a);
        if (conclusion) scan(*conclusion);
        return out;
    }

    std::string str(const Signature& sig) const {
        std::string s;
        for (size_t i = 0; i < premise.size(); ++i) {
            if (i) s += ", ";
            s += premise[i].str(sig);
        }
        s += s.empty() ? "-> " : " -> ";
        s += conclusion ? conclusion->str(sig) : std::string("bot");
        return s + ".";
    }
};

inline HornClause make_clause(std::vector<Atom> premise,
                              std::optional<Atom> conclusion) {
    HornClause c{std::move(premise), std::move(conclusion)};
    c.normalize();
    return c;
}

struct HornSentence {
    Signature sig;
    std::vector<HornClause> clauses;

    void check_well_formed() const {
        for (const HornClause& c : clauses) {
            auto chk = [&](const Atom& a) {
                if (a.symbol < 0 || a.symbol >= sig.size())
                    throw InternalError("atom uses a symbol outside the signature");
                if (static_cast<int>(a.args.size()) != sig.arity(a.symbol))
                    throw Error("arity mismatch in clause: " + c.str(sig));
            };
            for (const Atom& a : c.premise) chk(a);
            if (c.conclusion) chk(*c.conclusion);
        }
    }
};

// ---------------------------------------------------------------------------
// Substitutions (variable-to-variable; possibly non-injective)

class Substitution {
public:
    Substitution() = default;
    explicit Substitution(std::map<Var, Var> m) : map_(std::move(m)) {}

    static Substitution identity(const std::vector<Var>& vars) {
        std::map<Var, Var> m;
        for (const Var& v : vars) m[v] = v;
        return Substitution(std::move(m));
    }

    void bind(const Var& from, const Var& to) { map_[from] = to; }

    bool maps(const Var& v) const { return map_.count(v) != 0; }

    const Var& operator()(const Var& v) const {
        auto it = map_.find(v);
        if (it == map_.end()) throw Error("unmapped variable " + v);
        return it->second;
    }

    Atom apply(const Atom& a) const {
        Atom out{a.symbol, {}};
        out.args.reserve(a.args.size());
        for (const Var& v : a.args) out.args.push_back((*this)(v));
        return out;
    }

    HornClause apply(const HornClause& c) const {
        HornClause out;
        out.premise.reserve(c.premise.size());
        for (const Atom& a : c.premise) out.premise.push_back(apply(a));
        if (c.conclusion) out.conclusion = apply(*c.conclusion);
        out.normalize();
        return out;
    }

    const std::map<Var, Var>& mapping() const { return map_; }
    bool empty() const { return map_.empty(); }

private:
    std::map<Var, Var> map_;
};

inline HornClause apply_substitution(const HornClause& c, const Substitution& s) {
    return s.apply(c);
}

// ---------------------------------------------------------------------------
// Clause predicates

// True iff the conclusion is an atom syntactically present in the premise.
inline bool is_tautology(const HornClause& c) {
    if (!c.conclusion) return false;
    return std::binary_search(c.premise.begin(), c.premise.end(), *c.conclusion);
}

inline bool premise_subset(const std::vector<Atom>& sub,
                           const std::vector<Atom>& super) {
    // both sorted
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

// True iff phi is a weakening of psi: psi's premise is contained in phi's
// premise and the conclusions coincide (bottom matches only bottom).
inline bool is_weakening(const HornClause& phi, const HornClause& psi) {
    if (phi.conclusion != psi.conclusion) return false;
    return premise_subset(psi.premise, phi.premise);
}

// True iff the co-occurrence graph of the premise (edge when two variables
// appear jointly in some premise atom) is complete on all clause variables,
// including conclusion-only ones.
inline bool is_complete_clause(const HornClause& c) {
    std::vector<Var> vars = c.variables();
    if (vars.size() <= 1) return true;
    auto idx = [&](const Var& v) {
        return std::find(vars.begin(), vars.end(), v) - vars.begin();
    };
    size_t n = vars.size();
    std::vector<bool> edge(n * n, false);
    for (const Atom& a : c.premise)
        for (const Var& u : a.args)
            for (const Var& v : a.args) {
                size_t i = idx(u), j = idx(v);
                edge[i * n + j] = true;
            }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (!edge[i * n + j]) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Finite structures

struct FiniteStructure {
    Signature sig;
    int size = 0;                                   // domain is 0..size-1
    std::vector<std::set<std::vector<int>>> relations;  // per symbol index

    FiniteStructure() = default;
    FiniteStructure(Signature s, int n)
        : sig(std::move(s)), size(n), relations(sig.size()) {}

    bool has(int symbol, const std::vector<int>& tuple) const {
        return relations[symbol].count(tuple) != 0;
    }

    void add(int symbol, std::vector<int> tuple) {
        if (static_cast<int>(tuple.size()) != sig.arity(symbol))
            throw Error("tuple length does not match arity of " +
                        sig.name(symbol));
        for (int e : tuple)
            if (e < 0 || e >= size) throw Error("tuple entry outside domain");
        relations[symbol].insert(std::move(tuple));
    }

    bool operator==(const FiniteStructure& o) const {
        return size == o.size && sig == o.sig && relations == o.relations;
    }
};

struct StructureMap {
    FiniteStructure source;
    FiniteStructure target;
    std::vector<int> map;  // source element -> target element
};

inline bool is_homomorphism(const StructureMap& m) {
    if (static_cast<int>(m.map.size()) != m.source.size) return false;
    for (int e : m.map)
        if (e < 0 || e >= m.target.size) return false;
    for (int s = 0; s < m.source.sig.size(); ++s)
        for (const auto& t : m.source.relations[s]) {
            std::vector<int> img(t.size());
            for (size_t i = 0; i < t.size(); ++i) img[i] = m.map[t[i]];
            if (!m.target.has(s, img)) return false;
        }
    return true;
}

// Injective homomorphism that also reflects tuple membership.
inline bool is_embedding(const StructureMap& m) {
    if (!is_homomorphism(m)) return false;
    std::vector<int> seen(m.target.size, 0);
    for (int e : m.map) {
        if (seen[e]) return false;
        seen[e] = 1;
    }
    // reflection: image tuples over mapped elements must come from the source
    std::vector<int> pre(m.target.size, -1);
    for (int i = 0; i < m.source.size; ++i) pre[m.map[i]] = i;
    for (int s = 0; s < m.target.sig.size(); ++s)
        for (const auto& t : m.target.relations[s]) {
            std::vector<int> src(t.size());
            bool in_image = true;
            for (size_t i = 0; i < t.size(); ++i) {
                if (pre[t[i]] < 0) { in_image = false; break; }
                src[i] = pre[t[i]];
            }
            if (in_image && !m.source.has(s, src)) return false;
        }
    return true;
}

}  // namespace hornap
