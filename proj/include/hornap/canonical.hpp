#pragma once

// Canonical relabeling of atom sets: two sets related by a variable bijection
// get the same canonical form. Variables are first ordered by an iteratively
// refined incidence signature; remaining ties are broken by exhaustive search
// over the tied blocks (atom sets handled here stay small).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "hornap/logic.hpp"

namespace hornap {

namespace detail {

// Sorted, duplicate-free atom list with integer variable ids.
struct IntAtom {
    int symbol;
    std::vector<int> args;
    auto operator<=>(const IntAtom&) const = default;
};

inline std::vector<IntAtom> relabel(const std::vector<IntAtom>& atoms,
                                    const std::vector<int>& label) {
    std::vector<IntAtom> out;
    out.reserve(atoms.size());
    for (const IntAtom& a : atoms) {
        IntAtom b{a.symbol, a.args};
        for (int& v : b.args) v = label[v];
        out.push_back(std::move(b));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Computes a labeling of variables 0..n-1 minimizing the relabeled atom list.
// Variables listed in `pinned` keep their own label and are not permuted.
inline std::vector<int> minimizing_labels(const std::vector<IntAtom>& atoms,
                                          int nvars,
                                          const std::vector<int>& pinned) {
    std::vector<bool> is_pinned(nvars, false);
    for (int p : pinned) is_pinned[p] = true;

    // Iterated refinement: color by multiset of (symbol, position, colors of
    // co-arguments) over incident atoms.
    std::vector<int> color(nvars, 0);
    for (int round = 0; round < nvars + 1; ++round) {
        std::vector<std::string> key(nvars);
        for (int v = 0; v < nvars; ++v) {
            std::vector<std::string> parts;
            for (const IntAtom& a : atoms) {
                for (size_t i = 0; i < a.args.size(); ++i) {
                    if (a.args[i] != v) continue;
                    std::string p = std::to_string(a.symbol) + ":" +
                                    std::to_string(i) + ":";
                    for (int u : a.args) p += std::to_string(color[u]) + ",";
                    parts.push_back(std::move(p));
                }
            }
            std::sort(parts.begin(), parts.end());
            std::string k = is_pinned[v] ? "P" + std::to_string(v) + "|" : "";
            for (auto& p : parts) k += p + ";";
            key[v] = std::move(k);
        }
        std::vector<std::string> uniq = key;
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        std::vector<int> next(nvars);
        for (int v = 0; v < nvars; ++v)
            next[v] = static_cast<int>(
                std::lower_bound(uniq.begin(), uniq.end(), key[v]) -
                uniq.begin());
        if (next == color) break;
        color = std::move(next);
    }

    // Free variables ordered by color; tied blocks permuted exhaustively.
    std::vector<int> free_vars;
    for (int v = 0; v < nvars; ++v)
        if (!is_pinned[v]) free_vars.push_back(v);
    std::sort(free_vars.begin(), free_vars.end(), [&](int a, int b) {
        return color[a] != color[b] ? color[a] < color[b] : a < b;
    });

    std::vector<std::pair<size_t, size_t>> blocks;  // [begin, end) of ties
    for (size_t i = 0; i < free_vars.size();) {
        size_t j = i + 1;
        while (j < free_vars.size() &&
               color[free_vars[j]] == color[free_vars[i]])
            ++j;
        blocks.emplace_back(i, j);
        i = j;
    }

    auto labels_for = [&](const std::vector<int>& order) {
        std::vector<int> label(nvars, -1);
        for (int p : pinned) label[p] = p;
        int next = 0;
        for (int v : order) {
            while (next < nvars && is_pinned[next]) ++next;
            label[v] = next++;
        }
        return label;
    };

    std::vector<int> best_order = free_vars;
    std::vector<IntAtom> best = relabel(atoms, labels_for(best_order));

    std::function<void(size_t, std::vector<int>&)> search =
        [&](size_t bi, std::vector<int>& order) {
            if (bi == blocks.size()) {
                std::vector<IntAtom> cand = relabel(atoms, labels_for(order));
                if (cand < best) {
                    best = cand;
                    best_order = order;
                }
                return;
            }
            auto [b, e] = blocks[bi];
            if (e - b <= 1) {
                search(bi + 1, order);
                return;
            }
            bool isolated = true;  // variables with no incident atoms commute
            for (size_t i = b; i < e && isolated; ++i)
                for (const IntAtom& a : atoms)
                    if (std::find(a.args.begin(), a.args.end(), order[i]) !=
                        a.args.end()) {
                        isolated = false;
                        break;
                    }
            if (isolated) {
                search(bi + 1, order);
                return;
            }
            // if every transposition inside the block fixes the atom set, the
            // whole block is interchangeable and one order suffices
            bool symmetric = true;
            for (size_t i = b; i < e && symmetric; ++i)
                for (size_t j = i + 1; j < e && symmetric; ++j) {
                    std::vector<IntAtom> swapped = atoms;
                    for (IntAtom& a : swapped)
                        for (int& v : a.args) {
                            if (v == order[i]) v = order[j];
                            else if (v == order[j]) v = order[i];
                        }
                    std::sort(swapped.begin(), swapped.end());
                    if (swapped != atoms) symmetric = false;
                }
            if (symmetric) {
                std::sort(order.begin() + b, order.begin() + e);
                search(bi + 1, order);
                return;
            }
            std::sort(order.begin() + b, order.begin() + e);
            do {
                search(bi + 1, order);
            } while (std::next_permutation(order.begin() + b, order.begin() + e));
        };
    {
        std::vector<int> order = free_vars;
        search(0, order);
    }
    return labels_for(best_order);
}

}  // namespace detail

struct CanonicalForm {
    std::vector<Atom> atoms;    // relabeled, sorted
    Substitution relabeling;    // original variable -> canonical variable
};

inline Var canonical_var_name(int i) { return "v" + std::to_string(i); }

// Canonically relabels an atom set. Sets related by a variable bijection
// yield identical canonical atom lists.
inline CanonicalForm canonical_form(const std::vector<Atom>& atoms) {
    std::vector<Var> vars;
    for (const Atom& a : atoms)
        for (const Var& v : a.args)
            if (std::find(vars.begin(), vars.end(), v) == vars.end())
                vars.push_back(v);
    std::sort(vars.begin(), vars.end());

    std::vector<detail::IntAtom> ints;
    ints.reserve(atoms.size());
    for (const Atom& a : atoms) {
        detail::IntAtom ia{a.symbol, {}};
        for (const Var& v : a.args)
            ia.args.push_back(static_cast<int>(
                std::lower_bound(vars.begin(), vars.end(), v) - vars.begin()));
        ints.push_back(std::move(ia));
    }
    std::sort(ints.begin(), ints.end());
    ints.erase(std::unique(ints.begin(), ints.end()), ints.end());

    std::vector<int> label =
        detail::minimizing_labels(ints, static_cast<int>(vars.size()), {});

    CanonicalForm out;
    std::map<Var, Var> sub;
    for (size_t i = 0; i < vars.size(); ++i)
        sub[vars[i]] = canonical_var_name(label[i]);
    out.relabeling = Substitution(std::move(sub));
    for (const detail::IntAtom& ia : ints) {
        Atom a{ia.symbol, {}};
        for (int v : ia.args) a.args.push_back(canonical_var_name(label[v]));
        out.atoms.push_back(std::move(a));
    }
    std::sort(out.atoms.begin(), out.atoms.end());
    out.atoms.erase(std::unique(out.atoms.begin(), out.atoms.end()),
                    out.atoms.end());
    return out;
}

// Serialized canonical key of an atom set; equal keys iff bijectively equal.
inline std::string canonical_key(const std::vector<Atom>& atoms,
                                 const Signature& sig) {
    CanonicalForm cf = canonical_form(atoms);
    std::string s;
    for (const Atom& a : cf.atoms) s += a.str(sig) + " ";
    return s;
}

}  // namespace hornap
