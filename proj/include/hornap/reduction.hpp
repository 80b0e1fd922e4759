#pragma once

// Compilation of a left-regular grammar into a universal Horn sentence over a
// signature of arity at most three, in two parts. The first part carries one
// clause per production and is a conjunction of complete clauses; the second
// part is grammar-independent apart from the alphabet and derives a
// contradiction exactly from atom sets embedding a marked terminal path. Both
// parts are glued by unary markers I and T, the binary edge relations E and
// F, and the ternary tracking relation Q.
//
// Also: executable checks for the two correspondence claims, the canonical
// word encoding into a candidate counterexample triple, and decoding of
// counterexamples back into rejected words.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hornap/amalgamation.hpp"
#include "hornap/ap_search.hpp"
#include "hornap/grammar.hpp"
#include "hornap/logic.hpp"
#include "hornap/saturation.hpp"
#include "hornap/text.hpp"

namespace hornap {

struct CompiledReduction {
    HornSentence sentence;
    Grammar grammar;
    int phi1_begin = 0, phi1_end = 0;  // clause index ranges
    int phi2_begin = 0, phi2_end = 0;
    int sym_I = -1, sym_T = -1, sym_E = -1, sym_F = -1, sym_Q = -1;
    std::map<char, int> terminal_symbol;
    std::map<std::string, int> nonterminal_symbol;  // start symbol excluded

    HornSentence part(int begin, int end) const {
        HornSentence s;
        s.sig = sentence.sig;
        s.clauses.assign(sentence.clauses.begin() + begin,
                         sentence.clauses.begin() + end);
        return s;
    }
    HornSentence phi1_only() const { return part(phi1_begin, phi1_end); }
    HornSentence phi2_only() const { return part(phi2_begin, phi2_end); }

    bool is_terminal_symbol(int sym) const {
        for (auto& [a, s] : terminal_symbol)
            if (s == sym) return true;
        return false;
    }
    bool is_nonterminal_symbol(int sym) const {
        for (auto& [n, s] : nonterminal_symbol)
            if (s == sym) return true;
        return false;
    }
};

inline CompiledReduction compile(const Grammar& g) {
    g.check_well_formed();
    CompiledReduction out;
    out.grammar = g;
    Signature& sig = out.sentence.sig;
    out.sym_I = sig.add("I", 1);
    out.sym_T = sig.add("T", 1);
    out.sym_E = sig.add("E", 2);
    out.sym_F = sig.add("F", 2);
    out.sym_Q = sig.add("Q", 3);
    std::string terms = g.terminals;
    std::sort(terms.begin(), terms.end());
    for (char a : terms)
        out.terminal_symbol[a] = sig.add(std::string("R") + a, 2);
    std::vector<std::string> nts = g.nonterminals;
    std::sort(nts.begin(), nts.end());
    for (const std::string& n : nts)
        if (n != g.start) out.nonterminal_symbol[n] = sig.add("R" + n, 2);

    auto atom = [&](int sym, std::vector<Var> vs) {
        return Atom{sym, std::move(vs)};
    };
    const Var y = "y", y1 = "y1", y2 = "y2", x1 = "x1", x2 = "x2";

    // production clauses
    out.phi1_begin = 0;
    for (const Production& p : g.productions) {
        int ra = out.terminal_symbol.at(p.terminal);
        std::vector<Atom> prem;
        std::optional<Atom> concl;
        if (p.via) {
            int rb = out.nonterminal_symbol.at(*p.via);
            prem = {atom(out.sym_I, {y}), atom(out.sym_E, {y, x1}),
                    atom(out.sym_E, {y, x2}), atom(rb, {y, x1}),
                    atom(ra, {x1, x2})};
            if (p.lhs == g.start)
                prem.push_back(atom(out.sym_T, {x2}));
            else
                concl = atom(out.nonterminal_symbol.at(p.lhs), {y, x2});
        } else {
            prem = {atom(out.sym_I, {y}), atom(out.sym_E, {y, x1}),
                    atom(ra, {y, x1})};
            if (p.lhs == g.start)
                prem.push_back(atom(out.sym_T, {x1}));
            else
                concl = atom(out.nonterminal_symbol.at(p.lhs), {y, x1});
        }
        out.sentence.clauses.push_back(make_clause(std::move(prem), concl));
    }
    out.phi1_end = static_cast<int>(out.sentence.clauses.size());

    // tracking clauses; the final one does not depend on any terminal and is
    // emitted exactly once
    out.phi2_begin = out.phi1_end;
    for (char a : terms) {
        int ra = out.terminal_symbol.at(a);
        out.sentence.clauses.push_back(make_clause(
            {atom(out.sym_I, {y2}), atom(ra, {y2, x1}), atom(out.sym_F, {y1, x1}),
             atom(out.sym_E, {y2, x1})},
            atom(out.sym_Q, {y1, y2, x1})));
    }
    for (char a : terms) {
        int ra = out.terminal_symbol.at(a);
        out.sentence.clauses.push_back(make_clause(
            {atom(out.sym_I, {y2}), atom(out.sym_Q, {y1, y2, x1}),
             atom(ra, {x1, x2}), atom(out.sym_F, {y1, x1}),
             atom(out.sym_F, {y1, x2}), atom(out.sym_E, {y2, x1}),
             atom(out.sym_E, {y2, x2})},
            atom(out.sym_Q, {y1, y2, x2})));
    }
    out.sentence.clauses.push_back(make_clause(
        {atom(out.sym_I, {y2}), atom(out.sym_Q, {y1, y2, x1}),
         atom(out.sym_T, {x1}), atom(out.sym_F, {y1, x1}),
         atom(out.sym_E, {y2, x1})},
        std::nullopt));
    out.phi2_end = static_cast<int>(out.sentence.clauses.size());

    out.sentence.check_well_formed();
    return out;
}

// ---------------------------------------------------------------------------
// Correspondence checks

// The path clause for nonterminal A and word w: marked terminal chain from y
// through x1..xn, concluding RA(y,xn), or with a T-marked end and bottom
// conclusion when A is the start symbol.
inline HornClause claim1_clause(const CompiledReduction& red,
                                const std::string& nonterminal, const Word& w) {
    if (w.empty()) throw Error("claim check requires a nonempty word");
    int n = static_cast<int>(w.size());
    const Var y = "y";
    std::vector<Var> xs;
    for (int i = 1; i <= n; ++i) xs.push_back("x" + std::to_string(i));

    std::vector<Atom> prem{Atom{red.sym_I, {y}},
                           Atom{red.terminal_symbol.at(w[0]), {y, xs[0]}}};
    for (int i = 0; i < n; ++i) prem.push_back(Atom{red.sym_E, {y, xs[i]}});
    for (int i = 0; i + 1 < n; ++i)
        prem.push_back(Atom{red.terminal_symbol.at(w[i + 1]), {xs[i], xs[i + 1]}});

    std::optional<Atom> concl;
    if (nonterminal == red.grammar.start) {
        prem.push_back(Atom{red.sym_T, {xs[n - 1]}});
    } else {
        concl = Atom{red.nonterminal_symbol.at(nonterminal), {y, xs[n - 1]}};
    }
    return make_clause(std::move(prem), concl);
}

// (grammar derivability, entailment from the production clauses)
inline std::pair<bool, bool> check_claim1(const CompiledReduction& red,
                                          const std::string& nonterminal,
                                          const Word& w) {
    bool side_g = derives(red.grammar, nonterminal, w);
    HornSentence phi1 = red.phi1_only();
    bool side_e = entails_clause(phi1, claim1_clause(red, nonterminal, w));
    return {side_g, side_e};
}

// Marked-path pattern: I(v2), a terminal edge from v2 into a chain of
// positions each carrying F(v1,·) and E(v2,·), ending in a T-marked position.
// Variables need not be distinct.
inline bool claim2_pattern(const CompiledReduction& red,
                           const std::vector<Atom>& atoms) {
    std::vector<Var> vars;
    for (const Atom& a : atoms)
        for (const Var& v : a.args)
            if (std::find(vars.begin(), vars.end(), v) == vars.end())
                vars.push_back(v);
    std::sort(vars.begin(), vars.end());

    auto has = [&](int sym, std::initializer_list<Var> args) {
        Atom a{sym, std::vector<Var>(args)};
        return std::find(atoms.begin(), atoms.end(), a) != atoms.end();
    };
    std::vector<Var> istarts;
    for (const Atom& a : atoms)
        if (a.symbol == red.sym_I) istarts.push_back(a.args[0]);

    for (const Var& v2 : istarts) {
        for (const Var& v1 : vars) {
            // breadth-first over chain positions
            std::set<Var> frontier, visited;
            for (const Atom& a : atoms) {
                if (!red.is_terminal_symbol(a.symbol) || a.args[0] != v2) continue;
                const Var& u = a.args[1];
                if (has(red.sym_F, {v1, u}) && has(red.sym_E, {v2, u}))
                    frontier.insert(u);
            }
            while (!frontier.empty()) {
                std::set<Var> next;
                for (const Var& u : frontier) {
                    if (visited.count(u)) continue;
                    visited.insert(u);
                    if (has(red.sym_T, {u})) return true;
                    for (const Atom& a : atoms) {
                        if (!red.is_terminal_symbol(a.symbol) || a.args[0] != u)
                            continue;
                        const Var& w = a.args[1];
                        if (!visited.count(w) && has(red.sym_F, {v1, w}) &&
                            has(red.sym_E, {v2, w}))
                            next.insert(w);
                    }
                }
                frontier = std::move(next);
            }
        }
    }
    return false;
}

// (entailment of bottom from the tracking clauses, pattern-matcher result)
inline std::pair<bool, bool> check_claim2(const CompiledReduction& red,
                                          const std::vector<Atom>& atoms) {
    for (const Atom& a : atoms) {
        bool ok = a.symbol == red.sym_I || a.symbol == red.sym_T ||
                  a.symbol == red.sym_E || a.symbol == red.sym_F ||
                  red.is_terminal_symbol(a.symbol);
        if (!ok)
            throw Error("atom uses a symbol outside the tracking fragment: " +
                        a.str(red.sentence.sig));
    }
    std::vector<Var> vars;
    for (const Atom& a : atoms)
        for (const Var& v : a.args)
            if (std::find(vars.begin(), vars.end(), v) == vars.end())
                vars.push_back(v);
    HornSentence phi2 = red.phi2_only();
    bool side_e = entails_clause(phi2, make_clause(atoms, std::nullopt));
    bool side_p = claim2_pattern(red, atoms);
    return {side_e, side_p};
}

// ---------------------------------------------------------------------------
// Word encoding and counterexample decoding

struct EncodedWordForm {
    Word word;
    std::vector<Var> shared;               // x1..xn
    std::vector<Atom> phi, phi1, phi2;
};

inline EncodedWordForm encode_word(const CompiledReduction& red, const Word& w) {
    if (w.empty()) throw Error("cannot encode the empty word");
    EncodedWordForm e;
    e.word = w;
    int n = static_cast<int>(w.size());
    for (int i = 1; i <= n; ++i) e.shared.push_back("x" + std::to_string(i));
    const Var y1 = "y1", y2 = "y2";

    e.phi.push_back(Atom{red.sym_T, {e.shared[n - 1]}});
    for (int i = 0; i + 1 < n; ++i)
        e.phi.push_back(Atom{red.terminal_symbol.at(w[i + 1]),
                             {e.shared[i], e.shared[i + 1]}});
    for (int i = 0; i < n; ++i)
        e.phi1.push_back(Atom{red.sym_F, {y1, e.shared[i]}});
    for (int i = 0; i < n; ++i)
        e.phi2.push_back(Atom{red.sym_E, {y2, e.shared[i]}});
    e.phi2.push_back(Atom{red.sym_I, {y2}});
    e.phi2.push_back(Atom{red.terminal_symbol.at(w[0]), {y2, e.shared[0]}});

    std::sort(e.phi.begin(), e.phi.end());
    std::sort(e.phi1.begin(), e.phi1.end());
    std::sort(e.phi2.begin(), e.phi2.end());
    return e;
}

namespace detail {

inline std::optional<Word> decode_path(const CompiledReduction& red,
                                       const std::vector<Atom>& atoms) {
    std::set<Var> imarked, tmarked;
    for (const Atom& a : atoms) {
        if (a.symbol == red.sym_I) imarked.insert(a.args[0]);
        if (a.symbol == red.sym_T) tmarked.insert(a.args[0]);
    }
    if (imarked.empty() || tmarked.empty()) return std::nullopt;

    // length-lexicographic shortest path over terminal edges
    std::set<std::pair<Word, Var>> queue;
    for (const Var& v0 : imarked) queue.emplace("", v0);
    std::set<Var> done;
    while (!queue.empty()) {
        auto [w, u] = *queue.begin();
        queue.erase(queue.begin());
        if (!w.empty() && tmarked.count(u)) return w;
        if (done.count(u)) continue;
        if (!w.empty()) done.insert(u);
        for (const Atom& a : atoms) {
            if (!red.is_terminal_symbol(a.symbol) || a.args[0] != u) continue;
            char letter = 0;
            for (auto& [t, sym] : red.terminal_symbol)
                if (sym == a.symbol) letter = t;
            if (!done.count(a.args[1])) queue.emplace(w + letter, a.args[1]);
        }
    }
    return std::nullopt;
}

}  // namespace detail

// Reads the word along the length-lexicographically first terminal path from
// the I-marked variable to a T-marked variable in phi joined with the side
// carrying the markers (the two sides are interchangeable up to the swap
// symmetry, so both are tried).
inline Word decode_counterexample(const CompiledReduction& red,
                                  const ApCounterexample& cex) {
    VerifyResult v = verify_counterexample(red.sentence, cex);
    if (!v.ok)
        throw Error("certificate does not verify against the sentence: " +
                    v.reason);
    std::vector<Atom> atoms = cex.phi;
    atoms.insert(atoms.end(), cex.phi2.begin(), cex.phi2.end());
    if (auto w = detail::decode_path(red, atoms)) return *w;
    atoms = cex.phi;
    atoms.insert(atoms.end(), cex.phi1.begin(), cex.phi1.end());
    if (auto w = detail::decode_path(red, atoms)) return *w;
    throw Error("certificate lacks the marked-path shape");
}

// ---------------------------------------------------------------------------
// End-to-end agreement between the word route and the amalgamation route

struct CrossCheckReport {
    Word rejected;                    // empty if none within the bound
    bool has_rejected = false;
    std::optional<ApCounterexample> counterexample;
    Word decoded;                     // decode of the minimal certificate
    bool agree = false;
    int word_bound = 0, max_vars = 0, max_atoms = 0;
};

inline CrossCheckReport cross_check(const Grammar& g, int word_bound,
                                    int max_vars = -1, int max_atoms = -1) {
    if (word_bound < 1) throw Error("word bound must be at least 1");
    if (max_vars < 0) max_vars = word_bound;
    if (max_atoms < 0) max_atoms = 3 * word_bound + 2;
    if (max_vars < word_bound || max_atoms < 3 * word_bound + 2)
        throw Error("bound mismatch: need max_vars >= word bound and "
                    "max_atoms >= 3*word bound + 2");

    CrossCheckReport rep;
    rep.word_bound = word_bound;
    rep.max_vars = max_vars;
    rep.max_atoms = max_atoms;

    std::optional<Word> rejected = shortest_rejected(g, word_bound);
    CompiledReduction red = compile(g);
    ApSearchResult found = find_ap_counterexample(red.sentence, max_vars, max_atoms);

    rep.has_rejected = rejected.has_value();
    if (rejected) rep.rejected = *rejected;
    rep.counterexample = found.counterexample;
    if (found.counterexample)
        rep.decoded = decode_counterexample(red, *found.counterexample);

    if (rep.has_rejected != found.counterexample.has_value()) {
        rep.agree = false;
    } else if (!rep.has_rejected) {
        rep.agree = true;
    } else {
        rep.agree = rep.decoded == rep.rejected;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Structural checks on compiled output (empty result means all hold)

inline std::vector<std::string> structural_violations(const CompiledReduction& red) {
    std::vector<std::string> bad;
    const HornSentence& s = red.sentence;
    for (const auto& sym : s.sig.symbols())
        if (sym.arity > 3) bad.push_back("arity above three: " + sym.name);
    if (s.sig.index_of("R" + red.grammar.start) >= 0)
        bad.push_back("start-symbol relation was emitted");
    if (red.phi1_end - red.phi1_begin !=
        static_cast<int>(red.grammar.productions.size()))
        bad.push_back("production clause count is off");
    if (red.phi2_end - red.phi2_begin !=
        2 * static_cast<int>(red.grammar.terminals.size()) + 1)
        bad.push_back("tracking clause count is off");

    for (int i = red.phi1_begin; i < red.phi1_end; ++i) {
        const HornClause& c = s.clauses[i];
        if (!is_complete_clause(c))
            bad.push_back("incomplete production clause: " + c.str(s.sig));
        for (const Atom& a : c.premise)
            if (a.symbol == red.sym_F || a.symbol == red.sym_Q)
                bad.push_back("F/Q atom in a production clause: " + c.str(s.sig));
    }
    for (int i = red.phi2_begin; i < red.phi2_end; ++i) {
        const HornClause& c = s.clauses[i];
        auto all_atoms = c.premise;
        if (c.conclusion) all_atoms.push_back(*c.conclusion);
        for (const Atom& a : all_atoms)
            if (red.is_nonterminal_symbol(a.symbol))
                bad.push_back("nonterminal atom in a tracking clause: " +
                              c.str(s.sig));
        // distinguished variables: every Q-atom carries (z1, z2) in its first
        // two arguments, every F-atom starts with z1, every E-atom with z2
        std::optional<Var> z1, z2;
        bool consistent = true;
        auto meet = [&](std::optional<Var>& z, const Var& v) {
            if (!z) z = v;
            else if (*z != v) consistent = false;
        };
        for (const Atom& a : all_atoms) {
            if (a.symbol == red.sym_Q) {
                meet(z1, a.args[0]);
                meet(z2, a.args[1]);
            } else if (a.symbol == red.sym_F) {
                meet(z1, a.args[0]);
            } else if (a.symbol == red.sym_E) {
                meet(z2, a.args[0]);
            }
        }
        if (!consistent || !z1 || !z2 || *z1 == *z2)
            bad.push_back("tracking clause lacks distinguished variables: " +
                          c.str(s.sig));
    }
    for (const HornClause& c : s.clauses) {
        bool has_i = false;
        for (const Atom& a : c.premise)
            if (a.symbol == red.sym_I) has_i = true;
        if (!has_i)
            bad.push_back("clause without a marker atom in its premise: " +
                          c.str(s.sig));
    }
    return bad;
}

// ---------------------------------------------------------------------------
// Compiled Horn files carry the symbol table in comments so decoding can run
// from the file alone.

inline std::string print_compiled(const CompiledReduction& red) {
    std::vector<std::string> header;
    header.push_back("reduction start " + red.grammar.start);
    std::string t = "reduction terminals";
    for (auto& [a, sym] : red.terminal_symbol) t += std::string(" ") + a;
    header.push_back(t);
    for (auto& [n, sym] : red.nonterminal_symbol)
        header.push_back("reduction nonterminal " + n);
    header.push_back("reduction phi1 " + std::to_string(red.phi1_begin) + " " +
                     std::to_string(red.phi1_end));
    header.push_back("reduction phi2 " + std::to_string(red.phi2_begin) + " " +
                     std::to_string(red.phi2_end));
    std::string g = print_grammar(red.grammar);
    for (size_t pos = 0; pos < g.size();) {
        size_t nl = g.find('\n', pos);
        header.push_back("reduction grammar " + g.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return print_sentence(red.sentence, header);
}

inline CompiledReduction read_compiled(const std::string& text) {
    std::string grammar_text;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const std::string tag = "# reduction grammar ";
        if (line.rfind(tag, 0) == 0) grammar_text += line.substr(tag.size()) + "\n";
    }
    if (grammar_text.empty())
        throw Error("file carries no embedded reduction symbol table");
    CompiledReduction red = compile(parse_grammar(grammar_text));
    HornSentence parsed = parse_sentence(text);
    if (!(parsed.sig == red.sentence.sig) || parsed.clauses != red.sentence.clauses)
        throw Error("file does not match its embedded reduction");
    return red;
}

}  // namespace hornap
