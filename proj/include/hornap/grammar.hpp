#pragma once

// Left-regular grammars (productions A -> a and A -> Ba, never S on a
// right-hand side), regular expressions compiled into them, bounded
// membership and universality over nonempty words.

#include <algorithm>
#include <array>
#include <cctype>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "hornap/logic.hpp"
#include "hornap/text.hpp"

namespace hornap {

using Word = std::string;  // nonempty in all language queries

// ---------------------------------------------------------------------------
// Grammars

struct Production {
    std::string lhs;                  // nonterminal
    std::optional<std::string> via;   // chained nonterminal, if any
    char terminal = 0;

    auto operator<=>(const Production&) const = default;
};

struct Grammar {
    std::vector<std::string> nonterminals;  // includes start
    std::string terminals;                  // sorted, unique
    std::vector<Production> productions;
    std::string start = "S";

    bool has_nonterminal(const std::string& n) const {
        return std::find(nonterminals.begin(), nonterminals.end(), n) !=
               nonterminals.end();
    }

    void check_well_formed() const {
        if (!has_nonterminal(start)) throw Error("start symbol is not declared");
        std::string t = terminals;
        std::sort(t.begin(), t.end());
        if (std::adjacent_find(t.begin(), t.end()) != t.end())
            throw Error("duplicate terminal");
        for (const Production& p : productions) {
            if (!has_nonterminal(p.lhs))
                throw Error("unknown nonterminal '" + p.lhs + "'");
            if (terminals.find(p.terminal) == std::string::npos)
                throw Error(std::string("unknown terminal '") + p.terminal + "'");
            if (p.via) {
                if (!has_nonterminal(*p.via))
                    throw Error("unknown nonterminal '" + *p.via + "'");
                if (*p.via == start)
                    throw Error("the start symbol must not occur on a right-hand side");
            }
        }
        for (const std::string& n : nonterminals) {
            if (n.empty() || !std::isupper(static_cast<unsigned char>(n[0])))
                throw Error("nonterminal '" + n + "' must start with an uppercase letter");
        }
        for (char a : terminals)
            if (!std::islower(static_cast<unsigned char>(a)))
                throw Error(std::string("terminal '") + a + "' must be a lowercase letter");
    }
};

// Nonterminals deriving the given word: T(a) = {A : A -> a},
// T(wa) = {A : A -> Ba with B in T(w)}.
inline std::set<std::string> derivers(const Grammar& g, const Word& w) {
    if (w.empty()) throw Error("membership queries require a nonempty word");
    std::set<std::string> cur;
    for (const Production& p : g.productions)
        if (!p.via && p.terminal == w[0]) cur.insert(p.lhs);
    for (size_t i = 1; i < w.size(); ++i) {
        std::set<std::string> next;
        for (const Production& p : g.productions)
            if (p.via && p.terminal == w[i] && cur.count(*p.via))
                next.insert(p.lhs);
        cur = std::move(next);
    }
    return cur;
}

inline bool derives(const Grammar& g, const std::string& nonterminal,
                    const Word& w) {
    if (!g.has_nonterminal(nonterminal))
        throw Error("unknown nonterminal '" + nonterminal + "'");
    return derivers(g, w).count(nonterminal) != 0;
}

inline bool accepts(const Grammar& g, const Word& w) {
    return derives(g, g.start, w);
}

// Length-lexicographically smallest nonempty rejected word up to max_len,
// found by exploring deriver sets breadth-first (words with an already seen
// deriver set are not extended).
inline std::optional<Word> shortest_rejected(const Grammar& g, int max_len) {
    if (max_len < 1) throw Error("word bound must be at least 1");
    std::string alpha = g.terminals;
    std::sort(alpha.begin(), alpha.end());
    if (alpha.empty()) return std::nullopt;

    std::set<std::set<std::string>> seen;
    std::deque<std::pair<Word, std::set<std::string>>> queue;
    for (char a : alpha) {
        Word w(1, a);
        std::set<std::string> d = derivers(g, w);
        if (!d.count(g.start)) return w;
        if (seen.insert(d).second) queue.emplace_back(w, d);
    }
    while (!queue.empty()) {
        auto [w, d] = queue.front();
        queue.pop_front();
        if (static_cast<int>(w.size()) >= max_len) continue;
        for (char a : alpha) {
            Word v = w + a;
            std::set<std::string> dv;
            for (const Production& p : g.productions)
                if (p.via && p.terminal == a && d.count(*p.via))
                    dv.insert(p.lhs);
            if (!dv.count(g.start)) return v;
            if (seen.insert(dv).second) queue.emplace_back(v, dv);
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Grammar file format:
//   start S
//   terminals a b
//   S -> a
//   S -> B a

inline Grammar parse_grammar(const std::string& text) {
    Grammar g;
    g.start.clear();
    std::set<std::string> nts;
    std::vector<std::array<std::string, 3>> prods;  // lhs, mid-or-empty, terminal
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto tokens_of = [](const std::string& s) {
        std::vector<std::string> out;
        std::istringstream ls(s);
        std::string t;
        while (ls >> t) out.push_back(t);
        return out;
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::vector<std::string> tok = tokens_of(line);
        if (tok.empty()) continue;
        auto fail = [&](const std::string& msg) -> void {
            throw ParseError(lineno, 1, msg);
        };
        if (tok[0] == "start") {
            if (tok.size() != 2) fail("expected: start NONTERMINAL");
            g.start = tok[1];
            nts.insert(tok[1]);
        } else if (tok[0] == "terminals") {
            for (size_t i = 1; i < tok.size(); ++i) {
                if (tok[i].size() != 1) fail("terminals must be single characters");
                g.terminals += tok[i][0];
            }
        } else {
            if (tok.size() < 3 || tok[1] != "->")
                fail("expected a production: A -> a  or  A -> B a");
            nts.insert(tok[0]);
            if (tok.size() == 3) {
                if (tok[2].size() != 1) fail("terminal must be a single character");
                prods.push_back({tok[0], "", tok[2]});
            } else if (tok.size() == 4) {
                if (tok[3].size() != 1) fail("terminal must be a single character");
                nts.insert(tok[2]);
                prods.push_back({tok[0], tok[2], tok[3]});
            } else {
                fail("expected a production: A -> a  or  A -> B a");
            }
        }
    }
    if (g.start.empty()) throw Error("grammar file declares no start symbol");
    g.nonterminals.assign(nts.begin(), nts.end());
    for (auto& [lhs, mid, term] : prods) {
        Production p;
        p.lhs = lhs;
        if (!mid.empty()) p.via = mid;
        p.terminal = term[0];
        g.productions.push_back(std::move(p));
    }
    std::sort(g.terminals.begin(), g.terminals.end());
    g.terminals.erase(std::unique(g.terminals.begin(), g.terminals.end()),
                      g.terminals.end());
    g.check_well_formed();
    return g;
}

inline std::string print_grammar(const Grammar& g) {
    std::string out = "start " + g.start + "\n";
    out += "terminals";
    for (char a : g.terminals) out += std::string(" ") + a;
    out += "\n";
    for (const Production& p : g.productions) {
        out += p.lhs + " ->";
        if (p.via) out += " " + *p.via;
        out += std::string(" ") + p.terminal + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Regular expressions: literals, concatenation, '|', '*', '+', parentheses

struct Regex {
    enum class Kind { Literal, Concat, Alt, Star, Plus };
    Kind kind = Kind::Literal;
    char literal = 0;
    std::vector<Regex> kids;
};

namespace detail {

class RegexParser {
public:
    explicit RegexParser(const std::string& s) : s_(s) {}

    Regex parse() {
        if (s_.empty()) throw Error("empty regular expression");
        Regex r = alt();
        if (pos_ != s_.size())
            throw Error("unexpected character '" + std::string(1, s_[pos_]) +
                        "' at position " + std::to_string(pos_ + 1));
        return r;
    }

private:
    Regex alt() {
        Regex r = concat();
        while (pos_ < s_.size() && s_[pos_] == '|') {
            ++pos_;
            Regex rhs = concat();
            if (r.kind == Regex::Kind::Alt) {
                r.kids.push_back(std::move(rhs));
            } else {
                Regex a;
                a.kind = Regex::Kind::Alt;
                a.kids.push_back(std::move(r));
                a.kids.push_back(std::move(rhs));
                r = std::move(a);
            }
        }
        return r;
    }

    Regex concat() {
        Regex r = postfix();
        while (pos_ < s_.size() && s_[pos_] != '|' && s_[pos_] != ')') {
            Regex rhs = postfix();
            if (r.kind == Regex::Kind::Concat) {
                r.kids.push_back(std::move(rhs));
            } else {
                Regex c;
                c.kind = Regex::Kind::Concat;
                c.kids.push_back(std::move(r));
                c.kids.push_back(std::move(rhs));
                r = std::move(c);
            }
        }
        return r;
    }

    Regex postfix() {
        Regex r = primary();
        while (pos_ < s_.size() && (s_[pos_] == '*' || s_[pos_] == '+')) {
            Regex p;
            p.kind = s_[pos_] == '*' ? Regex::Kind::Star : Regex::Kind::Plus;
            p.kids.push_back(std::move(r));
            r = std::move(p);
            ++pos_;
        }
        return r;
    }

    Regex primary() {
        if (pos_ >= s_.size())
            throw Error("unexpected end of regular expression");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Regex r = alt();
            if (pos_ >= s_.size() || s_[pos_] != ')')
                throw Error("missing ')' in regular expression");
            ++pos_;
            return r;
        }
        if (std::islower(static_cast<unsigned char>(c))) {
            ++pos_;
            Regex r;
            r.kind = Regex::Kind::Literal;
            r.literal = c;
            return r;
        }
        throw Error("unexpected character '" + std::string(1, c) +
                    "' at position " + std::to_string(pos_ + 1));
    }

    const std::string& s_;
    size_t pos_ = 0;
};

struct Nfa {
    // state 0 is the start; transitions are (from, symbol, to)
    int states = 0;
    std::vector<std::tuple<int, char, int>> edges;
    std::vector<std::pair<int, int>> eps;
    std::vector<int> finals;
};

struct NfaFragment {
    int start, accept;
};

inline NfaFragment build_thompson(const Regex& r, Nfa& n) {
    auto fresh = [&] { return n.states++; };
    switch (r.kind) {
        case Regex::Kind::Literal: {
            int s = fresh(), t = fresh();
            n.edges.emplace_back(s, r.literal, t);
            return {s, t};
        }
        case Regex::Kind::Concat: {
            NfaFragment cur = build_thompson(r.kids[0], n);
            for (size_t i = 1; i < r.kids.size(); ++i) {
                NfaFragment next = build_thompson(r.kids[i], n);
                n.eps.emplace_back(cur.accept, next.start);
                cur.accept = next.accept;
            }
            return cur;
        }
        case Regex::Kind::Alt: {
            int s = fresh(), t = fresh();
            for (const Regex& k : r.kids) {
                NfaFragment f = build_thompson(k, n);
                n.eps.emplace_back(s, f.start);
                n.eps.emplace_back(f.accept, t);
            }
            return {s, t};
        }
        case Regex::Kind::Star: {
            int s = fresh(), t = fresh();
            NfaFragment f = build_thompson(r.kids[0], n);
            n.eps.emplace_back(s, f.start);
            n.eps.emplace_back(f.accept, t);
            n.eps.emplace_back(s, t);
            n.eps.emplace_back(f.accept, f.start);
            return {s, t};
        }
        case Regex::Kind::Plus: {
            int s = fresh(), t = fresh();
            NfaFragment f = build_thompson(r.kids[0], n);
            n.eps.emplace_back(s, f.start);
            n.eps.emplace_back(f.accept, t);
            n.eps.emplace_back(f.accept, f.start);
            return {s, t};
        }
    }
    throw InternalError("unhandled regex node");
}

}  // namespace detail

inline Regex parse_regex(const std::string& s) {
    return detail::RegexParser(s).parse();
}

inline void regex_literals(const Regex& r, std::set<char>& out) {
    if (r.kind == Regex::Kind::Literal) out.insert(r.literal);
    for (const Regex& k : r.kids) regex_literals(k, out);
}

// Compiles a regular expression into a left-regular grammar recognizing the
// same nonempty words over the given alphabet. Route: Thompson construction,
// epsilon elimination, then one nonterminal per automaton state (a state's
// nonterminal derives exactly the words reaching it), with a fresh start
// symbol collecting the accepting states so that it never appears on a
// right-hand side.
inline Grammar regex_to_grammar(const Regex& r, const std::string& alphabet) {
    std::set<char> lits;
    regex_literals(r, lits);
    for (char c : lits)
        if (alphabet.find(c) == std::string::npos)
            throw Error(std::string("literal '") + c +
                        "' does not belong to the alphabet");

    detail::Nfa n;
    detail::NfaFragment f = detail::build_thompson(r, n);

    // epsilon closures
    std::vector<std::vector<int>> closure(n.states);
    for (int s = 0; s < n.states; ++s) {
        std::vector<bool> vis(n.states, false);
        std::vector<int> stack{s};
        vis[s] = true;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            closure[s].push_back(u);
            for (auto& [a, b] : n.eps)
                if (a == u && !vis[b]) {
                    vis[b] = true;
                    stack.push_back(b);
                }
        }
        std::sort(closure[s].begin(), closure[s].end());
    }

    // epsilon-free transitions: q -a-> closure targets
    std::set<std::tuple<int, char, int>> delta;
    for (auto& [u, a, v] : n.edges)
        for (int q = 0; q < n.states; ++q)
            if (std::binary_search(closure[q].begin(), closure[q].end(), u))
                for (int t : closure[v]) delta.emplace(q, a, t);
    // keep only transitions out of reachable states
    std::vector<bool> reach(n.states, false);
    for (int q : closure[f.start]) reach[q] = true;
    reach[f.start] = true;
    bool grew = true;
    while (grew) {
        grew = false;
        for (auto& [u, a, v] : delta)
            if (reach[u] && !reach[v]) {
                reach[v] = true;
                grew = true;
            }
    }
    std::vector<bool> accepting(n.states, false);
    for (int q = 0; q < n.states; ++q)
        if (std::binary_search(closure[q].begin(), closure[q].end(), f.accept))
            accepting[q] = true;

    // states co-reachable from an accepting state
    std::vector<bool> useful(n.states, false);
    for (int q = 0; q < n.states; ++q) useful[q] = accepting[q];
    grew = true;
    while (grew) {
        grew = false;
        for (auto& [u, a, v] : delta)
            if (useful[v] && !useful[u]) {
                useful[u] = true;
                grew = true;
            }
    }

    // nonterminal per useful reachable non-start state
    Grammar g;
    g.start = "S";
    g.terminals = alphabet;
    std::sort(g.terminals.begin(), g.terminals.end());
    std::map<int, std::string> name;
    int counter = 0;
    auto nt = [&](int q) -> std::string {
        auto it = name.find(q);
        if (it != name.end()) return it->second;
        std::string s = "Q" + std::to_string(counter++);
        name.emplace(q, s);
        return s;
    };
    g.nonterminals.push_back("S");
    std::set<Production> prods;
    int q0 = f.start;
    for (auto& [u, a, v] : delta) {
        if (!reach[u] || !useful[v]) continue;
        // words reaching v: via u's words, or directly from the start
        if (u == q0) prods.insert(Production{nt(v), std::nullopt, a});
        else prods.insert(Production{nt(v), nt(u), a});
        if (accepting[v]) {
            if (u == q0) prods.insert(Production{"S", std::nullopt, a});
            else prods.insert(Production{"S", nt(u), a});
        }
    }
    for (auto& [q, s] : name) g.nonterminals.push_back(s);
    std::sort(g.nonterminals.begin(), g.nonterminals.end());
    g.productions.assign(prods.begin(), prods.end());
    g.check_well_formed();
    return g;
}

// Direct regex matching over nonempty words (backtracking); used as the
// cross-check oracle for the grammar route.
inline bool regex_matches(const Regex& r, const Word& w) {
    // set of suffix positions reachable after matching r from position i
    std::function<std::set<size_t>(const Regex&, size_t)> go =
        [&](const Regex& re, size_t i) -> std::set<size_t> {
        switch (re.kind) {
            case Regex::Kind::Literal:
                if (i < w.size() && w[i] == re.literal) return {i + 1};
                return {};
            case Regex::Kind::Concat: {
                std::set<size_t> cur{i};
                for (const Regex& k : re.kids) {
                    std::set<size_t> next;
                    for (size_t p : cur)
                        for (size_t q : go(k, p)) next.insert(q);
                    cur = std::move(next);
                }
                return cur;
            }
            case Regex::Kind::Alt: {
                std::set<size_t> out;
                for (const Regex& k : re.kids)
                    for (size_t q : go(k, i)) out.insert(q);
                return out;
            }
            case Regex::Kind::Star:
            case Regex::Kind::Plus: {
                std::set<size_t> out;
                if (re.kind == Regex::Kind::Star) out.insert(i);
                std::set<size_t> frontier{i};
                while (!frontier.empty()) {
                    std::set<size_t> next;
                    for (size_t p : frontier)
                        for (size_t q : go(re.kids[0], p))
                            if (!out.count(q)) {
                                out.insert(q);
                                next.insert(q);
                            }
                    frontier = std::move(next);
                }
                return out;
            }
        }
        return {};
    };
    std::set<size_t> ends = go(r, 0);
    return !w.empty() && ends.count(w.size()) != 0;
}

// ---------------------------------------------------------------------------
// Hard instances: unary grammars whose shortest rejected word has length
// equal to the product of the first k primes, with description size linear in
// their sum. The grammar accepts a^n iff n is not divisible by at least one
// of the primes: one residue-tracking cycle of nonterminals per prime.

inline std::vector<int> first_primes(int k) {
    std::vector<int> primes;
    for (int cand = 2; static_cast<int>(primes.size()) < k; ++cand) {
        bool prime = true;
        for (int p : primes)
            if (cand % p == 0) {
                prime = false;
                break;
            }
        if (prime) primes.push_back(cand);
    }
    return primes;
}

inline Grammar hard_instance(int k) {
    if (k < 1) throw Error("hard instance index must be at least 1");
    Grammar g;
    g.start = "S";
    g.terminals = "a";
    g.nonterminals.push_back("S");
    auto name = [](int p, int r) {
        return "C" + std::to_string(p) + "R" + std::to_string(r);
    };
    for (int p : first_primes(k)) {
        for (int r = 0; r < p; ++r) g.nonterminals.push_back(name(p, r));
        // the residue-r nonterminal derives a^n exactly when n = r (mod p)
        g.productions.push_back(Production{name(p, 1 % p), std::nullopt, 'a'});
        for (int r = 0; r < p; ++r)
            g.productions.push_back(
                Production{name(p, (r + 1) % p), name(p, r), 'a'});
        for (int r = 0; r < p; ++r)
            if ((r + 1) % p != 0)
                g.productions.push_back(Production{"S", name(p, r), 'a'});
    }
    g.productions.push_back(Production{"S", std::nullopt, 'a'});
    std::sort(g.nonterminals.begin(), g.nonterminals.end());
    g.check_well_formed();
    return g;
}

}  // namespace hornap
