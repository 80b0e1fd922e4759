#pragma once

// Text format for Horn sentences:
//
//   rel NAME/ARITY.                  declarations
//   atom, atom, ... -> atom.         clause
//   atom, atom, ... -> bot.          clause concluding bottom
//   -> atom.                         fact (empty premise)
//
// Variables are lowercase identifiers, '#' starts a comment to end of line.

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hornap/logic.hpp"

namespace hornap {

struct ParseError : Error {
    int line, column;
    ParseError(int l, int c, const std::string& msg)
        : Error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg),
          line(l), column(c) {}
};

namespace detail {

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    struct Token {
        enum Kind { Ident, Punct, End } kind = End;
        std::string value;  // identifier text or single punct char
        int line = 1, column = 1;
    };

    Token peek() {
        if (!has_peek_) {
            peeked_ = lex();
            has_peek_ = true;
        }
        return peeked_;
    }

    Token next() {
        Token t = peek();
        has_peek_ = false;
        return t;
    }

    [[noreturn]] void fail(const Token& at, const std::string& msg) const {
        throw ParseError(at.line, at.column, msg);
    }

private:
    Token lex() {
        skip_ws();
        Token t;
        t.line = line_;
        t.column = col_;
        if (pos_ >= text_.size()) return t;
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string id;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '_'))
                id += advance();
            t.kind = Token::Ident;
            t.value = std::move(id);
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num;
            while (pos_ < text_.size() &&
                   std::isdigit(static_cast<unsigned char>(text_[pos_])))
                num += advance();
            t.kind = Token::Ident;
            t.value = std::move(num);
            return t;
        }
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            advance();
            advance();
            t.kind = Token::Punct;
            t.value = "->";
            return t;
        }
        if (std::string("(),./=").find(c) != std::string::npos) {
            t.kind = Token::Punct;
            t.value = std::string(1, advance());
            return t;
        }
        throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
    }

    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    char advance() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token peeked_;
    bool has_peek_ = false;
};

inline void expect_punct(Lexer& lx, const std::string& p) {
    auto t = lx.next();
    if (t.kind != Lexer::Token::Punct || t.value != p)
        lx.fail(t, "expected '" + p + "'");
}

inline Var parse_var(Lexer& lx) {
    auto t = lx.next();
    if (t.kind == Lexer::Token::Punct && t.value == "=")
        lx.fail(t, "equality atoms are not permitted");
    if (t.kind != Lexer::Token::Ident)
        lx.fail(t, "expected a variable");
    if (!std::islower(static_cast<unsigned char>(t.value[0])))
        lx.fail(t, "variables must start with a lowercase letter: '" +
                       t.value + "'");
    if (lx.peek().kind == Lexer::Token::Punct && lx.peek().value == "=")
        lx.fail(lx.peek(), "equality atoms are not permitted");
    return t.value;
}

inline Atom parse_atom(Lexer& lx, const Signature& sig) {
    auto t = lx.next();
    if (t.kind != Lexer::Token::Ident) lx.fail(t, "expected a relation name");
    int sym = sig.index_of(t.value);
    if (sym < 0) lx.fail(t, "unknown relation '" + t.value + "'");
    expect_punct(lx, "(");
    std::vector<Var> args;
    if (!(lx.peek().kind == Lexer::Token::Punct && lx.peek().value == ")")) {
        args.push_back(parse_var(lx));
        while (lx.peek().kind == Lexer::Token::Punct && lx.peek().value == ",") {
            lx.next();
            args.push_back(parse_var(lx));
        }
    }
    expect_punct(lx, ")");
    if (static_cast<int>(args.size()) != sig.arity(sym))
        lx.fail(t, "arity mismatch: relation '" + t.value + "' expects " +
                       std::to_string(sig.arity(sym)) + " argument(s), got " +
                       std::to_string(args.size()));
    return Atom{sym, std::move(args)};
}

// premise -> conclusion (no trailing '.')
inline HornClause parse_clause_body(Lexer& lx, const Signature& sig) {
    HornClause c;
    if (!(lx.peek().kind == Lexer::Token::Punct && lx.peek().value == "->")) {
        c.premise.push_back(parse_atom(lx, sig));
        while (lx.peek().kind == Lexer::Token::Punct && lx.peek().value == ",") {
            lx.next();
            c.premise.push_back(parse_atom(lx, sig));
        }
    }
    expect_punct(lx, "->");
    if (lx.peek().kind == Lexer::Token::Ident && lx.peek().value == "bot") {
        lx.next();
        c.conclusion.reset();
    } else {
        c.conclusion = parse_atom(lx, sig);
    }
    c.normalize();
    return c;
}

}  // namespace detail

// Parses the Horn file format.
inline HornSentence parse_sentence(const std::string& text) {
    detail::Lexer lx(text);
    HornSentence s;
    while (true) {
        auto t = lx.peek();
        if (t.kind == detail::Lexer::Token::End) break;
        if (t.kind == detail::Lexer::Token::Ident && t.value == "rel") {
            lx.next();
            auto name = lx.next();
            if (name.kind != detail::Lexer::Token::Ident)
                lx.fail(name, "expected a relation name after 'rel'");
            detail::expect_punct(lx, "/");
            auto ar = lx.next();
            if (ar.kind != detail::Lexer::Token::Ident ||
                ar.value.find_first_not_of("0123456789") != std::string::npos)
                lx.fail(ar, "expected an arity");
            try {
                s.sig.add(name.value, std::stoi(ar.value));
            } catch (const Error& e) {
                lx.fail(name, e.what());
            }
            detail::expect_punct(lx, ".");
        } else {
            HornClause c = detail::parse_clause_body(lx, s.sig);
            detail::expect_punct(lx, ".");
            s.clauses.push_back(std::move(c));
        }
    }
    s.check_well_formed();
    return s;
}

// Parses a single clause ("P(x), Q(x) -> R(x)." — final '.' optional)
// against an existing signature.
inline HornClause parse_clause(const std::string& text, const Signature& sig) {
    detail::Lexer lx(text);
    HornClause c = detail::parse_clause_body(lx, sig);
    if (lx.peek().kind == detail::Lexer::Token::Punct && lx.peek().value == ".")
        lx.next();
    auto t = lx.peek();
    if (t.kind != detail::Lexer::Token::End)
        lx.fail(t, "trailing input after clause");
    return c;
}

// Parses a comma-separated atom list ("P(x), E(x,y)"); empty input allowed.
inline std::vector<Atom> parse_atom_list(const std::string& text,
                                         const Signature& sig) {
    detail::Lexer lx(text);
    std::vector<Atom> atoms;
    if (lx.peek().kind == detail::Lexer::Token::End) return atoms;
    atoms.push_back(detail::parse_atom(lx, sig));
    while (lx.peek().kind == detail::Lexer::Token::Punct &&
           lx.peek().value == ",") {
        lx.next();
        atoms.push_back(detail::parse_atom(lx, sig));
    }
    auto t = lx.peek();
    if (t.kind != detail::Lexer::Token::End)
        lx.fail(t, "trailing input after atom list");
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    return atoms;
}

inline std::string print_sentence(const HornSentence& s,
                                  const std::vector<std::string>& header_comments = {}) {
    std::string out;
    for (const auto& c : header_comments) out += "# " + c + "\n";
    for (const auto& sym : s.sig.symbols())
        out += "rel " + sym.name + "/" + std::to_string(sym.arity) + ".\n";
    for (const HornClause& c : s.clauses) out += c.str(s.sig) + "\n";
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
}

}  // namespace hornap
