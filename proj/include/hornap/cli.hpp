#pragma once

// Command-line front end. Every subcommand answers a single query with
// deterministic output; --format json yields byte-stable documents. Exit
// codes: 0 = query answered, 1 = input or validation error, 2 = internal
// invariant violation.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hornap/amalgamation.hpp"
#include "hornap/ap_search.hpp"
#include "hornap/grammar.hpp"
#include "hornap/json_io.hpp"
#include "hornap/logic.hpp"
#include "hornap/models.hpp"
#include "hornap/reduction.hpp"
#include "hornap/text.hpp"

namespace hornap::cli {

struct Options {
    std::string sentence, grammar, regex, clause, word, certificate, output;
    std::string input;  // positional
    int max_vars = 3, max_atoms = 10, max_size = 3, word_bound = 4;
    std::string format = "human";
    unsigned long long seed = 0;
    int jobs = 1;
    int k = 1;  // hard-instance index
};

namespace detail {

inline HornSentence load_sentence(const Options& o) {
    if (o.sentence.empty()) throw Error("--sentence is required");
    return parse_sentence(read_file(o.sentence));
}

inline Grammar load_grammar(const Options& o) {
    if (o.grammar.empty()) throw Error("--grammar is required");
    return parse_grammar(read_file(o.grammar));
}

// "A:word" selects a nonterminal; bare "word" means the start symbol.
inline std::pair<std::string, Word> split_word(const Grammar& g,
                                               const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) return {g.start, s};
    return {s.substr(0, colon), s.substr(colon + 1)};
}

// Prints the full document; -o receives `artifact` when given (a bare
// certificate, re-verifiable from the file alone), otherwise the document.
inline void emit(const Options& o, const Json& doc, const std::string& human,
                 std::ostream& out, const Json& artifact = Json()) {
    if (o.format == "json")
        out << doc.dump(2) << "\n";
    else
        out << human;
    if (!o.output.empty())
        write_file(o.output,
                   (artifact.is_null() ? doc : artifact).dump(2) + "\n");
}

inline std::string atoms_text(const std::vector<Atom>& atoms, const Signature& sig) {
    std::vector<Atom> sorted = atoms;
    std::sort(sorted.begin(), sorted.end());
    std::string s;
    for (size_t i = 0; i < sorted.size(); ++i) {
        if (i) s += ", ";
        s += sorted[i].str(sig);
    }
    return s.empty() ? "(empty)" : s;
}

inline int cmd_entails(const Options& o, std::ostream& out) {
    HornSentence phi = load_sentence(o);
    HornClause goal = parse_clause(o.clause, phi.sig);
    bool yes = entails_clause(phi, goal);
    Json j;
    j["entailed"] = yes;
    std::string human = std::string("entailed: ") + (yes ? "true" : "false") + "\n";
    if (yes) {
        DeductionCertificate cert = extract_sld_certificate(phi, goal);
        j["certificate"] = certificate_to_json(cert, goal, phi.sig);
        human += std::string("certificate kind: ") + kind_name(cert.kind) + "\n";
        // certificates are emitted only in a re-verifiable form
        VerifyResult v = verify_certificate(phi, goal, cert);
        if (!v.ok) throw InternalError("emitted certificate failed to verify");
    } else {
        std::vector<Var> dom;
        FiniteStructure cm = canonical_countermodel(phi, goal, &dom);
        j["countermodel"] = structure_to_json(cm, dom);
        human += "countermodel over {";
        for (size_t i = 0; i < dom.size(); ++i)
            human += (i ? ", " : "") + dom[i];
        human += "}\n";
    }
    emit(o, j, human, out, yes ? j["certificate"] : Json());
    return 0;
}

inline int cmd_saturate(const Options& o, std::ostream& out) {
    HornSentence phi = load_sentence(o);
    std::vector<Atom> start;
    try {
        start = parse_atom_list(o.clause, phi.sig);
    } catch (const ParseError&) {
        start = parse_clause(o.clause, phi.sig).premise;
    }
    std::vector<Var> domain;
    for (const Atom& a : start)
        for (const Var& v : a.args)
            if (std::find(domain.begin(), domain.end(), v) == domain.end())
                domain.push_back(v);
    CanonicalStructure c = saturate(phi, start, domain);
    Json j;
    Json dom = Json::array();
    for (const Var& v : c.domain) dom.push_back(v);
    j["domain"] = std::move(dom);
    j["consistent"] = !c.inconsistent;
    j["atoms"] = atoms_to_json(c.atoms, phi.sig);
    std::string human = std::string("consistent: ") +
                        (c.inconsistent ? "false" : "true") + "\n" +
                        "closure: " + atoms_text(c.atoms, phi.sig) + "\n";
    emit(o, j, human, out);
    return 0;
}

inline int cmd_verify(const Options& o, std::ostream& out) {
    HornSentence phi = load_sentence(o);
    if (o.certificate.empty()) throw Error("--certificate is required");
    Json doc = Json::parse(read_file(o.certificate));
    while (doc.contains("counterexample")) doc = doc["counterexample"];
    if (doc.contains("certificate") && doc["certificate"].is_object())
        doc = doc["certificate"];
    VerifyResult v;
    std::string what;
    if (doc.contains("phi")) {
        ApCounterexample cex = counterexample_from_json(doc, phi.sig);
        cex.side1 = check_subsumption(
            phi, SubsumptionQuery{cex.phi, cex.phi1, cex.shared, {cex.y1}});
        cex.side2 = check_subsumption(
            phi, SubsumptionQuery{cex.phi, cex.phi2, cex.shared, {cex.y2}});
        v = verify_counterexample(phi, cex);
        what = "counterexample";
    } else {
        StoredCertificate sc = certificate_from_json(doc, phi.sig);
        v = verify_certificate(phi, sc.goal, sc.certificate);
        what = "deduction";
    }
    Json j;
    j["certificate"] = what;
    j["valid"] = v.ok;
    j["reason"] = v.reason;
    std::string human = what + " certificate: " + (v.ok ? "valid" : "invalid") + "\n";
    if (!v.ok) human += "reason: " + v.reason + "\n";
    emit(o, j, human, out);
    return 0;
}

// "[x1 x2] phi-atoms >> psi-extra-atoms"; shared defaults to the variables
// of the phi part.
inline int cmd_subsumes(const Options& o, std::ostream& out) {
    HornSentence phi = load_sentence(o);
    std::string q = o.clause;
    std::vector<Var> shared;
    bool explicit_shared = false;
    if (!q.empty() && q.front() == '[') {
        auto close = q.find(']');
        if (close == std::string::npos) throw Error("unterminated shared-variable list");
        std::istringstream vs(q.substr(1, close - 1));
        Var v;
        while (vs >> v) shared.push_back(v);
        q = q.substr(close + 1);
        explicit_shared = true;
    }
    auto sep = q.find(">>");
    if (sep == std::string::npos)
        throw Error("subsumption query must look like: PHI >> PSI-EXTRA");
    std::vector<Atom> part_phi = parse_atom_list(q.substr(0, sep), phi.sig);
    std::vector<Atom> part_psi = parse_atom_list(q.substr(sep + 2), phi.sig);
    if (!explicit_shared)
        for (const Atom& a : part_phi)
            for (const Var& v : a.args)
                if (std::find(shared.begin(), shared.end(), v) == shared.end())
                    shared.push_back(v);
    std::vector<Var> extra;
    for (const Atom& a : part_psi)
        for (const Var& v : a.args)
            if (std::find(shared.begin(), shared.end(), v) == shared.end() &&
                std::find(extra.begin(), extra.end(), v) == extra.end())
                extra.push_back(v);
    SubsumptionReport rep =
        check_subsumption(phi, SubsumptionQuery{part_phi, part_psi, shared, extra});
    Json j = subsumption_report_to_json(rep, phi.sig);
    std::string human =
        std::string("subsumes: ") + (rep.holds ? "true" : "false") + "\n";
    for (const auto& v : rep.violations)
        human += "violating consequence: " + (v ? v->str(phi.sig) : "bot") + "\n";
    emit(o, j, human, out);
    return 0;
}

inline int cmd_find_ap(const Options& o, std::ostream& out) {
    HornSentence phi = load_sentence(o);
    ApSearchResult res = find_ap_counterexample(phi, o.max_vars, o.max_atoms);
    Json j;
    j["maxSharedVars"] = o.max_vars;
    j["maxAtoms"] = o.max_atoms;
    std::string verdict;
    if (res.counterexample) verdict = "counterexample";
    else if (res.complete_clauses) verdict = "ap-holds-complete-clauses";
    else verdict = "no-counterexample-within-bounds";
    j["verdict"] = verdict;
    std::string human = "verdict: " + verdict + "\n";
    if (res.counterexample) {
        j["counterexample"] = counterexample_to_json(*res.counterexample, phi.sig);
        const ApCounterexample& c = *res.counterexample;
        human += "phi:  " + atoms_text(c.phi, phi.sig) + "\n";
        human += "phi1: " + atoms_text(c.phi1, phi.sig) + "\n";
        human += "phi2: " + atoms_text(c.phi2, phi.sig) + "\n";
        human += "chi:  " + (c.chi ? c.chi->str(phi.sig) : std::string("bot")) + "\n";
    }
    emit(o, j, human, out,
         res.counterexample ? j["counterexample"] : Json());
    return 0;
}

inline int cmd_amalgamate(const Options& o, std::ostream& out) {
    HornSentence phi = load_sentence(o);
    if (o.input.empty()) throw Error("expected a triple file argument");
    Json doc = Json::parse(read_file(o.input));
    std::vector<Var> an, b1n, b2n;
    FiniteStructure A = structure_from_json(doc.at("A"), phi.sig, &an);
    FiniteStructure B1 = structure_from_json(doc.at("B1"), phi.sig, &b1n);
    FiniteStructure B2 = structure_from_json(doc.at("B2"), phi.sig, &b2n);
    auto read_map = [&](const Json& m, const std::vector<Var>& from,
                        const std::vector<Var>& to, const FiniteStructure& src,
                        const FiniteStructure& dst) {
        StructureMap sm{src, dst, std::vector<int>(from.size(), -1)};
        for (size_t i = 0; i < from.size(); ++i) {
            std::string img = m.at(from[i]).get<std::string>();
            auto it = std::find(to.begin(), to.end(), img);
            if (it == to.end()) throw Error("map image outside target: " + img);
            sm.map[i] = static_cast<int>(it - to.begin());
        }
        return sm;
    };
    StructureMap e1 = read_map(doc.at("e1"), an, b1n, A, B1);
    StructureMap e2 = read_map(doc.at("e2"), an, b2n, A, B2);
    AmalgamResult res = one_point_amalgam(phi, A, B1, B2, e1, e2);
    Json j;
    if (res.amalgam) {
        j["outcome"] = "amalgam";
        std::vector<Var> cn;
        for (int i = 0; i < A.size; ++i) cn.push_back(an[i]);
        cn.push_back("y1");
        cn.push_back("y2");
        j["amalgam"] = structure_to_json(res.amalgam->structure, cn);
        emit(o, j, "outcome: amalgam\n", out);
    } else {
        j["outcome"] = "refuted";
        j["counterexample"] =
            counterexample_to_json(*res.refutation, phi.sig);
        emit(o, j, "outcome: refuted\n", out);
    }
    return 0;
}

inline int cmd_enumerate_models(const Options& o, std::ostream& out) {
    HornSentence phi = load_sentence(o);
    std::vector<FiniteStructure> models = enumerate_models(phi, o.max_size);
    Json j;
    j["size"] = o.max_size;
    j["count"] = models.size();
    Json arr = Json::array();
    std::vector<Var> names;
    for (int i = 0; i < o.max_size; ++i) names.push_back("e" + std::to_string(i + 1));
    for (const FiniteStructure& m : models)
        arr.push_back(structure_to_json(m, names));
    j["models"] = std::move(arr);
    emit(o, j, "models of size " + std::to_string(o.max_size) + ": " +
                   std::to_string(models.size()) + "\n", out);
    return 0;
}

inline int cmd_brute_ap(const Options& o, std::ostream& out) {
    HornSentence phi = load_sentence(o);
    std::optional<OnePointTriple> t = brute_force_ap(phi, o.max_size);
    Json j;
    j["maxSize"] = o.max_size;
    j["failingTriple"] = t.has_value();
    std::string human;
    if (t) {
        std::vector<Var> names;
        for (int i = 0; i < t->base.size; ++i)
            names.push_back("a" + std::to_string(i + 1));
        std::vector<Var> n1 = names, n2 = names;
        n1.push_back("y1");
        n2.push_back("y2");
        j["A"] = structure_to_json(t->base, names);
        j["B1"] = structure_to_json(t->ext1, n1);
        j["B2"] = structure_to_json(t->ext2, n2);
        human = "failing triple found (base size " +
                std::to_string(t->base.size) + ")\n";
    } else {
        human = "no failing triple up to size " + std::to_string(o.max_size) + "\n";
    }
    emit(o, j, human, out);
    return 0;
}

inline int cmd_regex2grammar(const Options& o, std::ostream& out) {
    if (o.regex.empty()) throw Error("--regex is required");
    Regex r = parse_regex(o.regex);
    std::set<char> lits;
    regex_literals(r, lits);
    std::string alphabet(lits.begin(), lits.end());
    Grammar g = regex_to_grammar(r, alphabet);
    std::string text = print_grammar(g);
    Json j;
    j["grammar"] = text;
    if (!o.output.empty()) {
        write_file(o.output, text);
        if (o.format == "json") out << j.dump(2) << "\n";
        else out << "wrote " << o.output << "\n";
    } else {
        if (o.format == "json") out << j.dump(2) << "\n";
        else out << text;
    }
    return 0;
}

inline int cmd_derives(const Options& o, std::ostream& out) {
    Grammar g = load_grammar(o);
    auto [nt, w] = split_word(g, o.word);
    bool yes = derives(g, nt, w);
    Json j;
    j["nonterminal"] = nt;
    j["word"] = w;
    j["derives"] = yes;
    emit(o, j, std::string("derives: ") + (yes ? "true" : "false") + "\n", out);
    return 0;
}

inline int cmd_universality(const Options& o, std::ostream& out) {
    Grammar g = load_grammar(o);
    std::optional<Word> w = shortest_rejected(g, o.word_bound);
    Json j;
    j["wordBound"] = o.word_bound;
    j["universalUpToBound"] = !w.has_value();
    if (w) j["shortestRejected"] = *w;
    std::string human =
        w ? "shortest rejected word: " + *w + "\n"
          : "all nonempty words accepted up to length " +
                std::to_string(o.word_bound) + "\n";
    emit(o, j, human, out);
    return 0;
}

inline int cmd_compile(const Options& o, std::ostream& out) {
    Grammar g = load_grammar(o);
    CompiledReduction red = compile(g);
    std::string text = print_compiled(red);
    if (!o.output.empty()) {
        write_file(o.output, text);
        out << "wrote " << o.output << "\n";
    } else {
        out << text;
    }
    return 0;
}

inline int cmd_claim1(const Options& o, std::ostream& out) {
    Grammar g = load_grammar(o);
    CompiledReduction red = compile(g);
    auto [nt, w] = split_word(g, o.word);
    auto [side_g, side_e] = check_claim1(red, nt, w);
    Json j;
    j["nonterminal"] = nt;
    j["word"] = w;
    j["derivationSide"] = side_g;
    j["entailmentSide"] = side_e;
    j["agree"] = side_g == side_e;
    std::string human = std::string("derivation side:  ") +
                        (side_g ? "true" : "false") + "\n" +
                        "entailment side:  " + (side_e ? "true" : "false") + "\n";
    emit(o, j, human, out);
    return 0;
}

inline int cmd_claim2(const Options& o, std::ostream& out) {
    Grammar g = load_grammar(o);
    CompiledReduction red = compile(g);
    std::vector<Atom> atoms = parse_atom_list(o.clause, red.sentence.sig);
    auto [side_e, side_p] = check_claim2(red, atoms);
    Json j;
    j["entailmentSide"] = side_e;
    j["patternSide"] = side_p;
    j["agree"] = side_e == side_p;
    std::string human = std::string("entailment side: ") +
                        (side_e ? "true" : "false") + "\n" +
                        "pattern side:    " + (side_p ? "true" : "false") + "\n";
    emit(o, j, human, out);
    return 0;
}

inline int cmd_encode_word(const Options& o, std::ostream& out) {
    if (o.word.empty()) throw Error("--word is required");
    Grammar g;
    if (!o.grammar.empty()) {
        g = load_grammar(o);
    } else {
        std::set<char> letters(o.word.begin(), o.word.end());
        g.start = "S";
        g.nonterminals = {"S"};
        g.terminals.assign(letters.begin(), letters.end());
    }
    CompiledReduction red = compile(g);
    EncodedWordForm e = encode_word(red, o.word);
    Json j;
    j["word"] = e.word;
    Json shared = Json::array();
    for (const Var& v : e.shared) shared.push_back(v);
    j["shared"] = std::move(shared);
    j["phi"] = atoms_to_json(e.phi, red.sentence.sig);
    j["phi1"] = atoms_to_json(e.phi1, red.sentence.sig);
    j["phi2"] = atoms_to_json(e.phi2, red.sentence.sig);
    std::string human;
    human += "phi:  " + atoms_text(e.phi, red.sentence.sig) + "\n";
    human += "phi1: " + atoms_text(e.phi1, red.sentence.sig) + "\n";
    human += "phi2: " + atoms_text(e.phi2, red.sentence.sig) + "\n";
    emit(o, j, human, out);
    return 0;
}

inline int cmd_decode(const Options& o, std::ostream& out) {
    if (o.sentence.empty()) throw Error("--sentence is required");
    CompiledReduction red = read_compiled(read_file(o.sentence));
    if (o.certificate.empty()) throw Error("--certificate is required");
    Json doc = Json::parse(read_file(o.certificate));
    ApCounterexample cex = counterexample_from_json(doc, red.sentence.sig);
    cex.side1 = check_subsumption(
        red.sentence, SubsumptionQuery{cex.phi, cex.phi1, cex.shared, {cex.y1}});
    cex.side2 = check_subsumption(
        red.sentence, SubsumptionQuery{cex.phi, cex.phi2, cex.shared, {cex.y2}});
    Word w = decode_counterexample(red, cex);
    Json j;
    j["word"] = w;
    emit(o, j, "decoded word: " + w + "\n", out);
    return 0;
}

inline int cmd_cross_check(const Options& o, std::ostream& out,
                           bool explicit_bounds) {
    Grammar g = load_grammar(o);
    CrossCheckReport rep =
        explicit_bounds ? cross_check(g, o.word_bound, o.max_vars, o.max_atoms)
                        : cross_check(g, o.word_bound);
    Json j;
    j["wordBound"] = rep.word_bound;
    j["maxSharedVars"] = rep.max_vars;
    j["maxAtoms"] = rep.max_atoms;
    j["rejectedWord"] = rep.has_rejected ? Json(rep.rejected) : Json(nullptr);
    j["counterexampleFound"] = rep.counterexample.has_value();
    if (rep.counterexample) j["decodedWord"] = rep.decoded;
    j["agree"] = rep.agree;
    std::string human;
    human += "rejected word:  " + (rep.has_rejected ? rep.rejected : "(none)") + "\n";
    human += std::string("counterexample: ") +
             (rep.counterexample ? "found" : "(none)") + "\n";
    if (rep.counterexample) human += "decoded word:   " + rep.decoded + "\n";
    human += std::string("agree: ") + (rep.agree ? "true" : "false") + "\n";
    emit(o, j, human, out);
    return 0;
}

inline int cmd_hard_instance(const Options& o, std::ostream& out) {
    Grammar g = hard_instance(o.k);
    std::string text = print_grammar(g);
    if (!o.output.empty()) {
        write_file(o.output, text);
        out << "wrote " << o.output << "\n";
    } else {
        out << text;
    }
    return 0;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
    CLI::App app{"amalgamation toolkit for universal Horn sentences"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", o.format, "output format: human or json")
            ->check(CLI::IsMember({"human", "json"}));
        sub->add_option("--seed", o.seed, "seed for randomized helpers");
        sub->add_option("--jobs", o.jobs, "worker cap")->check(CLI::PositiveNumber);
        sub->add_option("-o,--output", o.output, "write the result to a file");
    };

    CLI::App* entails = app.add_subcommand("entails", "decide sentence |= clause");
    entails->add_option("--sentence", o.sentence)->required();
    entails->add_option("--clause", o.clause)->required();
    add_common(entails);

    CLI::App* saturate = app.add_subcommand("saturate", "close an atom set");
    saturate->add_option("--sentence", o.sentence)->required();
    saturate->add_option("--clause", o.clause, "start atoms")->required();
    add_common(saturate);

    CLI::App* verify = app.add_subcommand("verify", "re-verify a certificate");
    verify->add_option("--sentence", o.sentence)->required();
    verify->add_option("--certificate", o.certificate)->required();
    add_common(verify);

    CLI::App* subsumes = app.add_subcommand("subsumes", "check subsumption");
    subsumes->add_option("--sentence", o.sentence)->required();
    subsumes->add_option("--clause", o.clause, "query: [xs] PHI >> PSI")->required();
    add_common(subsumes);

    CLI::App* findap = app.add_subcommand("find-ap", "search for a counterexample");
    findap->add_option("--sentence", o.sentence)->required();
    findap->add_option("--max-vars", o.max_vars)->check(CLI::PositiveNumber);
    findap->add_option("--max-atoms", o.max_atoms)->check(CLI::PositiveNumber);
    add_common(findap);

    CLI::App* amal = app.add_subcommand("amalgamate", "amalgamate a one-point triple");
    amal->add_option("--sentence", o.sentence)->required();
    amal->add_option("triple", o.input, "triple JSON file")->required();
    add_common(amal);

    CLI::App* enumm = app.add_subcommand("enumerate-models", "list labeled models");
    enumm->add_option("--sentence", o.sentence)->required();
    enumm->add_option("--max-size", o.max_size)->check(CLI::NonNegativeNumber);
    add_common(enumm);

    CLI::App* bruteap = app.add_subcommand("brute-ap", "brute-force amalgamation check");
    bruteap->add_option("--sentence", o.sentence)->required();
    bruteap->add_option("--max-size", o.max_size)->check(CLI::PositiveNumber);
    add_common(bruteap);

    CLI::App* r2g = app.add_subcommand("regex2grammar", "compile a regular expression");
    r2g->add_option("--regex", o.regex)->required();
    add_common(r2g);

    CLI::App* der = app.add_subcommand("derives", "grammar membership");
    der->add_option("--grammar", o.grammar)->required();
    der->add_option("--word", o.word, "word, or NONTERMINAL:word")->required();
    add_common(der);

    CLI::App* uni = app.add_subcommand("universality", "bounded universality check");
    uni->add_option("--grammar", o.grammar)->required();
    uni->add_option("--word-bound", o.word_bound)->check(CLI::PositiveNumber);
    add_common(uni);

    CLI::App* comp = app.add_subcommand("compile", "grammar to Horn sentence");
    comp->add_option("--grammar", o.grammar)->required();
    add_common(comp);

    CLI::App* c1 = app.add_subcommand("claim1", "derivability vs entailment");
    c1->add_option("--grammar", o.grammar)->required();
    c1->add_option("--word", o.word, "word, or NONTERMINAL:word")->required();
    add_common(c1);

    CLI::App* c2 = app.add_subcommand("claim2", "bottom entailment vs path pattern");
    c2->add_option("--grammar", o.grammar)->required();
    c2->add_option("--clause", o.clause, "atom list")->required();
    add_common(c2);

    CLI::App* enc = app.add_subcommand("encode-word", "candidate triple for a word");
    enc->add_option("--word", o.word)->required();
    enc->add_option("--grammar", o.grammar);
    add_common(enc);

    CLI::App* dec = app.add_subcommand("decode", "counterexample to rejected word");
    dec->add_option("--sentence", o.sentence, "compiled Horn file")->required();
    dec->add_option("--certificate", o.certificate)->required();
    add_common(dec);

    CLI::App* cc = app.add_subcommand("cross-check", "word route vs amalgamation route");
    cc->add_option("--grammar", o.grammar)->required();
    cc->add_option("--word-bound", o.word_bound)->check(CLI::PositiveNumber);
    CLI::Option* cc_vars = cc->add_option("--max-vars", o.max_vars);
    CLI::Option* cc_atoms = cc->add_option("--max-atoms", o.max_atoms);
    add_common(cc);

    CLI::App* hard = app.add_subcommand("hard-instance", "grammar with an exponentially late gap");
    hard->add_option("k", o.k, "number of prime cycles")->required()
        ->check(CLI::PositiveNumber);
    add_common(hard);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (*entails) return detail::cmd_entails(o, out);
        if (*saturate) return detail::cmd_saturate(o, out);
        if (*verify) return detail::cmd_verify(o, out);
        if (*subsumes) return detail::cmd_subsumes(o, out);
        if (*findap) return detail::cmd_find_ap(o, out);
        if (*amal) return detail::cmd_amalgamate(o, out);
        if (*enumm) return detail::cmd_enumerate_models(o, out);
        if (*bruteap) return detail::cmd_brute_ap(o, out);
        if (*r2g) return detail::cmd_regex2grammar(o, out);
        if (*der) return detail::cmd_derives(o, out);
        if (*uni) return detail::cmd_universality(o, out);
        if (*comp) return detail::cmd_compile(o, out);
        if (*c1) return detail::cmd_claim1(o, out);
        if (*c2) return detail::cmd_claim2(o, out);
        if (*enc) return detail::cmd_encode_word(o, out);
        if (*dec) return detail::cmd_decode(o, out);
        if (*cc)
            return detail::cmd_cross_check(o, out,
                                           cc_vars->count() || cc_atoms->count());
        if (*hard) return detail::cmd_hard_instance(o, out);
        err << "error: no subcommand\n";
        return 1;
    } catch (const InternalError& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const Json::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace hornap::cli
