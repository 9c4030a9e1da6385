#include "interpkit/cli.hpp"

#include "interpkit/codec.hpp"
#include "interpkit/presentations.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace ik::cli {

namespace {

auto exit_code(Truth t) -> int {
  switch (t) {
    case Truth::True: return kTrue;
    case Truth::False: return kFalse;
    case Truth::Unknown: return kUnknown;
  }
  return kUnknown;
}

auto read_file(const std::string& path) -> std::string {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// An integer, or a parenthesised comma-separated list of literals.
auto parse_element(const std::string& s, std::size_t& i) -> Element {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  if (i < s.size() && s[i] == '(') {
    ++i;
    std::vector<Element> items;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i < s.size() && s[i] == ')') {
      ++i;
      return Element::of(items);
    }
    for (;;) {
      items.push_back(parse_element(s, i));
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i < s.size() && s[i] == ',') {
        ++i;
        continue;
      }
      if (i < s.size() && s[i] == ')') {
        ++i;
        return Element::of(items);
      }
      throw std::runtime_error("bad element literal: " + s);
    }
  }
  std::size_t start = i;
  if (i < s.size() && s[i] == '-') ++i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (start == i || (s[start] == '-' && i == start + 1)) throw std::runtime_error("bad element literal: " + s);
  return Element::scalar(Int(s.substr(start, i - start)));
}

// Lines "name literal..."; '#' starts a comment.
auto read_hints(const std::string& path) -> std::map<std::string, std::vector<Element>> {
  std::map<std::string, std::vector<Element>> hints;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    line = line.substr(0, line.find('#'));
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name)) continue;
    std::string rest;
    std::getline(ls, rest);
    std::size_t i = 0;
    for (;;) {
      while (i < rest.size() && std::isspace(static_cast<unsigned char>(rest[i]))) ++i;
      if (i >= rest.size()) break;
      hints[name].push_back(parse_element(rest, i));
    }
  }
  return hints;
}

auto split_words(const std::string& s) -> std::vector<fg::Word> {
  std::vector<fg::Word> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ';'))
    if (!part.empty()) out.push_back(fg::parse_word(part));
  return out;
}

auto model_for(const std::string& name, int rank) -> ModelPtr {
  if (name == "arith") return builtin_model("nat");
  if (name == "free" || name == "list_free") return builtin_model(name, rank);
  return builtin_model(name);
}

struct Options {
  std::string model = "nat";
  int rank = 2;
  std::uint64_t bound = 30;
  std::uint64_t budget = 1000;
  std::string hints;
  std::string relators;
  std::string code_file;
  std::string kind;
  std::string oracle = "abelian";
  std::uint64_t samples = 1000;
  int maxlen = 4;
  std::uint64_t seed = 1;
  bool solve = false;
  std::vector<std::string> pos;
};

auto make_budget(const Options& o) -> Budget {
  Budget b = codec_budget();
  b.max_witnesses = o.budget;
  if (!o.hints.empty()) b.hints = read_hints(o.hints);
  return b;
}

auto load_code(const Options& o, const std::string& name) -> InterpretationCode {
  std::string n = name;
  if (n.empty()) {
    // --code names a file, or a built-in code when no such file exists.
    if (std::ifstream(o.code_file)) return read_code(read_file(o.code_file));
    n = o.code_file;
  }
  if (n == "free") return fg::free_code(o.rank);
  return builtin_code(n);
}

auto need(const Options& o, std::size_t n, const std::string& what) -> void {
  if (o.pos.size() != n) throw CLI::ValidationError(what, "expected " + std::to_string(n) + " argument(s)");
}

auto presentation(const Options& o) -> pres::Presentation { return {o.rank, split_words(o.relators)}; }

auto cmd_encode(const Options& o, std::ostream& out) -> int {
  NatTuple t;
  for (const auto& s : o.pos) t.emplace_back(s);
  out << encode_tuple(t) << "\n";
  return kTrue;
}

auto cmd_decode(const Options& o, std::ostream& out) -> int {
  need(o, 1, "decode");
  auto t = decode_tuple(Int(o.pos[0]));
  for (std::size_t i = 0; i < t.size(); ++i) out << (i ? "," : "") << t[i];
  out << "\n";
  return kTrue;
}

auto cmd_eval(const Options& o, std::ostream& out) -> int {
  need(o, 1, "eval");
  ModelPtr m = model_for(o.model, o.rank);
  Formula f = parse(o.pos[0], m->signature());
  Budget b = make_budget(o);
  b.solve = o.solve;
  Truth t = eval_formula(*m, f, b);
  out << to_string(t) << "\n";
  return exit_code(t);
}

auto cmd_code(const std::string& sub, const Options& o, std::ostream& out) -> int {
  if (sub == "show") {
    out << write_code(load_code(o, o.pos.empty() ? "" : o.pos[0]));
    return kTrue;
  }
  if (sub == "check") {
    auto c = load_code(o, o.pos.empty() ? "" : o.pos[0]);
    ModelPtr m = model_for(c.target.name, o.rank);
    auto rep = validate(c, *m, o.bound, make_budget(o));
    for (const auto& ch : rep.checks) {
      out << ch.name << ": checked " << ch.checked << ", failed " << ch.failed << ", unknown " << ch.unknown;
      if (!ch.counterexample.empty()) out << ", e.g. " << ch.counterexample;
      out << "\n";
    }
    out << (rep.ok() ? "ok" : "FAIL") << "\n";
    return rep.ok() ? kTrue : kFalse;
  }
  if (sub == "compose") {
    need(o, 2, "code compose");
    out << write_code(compose(load_code(o, o.pos[0]), load_code(o, o.pos[1])));
    return kTrue;
  }
  if (sub == "translate") {
    if (o.pos.empty() || o.pos.size() > 2) throw CLI::ValidationError("code translate", "expected [code] formula");
    auto c = load_code(o, o.pos.size() == 2 ? o.pos[0] : "");
    out << render(translate(c, parse(o.pos.back(), c.source))) << "\n";
    return kTrue;
  }
  throw CLI::ValidationError("code", "unknown subcommand " + sub);
}

auto cmd_fg(const std::string& sub, const Options& o, std::ostream& out) -> int {
  using fg::format_word;
  using fg::parse_word;
  int r = o.rank;
  if (sub == "mul") {
    need(o, 2, "fg mul");
    out << format_word(fg::multiply(fg::reduce(parse_word(o.pos[0]), r), fg::reduce(parse_word(o.pos[1]), r), r))
        << "\n";
    return kTrue;
  }
  if (sub == "inv") {
    need(o, 1, "fg inv");
    out << format_word(fg::invert(fg::reduce(parse_word(o.pos[0]), r))) << "\n";
    return kTrue;
  }
  if (sub == "reduce") {
    need(o, 1, "fg reduce");
    out << format_word(fg::reduce(parse_word(o.pos[0]), r)) << "\n";
    return kTrue;
  }
  if (sub == "eq") {
    need(o, 2, "fg eq");
    auto chain = fg::equivalence_witness(parse_word(o.pos[0]), parse_word(o.pos[1]), r);
    out << (chain ? "TRUE" : "FALSE") << "\n";
    return chain ? kTrue : kFalse;
  }
  if (sub == "compile") {
    need(o, 1, "fg compile");
    auto c = fg::compile_sentence(parse(o.pos[0], builtin_signature("free")), r);
    out << render(c.arith) << "\n";
    return kTrue;
  }
  if (sub == "member") {
    need(o, 2, "fg member");
    bool in = fg::membership(split_words(o.pos[0]), parse_word(o.pos[1]), r);
    out << (in ? "TRUE" : "FALSE") << "\n";
    return in ? kTrue : kFalse;
  }
  if (sub == "intersect") {
    need(o, 2, "fg intersect");
    auto basis = fg::intersect(split_words(o.pos[0]), split_words(o.pos[1]), r);
    out << "rank " << basis.size() << "\n";
    for (const auto& w : basis) out << format_word(w) << "\n";
    return kTrue;
  }
  if (sub == "centralizer") {
    need(o, 1, "fg centralizer");
    for (const auto& w : fg::centralizer_sample(parse_word(o.pos[0]), o.maxlen, r)) out << format_word(w) << "\n";
    return kTrue;
  }
  throw CLI::ValidationError("fg", "unknown subcommand " + sub);
}

auto cmd_pres(const std::string& sub, const Options& o, std::ostream& out) -> int {
  auto p = presentation(o);
  pres::SearchBudget sb;
  if (sub == "eq" || sub == "witness") {
    need(o, 2, "pres " + sub);
    auto a = pres::eq_words(p, fg::parse_word(o.pos[0]), fg::parse_word(o.pos[1]), sb);
    if (sub == "witness") {
      if (a.truth == Truth::True)
        for (const auto& w : a.witness) out << fg::format_word(w) << "\n";
      else
        out << to_string(a.truth) << "\n";
      return exit_code(a.truth);
    }
    out << to_string(a.truth) << "\n";
    return exit_code(a.truth);
  }
  if (sub == "member") {
    need(o, 1, "pres member");
    auto a = pres::nc_member(p, fg::parse_word(o.pos[0]), sb);
    out << to_string(a.truth) << "\n";
    return exit_code(a.truth);
  }
  if (sub == "check") {
    pres::WordOracle oracle = o.oracle == "coset" ? pres::coset_oracle(p) : pres::exponent_sum_oracle(p);
    auto q = pres::quotient_code(p, oracle);
    auto v = validate(q.code, *q.model, o.bound, codec_budget());
    auto h = pres::hom_check(p, oracle, o.samples, sb, o.seed);
    out << "validate: " << (v.ok() ? "ok" : "FAIL") << "\n";
    out << "hom: products " << h.products << ", relators " << h.relators << ", kernel " << h.kernel
        << ", violations " << h.violations << "\n";
    if (!h.ok()) out << h.first_violation << "\n";
    return v.ok() && h.ok() ? kTrue : kFalse;
  }
  throw CLI::ValidationError("pres", "unknown subcommand " + sub);
}

auto cmd_axioms(const Options& o, std::ostream& out) -> int {
  auto rep = check_axioms(Int(o.bound), o.samples, o.seed);
  for (int i = 0; i < 5; ++i) {
    out << "S" << i + 1 << ": checked " << rep.s[i].checked << ", failed " << rep.s[i].failed;
    if (!rep.s[i].counterexample.empty()) out << ", e.g. " << rep.s[i].counterexample;
    out << "\n";
  }
  return rep.ok() ? kTrue : kFalse;
}

}  // namespace

auto run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) -> int {
  CLI::App app{"interpretations, arithmetic codings and group words", "interpkit"};
  app.require_subcommand(1);
  Options o;
  std::string chosen;

  auto positional = [&](CLI::App* c, const std::string& help) {
    c->add_option("args", o.pos, help);
  };
  auto rank = [&](CLI::App* c) { c->add_option("--rank", o.rank, "free group rank")->check(CLI::Range(1, 1 << 16)); };
  auto budget = [&](CLI::App* c) {
    c->add_option("--budget", o.budget, "witnesses scanned per unbounded quantifier");
    c->add_option("--hints", o.hints, "witness hints file");
  };

  auto* enc = app.add_subcommand("encode", "code of a tuple of naturals");
  positional(enc, "entries");
  auto* dec = app.add_subcommand("decode", "tuple coded by a natural");
  positional(dec, "code");
  auto* emit = app.add_subcommand("emit", "print an emitted arithmetic formula");
  emit->add_option("--kind", o.kind, "formula kind")->required()->check(CLI::IsMember(emit_kinds()));
  auto* ev = app.add_subcommand("eval", "evaluate a formula in a built-in model");
  ev->add_option("--model", o.model, "nat, list_nat, list_z, free, list_free");
  rank(ev);
  budget(ev);
  ev->add_flag("--solve", o.solve, "pin witnesses from equations in quantifier bodies");
  positional(ev, "formula");

  auto* code = app.add_subcommand("code", "interpretation codes");
  code->require_subcommand(1);
  for (auto [name, help] : {std::pair{"show", "print a code"}, {"check", "validate a code on bounded coordinates"},
                             {"compose", "compose two codes"}, {"translate", "translate a source formula"}}) {
    auto* c = code->add_subcommand(name, help);
    c->add_option("--code", o.code_file, "code file");
    rank(c);
    budget(c);
    c->add_option("--bound", o.bound, "coordinate bound");
    positional(c, "code names or formula");
  }

  auto* fgc = app.add_subcommand("fg", "free group words");
  fgc->require_subcommand(1);
  for (auto [name, help] : {std::pair{"mul", "product of two words"}, {"inv", "inverse of a word"},
                             {"reduce", "free reduction"}, {"eq", "equality in the free group"},
                             {"compile", "compile a group sentence to a target signature"},
                             {"member", "subgroup membership"}, {"intersect", "basis of a subgroup intersection"},
                             {"centralizer", "centralizer of a word"}}) {
    auto* c = fgc->add_subcommand(name, help);
    rank(c);
    c->add_option("--maxlen", o.maxlen, "longest word scanned");
    positional(c, "words; generator lists separated by ';'");
  }

  auto* pr = app.add_subcommand("pres", "finitely presented groups");
  pr->require_subcommand(1);
  for (auto [name, help] : {std::pair{"eq", "word equality in the quotient"},
                             {"member", "membership in the normal closure"}, {"witness", "derivation between two words"},
                             {"check", "check a quotient code and the oracle"}}) {
    auto* c = pr->add_subcommand(name, help);
    rank(c);
    c->add_option("--relators", o.relators, "relators separated by ';'");
    c->add_option("--oracle", o.oracle, "abelian or coset")->check(CLI::IsMember({"abelian", "coset"}));
    c->add_option("--samples", o.samples, "random samples");
    c->add_option("--bound", o.bound, "coordinate bound");
    c->add_option("--seed", o.seed, "random seed");
    positional(c, "words");
  }

  auto* ax = app.add_subcommand("check-axioms", "check the enumeration axioms on bounded arguments");
  ax->add_option("--bound", o.bound, "argument bound");
  ax->add_option("--samples", o.samples, "samples for the last axiom");
  ax->add_option("--seed", o.seed, "random seed");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kTrue;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    if (enc->parsed()) return cmd_encode(o, out);
    if (dec->parsed()) return cmd_decode(o, out);
    if (emit->parsed()) {
      out << render(emit_formula(o.kind)) << "\n";
      return kTrue;
    }
    if (ev->parsed()) return cmd_eval(o, out);
    if (ax->parsed()) return cmd_axioms(o, out);
    for (auto* c : code->get_subcommands())
      if (c->parsed()) return cmd_code(c->get_name(), o, out);
    for (auto* c : fgc->get_subcommands())
      if (c->parsed()) return cmd_fg(c->get_name(), o, out);
    for (auto* c : pr->get_subcommands())
      if (c->parsed()) return cmd_pres(c->get_name(), o, out);
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFalse;
  }
  err << app.help();
  return kUsage;
}

}  // namespace ik::cli
