#include "interpkit/logic.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>
#include <sstream>

namespace ik {

void Signature::add_sort(const std::string& s) {
  if (has_sort(s)) throw SortError("sort declared twice: " + s);
  sorts.push_back(s);
}

void Signature::add_function(const std::string& f, std::vector<std::string> args, std::string result) {
  if (declared(f)) throw SortError("symbol declared twice: " + f);
  functions[f] = FnSig{std::move(args), std::move(result)};
}

void Signature::add_predicate(const std::string& p, std::vector<std::string> args) {
  if (declared(p)) throw SortError("symbol declared twice: " + p);
  predicates[p] = std::move(args);
}

void Signature::add_constant(const std::string& c, std::string sort) {
  if (declared(c)) throw SortError("symbol declared twice: " + c);
  constants[c] = std::move(sort);
}

auto Signature::has_sort(const std::string& s) const -> bool {
  return std::find(sorts.begin(), sorts.end(), s) != sorts.end();
}

auto Signature::declared(const std::string& sym) const -> bool {
  return functions.count(sym) || predicates.count(sym) || constants.count(sym);
}

auto Signature::default_sort() const -> std::string {
  if (has_sort("nat")) return "nat";
  return sorts.empty() ? std::string("nat") : sorts.front();
}

namespace {

void add_arith(Signature& s) {
  s.add_sort("nat");
  s.add_function("+", {"nat", "nat"}, "nat");
  s.add_function("*", {"nat", "nat"}, "nat");
  s.add_constant("0", "nat");
  s.add_constant("1", "nat");
}

}  // namespace

auto builtin_signature(const std::string& name) -> Signature {
  Signature s;
  if (name == "arith" || name == "nat") {
    s.name = "arith";
    add_arith(s);
  } else if (name == "list_nat") {
    s.name = "list_nat";
    add_arith(s);
    s.add_sort("list");
    s.add_predicate("t", {"list", "nat", "nat"});
    s.add_function("len", {"list"}, "nat");
    s.add_function("concat", {"list", "list"}, "list");
  } else if (name == "list_z") {
    s.name = "list_z";
    add_arith(s);
    s.add_sort("int");
    s.add_sort("list");
    s.add_function("neg", {"int"}, "int");
    s.add_function("ofnat", {"nat"}, "int");
    s.add_predicate("t", {"list", "int", "nat"});
    s.add_constant("nil", "list");
    s.add_function("len", {"list"}, "nat");
    s.add_function("concat", {"list", "list"}, "list");
  } else if (name == "free") {
    s.name = "free";
    s.add_sort("word");
    s.add_function("mul", {"word", "word"}, "word");
    s.add_function("inv", {"word"}, "word");
    s.add_constant("e", "word");
  } else if (name == "list_free") {
    s.name = "list_free";
    add_arith(s);
    s.add_sort("word");
    s.add_sort("list");
    s.add_function("mul", {"word", "word"}, "word");
    s.add_function("inv", {"word"}, "word");
    s.add_constant("e", "word");
    s.add_predicate("t", {"list", "word", "nat"});
    s.add_function("len", {"list"}, "nat");
    s.add_function("concat", {"list", "list"}, "list");
    s.add_function("prod", {"list"}, "word");
  } else {
    throw std::invalid_argument("unknown signature: " + name);
  }
  return s;
}

auto var(std::string name, std::string sort) -> Term {
  return std::make_shared<const TermNode>(TermNode{TermNode::Kind::Var, std::move(name), std::move(sort), 0, {}});
}

auto cnst(std::string name, std::string sort) -> Term {
  return std::make_shared<const TermNode>(TermNode{TermNode::Kind::Const, std::move(name), std::move(sort), 0, {}});
}

auto num(Int v) -> Term {
  return std::make_shared<const TermNode>(TermNode{TermNode::Kind::Num, "", "nat", std::move(v), {}});
}

auto app(std::string fn, std::string sort, std::vector<Term> args) -> Term {
  return std::make_shared<const TermNode>(
      TermNode{TermNode::Kind::App, std::move(fn), std::move(sort), 0, std::move(args)});
}

namespace {

auto mk(FKind k, std::string name, std::string sort, std::vector<Term> terms, std::vector<Formula> kids) -> Formula {
  return std::make_shared<const FormulaNode>(
      FormulaNode{k, std::move(name), std::move(sort), std::move(terms), std::move(kids)});
}

}  // namespace

auto atom(std::string pred, std::vector<Term> args) -> Formula {
  return mk(FKind::Atom, std::move(pred), "", std::move(args), {});
}
auto eq(Term a, Term b) -> Formula { return mk(FKind::Eq, "", "", {std::move(a), std::move(b)}, {}); }
auto neg(Formula f) -> Formula { return mk(FKind::Not, "", "", {}, {std::move(f)}); }
auto conj(Formula a, Formula b) -> Formula { return mk(FKind::And, "", "", {}, {std::move(a), std::move(b)}); }
auto disj(Formula a, Formula b) -> Formula { return mk(FKind::Or, "", "", {}, {std::move(a), std::move(b)}); }
auto imp(Formula a, Formula b) -> Formula { return mk(FKind::Imp, "", "", {}, {std::move(a), std::move(b)}); }
auto iff(Formula a, Formula b) -> Formula { return mk(FKind::Iff, "", "", {}, {std::move(a), std::move(b)}); }

auto conj(const std::vector<Formula>& fs) -> Formula {
  if (fs.empty()) throw std::invalid_argument("empty conjunction");
  Formula out = fs.back();
  for (auto i = fs.size() - 1; i-- > 0;) out = conj(fs[i], out);
  return out;
}

auto forall(std::string v, std::string sort, Formula body) -> Formula {
  return mk(FKind::Forall, std::move(v), std::move(sort), {}, {std::move(body)});
}
auto exists(std::string v, std::string sort, Formula body) -> Formula {
  return mk(FKind::Exists, std::move(v), std::move(sort), {}, {std::move(body)});
}
auto forall_lt(std::string v, std::string sort, Term bound, Formula body) -> Formula {
  return mk(FKind::ForallLt, std::move(v), std::move(sort), {std::move(bound)}, {std::move(body)});
}
auto exists_lt(std::string v, std::string sort, Term bound, Formula body) -> Formula {
  return mk(FKind::ExistsLt, std::move(v), std::move(sort), {std::move(bound)}, {std::move(body)});
}

auto is_quantifier(FKind k) -> bool {
  return k == FKind::Forall || k == FKind::Exists || k == FKind::ForallLt || k == FKind::ExistsLt;
}
auto is_bounded(FKind k) -> bool { return k == FKind::ForallLt || k == FKind::ExistsLt; }

ParseError::ParseError(const std::string& msg, std::size_t pos)
    : std::runtime_error(msg + " at offset " + std::to_string(pos)), position(pos) {}

// ---------------------------------------------------------------- parsing

namespace {

struct SNode {
  bool list = false;
  std::string tok;
  std::size_t pos = 0;
  std::vector<SNode> kids;
};

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}

  auto read_all() -> SNode {
    skip();
    if (i_ >= s_.size()) throw ParseError("empty input", i_);
    SNode n = read();
    skip();
    if (i_ < s_.size()) throw ParseError("trailing input", i_);
    return n;
  }

 private:
  void skip() {
    while (i_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
        ++i_;
      } else if (s_[i_] == ';') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else {
        break;
      }
    }
  }

  auto read() -> SNode {
    skip();
    if (i_ >= s_.size()) throw ParseError("unexpected end of input", i_);
    SNode n;
    n.pos = i_;
    if (s_[i_] == ')') throw ParseError("unexpected ')'", i_);
    if (s_[i_] == '(') {
      n.list = true;
      ++i_;
      for (;;) {
        skip();
        if (i_ >= s_.size()) throw ParseError("unclosed '('", n.pos);
        if (s_[i_] == ')') {
          ++i_;
          break;
        }
        n.kids.push_back(read());
      }
      return n;
    }
    while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != '(' &&
           s_[i_] != ')' && s_[i_] != ';')
      n.tok.push_back(s_[i_++]);
    return n;
  }

  const std::string& s_;
  std::size_t i_ = 0;
};

auto is_numeral(const std::string& t) -> bool {
  return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

class Parser {
 public:
  Parser(const Signature& sig, const std::map<std::string, std::string>& free_sorts)
      : sig_(sig), free_(free_sorts) {}

  auto formula(const SNode& n) -> Formula {
    if (!n.list) throw ParseError("expected formula, got '" + n.tok + "'", n.pos);
    if (n.kids.empty()) throw ParseError("empty list", n.pos);
    const SNode& h = n.kids[0];
    if (h.list) throw ParseError("expected symbol in head position", h.pos);
    const std::string& op = h.tok;
    auto argc = n.kids.size() - 1;

    if (op == "forall" || op == "exists") {
      if (argc != 2) throw ParseError(op + " takes a binder and a body", n.pos);
      const SNode& b = n.kids[1];
      if (!b.list || b.kids.empty() || b.kids.size() > 2 || b.kids[0].list)
        throw ParseError("malformed binder", b.pos);
      std::string v = b.kids[0].tok;
      std::string s = sig_.default_sort();
      if (b.kids.size() == 2) {
        if (b.kids[1].list) throw ParseError("expected sort", b.kids[1].pos);
        s = b.kids[1].tok;
        if (!sig_.has_sort(s)) throw ParseError("unknown sort '" + s + "'", b.kids[1].pos);
      }
      scope_.emplace_back(v, s);
      Formula body = formula(n.kids[2]);
      scope_.pop_back();
      return op == "forall" ? forall(v, s, body) : exists(v, s, body);
    }
    if (op == "forall-lt" || op == "exists-lt") {
      if (argc != 2) throw ParseError(op + " takes a binder and a body", n.pos);
      const SNode& b = n.kids[1];
      if (!b.list || b.kids.size() < 2 || b.kids.size() > 3 || b.kids[0].list)
        throw ParseError("malformed bounded binder", b.pos);
      std::string v = b.kids[0].tok;
      std::string s = sig_.has_sort("nat") ? "nat" : sig_.default_sort();
      if (b.kids.size() == 3) {
        if (b.kids[1].list) throw ParseError("expected sort", b.kids[1].pos);
        s = b.kids[1].tok;
        if (!sig_.has_sort(s)) throw ParseError("unknown sort '" + s + "'", b.kids[1].pos);
      }
      Term bound = term(b.kids.back(), "nat");
      scope_.emplace_back(v, s);
      Formula body = formula(n.kids[2]);
      scope_.pop_back();
      return op == "forall-lt" ? forall_lt(v, s, bound, body) : exists_lt(v, s, bound, body);
    }
    if (op == "and" || op == "or" || op == "imp" || op == "iff") {
      bool nary = op == "and" || op == "or";
      if (argc < 2 || (!nary && argc != 2)) throw ParseError("arity error: " + op, n.pos);
      std::vector<Formula> fs;
      for (std::size_t i = 1; i < n.kids.size(); ++i) fs.push_back(formula(n.kids[i]));
      if (op == "imp") return imp(fs[0], fs[1]);
      if (op == "iff") return iff(fs[0], fs[1]);
      Formula out = fs.back();
      for (auto i = fs.size() - 1; i-- > 0;) out = op == "and" ? conj(fs[i], out) : disj(fs[i], out);
      return out;
    }
    if (op == "not") {
      if (argc != 1) throw ParseError("arity error: not", n.pos);
      return neg(formula(n.kids[1]));
    }
    if (op == "=") {
      if (argc != 2) throw ParseError("arity error: = takes 2 terms", n.pos);
      auto s = guess(n.kids[1]);
      if (!s) s = guess(n.kids[2]);
      std::string srt = s ? *s : sig_.default_sort();
      return eq(term(n.kids[1], srt), term(n.kids[2], srt));
    }
    if ((op == "<" || op == "<=" || op == "\xE2\x89\xA4") && !sig_.predicates.count(op)) {
      if (argc != 2) throw ParseError("arity error: " + op, n.pos);
      Term x = term(n.kids[1], "nat");
      Term y = term(n.kids[2], "nat");
      auto avoid = free_vars(x);
      for (const auto& v : free_vars(y)) avoid.insert(v);
      for (const auto& [v, s] : scope_) avoid.insert(v);
      std::string d = fresh_name("d", avoid);
      Term dv = var(d, "nat");
      Term one = sig_.constants.count("1") ? cnst("1", "nat") : num(1);
      if (op == "<") return exists_lt(d, "nat", y, eq(app("+", "nat", {app("+", "nat", {x, dv}), one}), y));
      return exists_lt(d, "nat", app("+", "nat", {y, one}), eq(app("+", "nat", {x, dv}), y));
    }
    std::vector<std::string> sorts;
    auto pit = sig_.predicates.find(op);
    if (pit != sig_.predicates.end()) {
      sorts = pit->second;
    } else {
      std::string fn = graph_function(op);
      auto fit = fn.empty() ? sig_.functions.end() : sig_.functions.find(fn);
      if (fit == sig_.functions.end()) {
        if (op == "hole" && argc == 0) return atom("hole", {});
        throw ParseError("unknown symbol '" + op + "'", h.pos);
      }
      sorts = fit->second.args;
      sorts.push_back(fit->second.result);
    }
    if (argc != sorts.size())
      throw ParseError("arity error: " + op + " takes " + std::to_string(sorts.size()) + " arguments", n.pos);
    std::vector<Term> args;
    for (std::size_t i = 0; i < sorts.size(); ++i) args.push_back(term(n.kids[i + 1], sorts[i]));
    return atom(op, args);
  }

  auto term(const SNode& n, const std::optional<std::string>& expect) -> Term {
    Term t = term_raw(n, expect);
    if (expect && t->kind != TermNode::Kind::Num && t->sort != *expect)
      throw SortError("sort mismatch at offset " + std::to_string(n.pos) + ": expected " + *expect + ", got " +
                      t->sort);
    return t;
  }

 private:
  auto lookup(const std::string& v) const -> std::optional<std::string> {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == v) return it->second;
    return std::nullopt;
  }

  auto guess(const SNode& n) const -> std::optional<std::string> {
    if (n.list) {
      if (n.kids.empty() || n.kids[0].list) return std::nullopt;
      auto it = sig_.functions.find(n.kids[0].tok);
      if (it != sig_.functions.end()) return it->second.result;
      return std::nullopt;
    }
    if (auto s = lookup(n.tok)) return s;
    auto c = sig_.constants.find(n.tok);
    if (c != sig_.constants.end()) return c->second;
    if (is_numeral(n.tok)) return std::string("nat");
    auto f = free_.find(n.tok);
    if (f != free_.end()) return f->second;
    auto g = inferred_.find(n.tok);
    if (g != inferred_.end()) return g->second;
    return std::nullopt;
  }

  auto term_raw(const SNode& n, const std::optional<std::string>& expect) -> Term {
    if (n.list) {
      if (n.kids.empty() || n.kids[0].list) throw ParseError("malformed term", n.pos);
      const std::string& f = n.kids[0].tok;
      auto it = sig_.functions.find(f);
      if (it == sig_.functions.end()) throw ParseError("unknown function '" + f + "'", n.kids[0].pos);
      const FnSig& fs = it->second;
      if (n.kids.size() - 1 != fs.args.size())
        throw ParseError("arity error: " + f + " takes " + std::to_string(fs.args.size()) + " arguments", n.pos);
      std::vector<Term> args;
      for (std::size_t i = 0; i < fs.args.size(); ++i) args.push_back(term(n.kids[i + 1], fs.args[i]));
      return app(f, fs.result, args);
    }
    const std::string& tok = n.tok;
    if (tok.empty()) throw ParseError("empty token", n.pos);
    if (auto s = lookup(tok)) return var(tok, *s);
    auto c = sig_.constants.find(tok);
    if (c != sig_.constants.end()) return cnst(tok, c->second);
    if (is_numeral(tok)) return num(Int(tok));
    if (sig_.declared(tok)) throw ParseError("symbol '" + tok + "' used as a variable", n.pos);
    auto f = free_.find(tok);
    if (f != free_.end()) return var(tok, f->second);
    auto g = inferred_.find(tok);
    if (g != inferred_.end()) return var(tok, g->second);
    std::string s = expect ? *expect : sig_.default_sort();
    inferred_[tok] = s;
    return var(tok, s);
  }

  const Signature& sig_;
  const std::map<std::string, std::string>& free_;
  std::map<std::string, std::string> inferred_;
  std::vector<std::pair<std::string, std::string>> scope_;
};

}  // namespace

auto parse(const std::string& text, const Signature& sig, const std::map<std::string, std::string>& free_sorts)
    -> Formula {
  Reader r(text);
  SNode n = r.read_all();
  Parser p(sig, free_sorts);
  return p.formula(n);
}

auto parse_term(const std::string& text, const Signature& sig, const std::map<std::string, std::string>& free_sorts)
    -> Term {
  Reader r(text);
  SNode n = r.read_all();
  Parser p(sig, free_sorts);
  return p.term(n, std::nullopt);
}

// ---------------------------------------------------------------- printing

namespace {

void put(std::ostringstream& o, const Term& t) {
  switch (t->kind) {
    case TermNode::Kind::Var:
    case TermNode::Kind::Const:
      o << t->name;
      return;
    case TermNode::Kind::Num:
      o << t->value;
      return;
    case TermNode::Kind::App:
      o << '(' << t->name;
      for (const auto& a : t->args) {
        o << ' ';
        put(o, a);
      }
      o << ')';
      return;
  }
}

void put(std::ostringstream& o, const Formula& f) {
  auto bin = [&](const char* op) {
    o << '(' << op << ' ';
    put(o, f->kids[0]);
    o << ' ';
    put(o, f->kids[1]);
    o << ')';
  };
  switch (f->kind) {
    case FKind::Atom:
      o << '(' << f->name;
      for (const auto& a : f->terms) {
        o << ' ';
        put(o, a);
      }
      o << ')';
      return;
    case FKind::Eq:
      o << "(= ";
      put(o, f->terms[0]);
      o << ' ';
      put(o, f->terms[1]);
      o << ')';
      return;
    case FKind::Not:
      o << "(not ";
      put(o, f->kids[0]);
      o << ')';
      return;
    case FKind::And: bin("and"); return;
    case FKind::Or: bin("or"); return;
    case FKind::Imp: bin("imp"); return;
    case FKind::Iff: bin("iff"); return;
    case FKind::Forall:
    case FKind::Exists:
      o << '(' << (f->kind == FKind::Forall ? "forall" : "exists") << " (" << f->name << ' ' << f->sort << ") ";
      put(o, f->kids[0]);
      o << ')';
      return;
    case FKind::ForallLt:
    case FKind::ExistsLt:
      o << '(' << (f->kind == FKind::ForallLt ? "forall-lt" : "exists-lt") << " (" << f->name << ' ';
      if (f->sort != "nat") o << f->sort << ' ';
      put(o, f->terms[0]);
      o << ") ";
      put(o, f->kids[0]);
      o << ')';
      return;
  }
}

}  // namespace

auto render(const Term& t) -> std::string {
  std::ostringstream o;
  put(o, t);
  return o.str();
}

auto render(const Formula& f) -> std::string {
  std::ostringstream o;
  put(o, f);
  return o.str();
}

auto equal(const Term& a, const Term& b) -> bool {
  if (a == b) return true;
  if (a->kind != b->kind || a->name != b->name || a->sort != b->sort || a->value != b->value ||
      a->args.size() != b->args.size())
    return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!equal(a->args[i], b->args[i])) return false;
  return true;
}

auto equal(const Formula& a, const Formula& b) -> bool {
  if (a == b) return true;
  if (a->kind != b->kind || a->name != b->name || a->sort != b->sort || a->terms.size() != b->terms.size() ||
      a->kids.size() != b->kids.size())
    return false;
  for (std::size_t i = 0; i < a->terms.size(); ++i)
    if (!equal(a->terms[i], b->terms[i])) return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (!equal(a->kids[i], b->kids[i])) return false;
  return true;
}

// ---------------------------------------------------------------- variables

namespace {

void term_vars(const Term& t, std::map<std::string, std::string>& out) {
  if (t->kind == TermNode::Kind::Var) out.emplace(t->name, t->sort);
  for (const auto& a : t->args) term_vars(a, out);
}

void formula_free(const Formula& f, std::set<std::string>& bound, std::map<std::string, std::string>& out) {
  if (f->kind == FKind::Atom || f->kind == FKind::Eq || is_bounded(f->kind)) {
    std::map<std::string, std::string> vs;
    for (const auto& t : f->terms) term_vars(t, vs);
    for (const auto& [v, s] : vs)
      if (!bound.count(v)) out.emplace(v, s);
  }
  if (is_quantifier(f->kind)) {
    bool had = bound.count(f->name) > 0;
    bound.insert(f->name);
    formula_free(f->kids[0], bound, out);
    if (!had) bound.erase(f->name);
    return;
  }
  for (const auto& k : f->kids) formula_free(k, bound, out);
}

void collect_all(const Formula& f, std::set<std::string>& out) {
  std::map<std::string, std::string> vs;
  for (const auto& t : f->terms) term_vars(t, vs);
  for (const auto& [v, s] : vs) out.insert(v);
  if (is_quantifier(f->kind)) out.insert(f->name);
  for (const auto& k : f->kids) collect_all(k, out);
}

}  // namespace

auto free_vars(const Term& t) -> std::set<std::string> {
  std::map<std::string, std::string> m;
  term_vars(t, m);
  std::set<std::string> out;
  for (const auto& [v, s] : m) out.insert(v);
  return out;
}

auto free_var_sorts(const Formula& f) -> std::map<std::string, std::string> {
  std::set<std::string> bound;
  std::map<std::string, std::string> out;
  formula_free(f, bound, out);
  return out;
}

auto free_vars(const Formula& f) -> std::set<std::string> {
  std::set<std::string> out;
  for (const auto& [v, s] : free_var_sorts(f)) out.insert(v);
  return out;
}

auto all_vars(const Formula& f) -> std::set<std::string> {
  std::set<std::string> out;
  collect_all(f, out);
  return out;
}

auto is_closed(const Term& t) -> bool { return free_vars(t).empty(); }

auto fresh_name(const std::string& base, const std::set<std::string>& avoid) -> std::string {
  std::string n = base;
  while (avoid.count(n)) n += '\'';
  return n;
}

auto base_name(const std::string& v) -> std::string {
  auto e = v.find_last_not_of('\'');
  return e == std::string::npos ? std::string() : v.substr(0, e + 1);
}

// ---------------------------------------------------------------- substitution

auto substitute(const Term& t, const Binding& b) -> Term {
  if (b.empty()) return t;
  switch (t->kind) {
    case TermNode::Kind::Var: {
      auto it = b.find(t->name);
      return it == b.end() ? t : it->second;
    }
    case TermNode::Kind::App: {
      std::vector<Term> args;
      bool changed = false;
      for (const auto& a : t->args) {
        args.push_back(substitute(a, b));
        changed = changed || args.back() != a;
      }
      return changed ? app(t->name, t->sort, args) : t;
    }
    default:
      return t;
  }
}

namespace {

void check_term_sorts(const Term& t, const Binding& b) {
  if (t->kind == TermNode::Kind::Var) {
    auto it = b.find(t->name);
    if (it != b.end() && it->second->kind != TermNode::Kind::Num && it->second->sort != t->sort)
      throw SortError("substitution changes sort of " + t->name + " from " + t->sort + " to " + it->second->sort);
  }
  for (const auto& a : t->args) check_term_sorts(a, b);
}

auto subst(const Formula& f, const Binding& b, bool check) -> Formula {
  if (b.empty()) return f;
  if (f->kind == FKind::Atom || f->kind == FKind::Eq) {
    std::vector<Term> ts;
    for (const auto& t : f->terms) {
      if (check) check_term_sorts(t, b);
      ts.push_back(substitute(t, b));
    }
    return std::make_shared<const FormulaNode>(FormulaNode{f->kind, f->name, f->sort, ts, {}});
  }
  if (!is_quantifier(f->kind)) {
    std::vector<Formula> ks;
    for (const auto& k : f->kids) ks.push_back(subst(k, b, check));
    return std::make_shared<const FormulaNode>(FormulaNode{f->kind, f->name, f->sort, f->terms, ks});
  }
  std::vector<Term> ts;
  for (const auto& t : f->terms) {
    if (check) check_term_sorts(t, b);
    ts.push_back(substitute(t, b));
  }
  Binding inner;
  auto body_free = free_vars(f->kids[0]);
  for (const auto& [k, v] : b)
    if (k != f->name && body_free.count(k)) inner.emplace(k, v);
  std::string x = f->name;
  std::set<std::string> range_free;
  for (const auto& [k, v] : inner)
    for (const auto& w : free_vars(v)) range_free.insert(w);
  if (range_free.count(x)) {
    std::set<std::string> avoid = body_free;
    avoid.insert(range_free.begin(), range_free.end());
    for (const auto& [k, v] : inner) avoid.insert(k);
    x = fresh_name(f->name, avoid);
    inner[f->name] = var(x, f->sort);
  }
  Formula body = subst(f->kids[0], inner, check);
  return std::make_shared<const FormulaNode>(FormulaNode{f->kind, x, f->sort, ts, {body}});
}

}  // namespace

auto substitute(const Formula& f, const Binding& b, bool check_sorts) -> Formula { return subst(f, b, check_sorts); }

// ---------------------------------------------------------------- flattening

auto graph_name(const std::string& fn) -> std::string {
  if (!fn.empty() && std::isalnum(static_cast<unsigned char>(fn[0]))) return "graph-" + fn;
  return "graph" + fn;
}

auto graph_function(const std::string& pred) -> std::string {
  if (pred.rfind("graph-", 0) == 0 && pred.size() > 6) return pred.substr(6);
  if (pred.rfind("graph", 0) == 0 && pred.size() > 5 && !std::isalnum(static_cast<unsigned char>(pred[5])))
    return pred.substr(5);
  return {};
}

namespace {

struct Flattener {
  std::set<std::string> avoid;

  struct Pending {
    std::vector<std::pair<std::string, std::string>> vars;
    std::vector<Formula> graphs;
  };

  auto atomic(const Term& t, Pending& p) -> Term {
    if (t->kind != TermNode::Kind::App) return t;
    std::vector<Term> args;
    for (const auto& a : t->args) args.push_back(atomic(a, p));
    std::string z = fresh_name("z", avoid);
    avoid.insert(z);
    Term zv = var(z, t->sort);
    args.push_back(zv);
    p.graphs.push_back(atom(graph_name(t->name), args));
    p.vars.emplace_back(z, t->sort);
    return zv;
  }

  auto graph_of(const Term& a, const Term& result, Pending& p) -> Formula {
    std::vector<Term> args;
    for (const auto& x : a->args) args.push_back(atomic(x, p));
    args.push_back(result);
    return atom(graph_name(a->name), args);
  }

  static auto wrap(Pending& p, Formula core) -> Formula {
    if (p.vars.empty()) return core;
    std::vector<Formula> parts = p.graphs;
    parts.push_back(std::move(core));
    Formula out = conj(parts);
    for (auto i = p.vars.size(); i-- > 0;) out = exists(p.vars[i].first, p.vars[i].second, out);
    return out;
  }

  auto run(const Formula& f) -> Formula {
    using K = TermNode::Kind;
    switch (f->kind) {
      case FKind::Eq: {
        const Term& s = f->terms[0];
        const Term& t = f->terms[1];
        if (s->kind != K::App && t->kind != K::App) return f;
        Pending p;
        Formula core;
        if (s->kind == K::App && t->kind != K::App) {
          core = graph_of(s, t, p);
        } else if (s->kind != K::App) {
          core = graph_of(t, s, p);
        } else {
          std::vector<Term> args;
          for (const auto& x : s->args) args.push_back(atomic(x, p));
          args.push_back(atomic(t, p));
          core = atom(graph_name(s->name), args);
        }
        return wrap(p, core);
      }
      case FKind::Atom: {
        Pending p;
        std::vector<Term> args;
        for (const auto& a : f->terms) args.push_back(atomic(a, p));
        if (p.vars.empty()) return f;
        return wrap(p, atom(f->name, args));
      }
      case FKind::Forall:
      case FKind::Exists: {
        Formula body = run(f->kids[0]);
        return std::make_shared<const FormulaNode>(FormulaNode{f->kind, f->name, f->sort, {}, {body}});
      }
      case FKind::ForallLt:
      case FKind::ExistsLt: {
        Formula body = run(f->kids[0]);
        const Term& b = f->terms[0];
        if (b->kind != TermNode::Kind::App || is_closed(b))
          return std::make_shared<const FormulaNode>(FormulaNode{f->kind, f->name, f->sort, {b}, {body}});
        Pending p;
        Term nb = atomic(b, p);
        return wrap(p, std::make_shared<const FormulaNode>(FormulaNode{f->kind, f->name, f->sort, {nb}, {body}}));
      }
      default: {
        std::vector<Formula> ks;
        for (const auto& k : f->kids) ks.push_back(run(k));
        return std::make_shared<const FormulaNode>(FormulaNode{f->kind, f->name, f->sort, f->terms, ks});
      }
    }
  }
};

}  // namespace

auto flatten(const Formula& f) -> Formula {
  Flattener fl;
  fl.avoid = all_vars(f);
  return fl.run(f);
}

// ---------------------------------------------------------------- sort collapse

auto collapsed_signature(const Signature& sig, const std::map<std::string, Int>& tagging) -> Signature {
  Signature out;
  out.name = sig.name + "_tagged";
  out.add_sort("u");
  for (const auto& [f, fs] : sig.functions) out.add_function(f, std::vector<std::string>(fs.args.size(), "u"), "u");
  for (const auto& [p, as] : sig.predicates) out.add_predicate(p, std::vector<std::string>(as.size(), "u"));
  for (const auto& [c, s] : sig.constants) out.add_constant(c, "u");
  for (const auto& [s, tag] : tagging) out.add_predicate("tag_" + s, {"u"});
  return out;
}

namespace {

auto to_u(const Term& t, const std::map<std::string, Int>& tagging) -> Term {
  switch (t->kind) {
    case TermNode::Kind::Num:
      return t;
    case TermNode::Kind::Var:
      if (!tagging.count(t->sort)) throw SortError("missing tag for sort " + t->sort);
      return var(t->name, "u");
    case TermNode::Kind::Const:
      return cnst(t->name, "u");
    case TermNode::Kind::App: {
      std::vector<Term> args;
      for (const auto& a : t->args) args.push_back(to_u(a, tagging));
      return app(t->name, "u", args);
    }
  }
  return t;
}

auto collapse(const Formula& f, const std::map<std::string, Int>& tagging, std::set<std::string>& avoid) -> Formula {
  if (f->kind == FKind::Atom || f->kind == FKind::Eq) {
    std::vector<Term> ts;
    for (const auto& t : f->terms) ts.push_back(to_u(t, tagging));
    return std::make_shared<const FormulaNode>(FormulaNode{f->kind, f->name, "", ts, {}});
  }
  if (!is_quantifier(f->kind)) {
    std::vector<Formula> ks;
    for (const auto& k : f->kids) ks.push_back(collapse(k, tagging, avoid));
    return std::make_shared<const FormulaNode>(FormulaNode{f->kind, f->name, f->sort, f->terms, ks});
  }
  if (!tagging.count(f->sort)) throw SortError("missing tag for sort " + f->sort);
  std::string tv = fresh_name("t", avoid);
  avoid.insert(tv);
  Formula body = collapse(f->kids[0], tagging, avoid);
  Formula tagged = atom("tag_" + f->sort, {var(tv, "u")});
  bool universal = f->kind == FKind::Forall || f->kind == FKind::ForallLt;
  Formula inner = universal ? forall(tv, "u", imp(tagged, body)) : exists(tv, "u", conj(tagged, body));
  std::vector<Term> ts;
  for (const auto& t : f->terms) ts.push_back(to_u(t, tagging));
  return std::make_shared<const FormulaNode>(FormulaNode{f->kind, f->name, "u", ts, {inner}});
}

}  // namespace

auto collapse_sorts(const Formula& f, const std::map<std::string, Int>& tagging) -> Formula {
  std::set<Int> seen;
  for (const auto& [s, tag] : tagging)
    if (!seen.insert(tag).second) throw SortError("sort " + s + " shares its tag with another sort");
  auto avoid = all_vars(f);
  return collapse(f, tagging, avoid);
}

auto closed_value(const Term& t) -> Int {
  switch (t->kind) {
    case TermNode::Kind::Num:
      return t->value;
    case TermNode::Kind::Const:
      if (t->name == "0") return 0;
      if (t->name == "1") return 1;
      break;
    case TermNode::Kind::App:
      if (t->name == "+" && t->args.size() == 2) return closed_value(t->args[0]) + closed_value(t->args[1]);
      if (t->name == "*" && t->args.size() == 2) return closed_value(t->args[0]) * closed_value(t->args[1]);
      break;
    default:
      break;
  }
  throw SortError("not a closed arithmetic term: " + render(t));
}

}  // namespace ik
