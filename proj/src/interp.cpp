#include "interpkit/interp.hpp"

#include "interpkit/codec.hpp"

#include <sstream>

namespace ik {

namespace {

auto prefix_and_index(const std::string& v) -> std::pair<std::string, int> {
  auto dot = v.rfind('.');
  if (dot == std::string::npos || dot + 1 >= v.size()) return {"", 0};
  try {
    std::size_t used = 0;
    int j = std::stoi(v.substr(dot + 1), &used);
    if (used != v.size() - dot - 1) return {"", 0};
    return {v.substr(0, dot), j};
  } catch (const std::exception&) {
    return {"", 0};
  }
}

// Sorts of every coordinate variable a code formula may mention.
auto coord_sort_map(const InterpretationCode& c, int arity) -> std::map<std::string, std::string> {
  std::map<std::string, std::string> m;
  std::vector<std::string> prefixes{"x", "y", "t"};
  for (int k = 1; k <= std::max(arity, 4); ++k) prefixes.push_back("x" + std::to_string(k));
  for (const auto& p : prefixes)
    for (int j = 1; j <= c.dim; ++j) m[coord_var(p, j)] = c.coord_sorts[static_cast<std::size_t>(j) - 1];
  return m;
}

auto allowed_vars(const InterpretationCode& c, const std::string& sym) -> std::set<std::string> {
  std::set<std::string> out;
  auto add = [&](const std::string& p) {
    for (int j = 1; j <= c.dim; ++j) out.insert(coord_var(p, j));
  };
  auto blocks = [&](std::size_t n) {
    for (std::size_t k = 1; k <= n; ++k) add("x" + std::to_string(k));
  };
  const auto& s = c.source;
  if (sym.rfind("sort:", 0) == 0) {
    if (!s.has_sort(sym.substr(5))) throw CodeError("unknown source sort in " + sym);
    add("x");
  } else if (sym.rfind("bound:", 0) == 0) {
    if (!s.has_sort(sym.substr(6))) throw CodeError("unknown source sort in " + sym);
    add("x");
    add("t");
  } else if (auto f = s.functions.find(sym); f != s.functions.end()) {
    blocks(f->second.args.size() + 1);
  } else if (auto p = s.predicates.find(sym); p != s.predicates.end()) {
    blocks(p->second.size());
  } else if (s.constants.count(sym)) {
    blocks(1);
  } else {
    throw CodeError("symbol " + sym + " is not in signature " + s.name);
  }
  return out;
}

void check_vars(const InterpretationCode& c, const std::string& what, const Formula& f,
                const std::set<std::string>& allowed) {
  for (const auto& [v, s] : free_var_sorts(f)) {
    if (!allowed.count(v)) throw CodeError(what + ": unexpected free variable " + v);
    int j = prefix_and_index(v).second;
    if (s != c.coord_sorts[static_cast<std::size_t>(j) - 1])
      throw CodeError(what + ": variable " + v + " has sort " + s);
  }
}

}  // namespace

void finalize(InterpretationCode& c) {
  if (c.dim < 1) throw CodeError("dimension must be positive");
  if (!c.U || !c.E) throw CodeError("code needs U and E");
  auto fs = free_var_sorts(c.U);
  c.coord_sorts.clear();
  for (int j = 1; j <= c.dim; ++j) {
    auto it = fs.find(coord_var("x", j));
    c.coord_sorts.push_back(it == fs.end() ? c.target.default_sort() : it->second);
  }
  std::set<std::string> xs, xys;
  for (int j = 1; j <= c.dim; ++j) {
    xs.insert(coord_var("x", j));
    xys.insert(coord_var("x", j));
    xys.insert(coord_var("y", j));
  }
  check_vars(c, "U", c.U, xs);
  check_vars(c, "E", c.E, xys);
  for (const auto& [sym, q] : c.Q) check_vars(c, "Q " + sym, q, allowed_vars(c, sym));
}

// ---------------------------------------------------------------- built-in codes

namespace {

const std::string kTwo = "(+ 1 1)";
const std::string kThree = "(+ 1 (+ 1 1))";

struct Builder {
  InterpretationCode c;

  Builder(int dim, const std::string& src, const std::string& tgt, const std::string& u) {
    c.dim = dim;
    c.source = builtin_signature(src);
    c.target = builtin_signature(tgt);
    std::map<std::string, std::string> nat_coords;
    for (int j = 1; j <= dim; ++j) nat_coords[coord_var("x", j)] = "nat";
    c.U = parse(u, c.target, nat_coords);
    c.E = c.U;  // placeholder until e() runs
    finalize(c);
  }

  auto p(const std::string& text) -> Formula { return parse(text, c.target, coord_sort_map(c, 4)); }

  void e(const std::string& text) { c.E = p(text); }
  void q(const std::string& sym, const std::string& text) { c.Q[sym] = p(text); }
  void q(const std::string& sym, const std::string& tags, const std::string& kind,
         const std::vector<std::string>& args) {
    static const std::map<std::string, std::vector<std::string>> params{
        {"T", {"n", "a", "i"}}, {"L", {"n", "k"}},  {"concat", {"x", "y", "z"}},
        {"wT", {"n", "a", "i"}}, {"wL", {"n", "k"}}, {"wconcat", {"x", "y", "z"}}};
    Binding b;
    const auto& ps = params.at(kind);
    for (std::size_t i = 0; i < ps.size(); ++i) b[ps[i]] = var(args[i], "nat");
    c.Q[sym] = conj(p(tags), substitute(emit_formula(kind), b, false));
  }
  auto done() -> InterpretationCode {
    finalize(c);
    return c;
  }
};

auto tags(const std::vector<std::string>& ts) -> std::string {
  std::string out;
  for (std::size_t i = ts.size(); i-- > 0;) {
    std::string one = "(= x" + std::to_string(i + 1) + ".2 " + ts[i] + ")";
    out = out.empty() ? one : "(and " + one + " " + out + ")";
  }
  return out;
}

void arith_entries(Builder& b) {
  b.q("0", "(and (= x1.2 1) (= x1.1 0))");
  b.q("1", "(and (= x1.2 1) (= x1.1 1))");
  b.q("+", "(and " + tags({"1", "1", "1"}) + " (= x3.1 (+ x1.1 x2.1)))");
  b.q("*", "(and " + tags({"1", "1", "1"}) + " (= x3.1 (* x1.1 x2.1)))");
}

auto tagged_bound(const std::string& tag) -> std::string {
  return "(exists-lt (x.1 t.1) (exists (x.2) (and (= x.2 " + tag + ") (hole))))";
}

auto listnat_in_nat() -> InterpretationCode {
  Builder b(2, "list_nat", "arith", "(or (= x.2 1) (= x.2 " + kTwo + "))");
  b.e("(and (= x.1 y.1) (= x.2 y.2))");
  b.q("sort:nat", "(= x.2 1)");
  b.q("sort:list", "(= x.2 " + kTwo + ")");
  b.q("bound:nat", tagged_bound("1"));
  b.q("bound:list", tagged_bound(kTwo));
  arith_entries(b);
  b.q("len", tags({kTwo, "1"}), "L", {"x1.1", "x2.1"});
  b.q("t", tags({kTwo, "1", "1"}), "T", {"x1.1", "x2.1", "x3.1"});
  b.q("concat", tags({kTwo, kTwo, kTwo}), "concat", {"x1.1", "x2.1", "x3.1"});
  return b.done();
}

auto nat_in_listnat() -> InterpretationCode {
  Builder b(1, "arith", "list_nat", "(= x.1 x.1)");
  b.e("(= x.1 y.1)");
  b.q("bound:nat", "(exists-lt (x.1 t.1) (hole))");
  b.q("0", "(= x1.1 0)");
  b.q("1", "(= x1.1 1)");
  b.q("+", "(= x3.1 (+ x1.1 x2.1))");
  b.q("*", "(= x3.1 (* x1.1 x2.1))");
  return b.done();
}

auto listz_in_nat() -> InterpretationCode {
  Builder b(2, "list_z", "arith", "(= x.2 x.2)");
  Binding valid{{"n", var("x.1", "nat")}};
  b.c.U = disj(b.p("(= x.2 1)"),
               disj(b.p("(= x.2 " + kTwo + ")"),
                    conj(b.p("(= x.2 " + kThree + ")"), substitute(emit_formula("wvalid"), valid, false))));
  b.e("(and (= x.1 y.1) (= x.2 y.2))");
  b.q("sort:nat", "(= x.2 1)");
  b.q("sort:int", "(= x.2 " + kTwo + ")");
  b.q("sort:list", "(= x.2 " + kThree + ")");
  b.q("bound:nat", tagged_bound("1"));
  // |z| < t  iff  fold(z) + 1 < 2t.
  b.q("bound:int", "(exists-lt (x.1 (+ t.1 t.1)) (exists (x.2) (and (= x.2 " + kTwo +
                       ") (and (< (+ x.1 1) (+ t.1 t.1)) (hole)))))");
  b.q("bound:list", tagged_bound(kThree));
  arith_entries(b);
  // On folded integers negation swaps 2z-1 and 2z.
  b.q("neg", "(and " + tags({kTwo, kTwo}) +
                 " (or (and (= x1.1 0) (= x2.1 0)) (or (exists-lt (h x1.1) (and (= x1.1 (* " + kTwo +
                 " h)) (= (+ x2.1 1) x1.1))) (exists-lt (h x1.1) (and (= x1.1 (+ (* " + kTwo +
                 " h) 1)) (= x2.1 (+ x1.1 1)))))))");
  b.q("ofnat", "(and " + tags({"1", kTwo}) + " (= x2.1 (* " + kTwo + " x1.1)))");
  b.q("nil", "(and (= x1.2 " + kThree + ") (= x1.1 0))");
  b.q("len", tags({kThree, "1"}), "wL", {"x1.1", "x2.1"});
  b.q("t", tags({kThree, kTwo, "1"}), "wT", {"x1.1", "x2.1", "x3.1"});
  b.q("concat", tags({kThree, kThree, kThree}), "wconcat", {"x1.1", "x2.1", "x3.1"});
  return b.done();
}

}  // namespace

auto builtin_code(const std::string& name) -> InterpretationCode {
  if (name == "listnat_in_nat") return listnat_in_nat();
  if (name == "nat_in_listnat") return nat_in_listnat();
  if (name == "listz_in_nat") return listz_in_nat();
  throw CodeError("unknown code: " + name);
}

auto builtin_code_names() -> std::vector<std::string> { return {"listnat_in_nat", "nat_in_listnat", "listz_in_nat"}; }

auto identity_code(const Signature& sig) -> InterpretationCode {
  if (sig.sorts.size() > 1) throw CodeError("identity code needs a one-sorted signature");
  InterpretationCode c;
  c.dim = 1;
  c.source = sig;
  c.target = sig;
  std::string s = sig.default_sort();
  c.U = eq(var("x.1", s), var("x.1", s));
  c.E = eq(var("x.1", s), var("y.1", s));
  finalize(c);
  auto vars = [&](const std::vector<std::string>& sorts) {
    std::vector<Term> ts;
    for (std::size_t k = 0; k < sorts.size(); ++k) ts.push_back(var("x" + std::to_string(k + 1) + ".1", sorts[k]));
    return ts;
  };
  for (const auto& [f, fs] : sig.functions) {
    auto ts = vars(fs.args);
    Term r = var("x" + std::to_string(fs.args.size() + 1) + ".1", fs.result);
    c.Q[f] = eq(r, app(f, fs.result, ts));
  }
  for (const auto& [p, ar] : sig.predicates) c.Q[p] = atom(p, vars(ar));
  for (const auto& [k, s2] : sig.constants) c.Q[k] = eq(var("x1.1", s2), cnst(k, s2));
  for (const auto& srt : sig.sorts) c.Q["bound:" + srt] = exists_lt("x.1", srt, var("t.1", s), atom("hole", {}));
  finalize(c);
  return c;
}

// ---------------------------------------------------------------- coordinate maps

auto builtin_coordinate_map(const std::string& code_name) -> CoordinateMap {
  if (code_name == "listnat_in_nat")
    return {[](const std::string& sort, const std::vector<Element>& t) {
      if (sort == "list") return Element::ints(decode_tuple(t[0].value));
      return t[0];
    }};
  if (code_name == "nat_in_listnat")
    return {[](const std::string&, const std::vector<Element>& t) { return t[0]; }};
  if (code_name == "listz_in_nat")
    return {[](const std::string& sort, const std::vector<Element>& t) {
      if (sort == "int") return Element::scalar(unfold_int(t[0].value));
      if (sort == "list") {
        auto w = decode_word_code(t[0].value);
        if (!w) throw CodeError("not a list code: " + t[0].value.str());
        std::vector<Int> z;
        for (const auto& v : *w) z.push_back(unfold_int(v));
        return Element::ints(z);
      }
      return t[0];
    }};
  throw CodeError("no coordinate map for " + code_name);
}

auto compose_maps(const CoordinateMap& outer, const CoordinateMap& inner, const InterpretationCode& outer_code,
                  int inner_dim) -> CoordinateMap {
  std::vector<std::string> sorts = outer_code.coord_sorts;
  return {[=](const std::string& sort, const std::vector<Element>& t) {
    std::vector<Element> mid;
    for (std::size_t j = 0; j < sorts.size(); ++j) {
      std::vector<Element> block(t.begin() + static_cast<std::ptrdiff_t>(j * inner_dim),
                                 t.begin() + static_cast<std::ptrdiff_t>((j + 1) * inner_dim));
      mid.push_back(inner.map(sorts[j], block));
    }
    return outer.map(sort, mid);
  }};
}

auto apply_coordinate(const InterpretationCode& code, const CoordinateMap& map, const Model& target,
                      const std::string& sort, const std::vector<Element>& tuple, const Budget& b) -> Element {
  if (static_cast<int>(tuple.size()) != code.dim) throw CodeError("tuple has the wrong dimension");
  Env env;
  for (int j = 1; j <= code.dim; ++j) env.emplace_back(coord_var("x", j), tuple[static_cast<std::size_t>(j) - 1]);
  Formula dom = code.U;
  if (Formula s = code.sort_formula(sort)) dom = conj(dom, s);
  if (eval_formula(target, dom, env, b) != Truth::True) throw CodeError("tuple outside the domain");
  return map.map(sort, tuple);
}

// ---------------------------------------------------------------- file format

auto write_code(const InterpretationCode& code) -> std::string {
  std::ostringstream o;
  o << "(code\n";
  o << "  (dim " << code.dim << ")\n";
  o << "  (source " << code.source.name << ")\n";
  o << "  (target " << code.target.name << ")\n";
  o << "  (sorts";
  for (const auto& s : code.coord_sorts) o << " " << s;
  o << ")\n";
  o << "  (U " << render(code.U) << ")\n";
  o << "  (E " << render(code.E) << ")";
  for (const auto& [sym, q] : code.Q) o << "\n  (Q " << sym << " " << render(q) << ")";
  o << ")\n";
  return o.str();
}

namespace {

struct Span {
  std::size_t begin, end;  // [begin, end)
};

void skip_space(const std::string& s, std::size_t& i) {
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
    } else if (s[i] == ';') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else {
      break;
    }
  }
}

auto read_item(const std::string& s, std::size_t& i) -> Span {
  skip_space(s, i);
  if (i >= s.size()) throw ParseError("unexpected end of input", i);
  std::size_t b = i;
  if (s[i] == ')') throw ParseError("unexpected ')'", i);
  if (s[i] != '(') {
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '(' && s[i] != ')') ++i;
    return {b, i};
  }
  int depth = 0;
  for (; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')' && --depth == 0) return {b, ++i};
  }
  throw ParseError("unclosed '('", b);
}

// Children of the list at `sp`.
auto children(const std::string& s, Span sp) -> std::vector<Span> {
  std::vector<Span> out;
  std::size_t i = sp.begin + 1;
  for (;;) {
    skip_space(s, i);
    if (i >= sp.end - 1) break;
    out.push_back(read_item(s, i));
  }
  return out;
}

auto text(const std::string& s, Span sp) -> std::string { return s.substr(sp.begin, sp.end - sp.begin); }

}  // namespace

auto read_code(const std::string& src) -> InterpretationCode {
  std::size_t i = 0;
  Span top = read_item(src, i);
  skip_space(src, i);
  if (i < src.size()) throw ParseError("trailing input", i);
  auto items = children(src, top);
  if (items.empty() || text(src, items[0]) != "code") throw ParseError("expected (code ...)", top.begin);
  InterpretationCode c;
  std::string u_text, e_text;
  std::vector<std::string> sorts_given;
  std::vector<std::pair<std::string, std::string>> qs;
  for (std::size_t k = 1; k < items.size(); ++k) {
    auto kids = children(src, items[k]);
    if (kids.size() < 2) throw ParseError("malformed field", items[k].begin);
    std::string head = text(src, kids[0]);
    if (head == "dim") {
      c.dim = std::stoi(text(src, kids[1]));
    } else if (head == "source") {
      c.source = builtin_signature(text(src, kids[1]));
    } else if (head == "target") {
      c.target = builtin_signature(text(src, kids[1]));
    } else if (head == "sorts") {
      for (std::size_t j = 1; j < kids.size(); ++j) sorts_given.push_back(text(src, kids[j]));
    } else if (head == "U") {
      u_text = text(src, kids[1]);
    } else if (head == "E") {
      e_text = text(src, kids[1]);
    } else if (head == "Q" && kids.size() == 3) {
      qs.emplace_back(text(src, kids[1]), text(src, kids[2]));
    } else {
      throw ParseError("unknown field " + head, items[k].begin);
    }
  }
  if (u_text.empty() || e_text.empty()) throw ParseError("code needs U and E", top.begin);
  std::map<std::string, std::string> given;
  for (std::size_t j = 0; j < sorts_given.size(); ++j) given[coord_var("x", static_cast<int>(j) + 1)] = sorts_given[j];
  c.U = parse(u_text, c.target, given);
  c.E = c.U;
  finalize(c);
  auto sorts = coord_sort_map(c, 8);
  c.E = parse(e_text, c.target, sorts);
  for (const auto& [sym, q] : qs) c.Q[sym] = parse(q, c.target, sorts);
  finalize(c);
  return c;
}

}  // namespace ik
