#include "interpkit/freegroup.hpp"

#include "interpkit/codec.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>

namespace ik::fg {

void check_letters(const Word& w, int rank) {
  if (rank < 1) throw WordError("rank must be at least 1");
  for (int a : w)
    if (a == 0 || std::abs(a) > rank)
      throw WordError("letter " + std::to_string(a) + " out of range for rank " + std::to_string(rank));
}

auto is_reduced(const Word& w) -> bool {
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (w[i] == -w[i + 1]) return false;
  return true;
}

auto is_cyclically_reduced(const Word& w) -> bool {
  return is_reduced(w) && (w.size() < 2 || w.front() != -w.back());
}

auto reduce(const Word& w, int rank) -> Word {
  check_letters(w, rank);
  Word out;
  for (int a : w) {
    if (!out.empty() && out.back() == -a)
      out.pop_back();
    else
      out.push_back(a);
  }
  return out;
}

auto multiply(const Word& w1, const Word& w2, int rank) -> Word {
  check_letters(w1, rank);
  check_letters(w2, rank);
  std::size_t n = w1.size(), m = w2.size(), l = 0;
  while (l < n && l < m && w1[n - 1 - l] == -w2[l]) ++l;
  Word out(w1.begin(), w1.end() - static_cast<std::ptrdiff_t>(l));
  out.insert(out.end(), w2.begin() + static_cast<std::ptrdiff_t>(l), w2.end());
  if (is_reduced(w1) && is_reduced(w2)) return out;
  return reduce(out, rank);
}

auto invert(const Word& w) -> Word {
  Word out;
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(-*it);
  return out;
}

auto power(const Word& w, int k, int rank) -> Word {
  Word base = k < 0 ? invert(w) : w;
  Word out;
  for (int i = 0; i < std::abs(k); ++i) out = multiply(out, base, rank);
  return out;
}

auto cancellation_steps(const Word& w) -> Chain {
  Chain c{w};
  Word cur = w;
  for (;;) {
    std::size_t i = 0;
    while (i + 1 < cur.size() && cur[i] != -cur[i + 1]) ++i;
    if (i + 1 >= cur.size()) return c;
    cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(i), cur.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    c.push_back(cur);
  }
}

auto equivalence_witness(const Word& u, const Word& v, int rank) -> std::optional<Chain> {
  if (reduce(u, rank) != reduce(v, rank)) return std::nullopt;
  Chain a = cancellation_steps(u);
  Chain b = cancellation_steps(v);
  for (auto it = b.rbegin() + 1; it != b.rend(); ++it) a.push_back(*it);
  return a;
}

namespace {

// `longer` with one adjacent cancelling pair removed equals `shorter`.
auto pair_removed(const Word& longer, const Word& shorter) -> bool {
  if (longer.size() != shorter.size() + 2) return false;
  for (std::size_t i = 0; i + 1 < longer.size(); ++i) {
    if (longer[i] != -longer[i + 1]) continue;
    if (std::equal(longer.begin(), longer.begin() + static_cast<std::ptrdiff_t>(i), shorter.begin()) &&
        std::equal(longer.begin() + static_cast<std::ptrdiff_t>(i) + 2, longer.end(),
                   shorter.begin() + static_cast<std::ptrdiff_t>(i)))
      return true;
  }
  return false;
}

}  // namespace

auto replays(const Chain& chain) -> bool {
  for (std::size_t i = 0; i + 1 < chain.size(); ++i)
    if (!pair_removed(chain[i], chain[i + 1]) && !pair_removed(chain[i + 1], chain[i])) return false;
  return true;
}

auto format_word(const Word& w) -> std::string {
  if (w.empty()) return "e";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
  return s;
}

auto parse_word(const std::string& s) -> Word {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty() || t == "e") return {};
  Word w;
  std::stringstream ss(t);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    int a = 0;
    try {
      a = std::stoi(part, &used);
    } catch (const std::exception&) {
      throw WordError("not a letter: '" + part + "'");
    }
    if (used != part.size() || a == 0) throw WordError("not a letter: '" + part + "'");
    w.push_back(a);
  }
  return w;
}

auto to_element(const Word& w) -> Element {
  std::vector<Int> xs(w.begin(), w.end());
  return Element::ints(xs);
}

auto from_element(const Element& e) -> Word {
  Word w;
  for (const auto& x : e.items) w.push_back(static_cast<int>(x.value));
  return w;
}

auto words_of_length(int rank, int n) -> std::vector<Word> {
  std::vector<int> letters;
  for (int a = 1; a <= rank; ++a) {
    letters.push_back(a);
    letters.push_back(-a);
  }
  std::vector<Word> out{{}};
  for (int k = 0; k < n; ++k) {
    std::vector<Word> next;
    for (const auto& w : out)
      for (int a : letters) {
        if (!w.empty() && w.back() == -a) continue;
        Word v = w;
        v.push_back(a);
        next.push_back(std::move(v));
      }
    out = std::move(next);
  }
  return out;
}

auto words_up_to(int rank, int n) -> std::vector<Word> {
  std::vector<Word> out;
  for (int k = 0; k <= n; ++k) {
    auto ws = words_of_length(rank, k);
    out.insert(out.end(), ws.begin(), ws.end());
  }
  return out;
}

auto max_word_code(int rank, int len) -> Int {
  if (len <= 1) return 0;
  NatTuple t(static_cast<std::size_t>(len - 1), Int(2 * rank));
  return encode_word_code(t);
}

// ---------------------------------------------------------------- free code

namespace {

auto list_sorts() -> std::map<std::string, std::string> {
  std::map<std::string, std::string> m;
  for (const char* v : {"x.1", "y.1", "x1.1", "x2.1", "x3.1"}) m[v] = "list";
  return m;
}

auto code_texts(int rank) -> std::map<std::string, std::string> {
  const std::string r1 = std::to_string(rank + 1);
  auto letter = [&](const std::string& a, const std::string& body) {
    return "(exists-lt (" + a + " int " + r1 + ") " + body + ")";
  };
  std::map<std::string, std::string> t;
  t["U"] = "(and (forall-lt (i (+ (len x.1) 1)) (imp (<= 1 i) " +
           letter("a", "(and (t x.1 a i) (not (= a (ofnat 0))))") +
           ")) (forall-lt (i (len x.1)) (imp (<= 1 i) (not " +
           letter("a", "(and (t x.1 a i) (t x.1 (neg a) (+ i 1)))") + "))))";
  t["E"] = "(= x.1 y.1)";
  std::string cancel = "(forall-lt (j (+ l 1)) (imp (<= 1 j) (exists-lt (p (+ n 1)) (and (= (+ p j) (+ n 1)) " +
                       letter("a", "(and (t x1.1 a p) (t x2.1 (neg a) j))") + "))))";
  std::string maximal = "(or (= l n) (or (= l m) (exists-lt (p (+ n 1)) (and (= (+ p l) n) " +
                        letter("a", "(and (t x1.1 a p) (not (t x2.1 (neg a) (+ l 1))))") + "))))";
  std::string keep = "(forall-lt (i (+ k 1)) (imp (<= 1 i) " +
                     letter("a",
                            "(and (t x3.1 a i) (or (and (<= (+ i l) n) (t x1.1 a i)) (and (not (<= (+ i l) n)) "
                            "(exists-lt (q (+ m 1)) (and (= (+ q n) (+ i (+ l l))) (t x2.1 a q))))))") +
                     "))";
  t["mul"] = "(exists (n nat) (and (= n (len x1.1)) (exists (m nat) (and (= m (len x2.1)) (exists (k nat) (and (= k "
             "(len x3.1)) (exists-lt (l (+ n 1)) (and (<= l m) (and (= (+ k (+ l l)) (+ n m)) (and " +
             cancel + " (and " + maximal + " " + keep + ")))))))))))";
  t["inv"] = "(exists (n nat) (and (= n (len x1.1)) (and (= (len x2.1) n) (forall-lt (i (+ n 1)) (imp (<= 1 i) "
             "(exists-lt (p (+ n 1)) (and (= (+ p i) (+ n 1)) " +
             letter("a", "(and (t x1.1 a i) (t x2.1 (neg a) p))") + ")))))))";
  t["e"] = "(= x1.1 nil)";
  return t;
}

}  // namespace

auto free_code(int rank) -> InterpretationCode {
  if (rank < 1) throw WordError("rank must be at least 1");
  InterpretationCode c;
  c.dim = 1;
  c.source = builtin_signature("free");
  c.target = builtin_signature("list_z");
  auto sorts = list_sorts();
  auto texts = code_texts(rank);
  c.U = parse(texts["U"], c.target, sorts);
  c.E = parse(texts["E"], c.target, sorts);
  for (const char* sym : {"mul", "inv", "e"}) c.Q[sym] = parse(texts[sym], c.target, sorts);
  finalize(c);
  return c;
}

auto free_coordinate_map() -> CoordinateMap {
  return {[](const std::string&, const std::vector<Element>& t) { return t.at(0); }};
}

// ---------------------------------------------------------------- compilation

namespace {

void require_bounded(const Formula& f) {
  bool bounded = f->kind == FKind::ForallLt || f->kind == FKind::ExistsLt;
  if (bounded || f->kind == FKind::Forall || f->kind == FKind::Exists) {
    if (f->sort == "word" && !bounded)
      throw CodeError("unbounded quantifier over " + f->name + " needs a word-length bound");
    if (bounded && !is_closed(f->terms[0]))
      throw CodeError("bound of " + f->name + " must be a numeral");
  }
  for (const auto& k : f->kids) require_bounded(k);
}

struct ResultOf {
  std::string fn;
  std::vector<Term> args;
};

// Prefixes every bound variable with "g". Translating to arithmetic flattens
// again with fresh z, z', ... names; the prefix keeps the group-level names,
// which the hints are keyed on, apart from those.
auto prefix_bound(const Formula& f) -> Formula {
  std::vector<Formula> kids;
  for (const auto& k : f->kids) kids.push_back(prefix_bound(k));
  switch (f->kind) {
    case FKind::Not: return neg(kids[0]);
    case FKind::And: return conj(kids[0], kids[1]);
    case FKind::Or: return disj(kids[0], kids[1]);
    case FKind::Imp: return imp(kids[0], kids[1]);
    case FKind::Iff: return iff(kids[0], kids[1]);
    case FKind::Forall:
    case FKind::Exists:
    case FKind::ForallLt:
    case FKind::ExistsLt: {
      std::string v = "g" + f->name;
      Formula body = substitute(kids[0], {{f->name, var(v, f->sort)}});
      if (f->kind == FKind::Forall) return forall(v, f->sort, body);
      if (f->kind == FKind::Exists) return exists(v, f->sort, body);
      if (f->kind == FKind::ForallLt) return forall_lt(v, f->sort, f->terms[0], body);
      return exists_lt(v, f->sort, f->terms[0], body);
    }
    default: return f;
  }
}

// Largest length bound of each bounded word quantifier.
void collect_bounds(const Formula& f, std::map<std::string, int>& out) {
  if ((f->kind == FKind::ForallLt || f->kind == FKind::ExistsLt) && f->sort == "word") {
    static const ModelPtr nat = builtin_model("nat");
    auto b = static_cast<int>(eval_term(*nat, f->terms[0], {}).value);
    auto [it, fresh] = out.emplace(f->name, b);
    if (!fresh) it->second = std::max(it->second, b);
  }
  for (const auto& k : f->kids) collect_bounds(k, out);
}

// Result variables of mul and inv introduced by flattening.
void collect_results(const Formula& f, std::map<std::string, ResultOf>& out) {
  if (f->kind == FKind::Atom) {
    std::string fn = graph_function(f->name);
    if ((fn == "mul" || fn == "inv") && f->terms.back()->kind == TermNode::Kind::Var) {
      std::vector<Term> args(f->terms.begin(), f->terms.end() - 1);
      out[f->terms.back()->name] = {fn, args};
    }
  }
  for (const auto& k : f->kids) collect_results(k, out);
}

auto word_from_code(const Int& code) -> std::optional<Word> {
  auto t = decode_word_code(code);
  if (!t) return std::nullopt;
  Word w;
  for (const auto& v : *t) w.push_back(static_cast<int>(unfold_int(v)));
  return w;
}

auto code_of_word(const Word& w) -> Int {
  NatTuple t;
  for (int a : w) t.push_back(fold_int(a));
  return encode_word_code(t);
}

}  // namespace

auto compile_sentence(const Formula& f, int rank) -> Compiled {
  if (!free_vars(f).empty()) throw CodeError("compile_sentence expects a sentence");
  require_bounded(f);
  Formula g = prefix_bound(flatten(f));
  InterpretationCode fc = free_code(rank);
  BoundTemplateFn words = [rank](const std::string& sort, const Int& bound) -> std::optional<Formula> {
    if (sort != "word") return std::nullopt;
    Int codes = bound <= 0 ? Int(0) : Int(max_word_code(rank, static_cast<int>(bound)) + 1);
    std::string text = "(exists-lt (x.1 list " + codes.str() + ") (exists-lt (wk nat " + bound.str() +
                       ") (and (= (len x.1) wk) (hole))))";
    return parse(text, builtin_signature("list_z"), {{"x.1", "list"}});
  };
  Compiled out;
  out.listz = translate(fc, g, words);
  out.arith = translate(builtin_code("listz_in_nat"), out.listz);

  std::map<std::string, ResultOf> results;
  collect_results(g, results);
  // A quantified word only matters when it passes U and the length guard, so
  // the reduced words below its bound are all the candidates there are.
  std::map<std::string, std::vector<Word>> ranges;
  std::map<std::string, int> bounds;
  collect_bounds(g, bounds);
  for (const auto& [v, b] : bounds) ranges[v] = b > 0 ? words_up_to(rank, b - 1) : std::vector<Word>{};
  HintFn codec = codec_hints();
  out.budget = codec_budget();
  out.budget.hint_fn = [results, ranges, codec, rank](const std::string& base,
                                                       const Env& env) -> std::optional<Hint> {
    // base is <v>.1 (a list_z word) or <v>.1.1 / <v>.1.2 (its arithmetic code and tag).
    std::string v;
    int level = 0;
    if (base.size() > 4 && base.compare(base.size() - 4, 4, ".1.1") == 0) {
      v = base.substr(0, base.size() - 4), level = 2;
    } else if (base.size() > 4 && base.compare(base.size() - 4, 4, ".1.2") == 0) {
      v = base.substr(0, base.size() - 4), level = 3;
    } else if (base.size() > 2 && base.compare(base.size() - 2, 2, ".1") == 0) {
      v = base.substr(0, base.size() - 2), level = 1;
    }
    Hint h;
    h.decisive = true;
    if (auto r = level ? ranges.find(v) : ranges.end(); r != ranges.end()) {
      for (const auto& w : r->second)
        h.candidates.push_back(level == 1 ? to_element(w) : level == 2 ? Element::scalar(code_of_word(w))
                                                                        : Element::scalar(3));
      if (level == 3) h.candidates.resize(1);
      return h;
    }
    auto it = level ? results.find(v) : results.end();
    if (it == results.end()) return codec ? codec(base, env) : std::nullopt;
    if (level == 3) {
      h.candidates.push_back(Element::scalar(3));
      return h;
    }
    std::vector<Word> args;
    for (const auto& a : it->second.args) {
      if (a->kind == TermNode::Kind::Const && a->name == "e") {
        args.emplace_back();
        continue;
      }
      if (a->kind != TermNode::Kind::Var) return std::nullopt;
      const Element* e = env_lookup(env, a->name + (level == 1 ? ".1" : ".1.1"));
      if (!e) return std::nullopt;
      if (level == 1) {
        if (!e->tuple || e->value < 0) return std::nullopt;
        args.push_back(from_element(*e));
      } else {
        if (e->tuple) return std::nullopt;
        auto w = word_from_code(e->value);
        if (!w) return h;
        args.push_back(*w);
      }
    }
    for (const auto& w : args)
      for (int a : w)
        if (a == 0 || std::abs(a) > rank) return h;
    Word r = it->second.fn == "mul" ? multiply(reduce(args.at(0), rank), reduce(args.at(1), rank), rank)
                                    : invert(reduce(args.at(0), rank));
    h.candidates.push_back(level == 1 ? to_element(r) : Element::scalar(code_of_word(r)));
    return h;
  };
  return out;
}

// ---------------------------------------------------------------- formula library

namespace {

class Library {
 public:
  explicit Library(const FormulaParams& p) : w_(p.word_bound.str()), l_(p.list_bound.str()) {}

  auto fresh(const std::string& base) -> std::string { return base + std::to_string(++n_); }

  // y or y^-1 occurs in xs.
  auto in(const std::string& y, const std::string& xs) -> std::string {
    std::string j = fresh("j");
    return "(exists-lt (" + j + " (+ (len " + xs + ") 1)) (and (<= 1 " + j + ") (or (t " + xs + " " + y + " " + j +
           ") (t " + xs + " (inv " + y + ") " + j + "))))";
  }
  // Every entry of ys is an element of xs or its inverse.
  auto gens(const std::string& ys, const std::string& xs) -> std::string {
    generated[ys] = xs;
    std::string i = fresh("i"), y = fresh("y");
    return "(forall-lt (" + i + " (+ (len " + ys + ") 1)) (imp (<= 1 " + i + ") (exists (" + y + " word) (and (t " +
           ys + " " + y + " " + i + ") " + in(y, xs) + "))))";
  }
  auto red(const std::string& ys) -> std::string {
    std::string i = fresh("i"), a = fresh("a"), b = fresh("b");
    return "(forall-lt (" + i + " (len " + ys + ")) (imp (<= 1 " + i + ") (exists (" + a + " word) (exists (" + b +
           " word) (and (t " + ys + " " + a + " " + i + ") (and (t " + ys + " " + b + " (+ " + i + " 1)) (not (= " + a +
           " (inv " + b + ")))))))))";
  }
  // The empty product covers z = e, since lists have at least one entry.
  auto memb(const std::string& z, const std::string& xs) -> std::string {
    std::string s = fresh("s");
    return "(or (= " + z + " e) (exists-lt (" + s + " list " + l_ + ") (and " + gens(s, xs) + " (= " + z + " (prod " +
           s + ")))))";
  }
  auto gen(const std::string& xs) -> std::string {
    std::string x = fresh("x");
    return "(forall-lt (" + x + " word " + w_ + ") " + memb(x, xs) + ")";
  }
  auto free(const std::string& xs) -> std::string {
    std::string ys = fresh("ys"), zs = fresh("zs");
    return "(forall-lt (" + ys + " list " + l_ + ") (forall-lt (" + zs + " list " + l_ + ") (imp (and " +
           gens(ys, xs) + " (and " + red(ys) + " (and " + gens(zs, xs) + " (and " + red(zs) + " (= (prod " + ys +
           ") (prod " + zs + ")))))) (= " + ys + " " + zs + "))))";
  }
  auto freegen(const std::string& xs) -> std::string { return "(and " + gen(xs) + " " + free(xs) + ")"; }
  auto rank_wd() -> std::string {
    std::string a = fresh("xs"), b = fresh("xs");
    return "(forall-lt (" + a + " list " + l_ + ") (forall-lt (" + b + " list " + l_ + ") (imp (and " + freegen(a) +
           " " + freegen(b) + ") (= (len " + a + ") (len " + b + ")))))";
  }
  auto howson(bool plus) -> std::string {
    std::string y1 = fresh("y"), y2 = fresh("y"), y = fresh("y"), x = fresh("x");
    std::string same = "(forall-lt (" + x + " word " + w_ + ") (iff (and " + memb(x, y1) + " " + memb(x, y2) + ") " +
                       memb(x, y) + "))";
    if (plus) {
      std::string a = fresh("m"), b = fresh("m");
      same = "(and (exists (" + a + " nat) (exists (" + b + " nat) (and (= (+ " + a + " 1) (len " + y1 +
             ")) (and (= (+ " + b + " 1) (len " + y2 + ")) (<= (len " + y + ") (+ (* (+ 1 1) (* " + a + " " + b +
             ")) 1)))))) " + same + ")";
    }
    return "(forall-lt (" + y1 + " list " + l_ + ") (forall-lt (" + y2 + " list " + l_ + ") (exists-lt (" + y +
           " list " + l_ + ") " + same + ")))";
  }

  auto text(const std::string& name) -> std::string {
    if (name == "gen") return gen("xs");
    if (name == "red") return red("ys");
    if (name == "free") return free("xs");
    if (name == "freegen") return freegen("xs");
    if (name == "rank_wd") return rank_wd();
    if (name == "memb") return memb("z", "ys");
    if (name == "howson" || name == "howson_plus") return howson(name == "howson_plus");
    throw std::invalid_argument("unknown group formula: " + name);
  }

  // List variable -> the list whose letters (and inverses) it must be built from.
  std::map<std::string, std::string> generated;

 private:
  std::string w_, l_;
  int n_ = 0;
};

}  // namespace

auto group_formula(const std::string& name, const FormulaParams& params) -> Formula {
  Library lib(params);
  return parse(lib.text(name), builtin_signature("list_free"), {{"xs", "list"}, {"ys", "list"}, {"z", "word"}});
}

auto group_budget(const std::string& name, const FormulaParams& params) -> Budget {
  Library lib(params);
  lib.text(name);
  Budget b;
  b.solve = true;
  const Int limit = params.list_bound;
  b.hint_fn = [generated = lib.generated, limit](const std::string& base, const Env& env) -> std::optional<Hint> {
    auto it = generated.find(base);
    if (it == generated.end()) return std::nullopt;
    const Element* xs = env_lookup(env, it->second);
    if (!xs || !xs->tuple || xs->value < 0) return std::nullopt;
    std::vector<Element> letters;
    for (const auto& g : xs->items) {
      if (Int(g.items.size()) >= limit) continue;
      for (const Element& h : {g, to_element(invert(from_element(g)))})
        if (std::find(letters.begin(), letters.end(), h) == letters.end()) letters.push_back(h);
    }
    Hint h;
    h.decisive = true;
    std::vector<std::vector<Element>> layer{{}};
    for (Int len = 1; len < limit && !letters.empty(); ++len) {
      std::vector<std::vector<Element>> next;
      for (const auto& l : layer)
        for (const auto& g : letters) {
          auto m = l;
          m.push_back(g);
          h.candidates.push_back(Element::of(m));
          next.push_back(std::move(m));
        }
      layer = std::move(next);
    }
    return h;
  };
  return b;
}

auto group_formula_names() -> std::vector<std::string> {
  return {"gen", "red", "free", "freegen", "rank_wd", "memb", "howson", "howson_plus"};
}

auto howson_plus_bound(const Int& m1, const Int& m2) -> Int { return 2 * (m1 - 1) * (m2 - 1) + 1; }

// ---------------------------------------------------------------- Stallings graphs

namespace {

struct Edge {
  int from;
  int label;  // positive
  int to;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : p_(n) { std::iota(p_.begin(), p_.end(), 0); }
  auto find(int x) -> int {
    while (p_[static_cast<std::size_t>(x)] != x) x = p_[static_cast<std::size_t>(x)] = p_[static_cast<std::size_t>(p_[static_cast<std::size_t>(x)])];
    return x;
  }
  auto unite(int a, int b) -> bool {
    a = find(a), b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    p_[static_cast<std::size_t>(b)] = a;
    return true;
  }

 private:
  std::vector<int> p_;
};

}  // namespace

StallingsGraph::StallingsGraph(const std::vector<Word>& gens, int rank) : rank_(rank) {
  int n = 1;
  std::vector<Edge> edges;
  auto add = [&](int u, int a, int v) {
    if (a > 0)
      edges.push_back({u, a, v});
    else
      edges.push_back({v, -a, u});
  };
  for (const auto& g0 : gens) {
    Word g = reduce(g0, rank);
    if (g.empty()) continue;
    int cur = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      int next = i + 1 == g.size() ? 0 : n++;
      add(cur, g[i], next);
      cur = next;
    }
  }
  UnionFind uf(static_cast<std::size_t>(n));
  for (bool changed = true; changed;) {
    changed = false;
    std::map<std::pair<int, int>, int> out, in;
    for (const auto& e : edges) {
      int u = uf.find(e.from), v = uf.find(e.to);
      auto [io, fresh_out] = out.emplace(std::make_pair(u, e.label), v);
      if (!fresh_out && uf.unite(io->second, v)) changed = true;
      auto [ii, fresh_in] = in.emplace(std::make_pair(v, e.label), u);
      if (!fresh_in && uf.unite(ii->second, u)) changed = true;
    }
  }
  std::map<int, int> index;
  index[uf.find(0)] = 0;
  for (int v = 0; v < n; ++v) index.emplace(uf.find(v), static_cast<int>(index.size()));
  out_.assign(index.size(), std::vector<int>(static_cast<std::size_t>(rank), -1));
  in_ = out_;
  for (const auto& e : edges) {
    int u = index[uf.find(e.from)], v = index[uf.find(e.to)];
    out_[static_cast<std::size_t>(u)][static_cast<std::size_t>(e.label - 1)] = v;
    in_[static_cast<std::size_t>(v)][static_cast<std::size_t>(e.label - 1)] = u;
  }
}

auto StallingsGraph::accepts(const Word& w) const -> bool {
  int v = 0;
  for (int a : w) {
    if (a == 0 || std::abs(a) > rank_) return false;
    const auto& table = a > 0 ? out_ : in_;
    v = table[static_cast<std::size_t>(v)][static_cast<std::size_t>(std::abs(a) - 1)];
    if (v < 0) return false;
  }
  return v == 0;
}

auto StallingsGraph::edges() const -> std::size_t {
  std::size_t e = 0;
  for (const auto& row : out_)
    for (int v : row)
      if (v >= 0) ++e;
  return e;
}

auto StallingsGraph::rank() const -> std::size_t { return edges() + 1 - vertices(); }

auto StallingsGraph::folded() const -> bool {
  for (std::size_t v = 0; v < out_.size(); ++v)
    for (std::size_t a = 0; a < out_[v].size(); ++a) {
      int w = out_[v][a];
      if (w >= 0 && in_[static_cast<std::size_t>(w)][a] != static_cast<int>(v)) return false;
    }
  return true;
}

auto StallingsGraph::basis() const -> std::vector<Word> {
  std::vector<std::optional<Word>> path(out_.size());
  std::set<std::pair<int, int>> tree;  // (vertex, label) of tree edges, outgoing form
  path[0] = Word{};
  std::deque<int> queue{0};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int a = 1; a <= rank_; ++a) {
      auto ai = static_cast<std::size_t>(a - 1);
      int w = out_[static_cast<std::size_t>(v)][ai];
      if (w >= 0 && !path[static_cast<std::size_t>(w)]) {
        Word p = *path[static_cast<std::size_t>(v)];
        p.push_back(a);
        path[static_cast<std::size_t>(w)] = p;
        tree.insert({v, a});
        queue.push_back(w);
      }
      int u = in_[static_cast<std::size_t>(v)][ai];
      if (u >= 0 && !path[static_cast<std::size_t>(u)]) {
        Word p = *path[static_cast<std::size_t>(v)];
        p.push_back(-a);
        path[static_cast<std::size_t>(u)] = p;
        tree.insert({u, a});
        queue.push_back(u);
      }
    }
  }
  std::vector<Word> out;
  for (std::size_t v = 0; v < out_.size(); ++v)
    for (int a = 1; a <= rank_; ++a) {
      int w = out_[v][static_cast<std::size_t>(a - 1)];
      if (w < 0 || tree.count({static_cast<int>(v), a}) || !path[v] || !path[static_cast<std::size_t>(w)]) continue;
      Word g = *path[v];
      g.push_back(a);
      Word back = invert(*path[static_cast<std::size_t>(w)]);
      g.insert(g.end(), back.begin(), back.end());
      out.push_back(reduce(g, rank_));
    }
  return out;
}

auto StallingsGraph::product(const StallingsGraph& a, const StallingsGraph& b) -> StallingsGraph {
  if (a.rank_ != b.rank_) throw WordError("rank mismatch");
  StallingsGraph g;
  g.rank_ = a.rank_;
  std::map<std::pair<int, int>, int> id{{{0, 0}, 0}};
  std::vector<std::pair<int, int>> pairs{{0, 0}};
  std::vector<Edge> edges;
  auto vertex = [&](int p, int q) {
    auto [it, fresh] = id.emplace(std::make_pair(p, q), static_cast<int>(pairs.size()));
    if (fresh) pairs.emplace_back(p, q);
    return it->second;
  };
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [p, q] = pairs[i];
    for (int l = 1; l <= g.rank_; ++l) {
      auto li = static_cast<std::size_t>(l - 1);
      int po = a.out_[static_cast<std::size_t>(p)][li], qo = b.out_[static_cast<std::size_t>(q)][li];
      if (po >= 0 && qo >= 0) edges.push_back({static_cast<int>(i), l, vertex(po, qo)});
      int pi = a.in_[static_cast<std::size_t>(p)][li], qi = b.in_[static_cast<std::size_t>(q)][li];
      if (pi >= 0 && qi >= 0) vertex(pi, qi);
    }
  }
  g.out_.assign(pairs.size(), std::vector<int>(static_cast<std::size_t>(g.rank_), -1));
  g.in_ = g.out_;
  for (const auto& e : edges) {
    g.out_[static_cast<std::size_t>(e.from)][static_cast<std::size_t>(e.label - 1)] = e.to;
    g.in_[static_cast<std::size_t>(e.to)][static_cast<std::size_t>(e.label - 1)] = e.from;
  }
  return g;
}

auto membership(const std::vector<Word>& gens, const Word& w, int rank) -> bool {
  return StallingsGraph(gens, rank).accepts(reduce(w, rank));
}

auto intersect(const std::vector<Word>& g1, const std::vector<Word>& g2, int rank) -> std::vector<Word> {
  return StallingsGraph::product(StallingsGraph(g1, rank), StallingsGraph(g2, rank)).basis();
}

// ---------------------------------------------------------------- centralizers

auto root(const Word& w0, int rank) -> Word {
  Word w = reduce(w0, rank);
  if (w.empty()) throw WordError("the identity has no root");
  std::size_t n = w.size(), k = 0;
  while (2 * k + 2 <= n && w[k] == -w[n - 1 - k]) ++k;
  Word c(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k));
  Word v(w.begin() + static_cast<std::ptrdiff_t>(k), w.end() - static_cast<std::ptrdiff_t>(k));
  std::size_t m = v.size();
  for (std::size_t d = 1; d <= m; ++d) {
    if (m % d) continue;
    bool periodic = true;
    for (std::size_t i = d; i < m && periodic; ++i) periodic = v[i] == v[i - d];
    if (periodic) {
      Word r = c;
      r.insert(r.end(), v.begin(), v.begin() + static_cast<std::ptrdiff_t>(d));
      Word ci = invert(c);
      r.insert(r.end(), ci.begin(), ci.end());
      return r;
    }
  }
  return w;
}

auto power_of(const Word& u0, const Word& base, int rank) -> std::optional<int> {
  Word u = reduce(u0, rank);
  if (u.empty()) return 0;
  if (base.empty()) return std::nullopt;
  int limit = static_cast<int>(u.size()) + 1;
  Word up = Word{}, down = Word{};
  Word inv = invert(base);
  for (int k = 1; k <= limit; ++k) {
    up = multiply(up, base, rank);
    down = multiply(down, inv, rank);
    if (up == u) return k;
    if (down == u) return -k;
  }
  return std::nullopt;
}

auto centralizer_sample(const Word& w0, int maxlen, int rank) -> std::vector<Word> {
  Word w = reduce(w0, rank);
  if (w.empty()) throw WordError("centralizer_sample needs a nontrivial word");
  std::vector<Word> out;
  for (const auto& u : words_up_to(rank, maxlen))
    if (multiply(u, w, rank) == multiply(w, u, rank)) out.push_back(u);
  return out;
}

}  // namespace ik::fg
