#include "interpkit/model.hpp"

#include "interpkit/codec.hpp"

#include <algorithm>
#include <sstream>

namespace ik {

auto Element::scalar(Int v) -> Element {
  Element e;
  e.value = std::move(v);
  return e;
}

auto Element::of(std::vector<Element> xs) -> Element {
  Element e;
  e.items = std::move(xs);
  e.tuple = true;
  return e;
}

auto Element::ints(const std::vector<Int>& xs) -> Element {
  std::vector<Element> v;
  v.reserve(xs.size());
  for (const auto& x : xs) v.push_back(scalar(x));
  return of(std::move(v));
}

auto Element::scalars() const -> std::vector<Int> {
  std::vector<Int> out;
  out.reserve(items.size());
  for (const auto& x : items) out.push_back(x.value);
  return out;
}

auto operator==(const Element& a, const Element& b) -> bool {
  return a.tuple == b.tuple && a.value == b.value && a.items == b.items;
}

auto operator<(const Element& a, const Element& b) -> bool {
  if (a.tuple != b.tuple) return !a.tuple;
  if (!a.tuple) return a.value < b.value;
  return std::lexicographical_compare(a.items.begin(), a.items.end(), b.items.begin(), b.items.end());
}

auto to_string(const Element& e) -> std::string {
  if (!e.tuple) return e.value.str();
  std::string s = "(";
  for (std::size_t i = 0; i < e.items.size(); ++i) {
    if (i) s += ",";
    s += to_string(e.items[i]);
  }
  return s + ")";
}

auto to_string(Truth t) -> std::string {
  switch (t) {
    case Truth::True: return "TRUE";
    case Truth::False: return "FALSE";
    case Truth::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

auto t_not(Truth a) -> Truth {
  if (a == Truth::True) return Truth::False;
  if (a == Truth::False) return Truth::True;
  return Truth::Unknown;
}

auto t_and(Truth a, Truth b) -> Truth {
  if (a == Truth::False || b == Truth::False) return Truth::False;
  if (a == Truth::True && b == Truth::True) return Truth::True;
  return Truth::Unknown;
}

auto t_or(Truth a, Truth b) -> Truth {
  if (a == Truth::True || b == Truth::True) return Truth::True;
  if (a == Truth::False && b == Truth::False) return Truth::False;
  return Truth::Unknown;
}

auto env_lookup(const Env& env, const std::string& v) -> const Element* {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->first == v) return &it->second;
  return nullptr;
}

auto env_lookup_base(const Env& env, const std::string& base) -> const Element* {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (base_name(it->first) == base) return &it->second;
  return nullptr;
}

// ---------------------------------------------------------------- Model defaults

auto Model::constant(const std::string& c) const -> Element {
  if (c == "0") return Element::scalar(0);
  if (c == "1") return Element::scalar(1);
  throw EvalError("model " + name_ + " has no constant " + c);
}

auto Model::graph_holds(const std::string& fn, const std::vector<Element>& args) const -> bool {
  std::vector<Element> in(args.begin(), args.end() - 1);
  return apply(fn, in) == args.back();
}

auto Model::holds(const std::string& pred, const std::vector<Element>& args) const -> bool {
  std::string fn = graph_function(pred);
  if (!fn.empty() && sig_.functions.count(fn)) return graph_holds(fn, args);
  throw EvalError("model " + name_ + " has no predicate " + pred);
}

void Model::enumerate(const std::string& sort, std::uint64_t limit,
                      const std::function<bool(const Element&)>& visit) const {
  std::uint64_t seen = 0;
  for (Int layer = 0; seen < limit; ++layer) {
    bool stop = false;
    below(sort, layer + 1, [&](const Element& e) {
      if (size(sort, e) != layer) return true;
      if (!visit(e) || ++seen >= limit) {
        stop = true;
        return false;
      }
      return true;
    });
    if (stop) return;
    if (layer > 64 && seen == 0) return;
  }
}

auto Model::determine(const std::string& pred, const std::vector<Element>& args, std::size_t pos) const
    -> std::optional<std::optional<Element>> {
  std::string fn = graph_function(pred);
  if (fn.empty() || !sig_.functions.count(fn) || pos + 1 != args.size()) return std::nullopt;
  std::vector<Element> in(args.begin(), args.end() - 1);
  return std::optional<Element>(apply(fn, in));
}

auto Model::code(const std::string& sort, const Element&) const -> Int {
  throw EvalError("model " + name_ + " has no coding for sort " + sort);
}

auto Model::decode(const std::string& sort, const Int&) const -> Element {
  throw EvalError("model " + name_ + " has no coding for sort " + sort);
}

// ---------------------------------------------------------------- built-in models

namespace {

auto arith(const std::string& fn, const std::vector<Element>& a, Element& out) -> bool {
  if (fn == "+") {
    out = Element::scalar(a[0].value + a[1].value);
    return true;
  }
  if (fn == "*") {
    out = Element::scalar(a[0].value * a[1].value);
    return true;
  }
  return false;
}

auto component(const Element& s, const Element& a, const Element& i) -> bool {
  const Int& idx = i.value;
  if (idx < 1 || idx > s.items.size()) return false;
  return s.items[static_cast<std::size_t>(idx) - 1] == a;
}

// The component t(s, ?, i) pins: the i-th entry, or nothing when i is out of range.
auto component_at(const Element& s, const Element& i) -> std::optional<std::optional<Element>> {
  if (i.value < 1 || i.value > s.items.size()) return std::optional<Element>();
  return std::optional<Element>(s.items[static_cast<std::size_t>(i.value) - 1]);
}

auto concat(const Element& x, const Element& y) -> Element {
  std::vector<Element> v = x.items;
  v.insert(v.end(), y.items.begin(), y.items.end());
  return Element::of(std::move(v));
}

auto free_mul(const Element& x, const Element& y) -> Element {
  std::vector<Element> out = x.items;
  for (const auto& l : y.items) {
    if (!out.empty() && out.back().value == -l.value)
      out.pop_back();
    else
      out.push_back(l);
  }
  return Element::of(std::move(out));
}

auto free_inv(const Element& x) -> Element {
  std::vector<Element> out;
  for (auto it = x.items.rbegin(); it != x.items.rend(); ++it) out.push_back(Element::scalar(-it->value));
  return Element::of(std::move(out));
}

void nat_below(const Int& bound, const std::function<bool(const Element&)>& visit) {
  for (Int i = 0; i < bound; ++i)
    if (!visit(Element::scalar(i))) return;
}

// Reduced words of length exactly n, letters ordered -r..-1, 1..r.
auto words_of_length(int rank, int n, const std::function<bool(const Element&)>& visit) -> bool {
  std::vector<Element> cur;
  std::function<bool()> rec = [&]() -> bool {
    if (static_cast<int>(cur.size()) == n) return visit(Element::of(cur));
    for (int a = -rank; a <= rank; ++a) {
      if (a == 0) continue;
      if (!cur.empty() && cur.back().value == -a) continue;
      cur.push_back(Element::scalar(a));
      if (!rec()) return false;
      cur.pop_back();
    }
    return true;
  };
  return rec();
}

class NatModel : public Model {
 public:
  NatModel() : Model("nat", builtin_signature("arith")) {}

  auto apply(const std::string& fn, const std::vector<Element>& a) const -> Element override {
    Element out;
    if (arith(fn, a, out)) return out;
    throw EvalError("nat has no function " + fn);
  }
  auto size(const std::string&, const Element& e) const -> Int override { return e.value; }
  void below(const std::string&, const Int& b, const std::function<bool(const Element&)>& v) const override {
    nat_below(b, v);
  }
  void enumerate(const std::string&, std::uint64_t limit,
                 const std::function<bool(const Element&)>& v) const override {
    nat_below(Int(limit), v);
  }
  auto code(const std::string&, const Element& e) const -> Int override { return e.value; }
  auto decode(const std::string&, const Int& n) const -> Element override { return Element::scalar(n); }
};

class ListNatModel : public Model {
 public:
  ListNatModel() : Model("list_nat", builtin_signature("list_nat")) {}

  auto apply(const std::string& fn, const std::vector<Element>& a) const -> Element override {
    Element out;
    if (arith(fn, a, out)) return out;
    if (fn == "len") return Element::scalar(a[0].items.size());
    if (fn == "concat") return concat(a[0], a[1]);
    throw EvalError("list_nat has no function " + fn);
  }
  auto holds(const std::string& p, const std::vector<Element>& a) const -> bool override {
    if (p == "t") return component(a[0], a[1], a[2]);
    return Model::holds(p, a);
  }
  auto determine(const std::string& p, const std::vector<Element>& a, std::size_t pos) const
      -> std::optional<std::optional<Element>> override {
    if (p == "t" && pos == 1) return component_at(a[0], a[2]);
    return Model::determine(p, a, pos);
  }
  auto size(const std::string& s, const Element& e) const -> Int override { return code(s, e); }
  void below(const std::string& s, const Int& b, const std::function<bool(const Element&)>& v) const override {
    for (Int i = 0; i < b; ++i)
      if (!v(decode(s, i))) return;
  }
  void enumerate(const std::string& s, std::uint64_t limit,
                 const std::function<bool(const Element&)>& v) const override {
    below(s, Int(limit), v);
  }
  auto code(const std::string& s, const Element& e) const -> Int override {
    return s == "list" ? encode_tuple(e.scalars()) : e.value;
  }
  auto decode(const std::string& s, const Int& n) const -> Element override {
    return s == "list" ? Element::ints(decode_tuple(n)) : Element::scalar(n);
  }
};

class ListZModel : public Model {
 public:
  ListZModel() : Model("list_z", builtin_signature("list_z")) {}

  auto constant(const std::string& c) const -> Element override {
    if (c == "nil") return Element::of({});
    return Model::constant(c);
  }

  auto apply(const std::string& fn, const std::vector<Element>& a) const -> Element override {
    Element out;
    if (arith(fn, a, out)) return out;
    if (fn == "neg") return Element::scalar(-a[0].value);
    if (fn == "ofnat") return a[0];
    if (fn == "len") return Element::scalar(a[0].items.size());
    if (fn == "concat") return concat(a[0], a[1]);
    throw EvalError("list_z has no function " + fn);
  }
  auto holds(const std::string& p, const std::vector<Element>& a) const -> bool override {
    if (p == "t") return component(a[0], a[1], a[2]);
    return Model::holds(p, a);
  }
  auto determine(const std::string& p, const std::vector<Element>& a, std::size_t pos) const
      -> std::optional<std::optional<Element>> override {
    if (p == "t" && pos == 1) return component_at(a[0], a[2]);
    return Model::determine(p, a, pos);
  }
  auto size(const std::string& s, const Element& e) const -> Int override {
    if (s == "int") return abs(e.value);
    return code(s, e);
  }
  void below(const std::string& s, const Int& b, const std::function<bool(const Element&)>& v) const override {
    if (s == "nat") return nat_below(b, v);
    if (s == "int") {
      for (Int i = 0; i < b; ++i) {
        if (!v(Element::scalar(i))) return;
        if (i > 0 && !v(Element::scalar(-i))) return;
      }
      return;
    }
    for (Int c = 0; c < b; ++c) {
      auto t = decode_word_code(c);
      if (!t) continue;
      if (!v(from_folded(*t))) return;
    }
  }
  void enumerate(const std::string& s, std::uint64_t limit,
                 const std::function<bool(const Element&)>& v) const override {
    if (s == "nat") return nat_below(Int(limit), v);
    if (s == "int") {
      std::uint64_t n = 0;
      below(s, Int(limit), [&](const Element& e) { return n++ < limit && v(e); });
      return;
    }
    std::uint64_t n = 0;
    for (Int c = 0; n < limit; ++c) {
      auto t = decode_word_code(c);
      if (!t) continue;
      ++n;
      if (!v(from_folded(*t))) return;
    }
  }
  auto code(const std::string& s, const Element& e) const -> Int override {
    if (s == "int") return fold_int(e.value);
    if (s == "list") {
      NatTuple t;
      for (const auto& x : e.items) t.push_back(fold_int(x.value));
      return encode_word_code(t);
    }
    return e.value;
  }
  auto decode(const std::string& s, const Int& n) const -> Element override {
    if (s == "int") return Element::scalar(unfold_int(n));
    if (s == "list") {
      auto t = decode_word_code(n);
      if (!t) throw EvalError("not a list code: " + n.str());
      return from_folded(*t);
    }
    return Element::scalar(n);
  }

 private:
  static auto from_folded(const NatTuple& t) -> Element {
    std::vector<Int> z;
    for (const auto& x : t) z.push_back(unfold_int(x));
    return Element::ints(z);
  }
};

class FreeModel : public Model {
 public:
  explicit FreeModel(int rank) : Model("free(" + std::to_string(rank) + ")", builtin_signature("free")), r_(rank) {}

  auto constant(const std::string& c) const -> Element override {
    if (c == "e") return Element::of({});
    return Model::constant(c);
  }
  auto apply(const std::string& fn, const std::vector<Element>& a) const -> Element override {
    if (fn == "mul") return free_mul(a[0], a[1]);
    if (fn == "inv") return free_inv(a[0]);
    throw EvalError("free group has no function " + fn);
  }
  auto size(const std::string&, const Element& e) const -> Int override { return e.items.size(); }
  void below(const std::string&, const Int& b, const std::function<bool(const Element&)>& v) const override {
    for (int n = 0; n < b; ++n)
      if (!words_of_length(r_, n, v)) return;
  }

 private:
  int r_;
};

class ListFreeModel : public Model {
 public:
  explicit ListFreeModel(int rank)
      : Model("list_free(" + std::to_string(rank) + ")", builtin_signature("list_free")), r_(rank) {}

  auto constant(const std::string& c) const -> Element override {
    if (c == "e") return Element::of({});
    return Model::constant(c);
  }
  auto apply(const std::string& fn, const std::vector<Element>& a) const -> Element override {
    Element out;
    if (arith(fn, a, out)) return out;
    if (fn == "mul") return free_mul(a[0], a[1]);
    if (fn == "inv") return free_inv(a[0]);
    if (fn == "len") return Element::scalar(a[0].items.size());
    if (fn == "concat") return concat(a[0], a[1]);
    if (fn == "prod") {
      Element acc = Element::of({});
      for (const auto& w : a[0].items) acc = free_mul(acc, w);
      return acc;
    }
    throw EvalError("list_free has no function " + fn);
  }
  auto holds(const std::string& p, const std::vector<Element>& a) const -> bool override {
    if (p == "t") return component(a[0], a[1], a[2]);
    return Model::holds(p, a);
  }
  auto determine(const std::string& p, const std::vector<Element>& a, std::size_t pos) const
      -> std::optional<std::optional<Element>> override {
    if (p == "t" && pos == 1) return component_at(a[0], a[2]);
    return Model::determine(p, a, pos);
  }
  auto size(const std::string& s, const Element& e) const -> Int override {
    if (s == "nat") return e.value;
    if (s == "word") return e.items.size();
    std::size_t m = e.items.size();
    for (const auto& w : e.items) m = std::max(m, w.items.size());
    return m;
  }
  void below(const std::string& s, const Int& b, const std::function<bool(const Element&)>& v) const override {
    if (s == "nat") return nat_below(b, v);
    if (s == "word") {
      for (int n = 0; n < b; ++n)
        if (!words_of_length(r_, n, v)) return;
      return;
    }
    // Lists (length >= 1) layered by size.
    for (int sz = 1; sz < b; ++sz) {
      std::vector<Element> words;
      for (int n = 0; n <= sz; ++n) words_of_length(r_, n, [&](const Element& w) {
          words.push_back(w);
          return true;
        });
      std::vector<Element> cur;
      std::function<bool()> rec = [&]() -> bool {
        if (!cur.empty()) {
          Element l = Element::of(cur);
          if (size(s, l) == sz && !v(l)) return false;
        }
        if (static_cast<int>(cur.size()) == sz) return true;
        for (const auto& w : words) {
          cur.push_back(w);
          if (!rec()) return false;
          cur.pop_back();
        }
        return true;
      };
      if (!rec()) return;
    }
  }

 private:
  int r_;
};

class TaggedModel : public Model {
 public:
  TaggedModel(ModelPtr base, std::map<std::string, Int> tagging)
      : Model(base->name() + "_tagged", collapsed_signature(base->signature(), tagging)),
        base_(std::move(base)),
        tags_(std::move(tagging)) {}

  auto constant(const std::string& c) const -> Element override {
    const auto& sig = base_->signature();
    return Element::scalar(base_->code(sig.constants.at(c), base_->constant(c)));
  }
  auto apply(const std::string& fn, const std::vector<Element>& a) const -> Element override {
    const auto& fs = base_->signature().functions.at(fn);
    std::vector<Element> in;
    for (std::size_t i = 0; i < a.size(); ++i) in.push_back(base_->decode(fs.args[i], a[i].value));
    return Element::scalar(base_->code(fs.result, base_->apply(fn, in)));
  }
  auto holds(const std::string& p, const std::vector<Element>& a) const -> bool override {
    if (p.rfind("tag_", 0) == 0) return tags_.at(p.substr(4)) == a[0].value;
    const auto& sig = base_->signature();
    auto it = sig.predicates.find(p);
    if (it == sig.predicates.end()) return Model::holds(p, a);
    std::vector<Element> in;
    for (std::size_t i = 0; i < a.size(); ++i) in.push_back(base_->decode(it->second[i], a[i].value));
    return base_->holds(p, in);
  }
  auto determine(const std::string& p, const std::vector<Element>& a, std::size_t pos) const
      -> std::optional<std::optional<Element>> override {
    if (p.rfind("tag_", 0) == 0) return std::optional<Element>(Element::scalar(tags_.at(p.substr(4))));
    return Model::determine(p, a, pos);
  }
  auto size(const std::string&, const Element& e) const -> Int override { return e.value; }
  void below(const std::string&, const Int& b, const std::function<bool(const Element&)>& v) const override {
    nat_below(b, v);
  }
  void enumerate(const std::string&, std::uint64_t limit,
                 const std::function<bool(const Element&)>& v) const override {
    nat_below(Int(limit), v);
  }

 private:
  ModelPtr base_;
  std::map<std::string, Int> tags_;
};

}  // namespace

auto builtin_model(const std::string& name, int rank) -> ModelPtr {
  if (name == "nat") return std::make_shared<NatModel>();
  if (name == "list_nat") return std::make_shared<ListNatModel>();
  if (name == "list_z") return std::make_shared<ListZModel>();
  if (name == "free" || name == "list_free") {
    if (rank < 1) throw std::invalid_argument("free group rank must be at least 1");
    if (name == "free") return std::make_shared<FreeModel>(rank);
    return std::make_shared<ListFreeModel>(rank);
  }
  auto lp = name.find('(');
  if (lp != std::string::npos && name.back() == ')') {
    int r = 0;
    try {
      r = std::stoi(name.substr(lp + 1, name.size() - lp - 2));
    } catch (const std::exception&) {
      throw std::invalid_argument("invalid rank in model name: " + name);
    }
    return builtin_model(name.substr(0, lp), r);
  }
  throw std::invalid_argument("unknown model: " + name);
}

auto tagged_model(ModelPtr base, std::map<std::string, Int> tagging) -> ModelPtr {
  return std::make_shared<TaggedModel>(std::move(base), std::move(tagging));
}

// ---------------------------------------------------------------- evaluation

auto eval_term(const Model& m, const Term& t, const Env& env) -> Element {
  switch (t->kind) {
    case TermNode::Kind::Var: {
      const Element* e = env_lookup(env, t->name);
      if (!e) throw EvalError("unbound variable " + t->name);
      return *e;
    }
    case TermNode::Kind::Const:
      return m.constant(t->name);
    case TermNode::Kind::Num:
      return Element::scalar(t->value);
    case TermNode::Kind::App: {
      std::vector<Element> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) args.push_back(eval_term(m, a, env));
      return m.apply(t->name, args);
    }
  }
  throw EvalError("bad term");
}

namespace {

auto occurrences(const Term& t, const std::string& z) -> int {
  if (t->kind == TermNode::Kind::Var) return t->name == z ? 1 : 0;
  int n = 0;
  for (const auto& a : t->args) n += occurrences(a, z);
  return n;
}

auto mentions(const Term& t, const std::set<std::string>& vs) -> bool {
  if (t->kind == TermNode::Kind::Var) return vs.count(t->name) > 0;
  for (const auto& a : t->args)
    if (mentions(a, vs)) return true;
  return false;
}

using Det = std::optional<std::optional<Element>>;
// Every satisfying value lies in the vector; nullopt when nothing is known.
using Cands = std::optional<std::vector<Element>>;

auto cands_of(const Det& d) -> Cands {
  if (!d) return std::nullopt;
  if (!*d) return std::vector<Element>{};
  return std::vector<Element>{**d};
}

class Evaluator {
 public:
  Evaluator(const Model& m, const Budget& b, Env env) : m_(m), b_(b), env_(std::move(env)) {}

  auto eval(const Formula& f) -> Truth {
    switch (f->kind) {
      case FKind::Atom: {
        if (f->name == "hole" && f->terms.empty()) return Truth::True;
        std::vector<Element> args;
        args.reserve(f->terms.size());
        for (const auto& t : f->terms) args.push_back(eval_term(m_, t, env_));
        return m_.holds(f->name, args) ? Truth::True : Truth::False;
      }
      case FKind::Eq:
        return eval_term(m_, f->terms[0], env_) == eval_term(m_, f->terms[1], env_) ? Truth::True : Truth::False;
      case FKind::Not:
        return t_not(eval(f->kids[0]));
      case FKind::And: {
        Truth a = eval(f->kids[0]);
        if (a == Truth::False) return a;
        return t_and(a, eval(f->kids[1]));
      }
      case FKind::Or: {
        Truth a = eval(f->kids[0]);
        if (a == Truth::True) return a;
        return t_or(a, eval(f->kids[1]));
      }
      case FKind::Imp: {
        Truth a = eval(f->kids[0]);
        if (a == Truth::False) return Truth::True;
        return t_or(t_not(a), eval(f->kids[1]));
      }
      case FKind::Iff: {
        Truth a = eval(f->kids[0]);
        Truth c = eval(f->kids[1]);
        if (a == Truth::Unknown || c == Truth::Unknown) return Truth::Unknown;
        return a == c ? Truth::True : Truth::False;
      }
      default:
        return quantifier(f);
    }
  }

 private:
  struct Scope {
    Env& env;
    Scope(Env& e, const std::string& v, Element x) : env(e) { env.emplace_back(v, std::move(x)); }
    ~Scope() { env.pop_back(); }
  };

  auto body_at(const Formula& f, const Element& x) -> Truth {
    Scope s(env_, f->name, x);
    return eval(f->kids[0]);
  }

  auto hints_for(const Formula& f) -> std::pair<std::vector<Element>, bool> {
    bool decisive = false;
    std::vector<Element> cands;
    auto sit = b_.hints.find(f->name);
    if (sit == b_.hints.end()) sit = b_.hints.find(base_name(f->name));
    if (sit != b_.hints.end()) cands = sit->second;
    if (b_.hint_fn) {
      if (auto h = b_.hint_fn(base_name(f->name), env_)) {
        cands.insert(cands.end(), h->candidates.begin(), h->candidates.end());
        decisive = h->decisive;
      }
    }
    return {std::move(cands), decisive};
  }

  auto quantifier(const Formula& f) -> Truth {
    const bool universal = f->kind == FKind::Forall || f->kind == FKind::ForallLt;
    const bool bounded = is_bounded(f->kind);
    Int bound;
    if (bounded) {
      Element be = eval_term(m_, f->terms[0], env_);
      if (be.tuple) throw EvalError("quantifier bound is not a number");
      bound = be.value;
    }
    const Truth stop = universal ? Truth::False : Truth::True;
    const Truth neutral = universal ? Truth::True : Truth::False;

    auto [cands, decisive] = hints_for(f);
    Cands c;
    if (decisive) c = std::move(cands);
    if (c || (b_.solve && (c = determined(f, universal)))) {
      Truth acc = neutral;
      for (const auto& x : *c) {
        if (bounded && m_.size(f->sort, x) >= bound) continue;
        Truth r = body_at(f, x);
        acc = universal ? t_and(acc, r) : t_or(acc, r);
        if (acc == stop) break;
      }
      return acc;
    }

    Truth acc = neutral;
    auto visit = [&](const Element& x) -> bool {
      Truth r = body_at(f, x);
      acc = universal ? t_and(acc, r) : t_or(acc, r);
      return acc != stop;
    };

    for (const auto& x : cands) {
      if (bounded && m_.size(f->sort, x) >= bound) continue;
      if (!visit(x)) return acc;
    }

    if (bounded) {
      m_.below(f->sort, bound, visit);
      return acc;
    }
    m_.enumerate(f->sort, b_.max_witnesses, visit);
    if (acc == stop) return acc;
    return Truth::Unknown;
  }

  // Value of `z` forced by a single conjunct `c`, if any. `unknown` holds the
  // variables without a value at this point (including z).
  auto pinned_by(const Formula& c, const std::string& z, const std::set<std::string>& unknown) -> Det {
    std::set<std::string> others = unknown;
    others.erase(z);
    if (c->kind == FKind::Eq) {
      int n0 = occurrences(c->terms[0], z), n1 = occurrences(c->terms[1], z);
      if (n0 + n1 != 1) return std::nullopt;
      if (mentions(c->terms[0], others) || mentions(c->terms[1], others)) return std::nullopt;
      const Term& side = n0 ? c->terms[0] : c->terms[1];
      const Term& other = n0 ? c->terms[1] : c->terms[0];
      return solve(side, eval_term(m_, other, env_), z);
    }
    if (c->kind != FKind::Atom || c->name == "hole") return std::nullopt;
    std::size_t pos = 0;
    int hits = 0;
    for (std::size_t i = 0; i < c->terms.size(); ++i) {
      int k = occurrences(c->terms[i], z);
      if (k == 1 && c->terms[i]->kind == TermNode::Kind::Var) {
        pos = i;
        ++hits;
      } else if (k > 0) {
        return std::nullopt;
      }
      if (mentions(c->terms[i], others)) return std::nullopt;
    }
    if (hits != 1) return std::nullopt;
    std::vector<Element> args(c->terms.size());
    for (std::size_t i = 0; i < c->terms.size(); ++i)
      if (i != pos) args[i] = eval_term(m_, c->terms[i], env_);
    return m_.determine(c->name, args, pos);
  }

  // Value of the variable bound by quantifier `q` forced by the top-level
  // conjuncts of its body or by a decisive single hint.
  auto pin(const Formula& q, std::set<std::string>& unknown) -> Det {
    const std::string& y = q->name;
    unknown.insert(y);
    Det d;
    // Conjuncts below nested existentials count too; their variables stay unknown.
    std::set<std::string> unk = unknown;
    std::vector<Formula> stack{q->kids[0]};
    while (!stack.empty() && !d) {
      Formula c = stack.back();
      stack.pop_back();
      if (c->kind == FKind::And) {
        stack.push_back(c->kids[1]);
        stack.push_back(c->kids[0]);
      } else if ((c->kind == FKind::Exists || c->kind == FKind::ExistsLt) && c->name != y) {
        unk.insert(c->name);
        stack.push_back(c->kids[0]);
      } else {
        d = pinned_by(c, y, unk);
      }
    }
    if (!d) {
      auto [cands, decisive] = hints_for(q);
      if (decisive && cands.size() <= 1) d = cands.empty() ? std::optional<Element>() : std::optional<Element>(cands[0]);
    }
    if (d && *d && q->kind == FKind::ExistsLt && !mentions(q->terms[0], unknown)) {
      Element b = eval_term(m_, q->terms[0], env_);
      if (m_.size(q->sort, **d) >= b.value) d = std::optional<Element>();
    }
    return d;
  }

  // Walks the conjunction chain below an existential, binding nested
  // existential variables whose values are forced, and returns the values a
  // conjunct (or every branch of a disjunction) leaves for z. An empty vector
  // means the chain is unsatisfiable for every z.
  auto walk(const Formula& g, const std::string& z, std::set<std::string>& unknown) -> Cands {
    switch (g->kind) {
      case FKind::And: {
        if (Cands d = walk(g->kids[0], z, unknown)) return d;
        return walk(g->kids[1], z, unknown);
      }
      case FKind::Or: {
        Cands a = walk(g->kids[0], z, unknown);
        if (!a) return a;
        Cands b = walk(g->kids[1], z, unknown);
        if (!b) return b;
        for (auto& x : *b)
          if (std::find(a->begin(), a->end(), x) == a->end()) a->push_back(std::move(x));
        return a;
      }
      case FKind::Exists:
      case FKind::ExistsLt: {
        const std::string& y = g->name;
        if (y == z) return std::nullopt;
        const bool was_unknown = unknown.count(y) > 0;
        env_.emplace_back(y, placeholder());
        Det p = pin(g, unknown);
        if (!p && g->kind == FKind::Exists) {
          // Fall back to the values the body itself forces for y.
          Cands own = walk(g->kids[0], y, unknown);
          if (own && own->empty())
            p = std::optional<Element>();
          else if (own && own->size() == 1)
            p = std::optional<Element>(own->front());
        }
        Cands d;
        if (p && !*p) {
          d = std::vector<Element>{};
        } else if (p) {
          unknown.erase(y);
          env_.back().second = **p;
          d = walk(g->kids[0], z, unknown);
        } else {
          d = walk(g->kids[0], z, unknown);
        }
        env_.pop_back();
        if (was_unknown)
          unknown.insert(y);
        else
          unknown.erase(y);
        return d;
      }
      case FKind::Eq:
      case FKind::Atom:
        return cands_of(pinned_by(g, z, unknown));
      default:
        return std::nullopt;
    }
  }

  auto walk_universal(const Formula& g, const std::string& z, std::set<std::string>& unknown) -> Cands {
    if (g->kind == FKind::Forall || g->kind == FKind::ForallLt) {
      if (g->name == z) return std::nullopt;
      bool inserted = unknown.insert(g->name).second;
      env_.emplace_back(g->name, placeholder());
      Cands d = walk_universal(g->kids[0], z, unknown);
      env_.pop_back();
      if (inserted) unknown.erase(g->name);
      return d;
    }
    if (g->kind == FKind::Imp) {
      if (Cands d = walk(g->kids[0], z, unknown)) return d;
      return walk_universal(g->kids[1], z, unknown);
    }
    return std::nullopt;
  }

  auto determined(const Formula& f, bool universal) -> Cands {
    std::set<std::string> unknown{f->name};
    env_.emplace_back(f->name, placeholder());
    Cands d = universal ? walk_universal(f->kids[0], f->name, unknown) : walk(f->kids[0], f->name, unknown);
    env_.pop_back();
    return d;
  }

  // Bound while a variable is unknown, so that hints never read a shadowed
  // outer binding of the same name.
  static auto placeholder() -> Element {
    Element e;
    e.tuple = true;
    e.value = -1;
    return e;
  }

  // z occurs once in `side`; solve side = target through + and * on naturals.
  auto solve(const Term& side, Element target, const std::string& z) -> Det {
    Term cur = side;
    for (;;) {
      if (cur->kind == TermNode::Kind::Var) return std::optional<Element>(std::move(target));
      if (cur->kind != TermNode::Kind::App || cur->args.size() != 2 || cur->sort != "nat") return std::nullopt;
      if (cur->name != "+" && cur->name != "*") return std::nullopt;
      bool left = occurrences(cur->args[0], z) == 1;
      const Term& inner = left ? cur->args[0] : cur->args[1];
      Int o = eval_term(m_, left ? cur->args[1] : cur->args[0], env_).value;
      if (cur->name == "+") {
        if (target.value < o) return std::optional<Element>();
        target.value -= o;
      } else {
        if (o == 0) return std::nullopt;
        if (target.value % o != 0) return std::optional<Element>();
        target.value /= o;
      }
      cur = inner;
    }
  }

  const Model& m_;
  const Budget& b_;
  Env env_;
};

}  // namespace

auto eval_formula(const Model& m, const Formula& f, const Env& env, const Budget& b) -> Truth {
  Evaluator ev(m, b, env);
  return ev.eval(f);
}

auto eval_formula(const Model& m, const Formula& f, const Budget& b) -> Truth { return eval_formula(m, f, {}, b); }

}  // namespace ik
