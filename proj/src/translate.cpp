#include "interpkit/interp.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

namespace ik {

auto coord_var(const std::string& v, int j) -> std::string { return v + "." + std::to_string(j); }

auto InterpretationCode::sort_formula(const std::string& s) const -> Formula {
  auto it = Q.find("sort:" + s);
  return it == Q.end() ? nullptr : it->second;
}

namespace {

// Renames every occurrence (free or bound) of the mapped names.
auto rename_term(const Term& t, const std::map<std::string, std::string>& m) -> Term {
  if (t->kind == TermNode::Kind::Var) {
    auto it = m.find(t->name);
    return it == m.end() ? t : var(it->second, t->sort);
  }
  if (t->kind != TermNode::Kind::App) return t;
  std::vector<Term> args;
  for (const auto& a : t->args) args.push_back(rename_term(a, m));
  return app(t->name, t->sort, std::move(args));
}

auto rename_all(const Formula& f, const std::map<std::string, std::string>& m) -> Formula {
  std::vector<Term> ts;
  for (const auto& t : f->terms) ts.push_back(rename_term(t, m));
  std::vector<Formula> ks;
  for (const auto& k : f->kids) ks.push_back(rename_all(k, m));
  std::string name = f->name;
  if (is_quantifier(f->kind)) {
    auto it = m.find(name);
    if (it != m.end()) name = it->second;
  }
  return std::make_shared<const FormulaNode>(FormulaNode{f->kind, name, f->sort, std::move(ts), std::move(ks)});
}

// Renames every binder not in `keep` to a name outside `used`.
auto freshen(const Formula& f, const std::set<std::string>& keep, std::set<std::string>& used) -> Formula {
  std::vector<Formula> ks;
  for (const auto& k : f->kids) ks.push_back(freshen(k, keep, used));
  auto out = std::make_shared<const FormulaNode>(FormulaNode{f->kind, f->name, f->sort, f->terms, std::move(ks)});
  if (!is_quantifier(f->kind) || keep.count(f->name)) return out;
  std::string n = fresh_name(base_name(f->name), used);
  used.insert(n);
  Formula body = rename_all(out->kids[0], {{f->name, n}});
  return std::make_shared<const FormulaNode>(FormulaNode{f->kind, n, f->sort, f->terms, {body}});
}

auto replace_hole(const Formula& f, const Formula& with) -> Formula {
  if (f->kind == FKind::Atom && f->name == "hole" && f->terms.empty()) return with;
  if (f->kids.empty()) return f;
  std::vector<Formula> ks;
  for (const auto& k : f->kids) ks.push_back(replace_hole(k, with));
  return std::make_shared<const FormulaNode>(FormulaNode{f->kind, f->name, f->sort, f->terms, std::move(ks)});
}

auto is_true(const Formula& f) -> bool { return !f; }

auto and_opt(const Formula& a, const Formula& b) -> Formula {
  if (is_true(a)) return b;
  if (is_true(b)) return a;
  return conj(a, b);
}

class Translator {
 public:
  Translator(const InterpretationCode& c, const BoundTemplateFn& t, std::set<std::string> used)
      : c_(c), templates_(t), used_(std::move(used)) {}

  auto run(const Formula& f) -> Formula {
    switch (f->kind) {
      case FKind::Atom:
      case FKind::Eq:
        return atomic(f);
      case FKind::Not:
        return neg(run(f->kids[0]));
      case FKind::And:
        return conj(run(f->kids[0]), run(f->kids[1]));
      case FKind::Or:
        return disj(run(f->kids[0]), run(f->kids[1]));
      case FKind::Imp:
        return imp(run(f->kids[0]), run(f->kids[1]));
      case FKind::Iff:
        return iff(run(f->kids[0]), run(f->kids[1]));
      case FKind::Exists:
      case FKind::Forall: {
        Formula guard = domain(f->name, f->sort);
        Formula body = run(f->kids[0]);
        bool ex = f->kind == FKind::Exists;
        Formula out = ex ? and_opt(guard, body) : (is_true(guard) ? body : imp(guard, body));
        for (int j = c_.dim; j >= 1; --j) {
          std::string v = coord_var(f->name, j);
          out = ex ? exists(v, sort_of(j), out) : forall(v, sort_of(j), out);
        }
        return out;
      }
      case FKind::ExistsLt:
      case FKind::ForallLt:
        return bounded(f);
    }
    throw CodeError("unsupported formula");
  }

 private:
  auto sort_of(int j) const -> const std::string& { return c_.coord_sorts[static_cast<std::size_t>(j) - 1]; }

  // Instance of a code formula: `blocks` maps a variable prefix (x, y, x1, ...) to a source variable.
  auto instance(const Formula& q, const std::map<std::string, std::string>& blocks) -> Formula {
    Binding b;
    for (const auto& [prefix, v] : blocks)
      for (int j = 1; j <= c_.dim; ++j) b[coord_var(prefix, j)] = var(coord_var(v, j), sort_of(j));
    return substitute(q, b, false);
  }

  auto domain(const std::string& v, const std::string& sort) -> Formula {
    Formula u = instance(c_.U, {{"x", v}});
    Formula s = c_.sort_formula(sort);
    return s ? conj(u, instance(s, {{"x", v}})) : u;
  }

  auto lookup(const std::string& sym) const -> const Formula& {
    auto it = c_.Q.find(sym);
    if (it == c_.Q.end()) throw CodeError("symbol " + sym + " missing from code");
    return it->second;
  }

  // Atoms and equalities over variables and constants.
  auto atomic(const Formula& f) -> Formula {
    if (f->kind == FKind::Atom && f->name == "hole") return f;
    std::vector<std::string> args;
    std::vector<std::pair<std::string, std::string>> consts;
    for (const auto& t : f->terms) {
      if (t->kind == TermNode::Kind::Var) {
        args.push_back(t->name);
      } else if (t->kind == TermNode::Kind::Const) {
        std::string k = fresh_name("k", used_);
        used_.insert(k);
        consts.emplace_back(k, t->name);
        args.push_back(k);
      } else {
        throw CodeError("cannot translate term " + render(t) + " outside a quantifier bound");
      }
    }
    Formula core;
    std::map<std::string, std::string> blocks;
    if (f->kind == FKind::Eq) {
      blocks = {{"x", args[0]}, {"y", args[1]}};
      core = instance(c_.E, blocks);
    } else {
      std::string fn = graph_function(f->name);
      const Formula& q = lookup(!fn.empty() && c_.source.functions.count(fn) ? fn : f->name);
      for (std::size_t i = 0; i < args.size(); ++i) blocks["x" + std::to_string(i + 1)] = args[i];
      core = instance(q, blocks);
    }
    for (auto it = consts.rbegin(); it != consts.rend(); ++it) {
      core = conj(instance(lookup(it->second), {{"x1", it->first}}), core);
      for (int j = c_.dim; j >= 1; --j) core = exists(coord_var(it->first, j), sort_of(j), core);
    }
    return core;
  }

  auto bounded(const Formula& f) -> Formula {
    const Term& b = f->terms[0];
    Formula tmpl;
    std::map<std::string, std::string> names;
    Binding tb;
    if (b->kind == TermNode::Kind::Var) {
      tmpl = lookup("bound:" + f->sort);
      for (int j = 1; j <= c_.dim; ++j) names[coord_var("t", j)] = coord_var(b->name, j);
    } else {
      if (!is_closed(b)) throw CodeError("bound " + render(b) + " is neither a variable nor closed");
      Int value = closed_value(b);
      auto it = c_.Q.find("bound:" + f->sort);
      if (it != c_.Q.end()) {
        tmpl = it->second;
      } else if (templates_) {
        if (auto t = templates_(f->sort, value)) tmpl = *t;
      }
      if (!tmpl) throw CodeError("no bounded form for sort " + f->sort);
      for (int j = 2; j <= c_.dim; ++j)
        if (free_vars(tmpl).count(coord_var("t", j)))
          throw CodeError("numeric bound needs a template using only t.1");
      tb[coord_var("t", 1)] = num(value);
    }
    std::set<std::string> keep;
    for (int j = 1; j <= c_.dim; ++j) {
      names[coord_var("x", j)] = coord_var(f->name, j);
      keep.insert(coord_var("x", j));
    }
    Formula guard = domain(f->name, f->sort);
    Formula body = run(f->kids[0]);
    std::set<std::string> avoid = used_;
    for (const auto& v : all_vars(body)) avoid.insert(v);
    for (const auto& v : all_vars(guard)) avoid.insert(v);
    for (const auto& [from, to] : names) avoid.insert(to);
    Formula t = freshen(tmpl, keep, avoid);
    used_ = avoid;
    if (!tb.empty()) t = substitute(t, tb, false);
    t = rename_all(t, names);
    if (f->kind == FKind::ExistsLt) return replace_hole(t, and_opt(guard, body));
    return neg(replace_hole(t, and_opt(guard, neg(body))));
  }

  const InterpretationCode& c_;
  const BoundTemplateFn& templates_;
  std::set<std::string> used_;
};

}  // namespace

auto translate(const InterpretationCode& code, const Formula& f, const BoundTemplateFn& templates) -> Formula {
  Formula g = flatten(f);
  std::set<std::string> used = all_vars(g);
  for (const auto& v : all_vars(f)) used.insert(v);
  Translator tr(code, templates, used);
  return tr.run(g);
}

// ---------------------------------------------------------------- compose

namespace {

// "p.j.k" -> "p.m" with m = (j-1)*di + k.
auto flatten_coords(const Formula& f, int di) -> Formula {
  std::map<std::string, std::string> m;
  for (const auto& v : all_vars(f)) {
    auto b = v.rfind('.');
    if (b == std::string::npos || b == 0) continue;
    auto a = v.rfind('.', b - 1);
    if (a == std::string::npos) continue;
    const std::string js = v.substr(a + 1, b - a - 1);
    const std::string ks = v.substr(b + 1);
    auto digits = [](const std::string& s) {
      return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    };
    if (!digits(js) || !digits(ks)) continue;
    int j = std::stoi(js), k = std::stoi(ks);
    m[v] = v.substr(0, a) + "." + std::to_string((j - 1) * di + k);
  }
  return rename_all(f, m);
}

}  // namespace

auto compose(const InterpretationCode& outer, const InterpretationCode& inner) -> InterpretationCode {
  if (outer.target.name != inner.source.name)
    throw CodeError("cannot compose: " + outer.target.name + " is not " + inner.source.name);
  InterpretationCode c;
  c.dim = outer.dim * inner.dim;
  c.source = outer.source;
  c.target = inner.target;
  auto tr = [&](const Formula& f) { return flatten_coords(translate(inner, f), inner.dim); };
  // Each outer coordinate must itself be a well-formed inner element.
  Formula u = tr(outer.U);
  for (int j = outer.dim; j >= 1; --j) {
    const std::string& s = outer.coord_sorts[static_cast<std::size_t>(j) - 1];
    Binding b;
    for (int k = 1; k <= inner.dim; ++k)
      b[coord_var("x", k)] = var(coord_var("x", (j - 1) * inner.dim + k), inner.coord_sorts[static_cast<std::size_t>(k) - 1]);
    Formula g = substitute(inner.U, b, false);
    if (Formula sf = inner.sort_formula(s)) g = conj(g, substitute(sf, b, false));
    u = conj(g, u);
  }
  c.U = u;
  c.E = tr(outer.E);
  for (const auto& [sym, q] : outer.Q) c.Q[sym] = tr(q);
  finalize(c);
  return c;
}

// ---------------------------------------------------------------- validation

auto ValidationReport::ok() const -> bool {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.failed == 0; });
}

namespace {

using Tuple = std::vector<Element>;

auto named(std::string n) -> Check {
  Check c;
  c.name = std::move(n);
  return c;
}

auto show(const Tuple& t) -> std::string {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? " " : "") + to_string(t[i]);
  return s + ")";
}

struct Validator {
  const InterpretationCode& code;
  const Model& m;
  const Budget& b;

  auto holds(const Formula& f, const std::vector<std::pair<std::string, const Tuple*>>& blocks) const -> Truth {
    Env env;
    for (const auto& [prefix, t] : blocks)
      for (int j = 1; j <= code.dim; ++j) env.emplace_back(coord_var(prefix, j), (*t)[static_cast<std::size_t>(j) - 1]);
    return eval_formula(m, f, env, b);
  }

  auto equiv(const Tuple& x, const Tuple& y) const -> Truth { return holds(code.E, {{"x", &x}, {"y", &y}}); }
};

void note(Check& c, Truth t, const std::string& what) {
  ++c.checked;
  if (t == Truth::False) {
    if (c.failed++ == 0) c.counterexample = what;
  } else if (t == Truth::Unknown) {
    ++c.unknown;
  }
}

template <class F>
void parallel_for(std::size_t n, F&& body) {
  unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 16));
  if (n < 64 || workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

auto validate(const InterpretationCode& code, const Model& target, std::uint64_t bound, const Budget& b)
    -> ValidationReport {
  if (code.target.name != target.signature().name)
    throw CodeError("code targets " + code.target.name + " but the model is " + target.signature().name);
  // Graph checks need the forced result of each function, so solving is always on.
  Budget solving = b;
  solving.solve = true;
  Validator v{code, target, solving};
  ValidationReport rep;

  std::vector<std::vector<Element>> carrier;
  for (const auto& s : code.coord_sorts) {
    std::vector<Element> xs;
    target.enumerate(s, bound, [&](const Element& e) {
      xs.push_back(e);
      return true;
    });
    carrier.push_back(std::move(xs));
  }
  std::vector<Tuple> all{{}};
  for (const auto& xs : carrier) {
    std::vector<Tuple> next;
    for (const auto& t : all)
      for (const auto& x : xs) {
        Tuple u = t;
        u.push_back(x);
        next.push_back(std::move(u));
      }
    all = std::move(next);
  }
  std::vector<Tuple> dom;
  for (const auto& t : all)
    if (v.holds(code.U, {{"x", &t}}) == Truth::True) dom.push_back(t);

  std::map<std::string, std::vector<Tuple>> by_sort;
  for (const auto& s : code.source.sorts) {
    Formula sf = code.sort_formula(s);
    for (const auto& t : dom)
      if (!sf || v.holds(sf, {{"x", &t}}) == Truth::True) by_sort[s].push_back(t);
  }

  Check refl = named("E reflexive"), sym = named("E symmetric"), trans = named("E transitive");
  for (const auto& [s, ts] : by_sort) {
    std::vector<std::vector<std::size_t>> cls(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      note(refl, v.equiv(ts[i], ts[i]), show(ts[i]));
      for (std::size_t j = 0; j < ts.size(); ++j)
        if (i != j && v.equiv(ts[i], ts[j]) == Truth::True) {
          cls[i].push_back(j);
          note(sym, v.equiv(ts[j], ts[i]), show(ts[i]) + " " + show(ts[j]));
        }
    }
    for (std::size_t i = 0; i < ts.size(); ++i)
      for (auto j : cls[i])
        for (auto k : cls[j])
          if (k != i) note(trans, v.equiv(ts[i], ts[k]), show(ts[i]) + " " + show(ts[j]) + " " + show(ts[k]));
  }
  rep.checks.push_back(refl);
  rep.checks.push_back(sym);
  rep.checks.push_back(trans);

  for (const auto& [c, s] : code.source.constants) {
    auto it = code.Q.find(c);
    if (it == code.Q.end()) continue;
    Check ch = named("constant " + c);
    std::vector<const Tuple*> hits;
    for (const auto& t : by_sort[s])
      if (v.holds(it->second, {{"x1", &t}}) == Truth::True) hits.push_back(&t);
    if (hits.empty()) note(ch, Truth::False, "no element in range");
    for (const auto* h : hits) note(ch, v.equiv(*hits[0], *h), show(*hits[0]) + " " + show(*h));
    rep.checks.push_back(ch);
  }

  for (const auto& [f, fs] : code.source.functions) {
    auto it = code.Q.find(f);
    if (it == code.Q.end()) continue;
    Check ch = named("function " + f);
    std::vector<std::vector<const Tuple*>> combos{{}};
    for (const auto& s : fs.args) {
      std::vector<std::vector<const Tuple*>> next;
      for (const auto& c : combos)
        for (const auto& t : by_sort[s]) {
          auto u = c;
          u.push_back(&t);
          next.push_back(std::move(u));
        }
      combos = std::move(next);
    }
    const auto& results = by_sort[fs.result];
    std::mutex mu;
    parallel_for(combos.size(), [&](std::size_t ci) {
      const auto& args = combos[ci];
      std::vector<std::pair<std::string, const Tuple*>> blocks;
      for (std::size_t i = 0; i < args.size(); ++i) blocks.emplace_back("x" + std::to_string(i + 1), args[i]);
      std::string key = "x" + std::to_string(args.size() + 1);
      const Tuple* first = nullptr;
      Check local = named(ch.name);
      for (const auto& r : results) {
        auto bl = blocks;
        bl.emplace_back(key, &r);
        Truth t = v.holds(it->second, bl);
        if (t == Truth::Unknown) ++local.unknown;
        if (t != Truth::True) continue;
        if (!first) {
          first = &r;
          ++local.checked;
        } else {
          std::string what;
          for (const auto* a : args) what += show(*a) + " ";
          note(local, v.equiv(*first, r), what + "-> " + show(*first) + " and " + show(r));
        }
      }
      std::lock_guard<std::mutex> lock(mu);
      ch.checked += local.checked;
      ch.unknown += local.unknown;
      if (local.failed && ch.failed == 0) ch.counterexample = local.counterexample;
      ch.failed += local.failed;
    });
    rep.checks.push_back(ch);
  }
  return rep;
}

// ---------------------------------------------------------------- transfer

auto transfer_check(const InterpretationCode& code, const Model& source, const Model& target,
                    const std::vector<Formula>& sentences, const Budget& source_budget,
                    const Budget& target_budget) -> TransferReport {
  TransferReport rep;
  rep.total = sentences.size();
  std::vector<Disagreement> found(sentences.size());
  std::vector<char> bad(sentences.size(), 0);
  parallel_for(sentences.size(), [&](std::size_t i) {
    Truth a = eval_formula(source, sentences[i], source_budget);
    Truth b = eval_formula(target, translate(code, sentences[i]), target_budget);
    if (a != b) {
      found[i] = {i, a, b};
      bad[i] = 1;
    }
  });
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (bad[i])
      rep.disagreements.push_back(found[i]);
    else
      ++rep.agree;
  }
  return rep;
}

}  // namespace ik
