#include "interpkit/codec.hpp"

#include <map>
#include <stdexcept>

namespace ik {

namespace {

using S = std::string;

const S kTwo = "(+ 1 1)";

// Binds tw, ty with tw(tw+1)/2 <= tz < (tw+1)(tw+2)/2 and ty = tz - tw(tw+1)/2.
auto unpair_core(const S& inner) -> S {
  return "(exists-lt (tw (+ tz 1)) (and (<= (* tw (+ tw 1)) (* " + kTwo + " tz)) (and (< (* " + kTwo +
         " tz) (* (+ tw 1) (+ tw " + kTwo + "))) (exists (ty) (and (= (* " + kTwo + " tz) (+ (* tw (+ tw 1)) (* " +
         kTwo + " ty))) " + inner + ")))))";
}

// Binds the length of the tuple coded by n to K (and its iterated pairing to ty).
auto with_len(const S& n, const S& k, const S& body, bool word) -> S {
  S core = word ? "(exists (" + k + ") (and (= (+ " + k + " ty) tw) (and (or (not (= " + k + " 0)) (= ty 0)) " +
                      body + ")))"
                : "(exists (" + k + ") (and (= (+ " + k + " ty) (+ tw 1)) " + body + "))";
  return "(exists (tz) (and (= tz " + n + ") " + unpair_core(core) + "))";
}

auto beta_is(const S& j, const S& v) -> S {
  S m = "(+ 1 (* (+ " + j + " 1) td))";
  return "(exists (tq) (and (= tc (+ (* tq " + m + ") " + v + ")) (< " + v + " " + m + ")))";
}

// beta(tc, td, j) = p_j for j = 1..tl, with p_tl = ty and p_{j} the first coordinate of p_{j+1}.
auto chain() -> S {
  S first = "(exists (tz) (and (= tz tv) " + unpair_core("(= (+ tu ty) tw)") + "))";
  return "(and " + beta_is("tl", "ty") + " (forall-lt (tj tl) (or (= tj 0) (exists (tu) (and " + beta_is("tj", "tu") +
         " (exists (tv) (and " + beta_is("(+ tj 1)", "tv") + " " + first + ")))))))";
}

auto component_of(const S& a, const S& i) -> S {
  S paired = "(= (* " + kTwo + " tv) (+ (* (+ tu " + a + ") (+ (+ tu " + a + ") 1)) (* " + kTwo + " " + a + ")))";
  return "(or (and (= " + i + " 1) " + beta_is("1", a) + ") (exists-lt (tj " + i + ") (and (= (+ tj 1) " + i +
         ") (and (<= 1 tj) (exists (tu) (and " + beta_is("tj", "tu") + " (exists (tv) (and " +
         beta_is("(+ tj 1)", "tv") + " " + paired + "))))))))";
}

auto t_text(const S& n, const S& a, const S& i, bool word) -> S {
  // te (we for words) is the entry itself, supplied by a hint once ti is known.
  S e = word ? "we" : "te";
  S body = "(and (<= 1 " + i + ") (and (<= " + i + " tl) (exists (ti) (and (= ti " + i + ") (exists (" + e +
           ") (and (= " + e + " " + a + ") (exists (tc) (exists (td) (and " + component_of(e, "ti") + " " + chain() +
           ")))))))))";
  return with_len(n, "tl", body, word);
}

auto l_text(const S& n, const S& k, bool word) -> S { return with_len(n, "tl", "(= tl " + k + ")", word); }

auto concat_text(bool word) -> S {
  S e = word ? "de" : "ce";
  S f = word ? "df" : "cf";
  S x = word ? "dx" : "cx";
  S y = word ? "dy" : "cy";
  S z = word ? "dz" : "cz";
  S first = "(forall-lt (ci (+ ca 1)) (imp (<= 1 ci) (exists (" + e + ") (and " + t_text(x, e, "ci", word) + " " +
            t_text(z, e, "ci", word) + "))))";
  S second = "(forall-lt (ci (+ cc 1)) (imp (< ca ci) (exists (cj) (and (= (+ cj ca) ci) (exists (" + f + ") (and " +
             t_text(y, f, "cj", word) + " " + t_text(z, f, "ci", word) + "))))))";
  S core = "(and (= cc (+ ca cb)) (and " + first + " " + second + "))";
  S lens = with_len(x, "ca", with_len(y, "cb", with_len(z, "cc", core, word), word), word);
  return "(exists (" + x + ") (and (= " + x + " x) (exists (" + y + ") (and (= " + y + " y) (exists (" + z +
         ") (and (= " + z + " z) " + lens + "))))))";
}

auto member_text() -> S {
  return with_len("x", "mk", "(exists-lt (mi (+ mk 1)) (and (<= 1 mi) " + t_text("x", "a", "mi", false) + "))", false);
}

auto perm_text() -> S {
  S fwd = "(forall-lt (pk (+ n 1)) (imp (<= 1 pk) (exists-lt (pi (+ n 1)) (and (<= 1 pi) (and " +
          t_text("s", "pk", "pi", false) + " (forall-lt (pj (+ n 1)) (imp (and (<= 1 pj) " +
          t_text("s", "pk", "pj", false) + ") (= pj pi))))))))";
  S bwd = "(forall-lt (pi (+ n 1)) (imp (<= 1 pi) (exists-lt (pk (+ n 1)) (and (<= 1 pk) (and " +
          t_text("s", "pk", "pi", false) + " (forall-lt (pj (+ n 1)) (imp (and (<= 1 pj) " +
          t_text("s", "pj", "pi", false) + ") (= pj pk))))))))";
  return with_len("s", "pl", "(and (= pl n) (and " + fwd + " " + bwd + "))", false);
}

// r_1 = s_1 (or [s_1 = a]), r_{j+1} = f(r_j, s_{j+1}); the result is r at the last index.
auto fold_text(const S& kind) -> S {
  if (kind == "pow") {
    S step = "(forall-lt (fj pk) (or (= fj 0) (exists (fu) (and " + t_text("fxw", "fu", "fj", false) +
             " (exists (fw) (and " + t_text("fxw", "fw", "(+ fj 1)", false) + " (= fw (* fu pa))))))))";
    S inner = "(exists (fxw) (and " + l_text("fxw", "pk", false) + " (and " + t_text("fxw", "pa", "1", false) +
              " (and " + step + " " + t_text("fxw", "r", "pk", false) + "))))";
    return "(exists (pa) (and (= pa a) (exists (pk) (and (= pk k) (and (<= 1 pk) " + inner + ")))))";
  }
  S fx = kind == "sum" ? "fxs" : kind == "prod" ? "fxp" : "fxc";
  S rel = kind == "sum"    ? "(= fw (+ fu fv))"
          : kind == "prod" ? "(= fw (* fu fv))"
                           : "(or (and (= fv ft) (= fw (+ fu 1))) (and (not (= fv ft)) (= fw fu)))";
  S first = kind == "count" ? "(exists (fa) (and " + t_text("fs", "fa", "1", false) + " (or (and (= fa ft) " +
                                  t_text(fx, "1", "1", false) + ") (and (not (= fa ft)) " +
                                  t_text(fx, "0", "1", false) + "))))"
                            : "(exists (fa) (and " + t_text("fs", "fa", "1", false) + " " +
                                  t_text(fx, "fa", "1", false) + "))";
  S step = "(forall-lt (fj fl) (or (= fj 0) (exists (fu) (and " + t_text(fx, "fu", "fj", false) +
           " (exists (fv) (and " + t_text("fs", "fv", "(+ fj 1)", false) + " (exists (fw) (and " +
           t_text(fx, "fw", "(+ fj 1)", false) + " " + rel + "))))))))";
  S inner = "(exists (" + fx + ") (and " + l_text(fx, "fl", false) + " (and " + first + " (and " + step + " " +
            t_text(fx, "r", "fl", false) + "))))";
  S body = with_len("fs", "fl", inner, false);
  if (kind == "count") body = "(exists (ft) (and (= ft a) " + body + "))";
  return "(exists (fs) (and (= fs s) " + body + "))";
}

auto emit_text(const S& kind) -> S {
  if (kind == "T") return t_text("n", "a", "i", false);
  if (kind == "L") return l_text("n", "k", false);
  if (kind == "concat") return concat_text(false);
  if (kind == "member") return member_text();
  if (kind == "perm") return perm_text();
  if (kind == "sum" || kind == "prod" || kind == "count" || kind == "pow") return fold_text(kind);
  if (kind == "wT") return t_text("n", "a", "i", true);
  if (kind == "wL") return l_text("n", "k", true);
  if (kind == "wconcat") return concat_text(true);
  if (kind == "wvalid") return with_len("n", "tl", "(= 0 0)", true);
  throw std::invalid_argument("unknown formula kind: " + kind);
}

// ---------------------------------------------------------------- hints

auto lookup(const Env& env, const S& base) -> const Int* {
  const Element* e = env_lookup_base(env, base);
  return e && !e->tuple ? &e->value : nullptr;
}

auto decisive(std::vector<Int> vs) -> Hint {
  Hint h;
  h.decisive = true;
  for (auto& v : vs) h.candidates.push_back(Element::scalar(std::move(v)));
  return h;
}

auto component_hint(const Int* code, const Int* idx, bool word, const Int& shift = 0) -> std::optional<Hint> {
  if (!code || !idx) return std::nullopt;
  std::optional<NatTuple> t;
  if (word)
    t = decode_word_code(*code);
  else
    t = decode_tuple(*code);
  Int i = *idx + shift;
  if (!t || i < 1 || i > t->size()) return decisive({});
  return decisive({(*t)[static_cast<std::size_t>(i) - 1]});
}

auto fold_target(const Env& env) -> std::pair<S, const Int*> {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->first.rfind("fx", 0) == 0 && !it->second.tuple) return {base_name(it->first), &it->second.value};
  return {"", nullptr};
}

auto chain_code(const Int& m, const Int& len) -> std::pair<Int, Int> {
  thread_local std::map<std::pair<Int, Int>, std::pair<Int, Int>> cache;
  auto key = std::make_pair(m, len);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  auto l = static_cast<std::size_t>(len);
  NatTuple p(l);
  p[l - 1] = m;
  for (std::size_t j = l - 1; j >= 1; --j) p[j - 1] = unpair(p[j]).first;
  auto cd = beta_code(p);
  if (cache.size() > 4096) cache.clear();
  cache.emplace(key, cd);
  return cd;
}

}  // namespace

auto emit_formula(const std::string& kind) -> Formula { return parse(emit_text(kind), builtin_signature("arith")); }

auto emit_kinds() -> std::vector<std::string> {
  return {"T", "L", "concat", "member", "perm", "sum", "prod", "count", "pow", "wT", "wL", "wconcat", "wvalid"};
}

auto codec_hints() -> HintFn {
  return [](const std::string& base, const Env& env) -> std::optional<Hint> {
    if (base == "tw") {
      const Int* tz = lookup(env, "tz");
      if (!tz) return std::nullopt;
      Int w = (boost::multiprecision::sqrt(Int(8 * *tz + 1)) - 1) / 2;
      return decisive({w});
    }
    if (base == "tc" || base == "td") {
      const Int* m = lookup(env, "ty");
      const Int* len = lookup(env, "tl");
      if (!m || !len || *len < 1 || *len > 100000) return std::nullopt;
      auto [c, d] = chain_code(*m, *len);
      return decisive({base == "tc" ? c : d});
    }
    if (base == "tu" || base == "tv") {
      const Int* c = lookup(env, "tc");
      const Int* d = lookup(env, "td");
      const Int* j = lookup(env, "tj");
      if (!c || !d || !j) return std::nullopt;
      return decisive({beta(*c, *d, base == "tu" ? *j : Int(*j + 1))});
    }
    if (base == "te") return component_hint(lookup(env, "tz"), lookup(env, "ti"), false);
    if (base == "we") return component_hint(lookup(env, "tz"), lookup(env, "ti"), true);
    if (base == "ce") return component_hint(lookup(env, "cx"), lookup(env, "ci"), false);
    if (base == "cf") return component_hint(lookup(env, "cy"), lookup(env, "cj"), false);
    if (base == "de") return component_hint(lookup(env, "dx"), lookup(env, "ci"), true);
    if (base == "df") return component_hint(lookup(env, "dy"), lookup(env, "cj"), true);
    if (base == "cz" || base == "dz") {
      // Code of the concatenation, so that an unknown result is pinned.
      bool word = base == "dz";
      const Int* x = lookup(env, word ? "dx" : "cx");
      const Int* y = lookup(env, word ? "dy" : "cy");
      if (!x || !y) return std::nullopt;
      auto a = word ? decode_word_code(*x) : std::optional<NatTuple>(decode_tuple(*x));
      auto b = word ? decode_word_code(*y) : std::optional<NatTuple>(decode_tuple(*y));
      if (!a || !b) return decisive({});
      a->insert(a->end(), b->begin(), b->end());
      return decisive({word ? encode_word_code(*a) : encode_tuple(*a)});
    }
    if (base == "fa") {
      Int one = 1;
      return component_hint(lookup(env, "fs"), &one, false);
    }
    if (base == "fu") return component_hint(fold_target(env).second, lookup(env, "fj"), false);
    if (base == "fw") return component_hint(fold_target(env).second, lookup(env, "fj"), false, 1);
    if (base == "fv") return component_hint(lookup(env, "fs"), lookup(env, "fj"), false, 1);
    if (base == "fxw") {
      const Int* a = lookup(env, "pa");
      const Int* k = lookup(env, "pk");
      if (!a || !k || *k < 1 || *k > 4096) return std::nullopt;
      NatTuple r{*a};
      for (Int i = 1; i < *k; ++i) r.push_back(r.back() * *a);
      return decisive({encode_tuple(r)});
    }
    if (base == "fxs" || base == "fxp" || base == "fxc") {
      const Int* s = lookup(env, "fs");
      if (!s) return std::nullopt;
      NatTuple t = decode_tuple(*s);
      NatTuple r;
      if (base == "fxc") {
        const Int* a = lookup(env, "ft");
        if (!a) return std::nullopt;
        for (const auto& x : t) r.push_back((r.empty() ? Int(0) : r.back()) + (x == *a ? 1 : 0));
      } else {
        for (const auto& x : t)
          r.push_back(r.empty() ? x : base == "fxs" ? Int(r.back() + x) : Int(r.back() * x));
      }
      return decisive({encode_tuple(r)});
    }
    return std::nullopt;
  };
}

auto codec_budget() -> Budget {
  Budget b;
  b.hint_fn = codec_hints();
  b.solve = true;
  return b;
}

}  // namespace ik
